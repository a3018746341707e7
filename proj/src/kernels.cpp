#include "weavemc/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "weavemc/errors.hpp"

namespace weavemc {

namespace {

ReferenceMeasure build_reference(ReferenceKind kind, const Preconditioner& pre) {
  switch (kind) {
    case ReferenceKind::Lebesgue: return ReferenceMeasure::lebesgue();
    case ReferenceKind::Gaussian: return ReferenceMeasure::gaussian(pre);
    case ReferenceKind::HaarMixture: return ReferenceMeasure::haar_mixture(pre);
  }
  throw std::logic_error("build_reference: unknown kind");
}

// v^T scale^{-1} v through the Cholesky factor.
double quad_form_inv(const Preconditioner& pre, const Eigen::VectorXd& v) {
  return pre.factor.triangularView<Eigen::Lower>().solve(v).squaredNorm();
}

double jittered_angle(double h, double jitter, Rng& rng) {
  if (jitter <= 0.0) return h;
  return h * (1.0 + jitter * (2.0 * rng.uniform() - 1.0));
}

}  // namespace

bool metropolis_accept(double alpha_log, Rng& rng, bool* nan_failure) {
  const double u = rng.uniform();
  if (std::isnan(alpha_log)) {
    if (nan_failure) *nan_failure = true;
    return false;
  }
  return u < std::exp(std::min(alpha_log, 0.0));
}

Kernel::Kernel(const TargetModel& model, Preconditioner pre, ReferenceKind kind)
    : model_(&model), pre_(std::move(pre)), ref_(build_reference(kind, pre_)) {
  if (pre_.dim() != model.dim())
    throw config_error("kernel: preconditioner dimension does not match the target");
}

KernelState Kernel::init_state(const Eigen::VectorXd& x0, std::uint64_t seed) const {
  if (x0.size() != model_->dim()) throw config_error("kernel: start point dimension mismatch");
  const double u = potential_wrt(*model_, ref_, x0);
  if (!std::isfinite(u))
    throw numeric_error("kernel: start point has non-finite reference potential");
  return KernelState(x0, u, seed);
}

StepOutcome Kernel::finish_step(KernelState& state, Eigen::VectorXd proposal,
                                double proposal_potential, double alpha_log) const {
  StepOutcome out;
  bool nan_fail = false;
  out.accepted = metropolis_accept(alpha_log, state.rng, &nan_fail);
  out.flag = nan_fail ? StepFlag::numeric_failure : StepFlag::ok;
  out.alpha = nan_fail ? 0.0 : std::exp(std::min(alpha_log, 0.0));
  out.proposal = std::move(proposal);
  if (out.accepted) {
    state.x = out.proposal;
    state.potential_cached = proposal_potential;
  }
  out.log_like_leb = -lebesgue_potential(ref_, state.potential_cached, state.x);
  return out;
}

StepOutcome Kernel::reject_step(const KernelState& state, Eigen::VectorXd proposal,
                                StepFlag flag) const {
  StepOutcome out;
  out.proposal = std::move(proposal);
  out.flag = flag;
  out.log_like_leb = -lebesgue_potential(ref_, state.potential_cached, state.x);
  return out;
}

// ---------------------------------------------------------------------------

RwmKernel::RwmKernel(const TargetModel& model, Preconditioner pre, double s)
    : Kernel(model, std::move(pre), ReferenceKind::Lebesgue), s_(s) {
  if (!(s_ > 0.0)) throw config_error("rwm: scale s must be positive");
}

StepOutcome RwmKernel::step(KernelState& state) const {
  Eigen::VectorXd y =
      state.x + std::sqrt(s_) * (pre_.factor * state.rng.normal_vector(pre_.dim()));
  if (!y.allFinite()) return reject_step(state, std::move(y), StepFlag::numeric_failure);
  const double uy = potential_wrt(*model_, ref_, y);
  return finish_step(state, std::move(y), uy, state.potential_cached - uy);
}

// ---------------------------------------------------------------------------

PcnKernel::PcnKernel(const TargetModel& model, Preconditioner pre, double h)
    : Kernel(model, std::move(pre), ReferenceKind::Gaussian), h_(h) {}

StepOutcome PcnKernel::step(KernelState& state) const {
  Eigen::VectorXd y = pre_.center + std::cos(h_) * (state.x - pre_.center) +
                      std::sin(h_) * (pre_.factor * state.rng.normal_vector(pre_.dim()));
  if (!y.allFinite()) return reject_step(state, std::move(y), StepFlag::numeric_failure);
  const double uy = potential_wrt(*model_, ref_, y);
  return finish_step(state, std::move(y), uy, state.potential_cached - uy);
}

// ---------------------------------------------------------------------------

MpcnKernel::MpcnKernel(const TargetModel& model, Preconditioner pre, double h)
    : Kernel(model, std::move(pre), ReferenceKind::HaarMixture), h_(h) {}

StepOutcome MpcnKernel::step(KernelState& state) const {
  const double dx = pre_.mahalanobis_sq(state.x);
  if (dx <= 0.0) return reject_step(state, state.x, StepFlag::singular);
  const double d = static_cast<double>(pre_.dim());
  const double g = state.rng.gamma(0.5 * d, 0.5 * dx);
  Eigen::VectorXd y = pre_.center + std::cos(h_) * (state.x - pre_.center) +
                      (std::sin(h_) / std::sqrt(g)) *
                          (pre_.factor * state.rng.normal_vector(pre_.dim()));
  if (!y.allFinite()) return reject_step(state, std::move(y), StepFlag::numeric_failure);
  const double uy = potential_wrt(*model_, ref_, y);
  return finish_step(state, std::move(y), uy, state.potential_cached - uy);
}

// ---------------------------------------------------------------------------

WeaveKernel::WeaveKernel(const TargetModel& model, Preconditioner pre, WeaveParams params)
    : Kernel(model, std::move(pre), ReferenceKind::Gaussian), params_(params) {}

StepOutcome WeaveKernel::step(KernelState& state) const {
  const double h = jittered_angle(params_.h, params_.jitter, state.rng);
  Eigen::VectorXd v = pre_.sample_gaussian(state.rng);
  GradientFn grad = [this](const Eigen::VectorXd& x) { return gradient_wrt(*model_, ref_, x); };
  PhasePoint end;
  try {
    end = weave(PhasePoint(state.x, std::move(v)), h, params_.steps, pre_, grad);
  } catch (const numeric_error&) {
    return reject_step(state, state.x, StepFlag::numeric_failure);
  }
  const double uy = potential_wrt(*model_, ref_, end.x);
  return finish_step(state, std::move(end.x), uy, state.potential_cached - uy);
}

// ---------------------------------------------------------------------------

HaarWeaveKernel::HaarWeaveKernel(const TargetModel& model, Preconditioner pre,
                                 WeaveParams params)
    : Kernel(model, std::move(pre), ReferenceKind::HaarMixture), params_(params) {}

StepOutcome HaarWeaveKernel::step(KernelState& state) const {
  const double dx = pre_.mahalanobis_sq(state.x);
  if (dx <= 0.0) return reject_step(state, state.x, StepFlag::singular);
  const double h = jittered_angle(params_.h, params_.jitter, state.rng);
  const double d = static_cast<double>(pre_.dim());
  const double g = state.rng.gamma(0.5 * d, 0.5 * dx);
  Eigen::VectorXd v = pre_.sample_gaussian(state.rng, 1.0 / std::sqrt(g));
  GradientFn grad = [this](const Eigen::VectorXd& x) { return gradient_wrt(*model_, ref_, x); };
  PhasePoint end;
  try {
    end = weave(PhasePoint(state.x, std::move(v)), h, params_.steps, pre_, grad);
  } catch (const numeric_error&) {
    return reject_step(state, state.x, StepFlag::numeric_failure);
  }
  const double uy = potential_wrt(*model_, ref_, end.x);
  if (!std::isfinite(uy)) return reject_step(state, std::move(end.x), StepFlag::singular);
  return finish_step(state, std::move(end.x), uy, state.potential_cached - uy);
}

// ---------------------------------------------------------------------------

InfHmcKernel::InfHmcKernel(const TargetModel& model, Preconditioner pre, double h, int leaps)
    : Kernel(model, std::move(pre), ReferenceKind::Gaussian), h_(h), leaps_(leaps) {
  if (leaps_ < 1) throw config_error("inf_hmc: leaps must be >= 1");
}

StepOutcome InfHmcKernel::step(KernelState& state) const {
  Eigen::VectorXd v = pre_.sample_gaussian(state.rng);
  const double h0 = state.potential_cached +
                    0.5 * (pre_.mahalanobis_sq(state.x) + pre_.mahalanobis_sq(v));
  GradientFn grad = [this](const Eigen::VectorXd& x) { return gradient_wrt(*model_, ref_, x); };
  PhasePoint z(state.x, std::move(v));
  try {
    for (int l = 0; l < leaps_; ++l) z = infhmc_step(z, h_, pre_, grad);
  } catch (const numeric_error&) {
    return reject_step(state, state.x, StepFlag::numeric_failure);
  }
  const double uy = potential_wrt(*model_, ref_, z.x);
  const double h1 = uy + 0.5 * (pre_.mahalanobis_sq(z.x) + pre_.mahalanobis_sq(z.v));
  return finish_step(state, std::move(z.x), uy, h0 - h1);
}

// ---------------------------------------------------------------------------

HugKernel::HugKernel(const TargetModel& model, Preconditioner pre, double h, int leaps)
    : Kernel(model, std::move(pre), ReferenceKind::Lebesgue), h_(h), leaps_(leaps) {
  if (leaps_ < 1) throw config_error("hug: leaps must be >= 1");
}

StepOutcome HugKernel::step(KernelState& state) const {
  Eigen::VectorXd v = pre_.factor * state.rng.normal_vector(pre_.dim());
  const double h0 = state.potential_cached + 0.5 * quad_form_inv(pre_, v);
  GradientFn grad_k = [this](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    return pre_.scale_inv * w;
  };
  GradientFn grad_xi = [this](const Eigen::VectorXd& x) { return model_->gradient(x); };
  PhasePoint z(state.x, std::move(v));
  try {
    for (int l = 0; l < leaps_; ++l) z = hug_step(z, h_, pre_, grad_k, grad_xi);
  } catch (const numeric_error&) {
    return reject_step(state, state.x, StepFlag::numeric_failure);
  }
  const double uy = potential_wrt(*model_, ref_, z.x);
  const double h1 = uy + 0.5 * quad_form_inv(pre_, z.v);
  return finish_step(state, std::move(z.x), uy, h0 - h1);
}

// ---------------------------------------------------------------------------

HmcKernel::HmcKernel(const TargetModel& model, Preconditioner pre, double h, int leaps)
    : Kernel(model, std::move(pre), ReferenceKind::Lebesgue), h_(h), leaps_(leaps) {
  if (leaps_ < 1) throw config_error("hmc: leaps must be >= 1");
}

StepOutcome HmcKernel::step(KernelState& state) const {
  Eigen::VectorXd v = pre_.factor * state.rng.normal_vector(pre_.dim());
  const double h0 = state.potential_cached + 0.5 * quad_form_inv(pre_, v);
  GradientFn grad_u = [this](const Eigen::VectorXd& x) { return model_->gradient(x); };
  GradientFn grad_k = [this](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    return pre_.scale_inv * w;
  };
  PhasePoint z(state.x, std::move(v));
  try {
    for (int l = 0; l < leaps_; ++l) z = leapfrog_step(z, h_, grad_u, grad_k);
  } catch (const numeric_error&) {
    return reject_step(state, state.x, StepFlag::numeric_failure);
  }
  const double uy = potential_wrt(*model_, ref_, z.x);
  const double h1 = uy + 0.5 * quad_form_inv(pre_, z.v);
  return finish_step(state, std::move(z.x), uy, h0 - h1);
}

// ---------------------------------------------------------------------------

std::unique_ptr<Kernel> make_kernel(const std::string& name, const TargetModel& model,
                                    Preconditioner pre, const KernelSettings& settings) {
  const double d = static_cast<double>(model.dim());
  const double h = settings.h.value_or(0.5);
  const double s = settings.s.value_or(2.38 * 2.38 / d);
  if (name == "rwm") return std::make_unique<RwmKernel>(model, std::move(pre), s);
  if (name == "pcn") return std::make_unique<PcnKernel>(model, std::move(pre), h);
  if (name == "mpcn") return std::make_unique<MpcnKernel>(model, std::move(pre), h);
  if (name == "wm")
    return std::make_unique<WeaveKernel>(model, std::move(pre),
                                         WeaveParams(h, settings.leaps, settings.jitter));
  if (name == "hwm")
    return std::make_unique<HaarWeaveKernel>(model, std::move(pre),
                                             WeaveParams(h, settings.leaps, settings.jitter));
  if (name == "inf_hmc")
    return std::make_unique<InfHmcKernel>(model, std::move(pre), h, settings.leaps);
  if (name == "hug") return std::make_unique<HugKernel>(model, std::move(pre), h, settings.leaps);
  if (name == "hmc") return std::make_unique<HmcKernel>(model, std::move(pre), h, settings.leaps);
  throw config_error("unknown kernel '" + name + "'");
}

ReferenceKind kernel_reference_kind(const std::string& name) {
  if (name == "rwm" || name == "hug" || name == "hmc") return ReferenceKind::Lebesgue;
  if (name == "pcn" || name == "wm" || name == "inf_hmc") return ReferenceKind::Gaussian;
  if (name == "mpcn" || name == "hwm") return ReferenceKind::HaarMixture;
  throw config_error("unknown kernel '" + name + "'");
}

}  // namespace weavemc
