#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Core>

#include "weavemc/phase.hpp"
#include "weavemc/rng.hpp"
#include "weavemc/target.hpp"
#include "weavemc/transforms.hpp"

namespace weavemc {

// Per-chain state. potential_cached always equals the potential of x relative
// to the kernel's reference measure.
struct KernelState {
  Eigen::VectorXd x;
  double potential_cached = 0.0;
  Rng rng;

  KernelState(Eigen::VectorXd x_, double potential, std::uint64_t seed)
      : x(std::move(x_)), potential_cached(potential), rng(seed) {}
};

enum class StepFlag { ok, numeric_failure, singular };

struct StepOutcome {
  Eigen::VectorXd proposal;
  double alpha = 0.0;       // min{1, exp(alpha_log)}, 0 when the step failed
  bool accepted = false;
  double log_like_leb = 0;  // -U_lebesgue at the state after the step
  StepFlag flag = StepFlag::ok;
};

// Accepts with probability min{1, exp(alpha_log)}. Always consumes exactly
// one uniform draw. NaN rejects and sets *nan_failure when provided.
bool metropolis_accept(double alpha_log, Rng& rng, bool* nan_failure = nullptr);

// Single-step Markov kernel over a target model with a shared preconditioner.
class Kernel {
 public:
  Kernel(const TargetModel& model, Preconditioner pre, ReferenceKind kind);
  virtual ~Kernel() = default;

  virtual std::string_view name() const = 0;
  ReferenceKind reference_kind() const { return ref_.kind(); }
  const ReferenceMeasure& reference() const { return ref_; }
  const TargetModel& model() const { return *model_; }
  const Preconditioner& pre() const { return pre_; }

  // Advances the chain in place and reports the step.
  virtual StepOutcome step(KernelState& state) const = 0;

  KernelState init_state(const Eigen::VectorXd& x0, std::uint64_t seed) const;

  // Scalar tuned by the acceptance-rate criterion (h, or s for the random
  // walk) together with its monotone search bracket.
  virtual double tuned_param() const = 0;
  virtual void set_tuned_param(double value) = 0;
  virtual std::pair<double, double> tuning_bracket() const = 0;

 protected:
  // Shared accept/commit logic; evaluates the proposal potential lazily via
  // the supplied value.
  StepOutcome finish_step(KernelState& state, Eigen::VectorXd proposal,
                          double proposal_potential, double alpha_log) const;
  StepOutcome reject_step(const KernelState& state, Eigen::VectorXd proposal,
                          StepFlag flag) const;

  const TargetModel* model_;
  Preconditioner pre_;
  ReferenceMeasure ref_;
};

// Random-walk Metropolis with proposal N(x, s * scale).
class RwmKernel final : public Kernel {
 public:
  RwmKernel(const TargetModel& model, Preconditioner pre, double s);
  std::string_view name() const override { return "rwm"; }
  StepOutcome step(KernelState& state) const override;
  double tuned_param() const override { return s_; }
  void set_tuned_param(double value) override { s_ = value; }
  std::pair<double, double> tuning_bracket() const override { return {1e-8, 1e4}; }

 private:
  double s_;
};

// Preconditioned Crank-Nicolson: y = center + cos h (x - center) + sin h F w.
class PcnKernel final : public Kernel {
 public:
  PcnKernel(const TargetModel& model, Preconditioner pre, double h);
  std::string_view name() const override { return "pcn"; }
  StepOutcome step(KernelState& state) const override;
  double tuned_param() const override { return h_; }
  void set_tuned_param(double value) override { h_ = value; }
  std::pair<double, double> tuning_bracket() const override { return {1e-4, M_PI_2}; }

 private:
  double h_;
};

// Mixed preconditioned Crank-Nicolson: the pCN proposal under a Gamma-mixed
// scale g ~ Gamma(d/2, mahalanobis_sq(x)/2), Haar-mixture reference.
class MpcnKernel final : public Kernel {
 public:
  MpcnKernel(const TargetModel& model, Preconditioner pre, double h);
  std::string_view name() const override { return "mpcn"; }
  StepOutcome step(KernelState& state) const override;
  double tuned_param() const override { return h_; }
  void set_tuned_param(double value) override { h_ = value; }
  std::pair<double, double> tuning_bracket() const override { return {1e-4, M_PI_2}; }

 private:
  double h_;
};

// Weave-Metropolis: velocity refreshed from N(center, scale), an L-step weave
// trajectory, and acceptance on the Gaussian-reference potential alone.
// The tuning bracket stops short of pi/2: near a quarter turn the rotation
// aliases and the acceptance rate is no longer monotone in h.
class WeaveKernel final : public Kernel {
 public:
  WeaveKernel(const TargetModel& model, Preconditioner pre, WeaveParams params);
  std::string_view name() const override { return "wm"; }
  StepOutcome step(KernelState& state) const override;
  double tuned_param() const override { return params_.h; }
  void set_tuned_param(double value) override { params_.h = value; }
  std::pair<double, double> tuning_bracket() const override { return {1e-4, 1.2}; }

 private:
  WeaveParams params_;
};

// Haar-Weave-Metropolis: g ~ Gamma(d/2, mahalanobis_sq(x)/2), velocity from
// N(center, scale / g), weave trajectory, acceptance on the Haar-mixture
// potential.
class HaarWeaveKernel final : public Kernel {
 public:
  HaarWeaveKernel(const TargetModel& model, Preconditioner pre, WeaveParams params);
  std::string_view name() const override { return "hwm"; }
  StepOutcome step(KernelState& state) const override;
  double tuned_param() const override { return params_.h; }
  void set_tuned_param(double value) override { params_.h = value; }
  std::pair<double, double> tuning_bracket() const override { return {1e-4, 1.2}; }

 private:
  WeaveParams params_;
};

// Kick / rotate / kick integrator with acceptance on the full Hamiltonian
// U_gauss(x) + (mahalanobis_sq(x) + mahalanobis_sq(v)) / 2.
class InfHmcKernel final : public Kernel {
 public:
  InfHmcKernel(const TargetModel& model, Preconditioner pre, double h, int leaps);
  std::string_view name() const override { return "inf_hmc"; }
  StepOutcome step(KernelState& state) const override;
  double tuned_param() const override { return h_; }
  void set_tuned_param(double value) override { h_ = value; }
  std::pair<double, double> tuning_bracket() const override { return {1e-4, M_PI_2}; }

 private:
  double h_;
  int leaps_;
};

// Hug kernel: velocity from N(0, scale), L tangential bounce steps, Lebesgue
// reference, acceptance on U(x) + v^T scale^{-1} v / 2.
class HugKernel final : public Kernel {
 public:
  HugKernel(const TargetModel& model, Preconditioner pre, double h, int leaps);
  std::string_view name() const override { return "hug"; }
  StepOutcome step(KernelState& state) const override;
  double tuned_param() const override { return h_; }
  void set_tuned_param(double value) override { h_ = value; }
  std::pair<double, double> tuning_bracket() const override { return {1e-4, 10.0}; }

 private:
  double h_;
  int leaps_;
};

// Leap-frog Hamiltonian Monte Carlo with kinetic energy v^T scale^{-1} v / 2.
class HmcKernel final : public Kernel {
 public:
  HmcKernel(const TargetModel& model, Preconditioner pre, double h, int leaps);
  std::string_view name() const override { return "hmc"; }
  StepOutcome step(KernelState& state) const override;
  double tuned_param() const override { return h_; }
  void set_tuned_param(double value) override { h_ = value; }
  std::pair<double, double> tuning_bracket() const override { return {1e-4, 10.0}; }

 private:
  double h_;
  int leaps_;
};

struct KernelSettings {
  std::optional<double> h;
  std::optional<double> s;
  int leaps = 1;
  double jitter = 0.0;
};

// Known kernel names: rwm, pcn, mpcn, wm, hwm, inf_hmc, hug, hmc.
std::unique_ptr<Kernel> make_kernel(const std::string& name, const TargetModel& model,
                                    Preconditioner pre, const KernelSettings& settings);

ReferenceKind kernel_reference_kind(const std::string& name);

}  // namespace weavemc
