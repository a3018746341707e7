#include "weavemc/tune.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "weavemc/errors.hpp"

namespace weavemc {

Preconditioner adaptive_pretune(const TargetModel& model, long iters, Rng& rng,
                                ChainRecord* post_burnin) {
  const Eigen::Index d = model.dim();
  if (iters < 4 * d) throw config_error("adaptive_pretune: too few iterations");
  const double sd = 2.38 * 2.38 / static_cast<double>(d);
  const double ridge = 1e-8;
  const long burn = iters / 2;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  double ux = model.potential(x);

  // Running moments of the whole chain drive the adaptation.
  Eigen::VectorXd run_mean = x;
  Eigen::MatrixXd run_m2 = Eigen::MatrixXd::Zero(d, d);
  long n = 1;

  // Second-half moments become the returned estimate.
  Eigen::VectorXd est_mean = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd est_m2 = Eigen::MatrixXd::Zero(d, d);
  long n_est = 0;

  if (post_burnin) {
    post_burnin->draws.resize(iters - burn, d);
    post_burnin->log_like_leb.resize(iters - burn);
    post_burnin->accept_flags.assign(static_cast<size_t>(iters - burn), 0);
    post_burnin->wall_seconds = 0.0;
  }

  const double early_scale = 0.1 / std::sqrt(static_cast<double>(d));
  Eigen::MatrixXd prop_factor;
  for (long it = 0; it < iters; ++it) {
    Eigen::VectorXd y;
    if (n <= 2 * d) {
      y = x + early_scale * rng.normal_vector(d);
    } else {
      Eigen::MatrixXd cov = sd * (run_m2 / static_cast<double>(n - 1)) +
                            ridge * Eigen::MatrixXd::Identity(d, d);
      Eigen::LLT<Eigen::MatrixXd> llt(cov);
      if (llt.info() != Eigen::Success)
        throw numeric_error("adaptive_pretune: proposal covariance lost positive definiteness");
      prop_factor = llt.matrixL();
      y = x + prop_factor * rng.normal_vector(d);
    }
    bool accepted = false;
    if (y.allFinite()) {
      const double uy = model.potential(y);
      accepted = metropolis_accept(ux - uy, rng);
      if (accepted) {
        x = y;
        ux = uy;
      }
    } else {
      rng.uniform();  // keep the stream aligned with the accept draw
    }

    ++n;
    Eigen::VectorXd delta = x - run_mean;
    run_mean += delta / static_cast<double>(n);
    run_m2 += delta * (x - run_mean).transpose();

    if (it >= burn) {
      ++n_est;
      Eigen::VectorXd d2 = x - est_mean;
      est_mean += d2 / static_cast<double>(n_est);
      est_m2 += d2 * (x - est_mean).transpose();
      if (post_burnin) {
        post_burnin->draws.row(it - burn) = x.transpose();
        post_burnin->log_like_leb[it - burn] = -ux;
        post_burnin->accept_flags[static_cast<size_t>(it - burn)] = accepted ? 1 : 0;
      }
    }
  }

  Eigen::MatrixXd cov = est_m2 / static_cast<double>(n_est - 1) +
                        ridge * Eigen::MatrixXd::Identity(d, d);
  cov = 0.5 * (cov + cov.transpose().eval());
  return Preconditioner(est_mean, std::move(cov));  // throws if not SPD
}

namespace {

double probe_acceptance(Kernel& kernel, const Eigen::VectorXd& x0, std::uint64_t seed,
                        int probe_iters) {
  KernelState state = kernel.init_state(x0, seed);
  long accepted = 0;
  for (int i = 0; i < probe_iters; ++i) accepted += kernel.step(state).accepted ? 1 : 0;
  return static_cast<double>(accepted) / probe_iters;
}

}  // namespace

TuneResult tune_acceptance(Kernel& kernel, const Eigen::VectorXd& x0, double target_ar,
                           double tol, Rng& rng, int probe_iters) {
  if (!(target_ar > 0.0 && target_ar < 1.0))
    throw config_error("tune_acceptance: target rate must lie in (0, 1)");
  // Common random numbers across probes make the measured rate monotone in
  // the parameter.
  const std::uint64_t probe_seed = seed_split(rng.engine()(), 0);

  auto [lo, hi] = kernel.tuning_bracket();
  auto measure = [&](double p) {
    kernel.set_tuned_param(p);
    return probe_acceptance(kernel, x0, probe_seed, probe_iters);
  };

  double ar_lo = measure(lo);
  if (ar_lo < target_ar) {  // even the smallest step is too aggressive
    return {lo, ar_lo, false};
  }
  double ar_hi = measure(hi);
  if (ar_hi > target_ar) {
    return {hi, ar_hi, false};
  }

  double best_p = lo, best_ar = ar_lo;
  for (int round = 0; round < 40; ++round) {
    const double mid = std::sqrt(lo * hi);  // log-scale bisection
    const double ar_mid = measure(mid);
    if (std::abs(ar_mid - target_ar) < std::abs(best_ar - target_ar)) {
      best_p = mid;
      best_ar = ar_mid;
    }
    if (std::abs(ar_mid - target_ar) <= 0.5 * tol) break;
    (ar_mid > target_ar ? lo : hi) = mid;
  }
  kernel.set_tuned_param(best_p);
  return {best_p, best_ar, true};
}

}  // namespace weavemc
