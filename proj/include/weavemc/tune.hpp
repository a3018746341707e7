#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "weavemc/diagnostics.hpp"
#include "weavemc/kernels.hpp"
#include "weavemc/rng.hpp"
#include "weavemc/target.hpp"

namespace weavemc {

// Adaptive Metropolis estimate of the target's location and covariance.
// Proposal N(x, (2.38^2 / d) C_emp + 1e-8 I) with the empirical covariance
// updated recursively each step once 2d steps have passed; the returned
// moments are taken over the second half of the run, ridged by 1e-8 I.
// When post_burnin is supplied the second-half draws are stored there.
Preconditioner adaptive_pretune(const TargetModel& model, long iters, Rng& rng,
                                ChainRecord* post_burnin = nullptr);

struct TuneResult {
  double param = 0.0;
  double achieved_ar = 0.0;
  bool bracketed = true;  // false when the target rate was unreachable
};

// Stochastic bisection of the kernel's tuned parameter until the measured
// acceptance rate over probe_iters-step runs from x0 lands within tol of
// target_ar. Probes share one random stream seed so the measured rate is a
// monotone function of the parameter. The kernel is left set to the result.
// A non-bracketable target reports the nearest achievable endpoint.
TuneResult tune_acceptance(Kernel& kernel, const Eigen::VectorXd& x0, double target_ar,
                           double tol, Rng& rng, int probe_iters = 10000);

}  // namespace weavemc
