#pragma once

#include <functional>

#include <Eigen/Core>

#include "weavemc/phase.hpp"

namespace weavemc {

// Gradient evaluator injected by the caller; transforms stay target-agnostic.
using GradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Velocity flip kappa(x, v) = (x, -v). Exact involution.
PhasePoint flip(const PhasePoint& z);

// Rotation of the pair (x - center, v - center) by angle h:
//   x* = center + (x - center) cos h + (v - center) sin h
//   v* = center - (x - center) sin h + (v - center) cos h
PhasePoint circle(const PhasePoint& z, double h, const Eigen::VectorXd& center);

// Velocity reflection across the hyperplane orthogonal to xi (center 0,
// identity scale). xi == 0 reflects v fully.
PhasePoint bounce(const PhasePoint& z, const Eigen::VectorXd& xi);

// Preconditioned reflection
//   v* = center + (I - 2 scale xi xi^T / (xi^T scale xi)) (v - center),
// satisfying xi^T (v* - center) = -xi^T (v - center). A scale-weighted norm
// of xi below 1e-300 is treated as xi == 0 and maps v to 2 center - v.
PhasePoint bounce(const PhasePoint& z, const Eigen::VectorXd& xi,
                  const Eigen::VectorXd& center, const Eigen::MatrixXd& scale);

// One weave step: circle, bounce at the intermediate position, circle again,
// all with the same angle h. The gradient is evaluated at the intermediate
// position; a non-finite gradient raises numeric_error. With center == 0 the
// phase-space radius |z| is preserved exactly up to rounding.
PhasePoint weave_step(const PhasePoint& z, double h, const Preconditioner& pre,
                      const GradientFn& grad);

// steps-fold iteration of weave_step with a fixed angle. steps == 0 is the
// identity. Bit-for-bit identical to calling weave_step in a loop.
PhasePoint weave(const PhasePoint& z, double h, int steps, const Preconditioner& pre,
                 const GradientFn& grad);

// Leap-frog step: half kick by grad_u, drift by grad_k, half kick.
PhasePoint leapfrog_step(const PhasePoint& z, double h, const GradientFn& grad_u,
                         const GradientFn& grad_k);

// Half kick by scale * grad_u_gauss, circle rotation by h about center, half
// kick again. grad_u_gauss is the gradient of the potential relative to the
// Gaussian reference N(center, scale).
PhasePoint infhmc_step(const PhasePoint& z, double h, const Preconditioner& pre,
                       const GradientFn& grad_u_gauss);

// Hug step: half drift by grad_k(v), preconditioned bounce at the midpoint
// (center 0, scale pre.scale), half drift by grad_k of the reflected velocity.
PhasePoint hug_step(const PhasePoint& z, double h, const Preconditioner& pre,
                    const GradientFn& grad_k, const GradientFn& grad_xi);

}  // namespace weavemc
