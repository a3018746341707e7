#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "weavemc/phase.hpp"
#include "weavemc/rng.hpp"
#include "weavemc/target.hpp"

namespace weavemc {

// State of the limit dynamics: position x on a potential level set, velocity w
// tangential to the unit gradient there, and the conserved phase-space radius
// of the generating discrete trajectory.
struct LevelSetState {
  Eigen::VectorXd x;
  Eigen::VectorXd w;
  double radius = 0.0;
};

struct OdeRunReport {
  std::vector<double> times;
  Eigen::MatrixXd states;        // row t: [x(t), w(t)]
  double sup_error = 0.0;        // filled by compare_limit
  double u_drift_max = 0.0;      // max_t |U(x(t)) - U(x(0))|
  double tangency_max = 0.0;     // max_t |unit_gradient(x(t)) . w(t)|
  double dt = 0.0;
};

struct DiscreteWeavePath {
  std::vector<double> times;           // n * h
  std::vector<PhasePoint> points;      // weave iterates
  std::vector<Eigen::VectorXd> tangential;  // tangential velocity component at each iterate
};

// Normalized gradient of the potential; the gradient norm must stay above
// 1e-8 or the level-set machinery aborts.
Eigen::VectorXd unit_gradient(const TargetModel& model, const Eigen::VectorXd& x);

// Components of v tangential / normal to the unit gradient at x.
Eigen::VectorXd tangential_part(const TargetModel& model, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& v);
Eigen::VectorXd normal_part(const TargetModel& model, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& v);

// Directional derivative of the unit gradient,
// d(unit_gradient)[u, v] = (P u) . (H v) / |grad|, through the Hessian action.
double unit_gradient_derivative(const TargetModel& model, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// Right-hand side (x', w') of the limit dynamics.
std::pair<Eigen::VectorXd, Eigen::VectorXd> limit_ode_rhs(const TargetModel& model,
                                                          const LevelSetState& state);

// Projects an augmented state onto (x, tangential part of v, |z|).
LevelSetState project_to_level_state(const TargetModel& model, const PhasePoint& z);

// Classical fixed-step RK4 integration of the limit dynamics, recording the
// potential-drift and tangency residuals.
OdeRunReport integrate_limit(const TargetModel& model, const LevelSetState& z0, double T,
                             double dt);

// Piecewise-constant weave trajectory (identity preconditioner, Lebesgue
// gradient) with the tangential projection recorded at every iterate.
DiscreteWeavePath discrete_trajectory(const TargetModel& model, const PhasePoint& z0,
                                      double h, double T);

// Sup-norm distance over [0, T] between the projected weave trajectory at
// step size h and the limit dynamics, integrated with RK4 steps aligned to h
// (step h / ceil(h / dt)).
OdeRunReport compare_limit(const TargetModel& model, const PhasePoint& z0, double h,
                           double T, double dt);

// Norm of the first-order expansion defect of one weave step at z.
double expansion_residual(const TargetModel& model, const PhasePoint& z, double h);

// |U(x') - U(x)| across one weave step.
double energy_drift(const TargetModel& model, const PhasePoint& z, double h);

// Sampled estimate of r sup |grad| + r^2 sup |hess| over the ball |z| <= r.
double drift_constant_estimate(const TargetModel& model, double r, int samples, Rng& rng);

}  // namespace weavemc
