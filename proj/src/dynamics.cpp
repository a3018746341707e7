#include "weavemc/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "weavemc/errors.hpp"
#include "weavemc/transforms.hpp"

namespace weavemc {

namespace {

constexpr double kGradFloor = 1e-8;

Eigen::VectorXd guarded_gradient(const TargetModel& model, const Eigen::VectorXd& x,
                                 const char* where) {
  Eigen::VectorXd g = model.gradient(x);
  if (!g.allFinite()) throw numeric_error(std::string(where) + ": non-finite gradient");
  if (g.norm() < kGradFloor)
    throw numeric_error(std::string(where) + ": gradient vanished (|grad| < 1e-8)");
  return g;
}

}  // namespace

Eigen::VectorXd unit_gradient(const TargetModel& model, const Eigen::VectorXd& x) {
  Eigen::VectorXd g = guarded_gradient(model, x, "unit_gradient");
  return g / g.norm();
}

Eigen::VectorXd tangential_part(const TargetModel& model, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& v) {
  Eigen::VectorXd n = unit_gradient(model, x);
  return v - n.dot(v) * n;
}

Eigen::VectorXd normal_part(const TargetModel& model, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& v) {
  Eigen::VectorXd n = unit_gradient(model, x);
  return n.dot(v) * n;
}

double unit_gradient_derivative(const TargetModel& model, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  Eigen::VectorXd g = guarded_gradient(model, x, "unit_gradient_derivative");
  const double gn = g.norm();
  Eigen::VectorXd n = g / gn;
  Eigen::VectorXd pu = u - n.dot(u) * n;
  return pu.dot(model.hessian_vec(x, v)) / gn;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> limit_ode_rhs(const TargetModel& model,
                                                          const LevelSetState& state) {
  Eigen::VectorXd g = guarded_gradient(model, state.x, "limit_ode_rhs");
  const double gn = g.norm();
  Eigen::VectorXd n = g / gn;

  Eigen::VectorXd px = state.x - n.dot(state.x) * n;
  Eigen::VectorXd hn = model.hessian_vec(state.x, n);
  Eigen::VectorXd dxi_dot_n = (hn - n.dot(hn) * n) / gn;  // P H n / |g|
  Eigen::VectorXd hw = model.hessian_vec(state.x, state.w);
  Eigen::VectorXd pw = state.w - n.dot(state.w) * n;
  const double dxi_ww = pw.dot(hw) / gn;

  const double gap = state.radius * state.radius - state.w.squaredNorm() - state.x.squaredNorm();
  Eigen::VectorXd xdot = 2.0 * state.w;
  Eigen::VectorXd wdot = -2.0 * px - 2.0 * gap * dxi_dot_n - 2.0 * dxi_ww * n;
  return {std::move(xdot), std::move(wdot)};
}

LevelSetState project_to_level_state(const TargetModel& model, const PhasePoint& z) {
  LevelSetState s;
  s.x = z.x;
  s.w = tangential_part(model, z.x, z.v);
  s.radius = z.norm();
  return s;
}

OdeRunReport integrate_limit(const TargetModel& model, const LevelSetState& z0, double T,
                             double dt) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw std::invalid_argument("integrate_limit: bad T or dt");
  const Eigen::Index d = z0.x.size();
  const long n_steps = static_cast<long>(std::llround(T / dt));

  OdeRunReport report;
  report.dt = dt;
  report.times.reserve(n_steps + 1);
  report.states.resize(n_steps + 1, 2 * d);

  const double u0 = model.potential(z0.x);
  LevelSetState s = z0;
  auto record = [&](long i, double t) {
    report.times.push_back(t);
    report.states.row(i) << s.x.transpose(), s.w.transpose();
    report.u_drift_max = std::max(report.u_drift_max, std::abs(model.potential(s.x) - u0));
    report.tangency_max =
        std::max(report.tangency_max, std::abs(unit_gradient(model, s.x).dot(s.w)));
  };
  record(0, 0.0);

  for (long i = 0; i < n_steps; ++i) {
    try {
      auto [k1x, k1w] = limit_ode_rhs(model, s);
      LevelSetState s2{s.x + 0.5 * dt * k1x, s.w + 0.5 * dt * k1w, s.radius};
      auto [k2x, k2w] = limit_ode_rhs(model, s2);
      LevelSetState s3{s.x + 0.5 * dt * k2x, s.w + 0.5 * dt * k2w, s.radius};
      auto [k3x, k3w] = limit_ode_rhs(model, s3);
      LevelSetState s4{s.x + dt * k3x, s.w + dt * k3w, s.radius};
      auto [k4x, k4w] = limit_ode_rhs(model, s4);
      s.x += (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      s.w += (dt / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
      record(i + 1, (i + 1) * dt);
    } catch (const numeric_error& err) {
      throw numeric_error(std::string(err.what()) + " at t = " + std::to_string((i + 1) * dt));
    }
  }
  return report;
}

DiscreteWeavePath discrete_trajectory(const TargetModel& model, const PhasePoint& z0,
                                      double h, double T) {
  if (!(h > 0.0)) throw std::invalid_argument("discrete_trajectory: h must be positive");
  const Preconditioner identity = Preconditioner::identity(z0.dim());
  GradientFn grad = [&model](const Eigen::VectorXd& x) { return model.gradient(x); };
  const long n_steps = static_cast<long>(std::floor(T / h + 1e-12));

  DiscreteWeavePath path;
  path.times.reserve(n_steps + 1);
  path.points.reserve(n_steps + 1);
  PhasePoint z = z0;
  for (long n = 0; n <= n_steps; ++n) {
    path.times.push_back(n * h);
    path.points.push_back(z);
    path.tangential.push_back(tangential_part(model, z.x, z.v));
    if (n < n_steps) z = weave_step(z, h, identity, grad);
  }
  return path;
}

OdeRunReport compare_limit(const TargetModel& model, const PhasePoint& z0, double h,
                           double T, double dt) {
  DiscreteWeavePath path = discrete_trajectory(model, z0, h, T);

  // Align RK4 steps with the weave grid so both trajectories share times.
  const long sub = std::max<long>(1, static_cast<long>(std::ceil(h / dt)));
  const double dt_eff = h / static_cast<double>(sub);
  OdeRunReport report = integrate_limit(model, project_to_level_state(model, z0), T, dt_eff);

  const Eigen::Index d = z0.dim();
  double sup = 0.0;
  for (size_t i = 0; i < report.times.size(); ++i) {
    const double t = report.times[i];
    size_t n = static_cast<size_t>(std::floor(t / h + 1e-9));
    if (n >= path.points.size()) n = path.points.size() - 1;
    Eigen::VectorXd diff(2 * d);
    diff << (path.points[n].x - report.states.row(i).head(d).transpose()),
        (path.tangential[n] - report.states.row(i).tail(d).transpose());
    sup = std::max(sup, diff.norm());
  }
  report.sup_error = sup;
  return report;
}

double expansion_residual(const TargetModel& model, const PhasePoint& z, double h) {
  const Eigen::Index d = z.dim();
  Eigen::VectorXd g = guarded_gradient(model, z.x, "expansion_residual");
  const double gn = g.norm();
  Eigen::VectorXd n = g / gn;

  auto project = [&n](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return v - n.dot(v) * n;
  };
  // dP[., a, a] = -(n.a) P H a / |g| - ((P a).(H a) / |g|) n
  auto dp_quad = [&](const Eigen::VectorXd& a) -> Eigen::VectorXd {
    Eigen::VectorXd ha = model.hessian_vec(z.x, a);
    return -(n.dot(a)) * project(ha) / gn - (project(a).dot(ha) / gn) * n;
  };

  Eigen::VectorXd rv = z.v - 2.0 * n.dot(z.v) * n;
  Eigen::VectorXd b = dp_quad(z.v) + dp_quad(rv);

  const Preconditioner identity = Preconditioner::identity(d);
  GradientFn grad = [&model](const Eigen::VectorXd& x) { return model.gradient(x); };
  PhasePoint z1 = weave_step(z, h, identity, grad);

  Eigen::VectorXd defect(2 * d);
  defect << (z1.x - z.x - h * 2.0 * project(z.v)),
      (tangential_part(model, z1.x, z1.v) - project(z.v) - h * (-2.0 * project(z.x) + b));
  return defect.norm();
}

double energy_drift(const TargetModel& model, const PhasePoint& z, double h) {
  const Preconditioner identity = Preconditioner::identity(z.dim());
  GradientFn grad = [&model](const Eigen::VectorXd& x) { return model.gradient(x); };
  PhasePoint z1 = weave_step(z, h, identity, grad);
  return std::abs(model.potential(z1.x) - model.potential(z.x));
}

double drift_constant_estimate(const TargetModel& model, double r, int samples, Rng& rng) {
  const Eigen::Index d = model.dim();
  double sup_grad = 0.0, sup_hess = 0.0;
  Eigen::MatrixXd hess(d, d);
  for (int s = 0; s < samples; ++s) {
    // Uniform draw in the position ball |x| <= r.
    Eigen::VectorXd x = rng.normal_vector(d);
    x *= r * std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) / x.norm();
    Eigen::VectorXd g = model.gradient(x);
    if (!g.allFinite()) continue;
    sup_grad = std::max(sup_grad, g.norm());
    for (Eigen::Index j = 0; j < d; ++j)
      hess.col(j) = model.hessian_vec(x, Eigen::VectorXd::Unit(d, j));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (hess + hess.transpose()));
    sup_hess = std::max(sup_hess, eig.eigenvalues().cwiseAbs().maxCoeff());
  }
  return r * sup_grad + r * r * sup_hess;
}

}  // namespace weavemc
