#include "weavemc/transforms.hpp"

#include <cmath>
#include <stdexcept>

#include "weavemc/errors.hpp"

namespace weavemc {

namespace {

void check_dim(const PhasePoint& z, Eigen::Index d, const char* who) {
  if (z.dim() != d) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

Eigen::VectorXd checked_gradient(const GradientFn& grad, const Eigen::VectorXd& x) {
  Eigen::VectorXd g = grad(x);
  if (g.size() != x.size())
    throw std::invalid_argument("gradient evaluator returned wrong dimension");
  if (!g.allFinite()) throw numeric_error("non-finite gradient");
  return g;
}

}  // namespace

PhasePoint flip(const PhasePoint& z) {
  PhasePoint out;
  out.x = z.x;
  out.v = -z.v;
  return out;
}

PhasePoint circle(const PhasePoint& z, double h, const Eigen::VectorXd& center) {
  check_dim(z, center.size(), "circle");
  const double c = std::cos(h), s = std::sin(h);
  Eigen::VectorXd xc = z.x - center;
  Eigen::VectorXd vc = z.v - center;
  PhasePoint out;
  out.x = center + c * xc + s * vc;
  out.v = center - s * xc + c * vc;
  return out;
}

PhasePoint bounce(const PhasePoint& z, const Eigen::VectorXd& xi) {
  check_dim(z, xi.size(), "bounce");
  PhasePoint out;
  out.x = z.x;
  const double n2 = xi.squaredNorm();
  if (n2 < 1e-300) {
    out.v = -z.v;
    return out;
  }
  out.v = z.v - (2.0 * xi.dot(z.v) / n2) * xi;
  return out;
}

PhasePoint bounce(const PhasePoint& z, const Eigen::VectorXd& xi,
                  const Eigen::VectorXd& center, const Eigen::MatrixXd& scale) {
  check_dim(z, center.size(), "bounce");
  if (xi.size() != center.size()) throw std::invalid_argument("bounce: xi dimension mismatch");
  PhasePoint out;
  out.x = z.x;
  Eigen::VectorXd scale_xi = scale * xi;
  const double denom = xi.dot(scale_xi);
  Eigen::VectorXd w = z.v - center;
  if (denom < 1e-300) {
    out.v = center - w;  // full reflection of v - center
    return out;
  }
  out.v = center + w - (2.0 * xi.dot(w) / denom) * scale_xi;
  return out;
}

PhasePoint weave_step(const PhasePoint& z, double h, const Preconditioner& pre,
                      const GradientFn& grad) {
  PhasePoint mid = circle(z, h, pre.center);
  Eigen::VectorXd xi = checked_gradient(grad, mid.x);
  PhasePoint reflected = bounce(mid, xi, pre.center, pre.scale);
  return circle(reflected, h, pre.center);
}

PhasePoint weave(const PhasePoint& z, double h, int steps, const Preconditioner& pre,
                 const GradientFn& grad) {
  if (steps < 0) throw std::invalid_argument("weave: steps must be >= 0");
  PhasePoint cur = z;
  for (int l = 0; l < steps; ++l) cur = weave_step(cur, h, pre, grad);
  return cur;
}

PhasePoint leapfrog_step(const PhasePoint& z, double h, const GradientFn& grad_u,
                         const GradientFn& grad_k) {
  Eigen::VectorXd v_half = z.v - 0.5 * h * checked_gradient(grad_u, z.x);
  Eigen::VectorXd x_new = z.x + h * checked_gradient(grad_k, v_half);
  Eigen::VectorXd v_new = v_half - 0.5 * h * checked_gradient(grad_u, x_new);
  return PhasePoint(std::move(x_new), std::move(v_new));
}

PhasePoint infhmc_step(const PhasePoint& z, double h, const Preconditioner& pre,
                       const GradientFn& grad_u_gauss) {
  Eigen::VectorXd v = z.v - 0.5 * h * (pre.scale * checked_gradient(grad_u_gauss, z.x));
  PhasePoint rotated = circle(PhasePoint(z.x, std::move(v)), h, pre.center);
  rotated.v -= 0.5 * h * (pre.scale * checked_gradient(grad_u_gauss, rotated.x));
  return rotated;
}

PhasePoint hug_step(const PhasePoint& z, double h, const Preconditioner& pre,
                    const GradientFn& grad_k, const GradientFn& grad_xi) {
  Eigen::VectorXd x_mid = z.x + 0.5 * h * checked_gradient(grad_k, z.v);
  Eigen::VectorXd xi = checked_gradient(grad_xi, x_mid);
  PhasePoint reflected = bounce(PhasePoint(x_mid, z.v), xi,
                                Eigen::VectorXd::Zero(z.dim()), pre.scale);
  Eigen::VectorXd x_new = x_mid + 0.5 * h * checked_gradient(grad_k, reflected.v);
  return PhasePoint(std::move(x_new), std::move(reflected.v));
}

}  // namespace weavemc
