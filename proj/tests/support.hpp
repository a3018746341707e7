#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "weavemc/rng.hpp"
#include "weavemc/target.hpp"

namespace testsupport {

// Central-difference gradient with step 1e-5 * (1 + |x_i|) per coordinate.
inline Eigen::VectorXd fd_gradient(const weavemc::TargetModel& model, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = 1e-5 * (1.0 + std::abs(x[i]));
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    g[i] = (model.potential(xp) - model.potential(xm)) / (2.0 * step);
  }
  return g;
}

inline double gradient_rel_err(const weavemc::TargetModel& model, const Eigen::VectorXd& x) {
  Eigen::VectorXd g = model.gradient(x);
  Eigen::VectorXd fd = fd_gradient(model, x);
  return (g - fd).norm() / (1.0 + g.norm());
}

// Exact draw from N(mean, factor factor^T).
inline Eigen::VectorXd sample_gaussian(weavemc::Rng& rng, const Eigen::VectorXd& mean,
                                       const Eigen::MatrixXd& factor) {
  return mean + factor * rng.normal_vector(mean.size());
}

// Exact draw from the multivariate Student t via the chi-square mixture.
inline Eigen::VectorXd sample_student_t(weavemc::Rng& rng, double nu,
                                        const Eigen::VectorXd& mean,
                                        const Eigen::MatrixXd& factor) {
  const double chi2 = 2.0 * rng.gamma(0.5 * nu, 1.0);  // chi-square with nu dof
  return mean + std::sqrt(nu / chi2) * (factor * rng.normal_vector(mean.size()));
}

// Stationary AR(1) series with unit marginal variance.
inline Eigen::VectorXd ar1_series(weavemc::Rng& rng, double rho, Eigen::Index n) {
  Eigen::VectorXd x(n);
  x[0] = rng.normal();
  const double innov = std::sqrt(1.0 - rho * rho);
  for (Eigen::Index i = 1; i < n; ++i) x[i] = rho * x[i - 1] + innov * rng.normal();
  return x;
}

// Haar-ish random orthogonal matrix from the QR of a Gaussian matrix.
inline Eigen::MatrixXd random_orthogonal(weavemc::Rng& rng, Eigen::Index d) {
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  return q;
}

// Recursive adaptive Simpson quadrature; tol is an absolute tolerance on the
// local error estimate.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 28) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double x0, double x2, double f0, double f1, double f2, double whole, double eps,
          int level) -> double {
    const double x1l = 0.5 * (x0 + 0.5 * (x0 + x2));
    const double x1r = 0.5 * (0.5 * (x0 + x2) + x2);
    const double xm = 0.5 * (x0 + x2);
    const double fl = f(x1l), fr = f(x1r);
    const double left = (xm - x0) / 6.0 * (f0 + 4.0 * fl + f1);
    const double right = (x2 - xm) / 6.0 * (f1 + 4.0 * fr + f2);
    if (level <= 0 || std::abs(left + right - whole) < 15.0 * eps)
      return left + right + (left + right - whole) / 15.0;
    return rec(x0, xm, f0, fl, f1, left, 0.5 * eps, level - 1) +
           rec(xm, x2, f1, fr, f2, right, 0.5 * eps, level - 1);
  };
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec(a, b, fa, fm, fb, whole, tol, depth);
}

// Constant potential; its gradient vanishes everywhere.
class FlatTarget final : public weavemc::TargetModel {
 public:
  explicit FlatTarget(Eigen::Index d) : d_(d) {}
  Eigen::Index dim() const override { return d_; }
  double potential(const Eigen::VectorXd&) const override { return 0.0; }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    return Eigen::VectorXd::Zero(x.size());
  }

 private:
  Eigen::Index d_;
};

}  // namespace testsupport
