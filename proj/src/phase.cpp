#include "weavemc/phase.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "weavemc/errors.hpp"

namespace weavemc {

PhasePoint::PhasePoint(Eigen::VectorXd position, Eigen::VectorXd velocity)
    : x(std::move(position)), v(std::move(velocity)) {
  if (x.size() != v.size() || x.size() < 1)
    throw std::invalid_argument("PhasePoint: x and v must share dimension d >= 1");
  if (!x.allFinite() || !v.allFinite())
    throw numeric_error("PhasePoint: non-finite coordinate");
}

Preconditioner::Preconditioner(Eigen::VectorXd center_, Eigen::MatrixXd scale_)
    : center(std::move(center_)), scale(std::move(scale_)) {
  const Eigen::Index d = center.size();
  if (scale.rows() != d || scale.cols() != d)
    throw std::invalid_argument("Preconditioner: scale must be d x d");
  const double sym_err = (scale - scale.transpose()).norm();
  if (sym_err > 1e-12 * (1.0 + scale.norm()))
    throw numeric_error("Preconditioner: scale matrix is not symmetric");
  scale = 0.5 * (scale + scale.transpose().eval());

  Eigen::LLT<Eigen::MatrixXd> llt(scale);
  if (llt.info() != Eigen::Success)
    throw numeric_error("Preconditioner: scale matrix is not positive definite");
  factor = llt.matrixL();
  if ((scale - factor * factor.transpose()).norm() > 1e-10 * scale.norm())
    throw numeric_error("Preconditioner: factorization residual too large");

  scale_inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
  if (((scale_inv * scale) - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-8)
    throw numeric_error("Preconditioner: inverse residual too large");
}

Preconditioner Preconditioner::identity(Eigen::Index d) {
  return Preconditioner(Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d));
}

double Preconditioner::mahalanobis_sq(const Eigen::VectorXd& x) const {
  Eigen::VectorXd u = factor.triangularView<Eigen::Lower>().solve(x - center);
  return u.squaredNorm();
}

Eigen::VectorXd Preconditioner::sample_gaussian(Rng& rng, double coef) const {
  return center + coef * (factor * rng.normal_vector(dim()));
}

WeaveParams::WeaveParams(double h_, int steps_, double jitter_)
    : h(h_), steps(steps_), jitter(jitter_) {
  if (!(h > 0.0) || !(h < 2.0 * M_PI))
    throw std::invalid_argument("WeaveParams: h must lie in (0, 2*pi)");
  if (steps < 0) throw std::invalid_argument("WeaveParams: steps must be >= 0");
  if (jitter < 0.0 || jitter >= 1.0)
    throw std::invalid_argument("WeaveParams: jitter must lie in [0, 1)");
}

}  // namespace weavemc
