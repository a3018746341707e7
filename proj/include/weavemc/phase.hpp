#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>

#include "weavemc/rng.hpp"

namespace weavemc {

// Augmented state z = (x, v) with position and velocity of equal dimension.
struct PhasePoint {
  Eigen::VectorXd x;
  Eigen::VectorXd v;

  PhasePoint() = default;
  // Validates equal dimensions (d >= 1) and finiteness of all coordinates.
  PhasePoint(Eigen::VectorXd position, Eigen::VectorXd velocity);

  Eigen::Index dim() const { return x.size(); }
  // Euclidean norm of the stacked (x, v) vector.
  double norm() const { return std::sqrt(x.squaredNorm() + v.squaredNorm()); }
};

// Global location and SPD scale shared by the Gaussian-based kernels.
// factor is the lower-triangular Cholesky factor, scale = factor * factor^T.
struct Preconditioner {
  Eigen::VectorXd center;
  Eigen::MatrixXd scale;
  Eigen::MatrixXd factor;
  Eigen::MatrixXd scale_inv;

  // Validates symmetry, positive definiteness, the factorization residual and
  // the inverse residual; throws numeric_error when the matrix fails them.
  Preconditioner(Eigen::VectorXd center, Eigen::MatrixXd scale);

  static Preconditioner identity(Eigen::Index d);

  Eigen::Index dim() const { return center.size(); }

  // Squared Mahalanobis distance (x - center)^T scale^{-1} (x - center),
  // evaluated through the Cholesky factor.
  double mahalanobis_sq(const Eigen::VectorXd& x) const;

  // center + coef * factor * w with w standard normal.
  Eigen::VectorXd sample_gaussian(Rng& rng, double coef = 1.0) const;
};

// Parameters of the iterated weave transform. steps == 0 yields the identity
// map; jitter in [0, 1) is the relative half-width used by kernels that
// randomize h per iteration.
struct WeaveParams {
  double h = 0.1;
  int steps = 1;
  double jitter = 0.0;

  WeaveParams() = default;
  WeaveParams(double h_, int steps_, double jitter_ = 0.0);
};

}  // namespace weavemc
