#pragma once

#include <memory>

#include <Eigen/Core>

#include "weavemc/phase.hpp"

namespace weavemc {

// Potential of a target distribution relative to the Lebesgue measure:
// potential(x) = -log density(x) up to an additive constant. All built-in
// targets drop data-independent normalizing constants; the log-likelihood
// diagnostic uses the same representative throughout.
class TargetModel {
 public:
  virtual ~TargetModel() = default;

  virtual Eigen::Index dim() const = 0;
  virtual double potential(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) const = 0;

  // Hessian-vector product of the potential. The default applies central
  // finite differences to the gradient with step 1e-5 * (1 + |x|).
  virtual Eigen::VectorXd hessian_vec(const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& u) const;

  double log_density(const Eigen::VectorXd& x) const { return -potential(x); }
};

enum class ReferenceKind { Lebesgue, Gaussian, HaarMixture };

const char* to_string(ReferenceKind kind);

// Dominating measure of a Metropolis kernel. Gaussian is N(center, scale);
// HaarMixture has density proportional to mahalanobis_sq(x)^{-d/2}.
class ReferenceMeasure {
 public:
  static ReferenceMeasure lebesgue();
  static ReferenceMeasure gaussian(Preconditioner pre);
  static ReferenceMeasure haar_mixture(Preconditioner pre);

  ReferenceKind kind() const { return kind_; }
  const Preconditioner& pre() const;

 private:
  ReferenceMeasure(ReferenceKind kind, std::shared_ptr<const Preconditioner> pre)
      : kind_(kind), pre_(std::move(pre)) {}

  ReferenceKind kind_;
  std::shared_ptr<const Preconditioner> pre_;
};

// Potential of the target relative to ref, up to a constant shared across x:
//   Lebesgue:     U(x)
//   Gaussian:     U(x) - mahalanobis_sq(x) / 2
//   HaarMixture:  U(x) - (d/2) log mahalanobis_sq(x)
// The Haar mixture potential is +infinity at the singular point x == center.
double potential_wrt(const TargetModel& model, const ReferenceMeasure& ref,
                     const Eigen::VectorXd& x);

// Gradient of potential_wrt. Raises numeric_error at the Haar singularity.
Eigen::VectorXd gradient_wrt(const TargetModel& model, const ReferenceMeasure& ref,
                             const Eigen::VectorXd& x);

// Recovers the Lebesgue potential from a cached reference potential at x.
double lebesgue_potential(const ReferenceMeasure& ref, double u_ref,
                          const Eigen::VectorXd& x);

}  // namespace weavemc
