#include "weavemc/target.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "weavemc/errors.hpp"

namespace weavemc {

Eigen::VectorXd TargetModel::hessian_vec(const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& u) const {
  const double un = u.norm();
  if (un == 0.0) return Eigen::VectorXd::Zero(x.size());
  const double step = 1e-5 * (1.0 + x.norm()) / un;
  Eigen::VectorXd gp = gradient(x + step * u);
  Eigen::VectorXd gm = gradient(x - step * u);
  return (gp - gm) / (2.0 * step);
}

const char* to_string(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::Lebesgue: return "lebesgue";
    case ReferenceKind::Gaussian: return "gaussian";
    case ReferenceKind::HaarMixture: return "haar_mixture";
  }
  return "?";
}

ReferenceMeasure ReferenceMeasure::lebesgue() {
  return ReferenceMeasure(ReferenceKind::Lebesgue, nullptr);
}

ReferenceMeasure ReferenceMeasure::gaussian(Preconditioner pre) {
  return ReferenceMeasure(ReferenceKind::Gaussian,
                          std::make_shared<const Preconditioner>(std::move(pre)));
}

ReferenceMeasure ReferenceMeasure::haar_mixture(Preconditioner pre) {
  return ReferenceMeasure(ReferenceKind::HaarMixture,
                          std::make_shared<const Preconditioner>(std::move(pre)));
}

const Preconditioner& ReferenceMeasure::pre() const {
  if (!pre_) throw std::logic_error("ReferenceMeasure: Lebesgue carries no preconditioner");
  return *pre_;
}

double potential_wrt(const TargetModel& model, const ReferenceMeasure& ref,
                     const Eigen::VectorXd& x) {
  switch (ref.kind()) {
    case ReferenceKind::Lebesgue:
      return model.potential(x);
    case ReferenceKind::Gaussian:
      return model.potential(x) - 0.5 * ref.pre().mahalanobis_sq(x);
    case ReferenceKind::HaarMixture: {
      const double dx = ref.pre().mahalanobis_sq(x);
      if (dx <= 0.0) return std::numeric_limits<double>::infinity();
      return model.potential(x) - 0.5 * static_cast<double>(model.dim()) * std::log(dx);
    }
  }
  throw std::logic_error("potential_wrt: unknown reference");
}

Eigen::VectorXd gradient_wrt(const TargetModel& model, const ReferenceMeasure& ref,
                             const Eigen::VectorXd& x) {
  switch (ref.kind()) {
    case ReferenceKind::Lebesgue:
      return model.gradient(x);
    case ReferenceKind::Gaussian:
      return model.gradient(x) - ref.pre().scale_inv * (x - ref.pre().center);
    case ReferenceKind::HaarMixture: {
      const double dx = ref.pre().mahalanobis_sq(x);
      if (dx <= 0.0) throw numeric_error("gradient_wrt: Haar mixture singular at x == center");
      return model.gradient(x) -
             (static_cast<double>(model.dim()) / dx) * (ref.pre().scale_inv * (x - ref.pre().center));
    }
  }
  throw std::logic_error("gradient_wrt: unknown reference");
}

double lebesgue_potential(const ReferenceMeasure& ref, double u_ref,
                          const Eigen::VectorXd& x) {
  switch (ref.kind()) {
    case ReferenceKind::Lebesgue:
      return u_ref;
    case ReferenceKind::Gaussian:
      return u_ref + 0.5 * ref.pre().mahalanobis_sq(x);
    case ReferenceKind::HaarMixture: {
      const double dx = ref.pre().mahalanobis_sq(x);
      return u_ref + 0.5 * static_cast<double>(x.size()) * std::log(dx);
    }
  }
  throw std::logic_error("lebesgue_potential: unknown reference");
}

}  // namespace weavemc
