#pragma once

#include <memory>

#include <Eigen/Core>

#include "weavemc/dataset.hpp"
#include "weavemc/target.hpp"

namespace weavemc {

// Quadratic potential of N(mean, cov).
class GaussianTarget final : public TargetModel {
 public:
  GaussianTarget(Eigen::VectorXd mean, Eigen::MatrixXd cov);

  Eigen::Index dim() const override { return pre_.dim(); }
  double potential(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd hessian_vec(const Eigen::VectorXd& x,
                              const Eigen::VectorXd& u) const override;

  const Preconditioner& moments() const { return pre_; }

 private:
  Preconditioner pre_;
};

// Multivariate Student t with nu degrees of freedom, shift mean and SPD scale:
// potential = ((nu + d)/2) log(1 + mahalanobis_sq / nu).
class StudentTTarget final : public TargetModel {
 public:
  StudentTTarget(double nu, Eigen::VectorXd mean, Eigen::MatrixXd scale);

  Eigen::Index dim() const override { return pre_.dim(); }
  double potential(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd hessian_vec(const Eigen::VectorXd& x,
                              const Eigen::VectorXd& u) const override;

  double nu() const { return nu_; }
  const Preconditioner& shape() const { return pre_; }

 private:
  double nu_;
  Preconditioner pre_;
};

// Bayesian logistic regression with a multivariate Cauchy prior on the full
// coefficient vector. An intercept column is prepended, so dim = features + 1.
class LogisticTarget final : public TargetModel {
 public:
  explicit LogisticTarget(const DatasetTable& data);

  Eigen::Index dim() const override { return design_.cols(); }
  double potential(const Eigen::VectorXd& beta) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& beta) const override;
  Eigen::VectorXd hessian_vec(const Eigen::VectorXd& beta,
                              const Eigen::VectorXd& u) const override;

 private:
  Eigen::MatrixXd design_;  // n x (p + 1), first column all ones
  Eigen::VectorXd labels_;
};

// Joint posterior of the stochastic volatility model over
// (x_0, ..., x_T, logit phi, log sigma); dim = T + 3. Priors are
// phi ~ Beta(2, 5) and sigma ~ Gamma(5, rate 0.2); the logit/log
// change-of-variable Jacobians are folded into the potential.
class SvTarget final : public TargetModel {
 public:
  explicit SvTarget(Eigen::VectorXd observations);

  Eigen::Index dim() const override { return obs_.size() + 3; }
  double potential(const Eigen::VectorXd& theta) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const override;

 private:
  Eigen::VectorXd obs_;
};

// Posterior over the drift location alpha of dX = a(X, alpha) dt + dW with
// a(x, alpha) = -grad V(x - alpha) / 2, V(x) = 27.5 log(1 + x^T scale_v^{-1} x),
// Euler local-Gaussian likelihood over an equally spaced path, and a
// Student t(3, 0, 10 I) prior.
class SdeTarget final : public TargetModel {
 public:
  SdeTarget(Eigen::MatrixXd path, double dt, Eigen::MatrixXd scale_v);

  Eigen::Index dim() const override { return path_.cols(); }
  double potential(const Eigen::VectorXd& alpha) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& alpha) const override;

  // Drift field a(x, alpha), exposed for the simulator and tests.
  Eigen::VectorXd drift(const Eigen::VectorXd& x, const Eigen::VectorXd& alpha) const;

 private:
  Eigen::MatrixXd path_;  // (N + 1) x d, row i = X_{i dt}
  double dt_;
  Eigen::MatrixXd scale_v_inv_;
};

std::unique_ptr<TargetModel> gaussian_target(Eigen::Index d, Eigen::VectorXd mean,
                                             Eigen::MatrixXd cov);
std::unique_ptr<TargetModel> student_t_target(Eigen::Index d, double nu,
                                              Eigen::VectorXd mean, Eigen::MatrixXd scale);
std::unique_ptr<TargetModel> logistic_target(const DatasetTable& data);
std::unique_ptr<TargetModel> sv_target(Eigen::VectorXd observations);
std::unique_ptr<TargetModel> sde_target(Eigen::MatrixXd path, double dt,
                                        Eigen::MatrixXd scale_v);

struct SvPath {
  Eigen::VectorXd latents;       // x_0, ..., x_T
  Eigen::VectorXd observations;  // y_1, ..., y_T
};

// Simulates the stochastic volatility recursion; deterministic given seed.
SvPath sv_simulate_path(int T, double phi, double sigma, std::uint64_t seed);
Eigen::VectorXd sv_simulate(int T, double phi, double sigma, std::uint64_t seed);

// Euler path of the drift-diffusion with unit diffusion coefficient, started
// at the origin, n_steps steps over [0, horizon]; deterministic given seed.
Eigen::MatrixXd sde_simulate(Eigen::Index d, int n_steps, double horizon,
                             const Eigen::VectorXd& alpha_true,
                             const Eigen::MatrixXd& scale_v, std::uint64_t seed);

// G^T G with G a df x d standard normal matrix; requires df >= d.
Eigen::MatrixXd wishart_scale(Eigen::Index d, int df, std::uint64_t seed);

}  // namespace weavemc
