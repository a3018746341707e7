#include "weavemc/targets.hpp"

#include <cmath>
#include <stdexcept>

#include "weavemc/errors.hpp"
#include "weavemc/rng.hpp"

namespace weavemc {

namespace {

// log(1 + exp(eta)) with the overflow-safe branch at eta = 0.
double log1pexp(double eta) {
  return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

double sigmoid(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

Eigen::VectorXd sde_drift(const Eigen::VectorXd& x, const Eigen::VectorXd& alpha,
                          const Eigen::MatrixXd& scale_v_inv) {
  Eigen::VectorXd u = x - alpha;
  Eigen::VectorXd su = scale_v_inv * u;
  return (-27.5 / (1.0 + u.dot(su))) * su;  // -grad V / 2
}

void check_dim(const Eigen::VectorXd& x, Eigen::Index d, const char* who) {
  if (x.size() != d) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

}  // namespace

// ---------------------------------------------------------------------------
// Gaussian

GaussianTarget::GaussianTarget(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : pre_(std::move(mean), std::move(cov)) {}

double GaussianTarget::potential(const Eigen::VectorXd& x) const {
  check_dim(x, dim(), "GaussianTarget");
  return 0.5 * pre_.mahalanobis_sq(x);
}

Eigen::VectorXd GaussianTarget::gradient(const Eigen::VectorXd& x) const {
  check_dim(x, dim(), "GaussianTarget");
  return pre_.scale_inv * (x - pre_.center);
}

Eigen::VectorXd GaussianTarget::hessian_vec(const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& u) const {
  check_dim(x, dim(), "GaussianTarget");
  return pre_.scale_inv * u;
}

// ---------------------------------------------------------------------------
// Student t

StudentTTarget::StudentTTarget(double nu, Eigen::VectorXd mean, Eigen::MatrixXd scale)
    : nu_(nu), pre_(std::move(mean), std::move(scale)) {
  if (!(nu_ > 0.0)) throw std::invalid_argument("StudentTTarget: nu must be positive");
}

double StudentTTarget::potential(const Eigen::VectorXd& x) const {
  check_dim(x, dim(), "StudentTTarget");
  const double d = static_cast<double>(dim());
  return 0.5 * (nu_ + d) * std::log1p(pre_.mahalanobis_sq(x) / nu_);
}

Eigen::VectorXd StudentTTarget::gradient(const Eigen::VectorXd& x) const {
  check_dim(x, dim(), "StudentTTarget");
  const double d = static_cast<double>(dim());
  const double coef = (nu_ + d) / (nu_ + pre_.mahalanobis_sq(x));
  return coef * (pre_.scale_inv * (x - pre_.center));
}

Eigen::VectorXd StudentTTarget::hessian_vec(const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& u) const {
  check_dim(x, dim(), "StudentTTarget");
  const double d = static_cast<double>(dim());
  const double denom = nu_ + pre_.mahalanobis_sq(x);
  Eigen::VectorXd si_xm = pre_.scale_inv * (x - pre_.center);
  Eigen::VectorXd si_u = pre_.scale_inv * u;
  return ((nu_ + d) / denom) * si_u -
         (2.0 * (nu_ + d) / (denom * denom)) * si_xm.dot(u) * si_xm;
}

// ---------------------------------------------------------------------------
// Logistic regression

LogisticTarget::LogisticTarget(const DatasetTable& data) : labels_(data.labels) {
  const Eigen::Index n = data.rows();
  design_.resize(n, data.cols() + 1);
  design_.col(0).setOnes();
  design_.rightCols(data.cols()) = data.features;
}

double LogisticTarget::potential(const Eigen::VectorXd& beta) const {
  check_dim(beta, dim(), "LogisticTarget");
  if (!beta.allFinite()) throw numeric_error("LogisticTarget: non-finite coefficients");
  const double d = static_cast<double>(dim());
  Eigen::VectorXd eta = design_ * beta;
  double u = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    u += log1pexp(eta[i]) - labels_[i] * eta[i];
  return u + 0.5 * (d + 1.0) * std::log1p(beta.squaredNorm());
}

Eigen::VectorXd LogisticTarget::gradient(const Eigen::VectorXd& beta) const {
  check_dim(beta, dim(), "LogisticTarget");
  if (!beta.allFinite()) throw numeric_error("LogisticTarget: non-finite coefficients");
  const double d = static_cast<double>(dim());
  Eigen::VectorXd eta = design_ * beta;
  Eigen::VectorXd resid(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) resid[i] = sigmoid(eta[i]) - labels_[i];
  return design_.transpose() * resid +
         ((d + 1.0) / (1.0 + beta.squaredNorm())) * beta;
}

Eigen::VectorXd LogisticTarget::hessian_vec(const Eigen::VectorXd& beta,
                                            const Eigen::VectorXd& u) const {
  check_dim(beta, dim(), "LogisticTarget");
  const double d = static_cast<double>(dim());
  Eigen::VectorXd eta = design_ * beta;
  Eigen::VectorXd xu = design_ * u;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double s = sigmoid(eta[i]);
    xu[i] *= s * (1.0 - s);
  }
  const double q = 1.0 + beta.squaredNorm();
  return design_.transpose() * xu +
         (d + 1.0) * (u / q - (2.0 * beta.dot(u) / (q * q)) * beta);
}

// ---------------------------------------------------------------------------
// Stochastic volatility

SvTarget::SvTarget(Eigen::VectorXd observations) : obs_(std::move(observations)) {
  if (obs_.size() < 1) throw std::invalid_argument("SvTarget: needs at least one observation");
}

double SvTarget::potential(const Eigen::VectorXd& theta) const {
  check_dim(theta, dim(), "SvTarget");
  const Eigen::Index T = obs_.size();
  const double a = theta[T + 1];
  const double b = theta[T + 2];
  const double phi = sigmoid(a);
  const double sig2 = std::exp(2.0 * b);
  const double c = phi / (1.0 - phi * phi);

  double obs = 0.0, quad = 0.0;
  for (Eigen::Index t = 1; t <= T; ++t) {
    const double xt = theta[t];
    obs += 0.5 * xt + 0.5 * obs_[t - 1] * obs_[t - 1] * std::exp(-xt);
    const double e = xt - phi * theta[t - 1];
    quad += e * e;
  }
  quad += theta[0] * theta[0] / (c * c);

  const double tt = static_cast<double>(T);
  return obs + 0.5 * quad / sig2 + (tt - 4.0) * b + 0.2 * std::exp(b) +
         log1pexp(-a) + 6.0 * log1pexp(a) - std::log1p(phi);
}

Eigen::VectorXd SvTarget::gradient(const Eigen::VectorXd& theta) const {
  check_dim(theta, dim(), "SvTarget");
  const Eigen::Index T = obs_.size();
  const double a = theta[T + 1];
  const double b = theta[T + 2];
  const double phi = sigmoid(a);
  const double sig2 = std::exp(2.0 * b);
  const double c = phi / (1.0 - phi * phi);
  const double cprime = (1.0 + phi * phi) / ((1.0 - phi * phi) * (1.0 - phi * phi));

  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim());
  double quad = theta[0] * theta[0] / (c * c);
  double dphi = 0.0;
  g[0] = theta[0] / (sig2 * c * c);
  for (Eigen::Index t = 1; t <= T; ++t) {
    const double xt = theta[t];
    const double e = xt - phi * theta[t - 1];
    quad += e * e;
    g[t] += 0.5 - 0.5 * obs_[t - 1] * obs_[t - 1] * std::exp(-xt) + e / sig2;
    g[t - 1] += -phi * e / sig2;
    dphi += -theta[t - 1] * e / sig2;
  }
  // phi-dependence of the x_0 scaling plus Beta prior and logit Jacobian.
  dphi += theta[0] * theta[0] / (2.0 * sig2) * (-2.0 / (c * c * c)) * cprime;
  dphi += -1.0 / phi + 6.0 / (1.0 - phi) - 1.0 / (1.0 + phi);
  g[T + 1] = dphi * phi * (1.0 - phi);
  g[T + 2] = -quad / sig2 + (static_cast<double>(T) - 4.0) + 0.2 * std::exp(b);
  return g;
}

// ---------------------------------------------------------------------------
// Discretely observed diffusion

SdeTarget::SdeTarget(Eigen::MatrixXd path, double dt, Eigen::MatrixXd scale_v)
    : path_(std::move(path)), dt_(dt) {
  if (path_.rows() < 2) throw std::invalid_argument("SdeTarget: path needs at least two rows");
  if (!(dt_ > 0.0)) throw std::invalid_argument("SdeTarget: dt must be positive");
  if (scale_v.rows() != path_.cols() || scale_v.cols() != path_.cols())
    throw std::invalid_argument("SdeTarget: scale_v dimension mismatch");
  Preconditioner chk(Eigen::VectorXd::Zero(path_.cols()), std::move(scale_v));
  scale_v_inv_ = chk.scale_inv;
}

Eigen::VectorXd SdeTarget::drift(const Eigen::VectorXd& x, const Eigen::VectorXd& alpha) const {
  return sde_drift(x, alpha, scale_v_inv_);
}

double SdeTarget::potential(const Eigen::VectorXd& alpha) const {
  check_dim(alpha, dim(), "SdeTarget");
  const double d = static_cast<double>(dim());
  double u = 0.0;
  for (Eigen::Index i = 0; i + 1 < path_.rows(); ++i) {
    Eigen::VectorXd r = (path_.row(i + 1) - path_.row(i)).transpose() -
                        drift(path_.row(i).transpose(), alpha) * dt_;
    u += r.squaredNorm() / (2.0 * dt_);
  }
  return u + 0.5 * (3.0 + d) * std::log1p(alpha.squaredNorm() / 30.0);
}

Eigen::VectorXd SdeTarget::gradient(const Eigen::VectorXd& alpha) const {
  check_dim(alpha, dim(), "SdeTarget");
  const double d = static_cast<double>(dim());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim());
  for (Eigen::Index i = 0; i + 1 < path_.rows(); ++i) {
    Eigen::VectorXd u = path_.row(i).transpose() - alpha;
    Eigen::VectorXd su = scale_v_inv_ * u;
    const double q = 1.0 + u.dot(su);
    Eigen::VectorXd r = (path_.row(i + 1) - path_.row(i)).transpose() + (27.5 * dt_ / q) * su;
    // -(1/2) HessV(u) r with HessV(u) r = 55 [S^{-1} r / q - 2 su (su . r) / q^2]
    g += -27.5 * ((scale_v_inv_ * r) / q - (2.0 * su.dot(r) / (q * q)) * su);
  }
  return g + ((3.0 + d) / (30.0 + alpha.squaredNorm())) * alpha;
}

// ---------------------------------------------------------------------------
// Factories and simulators

std::unique_ptr<TargetModel> gaussian_target(Eigen::Index d, Eigen::VectorXd mean,
                                             Eigen::MatrixXd cov) {
  if (mean.size() != d || cov.rows() != d) throw std::invalid_argument("gaussian_target: bad dims");
  return std::make_unique<GaussianTarget>(std::move(mean), std::move(cov));
}

std::unique_ptr<TargetModel> student_t_target(Eigen::Index d, double nu, Eigen::VectorXd mean,
                                              Eigen::MatrixXd scale) {
  if (mean.size() != d || scale.rows() != d)
    throw std::invalid_argument("student_t_target: bad dims");
  return std::make_unique<StudentTTarget>(nu, std::move(mean), std::move(scale));
}

std::unique_ptr<TargetModel> logistic_target(const DatasetTable& data) {
  return std::make_unique<LogisticTarget>(data);
}

std::unique_ptr<TargetModel> sv_target(Eigen::VectorXd observations) {
  return std::make_unique<SvTarget>(std::move(observations));
}

std::unique_ptr<TargetModel> sde_target(Eigen::MatrixXd path, double dt,
                                        Eigen::MatrixXd scale_v) {
  return std::make_unique<SdeTarget>(std::move(path), dt, std::move(scale_v));
}

SvPath sv_simulate_path(int T, double phi, double sigma, std::uint64_t seed) {
  if (T < 1) throw std::invalid_argument("sv_simulate: T must be >= 1");
  if (!(phi > -1.0 && phi < 1.0)) throw std::invalid_argument("sv_simulate: phi must lie in (-1, 1)");
  if (!(sigma > 0.0)) throw std::invalid_argument("sv_simulate: sigma must be positive");
  Rng rng(seed);
  SvPath out;
  out.latents.resize(T + 1);
  out.observations.resize(T);
  out.latents[0] = phi / (1.0 - phi * phi) * (sigma * rng.normal());
  for (int t = 1; t <= T; ++t) {
    out.latents[t] = phi * out.latents[t - 1] + sigma * rng.normal();
    out.observations[t - 1] = std::exp(0.5 * out.latents[t]) * rng.normal();
  }
  return out;
}

Eigen::VectorXd sv_simulate(int T, double phi, double sigma, std::uint64_t seed) {
  return sv_simulate_path(T, phi, sigma, seed).observations;
}

Eigen::MatrixXd sde_simulate(Eigen::Index d, int n_steps, double horizon,
                             const Eigen::VectorXd& alpha_true,
                             const Eigen::MatrixXd& scale_v, std::uint64_t seed) {
  if (n_steps < 1) throw std::invalid_argument("sde_simulate: n_steps must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("sde_simulate: horizon must be positive");
  Preconditioner chk(Eigen::VectorXd::Zero(d), scale_v);
  const double dt = horizon / n_steps;
  Rng rng(seed);
  Eigen::MatrixXd path(n_steps + 1, d);
  path.row(0).setZero();
  for (int i = 0; i < n_steps; ++i) {
    Eigen::VectorXd x = path.row(i).transpose();
    path.row(i + 1) = (x + sde_drift(x, alpha_true, chk.scale_inv) * dt +
                       std::sqrt(dt) * rng.normal_vector(d))
                          .transpose();
  }
  return path;
}

Eigen::MatrixXd wishart_scale(Eigen::Index d, int df, std::uint64_t seed) {
  if (df < d) throw std::invalid_argument("wishart_scale: df must be >= d");
  Rng rng(seed);
  Eigen::MatrixXd g(df, d);
  for (int i = 0; i < df; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = rng.normal();
  return g.transpose() * g;
}

}  // namespace weavemc
