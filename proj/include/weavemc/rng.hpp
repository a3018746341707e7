#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace weavemc {

// Counter-based derivation of per-chain stream seeds. Distinct indices map to
// distinct seeds (splitmix64 finalizer is a bijection applied to distinct
// inputs master + (index+1)*gamma).
std::uint64_t seed_split(std::uint64_t master_seed, std::uint64_t index);

// Per-chain random stream. One instance per chain; never shared across
// threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return uniform_(engine_); }
  double normal() { return normal_(engine_); }
  // Gamma draw in shape/rate parameterization.
  double gamma(double shape, double rate) {
    std::gamma_distribution<double> dist(shape, 1.0 / rate);
    return dist(engine_);
  }
  Eigen::VectorXd normal_vector(Eigen::Index d) {
    Eigen::VectorXd w(d);
    for (Eigen::Index i = 0; i < d; ++i) w[i] = normal();
    return w;
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace weavemc
