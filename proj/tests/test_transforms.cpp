#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "weavemc/errors.hpp"
#include "weavemc/targets.hpp"
#include "weavemc/transforms.hpp"

using namespace weavemc;

namespace {

PhasePoint random_point(Rng& rng, Eigen::Index d, double scale = 1.0) {
  return PhasePoint(scale * rng.normal_vector(d), scale * rng.normal_vector(d));
}

GradientFn model_gradient(const TargetModel& model) {
  return [&model](const Eigen::VectorXd& x) { return model.gradient(x); };
}

}  // namespace

TEST_CASE("circle: identity at h=0 and quarter turn at h=pi/2") {
  Rng rng(11);
  Eigen::VectorXd center = rng.normal_vector(3);
  PhasePoint z = random_point(rng, 3, 2.0);

  PhasePoint same = circle(z, 0.0, center);
  CHECK((same.x - z.x).norm() == doctest::Approx(0.0));
  CHECK((same.v - z.v).norm() == doctest::Approx(0.0));

  PhasePoint quarter = circle(z, M_PI_2, Eigen::VectorXd::Zero(3));
  CHECK((quarter.x - z.v).norm() < 1e-15 * z.norm());
  CHECK((quarter.v + z.x).norm() < 1e-15 * z.norm());
}

TEST_CASE("circle: d=1 direct evaluation at h=pi/3") {
  PhasePoint z(Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Zero(1));
  PhasePoint out = circle(z, M_PI / 3.0, Eigen::VectorXd::Zero(1));
  CHECK(out.x[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out.v[0] == doctest::Approx(-0.8660254037844386).epsilon(1e-12));
}

TEST_CASE("circle: norm preservation about the origin") {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    PhasePoint z = random_point(rng, 4, 3.0);
    PhasePoint out = circle(z, 0.7, Eigen::VectorXd::Zero(4));
    CHECK(std::abs(out.norm() - z.norm()) <= 1e-12 * z.norm());
  }
}

TEST_CASE("circle: dimension mismatch is a hard error") {
  Rng rng(13);
  PhasePoint z = random_point(rng, 3);
  CHECK_THROWS_AS(circle(z, 0.3, Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST_CASE("bounce: full reflection parallel to xi, fixed orthogonal to xi") {
  Eigen::VectorXd xi(2);
  xi << 1.0, 0.0;
  PhasePoint parallel(Eigen::VectorXd::Zero(2), xi);
  CHECK((bounce(parallel, xi).v + xi).norm() == doctest::Approx(0.0));

  Eigen::VectorXd perp(2);
  perp << 0.0, 2.0;
  PhasePoint tangent(Eigen::VectorXd::Zero(2), perp);
  CHECK((bounce(tangent, xi).v - perp).norm() == doctest::Approx(0.0));
}

TEST_CASE("bounce: zero gradient flips the velocity") {
  Rng rng(14);
  PhasePoint z = random_point(rng, 3);
  PhasePoint out = bounce(z, Eigen::VectorXd::Zero(3));
  CHECK((out.v + z.v).norm() == doctest::Approx(0.0));

  Eigen::VectorXd center = rng.normal_vector(3);
  PhasePoint shifted = bounce(z, Eigen::VectorXd::Zero(3), center, Eigen::MatrixXd::Identity(3, 3));
  CHECK((shifted.v - (2.0 * center - z.v)).norm() == doctest::Approx(0.0));
}

TEST_CASE("bounce: preconditioned reflection identity") {
  // d=2 worked example, then random draws.
  Eigen::VectorXd center(2);
  center << 1.0, 0.0;
  Eigen::MatrixXd scale(2, 2);
  scale << 2.0, 0.0, 0.0, 1.0;
  Eigen::VectorXd xi(2);
  xi << 1.0, 1.0;
  Eigen::VectorXd v(2);
  v << 0.0, 1.0;
  PhasePoint out = bounce(PhasePoint(Eigen::VectorXd::Zero(2), v), xi, center, scale);
  CHECK(xi.dot(out.v - center) == doctest::Approx(-xi.dot(v - center)).epsilon(1e-10));

  Rng rng(15);
  for (int i = 0; i < 200; ++i) {
    Eigen::MatrixXd a(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a(r, c) = rng.normal();
    Eigen::MatrixXd spd = a * a.transpose() + Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd m = rng.normal_vector(3);
    Eigen::VectorXd grad = rng.normal_vector(3);
    PhasePoint z = random_point(rng, 3, 2.0);
    PhasePoint r2 = bounce(z, grad, m, spd);
    const double lhs = grad.dot(r2.v - m);
    const double rhs = -grad.dot(z.v - m);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
    CHECK((r2.x - z.x).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("flip is an exact involution fixing x") {
  Rng rng(16);
  PhasePoint z = random_point(rng, 5);
  PhasePoint f = flip(z);
  CHECK((f.x - z.x).norm() == doctest::Approx(0.0));
  CHECK(f.norm() == doctest::Approx(z.norm()));
  PhasePoint ff = flip(f);
  CHECK((ff.v - z.v).norm() == doctest::Approx(0.0));
}

TEST_CASE("weave_step: zero gradient at the midpoint collapses to a velocity flip") {
  testsupport::FlatTarget flat(2);
  Rng rng(17);
  PhasePoint z = random_point(rng, 2);
  PhasePoint out = weave_step(z, 0.4, Preconditioner::identity(2), model_gradient(flat));
  CHECK((out.x - z.x).norm() < 1e-14 * (1.0 + z.norm()));
  CHECK((out.v + z.v).norm() < 1e-14 * (1.0 + z.norm()));
}

TEST_CASE("weave: norm preservation on the Student t target") {
  StudentTTarget target(3.0, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
  Rng rng(18);
  const Preconditioner id2 = Preconditioner::identity(2);
  for (int i = 0; i < 1000; ++i) {
    PhasePoint z = random_point(rng, 2, 2.0);
    PhasePoint out = weave(z, 0.25, 5, id2, model_gradient(target));
    CHECK(std::abs(out.norm() - z.norm()) <= 1e-12 * z.norm());
  }
}

TEST_CASE("weave: L=1 equals a single weave_step bit-for-bit") {
  StudentTTarget target(3.0, Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3));
  Rng rng(19);
  PhasePoint z = random_point(rng, 3);
  const Preconditioner id3 = Preconditioner::identity(3);
  PhasePoint a = weave(z, 0.3, 1, id3, model_gradient(target));
  PhasePoint b = weave_step(z, 0.3, id3, model_gradient(target));
  CHECK((a.x.array() == b.x.array()).all());
  CHECK((a.v.array() == b.v.array()).all());
}

TEST_CASE("weave: L steps equal L sequential weave_step calls bit-for-bit") {
  StudentTTarget target(3.0, Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3));
  Rng rng(20);
  PhasePoint z = random_point(rng, 3);
  const Preconditioner id3 = Preconditioner::identity(3);
  PhasePoint composed = weave(z, 0.17, 7, id3, model_gradient(target));
  PhasePoint manual = z;
  for (int l = 0; l < 7; ++l) manual = weave_step(manual, 0.17, id3, model_gradient(target));
  CHECK((composed.x.array() == manual.x.array()).all());
  CHECK((composed.v.array() == manual.v.array()).all());
}

TEST_CASE("weave: exact potential conservation in the spherically symmetric case") {
  // With the gradient parallel to the intermediate position, the bounce
  // exactly reverses the radial motion of the circle, so |x| and hence U are
  // conserved to rounding, not just to O(h^2).
  StudentTTarget target(3.0, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
  Rng rng(21);
  const Preconditioner id2 = Preconditioner::identity(2);
  for (int i = 0; i < 200; ++i) {
    PhasePoint z = random_point(rng, 2, 1.5);
    PhasePoint out = weave_step(z, 0.3, id2, model_gradient(target));
    CHECK(std::abs(out.x.norm() - z.x.norm()) <= 1e-13 * (1.0 + z.x.norm()));
  }
}

TEST_CASE("weave: energy drift halves by ~4 when h is halved") {
  // Anisotropic scale; the spherical case has identically zero drift.
  Eigen::MatrixXd scale(2, 2);
  scale << 2.0, 0.0, 0.0, 0.5;
  StudentTTarget target(3.0, Eigen::VectorXd::Zero(2), scale);
  Rng rng(21);
  const Preconditioner id2 = Preconditioner::identity(2);
  std::vector<double> ratios;
  for (int i = 0; i < 300; ++i) {
    PhasePoint z = random_point(rng, 2, 1.5);
    auto du = [&](double h) {
      PhasePoint out = weave_step(z, h, id2, model_gradient(target));
      return std::abs(target.potential(out.x) - target.potential(z.x));
    };
    const double hi = du(0.05), lo = du(0.025);
    if (lo > 1e-14) ratios.push_back(hi / lo);
  }
  REQUIRE(ratios.size() > 100);
  std::sort(ratios.begin(), ratios.end());
  const double median = ratios[ratios.size() / 2];
  CHECK(median > 3.2);
  CHECK(median < 4.8);
}

TEST_CASE("weave_step: non-finite gradient is a step error") {
  GradientFn bad = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(x.size(), std::numeric_limits<double>::quiet_NaN()).eval();
  };
  Rng rng(22);
  PhasePoint z = random_point(rng, 2);
  CHECK_THROWS_AS(weave_step(z, 0.2, Preconditioner::identity(2), bad), numeric_error);
}

TEST_CASE("involution: flip-conjugated double application is the identity") {
  // All seven transforms on a 3-d Student t target.
  StudentTTarget target(3.0, Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3));
  const Preconditioner id3 = Preconditioner::identity(3);
  GradientFn grad = model_gradient(target);
  GradientFn grad_k = [](const Eigen::VectorXd& v) { return v; };

  std::vector<std::pair<std::string, std::function<PhasePoint(const PhasePoint&)>>> transforms;
  transforms.emplace_back("circle", [&](const PhasePoint& z) { return circle(z, 0.3, id3.center); });
  transforms.emplace_back("bounce", [&](const PhasePoint& z) {
    return bounce(z, grad(z.x), id3.center, id3.scale);
  });
  transforms.emplace_back("weave_step",
                          [&](const PhasePoint& z) { return weave_step(z, 0.3, id3, grad); });
  transforms.emplace_back("weave5", [&](const PhasePoint& z) { return weave(z, 0.3, 5, id3, grad); });
  transforms.emplace_back("weave40",
                          [&](const PhasePoint& z) { return weave(z, 0.12, 40, id3, grad); });
  transforms.emplace_back("leapfrog",
                          [&](const PhasePoint& z) { return leapfrog_step(z, 0.2, grad, grad_k); });
  transforms.emplace_back("infhmc",
                          [&](const PhasePoint& z) { return infhmc_step(z, 0.3, id3, grad); });
  transforms.emplace_back("hug",
                          [&](const PhasePoint& z) { return hug_step(z, 0.2, id3, grad_k, grad); });

  Rng rng(23);
  for (const auto& [name, phi] : transforms) {
    CAPTURE(name);
    for (int i = 0; i < 100; ++i) {
      PhasePoint z = random_point(rng, 3, 1.5);
      PhasePoint back = flip(phi(flip(phi(z))));
      const double err = std::sqrt((back.x - z.x).squaredNorm() + (back.v - z.v).squaredNorm());
      CHECK(err <= 1e-9 * (1.0 + z.norm()));
    }
  }
}

TEST_CASE("involution about a shifted center uses the reflection 2M - v") {
  // With center M != 0 the reversing involution is v -> 2M - v; the plain
  // velocity flip only works for centered transforms. This is the property
  // the preconditioned kernels rely on.
  StudentTTarget target(3.0, Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3));
  Rng rng(29);
  Eigen::VectorXd center = rng.normal_vector(3);
  Eigen::MatrixXd a(3, 3);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a(r, c) = rng.normal();
  Preconditioner pre(center, a * a.transpose() + 2.0 * Eigen::MatrixXd::Identity(3, 3));
  GradientFn grad = model_gradient(target);

  auto flip_about = [&center](const PhasePoint& z) {
    PhasePoint out;
    out.x = z.x;
    out.v = 2.0 * center - z.v;
    return out;
  };
  std::vector<std::function<PhasePoint(const PhasePoint&)>> transforms = {
      [&](const PhasePoint& z) { return circle(z, 0.4, center); },
      [&](const PhasePoint& z) { return bounce(z, grad(z.x), center, pre.scale); },
      [&](const PhasePoint& z) { return weave(z, 0.3, 5, pre, grad); },
  };
  for (const auto& phi : transforms) {
    for (int i = 0; i < 100; ++i) {
      PhasePoint z = random_point(rng, 3, 1.5);
      PhasePoint back = flip_about(phi(flip_about(phi(z))));
      const double err = std::sqrt((back.x - z.x).squaredNorm() + (back.v - z.v).squaredNorm());
      CHECK(err <= 1e-9 * (1.0 + z.norm()));
    }
  }
}

TEST_CASE("weave_step: finite-difference Jacobian determinant is 1") {
  StudentTTarget t2(3.0, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
  StudentTTarget t4(4.0, Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Identity(4, 4));
  Rng rng(24);
  auto jacdet = [&](const TargetModel& target, Eigen::Index d) {
    const Preconditioner id = Preconditioner::identity(d);
    GradientFn grad = model_gradient(target);
    PhasePoint z = random_point(rng, d, 1.2);
    const double eps = 1e-6;
    Eigen::MatrixXd jac(2 * d, 2 * d);
    for (Eigen::Index j = 0; j < 2 * d; ++j) {
      PhasePoint zp = z, zm = z;
      (j < d ? zp.x[j] : zp.v[j - d]) += eps;
      (j < d ? zm.x[j] : zm.v[j - d]) -= eps;
      PhasePoint fp = weave_step(zp, 0.2, id, grad);
      PhasePoint fm = weave_step(zm, 0.2, id, grad);
      jac.col(j).head(d) = (fp.x - fm.x) / (2.0 * eps);
      jac.col(j).tail(d) = (fp.v - fm.v) / (2.0 * eps);
    }
    return std::abs(jac.determinant());
  };
  for (int i = 0; i < 5; ++i) {
    CHECK(jacdet(t2, 2) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(jacdet(t4, 4) == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("leapfrog: free flight when the potential is flat") {
  testsupport::FlatTarget flat(3);
  GradientFn grad_u = model_gradient(flat);
  GradientFn grad_k = [](const Eigen::VectorXd& v) { return v; };
  Rng rng(25);
  PhasePoint z = random_point(rng, 3);
  PhasePoint out = leapfrog_step(z, 0.37, grad_u, grad_k);
  CHECK((out.x - (z.x + 0.37 * z.v)).norm() < 1e-14);
  CHECK((out.v - z.v).norm() == doctest::Approx(0.0));
}

TEST_CASE("leapfrog: Hamiltonian drift over a fixed horizon scales as h^2") {
  // A single step drifts at O(h^3); over a fixed time horizon the error is
  // the classic O(h^2).
  GradientFn grad = [](const Eigen::VectorXd& x) { return x; };
  auto hamiltonian = [](const PhasePoint& z) {
    return 0.5 * (z.x.squaredNorm() + z.v.squaredNorm());
  };
  Rng rng(26);
  double ratio_sum = 0.0;
  int count = 0;
  for (int i = 0; i < 50; ++i) {
    PhasePoint z = random_point(rng, 2);
    auto drift = [&](double h) {
      PhasePoint cur = z;
      const int n = static_cast<int>(std::lround(1.0 / h));
      for (int step = 0; step < n; ++step) cur = leapfrog_step(cur, h, grad, grad);
      return std::abs(hamiltonian(cur) - hamiltonian(z));
    };
    const double hi = drift(0.02), lo = drift(0.01);
    if (lo > 1e-12) {
      ratio_sum += hi / lo;
      ++count;
    }
  }
  CHECK(count > 25);
  CHECK(ratio_sum / count == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("infhmc_step: pure rotation when the Gaussian-reference gradient vanishes") {
  testsupport::FlatTarget flat(3);
  Rng rng(27);
  PhasePoint z = random_point(rng, 3);
  const Preconditioner id3 = Preconditioner::identity(3);
  PhasePoint a = infhmc_step(z, 0.4, id3, model_gradient(flat));
  PhasePoint b = circle(z, 0.4, id3.center);
  CHECK((a.x - b.x).norm() == doctest::Approx(0.0));
  CHECK((a.v - b.v).norm() == doctest::Approx(0.0));
}

TEST_CASE("hug_step: full bounce with flat xi cancels the drifts") {
  testsupport::FlatTarget flat(2);
  GradientFn grad_k = [](const Eigen::VectorXd& v) { return v; };
  Rng rng(28);
  PhasePoint z = random_point(rng, 2);
  PhasePoint out = hug_step(z, 0.5, Preconditioner::identity(2), grad_k, model_gradient(flat));
  CHECK((out.x - z.x).norm() < 1e-14);
  CHECK((out.v + z.v).norm() == doctest::Approx(0.0));
}

TEST_CASE("hug_step: tangential velocity drifts straight through") {
  // xi along e1, v along e2: the bounce leaves v unchanged.
  GradientFn grad_xi = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
    g[0] = 1.0;
    return g;
  };
  GradientFn grad_k = [](const Eigen::VectorXd& v) { return v; };
  Eigen::VectorXd x(2), v(2);
  x << 0.3, -0.2;
  v << 0.0, 1.5;
  PhasePoint out = hug_step(PhasePoint(x, v), 0.4, Preconditioner::identity(2), grad_k, grad_xi);
  CHECK((out.x - (x + 0.4 * v)).norm() < 1e-14);
  CHECK((out.v - v).norm() == doctest::Approx(0.0));
}

TEST_CASE("weave params validate their ranges") {
  CHECK_THROWS_AS(WeaveParams(0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(WeaveParams(0.5, -1), std::invalid_argument);
  CHECK_THROWS_AS(WeaveParams(0.5, 1, 1.0), std::invalid_argument);
  CHECK_NOTHROW(WeaveParams(0.5, 0, 0.3));
}
