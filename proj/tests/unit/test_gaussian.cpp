#include "oracles.hpp"
#include "swdisp/error.hpp"
#include "swdisp/gaussian.hpp"

#include <doctest.h>

#include <random>

using namespace swdisp;

namespace {

Eigen::Matrix2d cov2(double v1, double v2, double rho) {
  Eigen::Matrix2d m;
  const double c = rho * std::sqrt(v1 * v2);
  m << v1, c, c, v2;
  return m;
}

Cov3 corr3(double r12, double r13, double r23) {
  Eigen::Matrix3d m;
  m << 1, r12, r13, r12, 1, r23, r13, r23, 1;
  return Cov3(m);
}

Cov3 random_pd(std::mt19937_64& rng) { return oracle::random_cov(rng); }

}  // namespace

TEST_CASE("phi1 matches the normal CDF and steps at zero variance") {
  CHECK(phi1(0.0, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(phi1(1.0, 4.0) == doctest::Approx(oracle::norm_cdf(0.5)).epsilon(1e-14));
  CHECK(phi1(-3.0, 1.0) == doctest::Approx(oracle::norm_cdf(-3.0)).epsilon(1e-13));
  CHECK(phi1(0.0, 0.0) == 1.0);
  CHECK(phi1(-1e-9, 0.0) == 0.0);
  CHECK(phi1(kUnbounded, 1.0) == 1.0);
  CHECK(phi1(-kUnbounded, 1.0) == 0.0);
  CHECK_THROWS_AS(phi1(0.0, -1.0), Error);
}

TEST_CASE("phi2 orthant probabilities") {
  for (double rho : {-0.99, -0.5, 0.0, 0.3, 0.8, 0.999}) {
    CHECK(phi2(0.0, 0.0, cov2(1.0, 3.0, rho)) == doctest::Approx(oracle::orthant2(rho)).epsilon(1e-12));
  }
}

TEST_CASE("phi2 agrees with the Owen's T route") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N(0.0, 2.0);
  std::uniform_real_distribution<double> R(-0.9999, 0.9999);
  for (int c = 0; c < 2000; ++c) {
    const double h = N(rng), k = N(rng), rho = R(rng);
    if (std::abs(h) < 1e-6 || std::abs(k) < 1e-6) continue;
    const double want = oracle::owen_phi2(h, k, rho);
    const double got = phi2(h, k, cov2(1.0, 1.0, rho));
    REQUIRE(std::abs(got - want) < 1e-10);
  }
}

TEST_CASE("phi2 degenerate and infinite arguments") {
  CHECK(phi2(kUnbounded, 0.5, cov2(2.0, 1.0, 0.3)) == doctest::Approx(oracle::norm_cdf(0.5)));
  CHECK(phi2(1.0, -kUnbounded, cov2(1.0, 1.0, 0.3)) == 0.0);
  CHECK(phi2(0.2, 0.7, cov2(1.0, 1.0, 1.0)) == doctest::Approx(oracle::norm_cdf(0.2)));
  CHECK(phi2(0.2, 0.7, cov2(1.0, 1.0, -1.0)) ==
        doctest::Approx(oracle::norm_cdf(0.2) - oracle::norm_cdf(-0.7)));
  Eigen::Matrix2d z;
  z << 0.0, 0.0, 0.0, 1.0;
  CHECK(phi2(0.0, 1.0, z) == doctest::Approx(oracle::norm_cdf(1.0)));
  CHECK(phi2(-0.1, 1.0, z) == 0.0);
  Eigen::Matrix2d bad;
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(phi2(0.0, 0.0, bad), Error);
}

TEST_CASE("phi3 orthant probabilities") {
  CHECK(phi3(0, 0, 0, corr3(0.5, 0.5, 0.5)) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(phi3(0, 0, 0, Cov3(Eigen::Matrix3d::Identity())) == doctest::Approx(0.125).epsilon(1e-9));
  for (auto [a, b, c] : {std::array{0.2, -0.3, 0.4}, std::array{0.9, 0.85, 0.8}, std::array{-0.4, -0.4, 0.1}}) {
    CHECK(phi3(0, 0, 0, corr3(a, b, c)) == doctest::Approx(oracle::orthant3(a, b, c)).epsilon(1e-9));
  }
}

TEST_CASE("phi3 agrees with Genz quasi-Monte Carlo") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  for (int c = 0; c < 20; ++c) {
    const Cov3 cov = random_pd(rng);
    Eigen::Vector3d t;
    for (int i = 0; i < 3; ++i) t(i) = N(rng) * std::sqrt(cov(i, i));
    const auto ref = oracle::genz_phi3(t, cov.matrix());
    const double got = phi3(t(0), t(1), t(2), cov);
    CHECK(std::abs(got - ref.value) < 5e-6 + 6.0 * ref.std_error);
  }
}

TEST_CASE("phi3 with infinite arguments reduces to marginals") {
  std::mt19937_64 rng(9);
  const Cov3 cov = random_pd(rng);
  const Eigen::Matrix2d m02 = marginal(cov, {Coord::Cond1, Coord::Joint});
  CHECK(phi3(0.3, kUnbounded, -0.2, cov) == phi2(0.3, -0.2, m02));
  CHECK(phi3(kUnbounded, kUnbounded, 0.4, cov) == phi1(0.4, cov(2, 2)));
  CHECK(phi3(kUnbounded, kUnbounded, kUnbounded, cov) == 1.0);
  CHECK(phi3(0.1, -kUnbounded, 0.1, cov) == 0.0);
}

TEST_CASE("phi3 on a singular covariance") {
  // Third coordinate is the sum of two independent ones.
  Eigen::Matrix3d m;
  m << 1, 0, 1, 0, 1, 1, 1, 1, 2;
  const Cov3 cov(m);
  CHECK_FALSE(cov.positive_definite());
  // With t3 = t1 + t2 the joint constraint is implied only partly; compare
  // to direct integration over the (1,2) plane.
  const double t1 = 0.4, t2 = -0.1, t3 = 0.1;
  const double got = phi3(t1, t2, t3, cov);
  double acc = 0.0;
  const int steps = 20000;
  const double lo = -9.0, h = (t1 - lo) / steps;
  for (int i = 0; i < steps; ++i) {
    const double u = lo + (i + 0.5) * h;
    acc += h * std::exp(-0.5 * u * u) / std::sqrt(2 * std::numbers::pi) *
           oracle::norm_cdf(std::min(t2, t3 - u));
  }
  CHECK(got == doctest::Approx(acc).epsilon(1e-7));
}

TEST_CASE("marginalization ladder and monotonicity (property)") {
  const auto fail = oracle::for_all(300, 1, [](std::mt19937_64& rng, int) {
    const Cov3 cov = random_pd(rng);
    std::normal_distribution<double> N;
    const double t1 = N(rng), t2 = N(rng), t3 = N(rng);
    const double p3 = phi3(t1, t2, t3, cov);
    const double p12 = phi2(t1, t2, marginal(cov, {Coord::Cond1, Coord::Cond2}));
    const double p1 = phi1(t1, cov(0, 0));
    const double bumped = phi3(t1 + 0.3, t2, t3, cov);
    return p3 <= p12 + 1e-10 && p12 <= p1 + 1e-12 && bumped >= p3 - 1e-10 &&
           std::abs(phi3(t1, t2, 40.0 * std::sqrt(cov(2, 2)), cov) - p12) < 1e-9;
  });
  CHECK_MESSAGE(fail.empty(), fail);
}

TEST_CASE("phi_marginal dispatch") {
  std::mt19937_64 rng(2);
  const Cov3 cov = random_pd(rng);
  const double t2[] = {0.1, 0.2};
  CHECK(phi_marginal(cov, {Coord::Cond2, Coord::Joint}, t2) ==
        phi2(0.1, 0.2, marginal(cov, {Coord::Cond2, Coord::Joint})));
  const double t1[] = {0.3};
  CHECK(phi_marginal(cov, {Coord::Joint}, t1) == phi1(0.3, cov(2, 2)));
  CHECK_THROWS_AS(phi_marginal(cov, {Coord::Joint}, t2), Error);
  CHECK_THROWS_AS(MarginalIndex({Coord::Joint, Coord::Joint}), Error);
}

TEST_CASE("phi1_inv matches the normal quantile") {
  for (double q : {1e-12, 0.01, 0.1, 0.5, 0.9, 0.975, 1 - 1e-9}) {
    for (double var : {0.25, 1.0, 3.0}) {
      CHECK(phi1_inv(q, var) == doctest::Approx(std::sqrt(var) * oracle::norm_quantile(q)).epsilon(1e-10));
      CHECK(phi1(phi1_inv(q, var), var) >= q);
    }
  }
  CHECK(phi1_inv(0.3, 0.0) == 0.0);
  CHECK_THROWS_AS(phi1_inv(0.0, 1.0), Error);
  CHECK_THROWS_AS(phi1_inv(1.0, 1.0), Error);
}

TEST_CASE("Cov3 validation") {
  Eigen::Matrix3d asym = Eigen::Matrix3d::Identity();
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(Cov3{asym}, Error);
  Eigen::Matrix3d neg = Eigen::Matrix3d::Identity();
  neg(2, 2) = -0.1;
  CHECK_THROWS_AS(Cov3{neg}, Error);
  CHECK(Cov3::zero().min_eigenvalue() == 0.0);
}
