#include "oracles.hpp"
#include "swdisp/error.hpp"
#include "swdisp/spectrum.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace swdisp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double single(const JointPmf& p, int n, int which, double t) {
  RawThresholds r{kInf, kInf, kInf};
  (which == 0 ? r.t1 : which == 1 ? r.t2 : r.t3) = t;
  return exact_violation_probability(p, n, r);
}

}  // namespace

TEST_CASE("type classes carry all the mass") {
  const JointPmf p = reference_source();
  for (int n : {1, 2, 7, 20}) {
    const auto classes = type_classes(p, n);
    CHECK(classes.size() == static_cast<std::size_t>(composition_count(n, 4)));
    double total = 0.0;
    for (const auto& c : classes) total += std::exp(c.log_prob);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(composition_count(10, 4) == 286.0);
}

TEST_CASE("infinite thresholds are sentinels") {
  const JointPmf p = reference_source();
  const SourceStats s = compute_stats(p);
  const RegionQuery q = anchor_corner1(s, 0.1);
  CHECK(exact_Fn(p, 50, q, {kInf, kInf}) == 0.0);
  CHECK(exact_Fn(p, 50, q, {-kInf, 0.0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(exact_violation_probability(p, 30, {kInf, kInf, kInf}) == 0.0);
}

TEST_CASE("exact enumeration matches sequence-level brute force (property)") {
  const auto fail = oracle::for_all(60, 5, [](std::mt19937_64& rng, int c) {
    const std::size_t cols = 2 + static_cast<std::size_t>(c % 2);
    const JointPmf p = oracle::random_pmf(rng, 2, cols);
    const int n = 1 + c % 5;
    std::uniform_real_distribution<double> U(0.0, 1.5);
    const double t1 = n * U(rng), t2 = n * U(rng), t3 = n * (U(rng) + 0.5);
    const double got = exact_violation_probability(p, n, {t1, t2, t3});
    return std::abs(got - oracle::brute_Fn(p, n, t1, t2, t3)) <= 1e-12;
  });
  CHECK_MESSAGE(fail.empty(), fail);
}

TEST_CASE("exact F_n approaches the Gaussian limit at a corner") {
  const JointPmf p = reference_source();
  const SourceStats s = compute_stats(p);
  const RegionQuery q = anchor_corner1(s, 0.1);
  const SecondOrderPoint pt{bits_to_nats(1.0), bits_to_nats(1.0)};
  const double limit = 1.0 - case_probability(s, CornerI{Corner::First}, pt);
  CHECK(std::abs(exact_Fn(p, 400, q, pt) - limit) < 0.05);
}

TEST_CASE("Monte Carlo agrees with exact enumeration") {
  const JointPmf p = reference_source();
  const SourceStats s = compute_stats(p);
  const RegionQuery q = anchor_corner2(s, 0.1);
  const SecondOrderPoint pt{0.2, 0.3};
  const double exact = exact_Fn(p, 60, q, pt);
  const McEstimate mc = mc_Fn(p, 60, q, pt, 40000, 99);
  CHECK(std::abs(mc.estimate - exact) <= 3.0 * mc.std_error);
  CHECK(mc.hits == static_cast<std::uint64_t>(std::llround(mc.estimate * 40000)));
  const McEstimate again = mc_Fn(p, 60, q, pt, 40000, 99);
  CHECK(again.hits == mc.hits);
  const McEstimate one = mc_Fn(p, 60, q, pt, 1, 3);
  CHECK((one.estimate == 0.0 || one.estimate == 1.0));
  CHECK_THROWS_AS(mc_Fn(p, 60, q, pt, 0, 3), Error);
}

TEST_CASE("n = 1 reduces to single cells") {
  const JointPmf p = reference_source();
  double want = 0.0;
  for (const auto& c : cell_information(p)) {
    if (c.info1 >= 0.9 || c.info2 >= 0.9 || c.info3 >= 1.5) want += c.prob;
  }
  CHECK(exact_violation_probability(p, 1, {0.9, 0.9, 1.5}) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("F_n monotone in L and bracketed by union bounds (property)") {
  const auto fail = oracle::for_all(200, 8, [](std::mt19937_64& rng, int c) {
    const JointPmf p = oracle::random_pmf(rng, 2, 2);
    const SourceStats s = compute_stats(p);
    const int n = 10 + c % 40;
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const RegionQuery q{s.h1_given_2 + 0.1 * U(rng), s.h2_given_1 + 0.1 * U(rng), 0.1};
    const SecondOrderPoint pt{U(rng), U(rng)};
    const double f = exact_Fn(p, n, q, pt);
    const double up = exact_Fn(p, n, q, {pt.L1 + 0.3, pt.L2 + 0.2});
    const double rn = std::sqrt(double(n));
    const double t1 = n * q.a1 + rn * pt.L1, t2 = n * q.a2 + rn * pt.L2;
    const double t3 = n * (q.a1 + q.a2) + rn * (pt.L1 + pt.L2);
    const double e1 = single(p, n, 0, t1), e2 = single(p, n, 1, t2), e3 = single(p, n, 2, t3);
    const double lo = std::max({e1, e2, e3});
    return up <= f + 1e-12 && lo <= f + 1e-12 && f <= e1 + e2 + e3 + 1e-12;
  });
  CHECK_MESSAGE(fail.empty(), fail);
}

TEST_CASE("enumeration budget") {
  const JointPmf big = JointPmf::from_rows(std::vector<std::vector<double>>(4, std::vector<double>(4, 1.0 / 16)));
  const SourceStats s = compute_stats(big);
  try {
    exact_Fn(big, 1000000, {s.h1, s.h2, 0.1}, {0, 0});
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BudgetExceeded);
  }
  CHECK_THROWS_AS(check_budget(reference_source(), 2001), Error);
  CHECK_NOTHROW(check_budget(reference_source(), 2000));
  const JointPmf nine = JointPmf::from_rows(std::vector<std::vector<double>>(3, std::vector<double>(3, 1.0 / 9)));
  CHECK_THROWS_AS(check_budget(nine, 10), Error);
  CHECK_THROWS_AS(exact_Fn(reference_source(), 0, {0.5, 0.5, 0.1}, {0, 0}), Error);
}

TEST_CASE("lemma bounds sandwich") {
  const JointPmf p = reference_source();
  const SourceStats s = compute_stats(p);
  for (int n : {8, 50, 200}) {
    const double M1 = std::exp(n * (s.h1_given_2 + 0.1)), M2 = std::exp(n * (s.h2 + 0.05));
    const LemmaBound up = lemma1_upper(p, n, M1, M2);
    const LemmaBound lo = lemma2_lower(p, n, M1, M2);
    CHECK(lo.value <= up.value);
    CHECK(lo.event <= up.event + 1e-15);
    CHECK(up.z == doctest::Approx(std::exp(-std::pow(n, 0.25) * kDefaultGamma)));
    CHECK(lo.z == doctest::Approx(std::exp(-std::sqrt(n) * kDefaultGamma)));
    CHECK(up.raw == doctest::Approx(up.event + 3 * up.z));
  }
  CHECK_THROWS_AS(lemma1_upper(p, 10, 0.5, 4.0), Error);
  CHECK_THROWS_AS(lemma2_lower(p, 10, 4.0, 4.0, 0.0), Error);
}

TEST_CASE("achievability bound falls with n above the polygon") {
  const JointPmf p = reference_source();
  const SourceStats s = compute_stats(p);
  double prev = 2.0;
  for (int n : {50, 200, 800}) {
    const LemmaBound up = lemma1_upper(p, n, std::exp(n * (s.h1 + 0.05)), std::exp(n * (s.h2 + 0.05)));
    CHECK(up.raw < prev);
    prev = up.raw;
  }
  CHECK(prev < 0.3);
}

TEST_CASE("convergence report") {
  const JointPmf p = reference_source();
  const SourceStats s = compute_stats(p);
  SUBCASE("corner") {
    const auto rows = convergence_report(p, anchor_corner1(s, 0.1), {0.5, 0.5}, {400, 100, 1600});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].n == 100);
    CHECK(rows[2].n == 1600);
    for (const auto& r : rows) CHECK(r.gap == doctest::Approx(std::abs(r.exact - r.gaussian)));
    CHECK(rows[2].gap < rows[0].gap);
  }
  SUBCASE("diagonal face at zero is one half") {
    // The reference source has I(X1;X2) of about 2e-3 nats, too small for the side events to
    // vanish at enumerable n; use a strongly correlated pair instead.
    const JointPmf c = make_joint_pmf({{0.4, 0.1}, {0.05, 0.45}});
    const SourceStats cs = compute_stats(c);
    const auto rows = convergence_report(c, anchor_case2(cs, 0.5, 0.5), {0.0, 0.0}, {200, 1600});
    CHECK(rows[0].gaussian == doctest::Approx(0.5));
    CHECK(std::abs(rows[1].exact - 0.5) < 0.05);
  }
  SUBCASE("interior and exterior") {
    const auto in = convergence_report(p, {s.h1 + 0.1, s.h2 + 0.1, 0.1}, {0, 0}, {100});
    CHECK(in[0].gaussian == 0.0);
    const auto out = convergence_report(p, {s.h1_given_2 - 0.1, s.h2, 0.1}, {0, 0}, {100});
    CHECK(out[0].gaussian == 1.0);
    CHECK(out[0].exact > 0.5);
  }
}
