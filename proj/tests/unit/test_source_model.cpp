#include "oracles.hpp"
#include "swdisp/error.hpp"
#include "swdisp/source_model.hpp"

#include <doctest.h>

using namespace swdisp;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("reference source entropies and dispersion in bits") {
  const SourceStats b = compute_stats(reference_source()).to_bits();
  CHECK(b.h1_given_2 == doctest::Approx(0.80867).epsilon(1e-5));
  CHECK(b.h2 == doctest::Approx(0.93407).epsilon(1e-5));
  CHECK(b.h12 == doctest::Approx(1.74274).epsilon(1e-5));
  CHECK(b.h1 == doctest::Approx(0.81128).epsilon(1e-5));
  CHECK(b.sigma(0, 0) == doctest::Approx(0.47454).epsilon(1e-4));
  CHECK(b.sigma(0, 2) == doctest::Approx(0.49156).epsilon(1e-4));
  CHECK(b.sigma(2, 2) == doctest::Approx(0.69003).epsilon(1e-4));
  CHECK(b.positive_definite);
}

TEST_CASE("the transposed reference matrix is a different source") {
  const SourceStats b = compute_stats(JointPmf::from_rows({{0.5, 0.15}, {0.25, 0.1}})).to_bits();
  CHECK(std::abs(b.h1_given_2 - 0.809) > 0.1);
  CHECK(b.h12 == doctest::Approx(1.74274).epsilon(1e-5));
}

TEST_CASE("input validation") {
  CHECK(code_of([] { JointPmf::from_rows({{0.5, -0.1}, {0.3, 0.3}}); }) == ErrorCode::NegativeEntry);
  CHECK(code_of([] { JointPmf::from_rows({{0.5, 0.1}, {0.3, 0.3}}); }) == ErrorCode::SumNotOne);
  CHECK(code_of([] { JointPmf::from_rows({{0.5, 0.5}, {0.0, 0.0}}); }) == ErrorCode::ZeroMarginal);
  CHECK(code_of([] { JointPmf::from_rows({{0.5, 0.25}, {0.25}}); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([] { JointPmf::from_rows({{1.0}}); }) == ErrorCode::DimensionMismatch);
  // 1e-10 off is within tolerance and kept as given.
  const JointPmf p = JointPmf::from_rows({{0.5 + 1e-10, 0.25}, {0.15, 0.1}});
  CHECK(p(0, 0) == 0.5 + 1e-10);
}

TEST_CASE("independent uniform pair has a degenerate dispersion matrix") {
  const SourceStats s = compute_stats(make_joint_pmf({{0.25, 0.25}, {0.25, 0.25}}));
  CHECK(s.h1_given_2 == doctest::Approx(std::log(2.0)));
  CHECK(s.mutual_info == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_FALSE(s.positive_definite);
  CHECK(s.sigma.matrix().cwiseAbs().maxCoeff() < 1e-20);
}

TEST_CASE("chain rule and sigma from brute-force moments (property)") {
  const auto fail = oracle::for_all(1000, 3, [](std::mt19937_64& rng, int c) {
    const std::size_t r = 2 + c % 3, k = 2 + (c / 3) % 3;
    const JointPmf p = oracle::random_pmf(rng, r, k);
    const SourceStats s = compute_stats(p);
    const bool chain = std::abs(s.h12 - (s.h1_given_2 + s.h2)) < 1e-12 &&
                       std::abs(s.h12 - (s.h2_given_1 + s.h1)) < 1e-12 &&
                       std::abs(s.mutual_info - (s.h1 - s.h1_given_2)) < 1e-12;
    // E[i_a i_b] - E[i_a] E[i_b] accumulated directly from the cells.
    Eigen::Matrix3d m2 = Eigen::Matrix3d::Zero();
    Eigen::Vector3d m1 = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const double q = p(i, j);
        const Eigen::Vector3d v(-std::log(q / p.marginal2()[j]), -std::log(q / p.marginal1()[i]), -std::log(q));
        m1 += q * v;
        m2 += q * v * v.transpose();
      }
    }
    const Eigen::Matrix3d cov = m2 - m1 * m1.transpose();
    return chain && (cov - s.sigma.matrix()).cwiseAbs().maxCoeff() < 1e-10;
  });
  CHECK_MESSAGE(fail.empty(), fail);
}

TEST_CASE("unit conversion") {
  const SourceStats s = compute_stats(reference_source());
  const SourceStats b = s.to_bits();
  CHECK(b.h12 == doctest::Approx(s.h12 / std::log(2.0)));
  CHECK(b.sigma(1, 2) == doctest::Approx(s.sigma(1, 2) / (std::log(2.0) * std::log(2.0))));
  CHECK(bits_to_nats(nats_to_bits(0.7)) == doctest::Approx(0.7));
}

TEST_CASE("mixture validation") {
  const JointPmf a = reference_source();
  const JointPmf b = make_joint_pmf({{0.8, 0.05}, {0.05, 0.1}});
  CHECK(make_mixed({{0.3, a}, {0.7, b}}).size() == 2);
  CHECK(code_of([&] { make_mixed({}); }) == ErrorCode::EmptyMixture);
  CHECK(code_of([&] { make_mixed({{0.3, a}, {0.6, b}}); }) == ErrorCode::WeightSumNotOne);
  CHECK(code_of([&] { make_mixed({{0.0, a}, {1.0, b}}); }) == ErrorCode::WeightSumNotOne);
  const JointPmf c = make_joint_pmf({{0.2, 0.2, 0.1}, {0.2, 0.2, 0.1}});
  CHECK(code_of([&] { make_mixed({{0.5, a}, {0.5, c}}); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("zero cells are skipped in the information table") {
  const JointPmf p = make_joint_pmf({{0.5, 0.0}, {0.2, 0.3}});
  CHECK(cell_information(p).size() == 3);
  const SourceStats s = compute_stats(p);
  CHECK(std::isfinite(s.h12));
}
