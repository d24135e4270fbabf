#pragma once

// Independent reference computations used only by the tests. None of them
// share code paths with the library routines they check.

#include "swdisp/source_model.hpp"

#include <Eigen/Cholesky>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/owens_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace oracle {

inline double norm_cdf(double x) { return boost::math::cdf(boost::math::normal(), x); }
inline double norm_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

// Bivariate normal CDF through Owen's T function.
inline double owen_phi2(double h, double k, double rho) {
  const double s = std::sqrt(1.0 - rho * rho);
  if (h == 0.0) h = 1e-300;
  if (k == 0.0) k = 1e-300;
  const double ah = (k - rho * h) / (h * s);
  const double ak = (h - rho * k) / (k * s);
  const double beta = (h * k < 0.0 || (h * k == 0.0 && h + k < 0.0)) ? 0.5 : 0.0;
  return 0.5 * norm_cdf(h) + 0.5 * norm_cdf(k) - boost::math::owens_t(h, ah) -
         boost::math::owens_t(k, ak) - beta;
}

inline double orthant2(double rho) { return 0.25 + std::asin(rho) / (2.0 * std::numbers::pi); }

inline double orthant3(double r12, double r13, double r23) {
  return 0.125 + (std::asin(r12) + std::asin(r13) + std::asin(r23)) / (4.0 * std::numbers::pi);
}

struct QmcResult {
  double value;
  double std_error;
};

// Genz separation of variables with a randomly shifted Richtmyer lattice.
inline QmcResult genz_phi3(const Eigen::Vector3d& t, const Eigen::Matrix3d& cov, int points = 20000,
                           int shifts = 12, std::uint64_t seed = 7) {
  const Eigen::Matrix3d L = cov.llt().matrixL();
  const double alpha[2] = {std::sqrt(2.0), std::sqrt(3.0)};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> est;
  for (int s = 0; s < shifts; ++s) {
    const double sh[2] = {U(rng), U(rng)};
    double acc = 0.0;
    for (int i = 1; i <= points; ++i) {
      double w[2];
      for (int d = 0; d < 2; ++d) {
        double v = std::fmod(i * alpha[d] + sh[d], 1.0);
        w[d] = std::abs(2.0 * v - 1.0);  // baker's transform
      }
      const double e1 = norm_cdf(t(0) / L(0, 0));
      const double y1 = norm_quantile(std::clamp(w[0] * e1, 1e-300, 1.0 - 1e-16));
      const double e2 = norm_cdf((t(1) - L(1, 0) * y1) / L(1, 1));
      const double y2 = norm_quantile(std::clamp(w[1] * e2, 1e-300, 1.0 - 1e-16));
      const double e3 = norm_cdf((t(2) - L(2, 0) * y1 - L(2, 1) * y2) / L(2, 2));
      acc += e1 * e2 * e3;
    }
    est.push_back(acc / points);
  }
  double mean = 0.0;
  for (double e : est) mean += e;
  mean /= est.size();
  double var = 0.0;
  for (double e : est) var += (e - mean) * (e - mean);
  var /= (est.size() - 1) * est.size();
  return {mean, std::sqrt(var)};
}

// Random positive-definite covariance, A A^T + 0.05 I with Gaussian A.
inline swdisp::Cov3 random_cov(std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  Eigen::Matrix3d a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = N(rng);
  return swdisp::Cov3(a * a.transpose() + 0.05 * Eigen::Matrix3d::Identity());
}

// Random pmf with every cell positive (floor keeps the marginals nonzero).
inline swdisp::JointPmf random_pmf(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                   double floor = 1e-3) {
  std::exponential_distribution<double> E(1.0);
  std::vector<std::vector<double>> p(rows, std::vector<double>(cols));
  double total = 0.0;
  for (auto& r : p) {
    for (auto& v : r) total += (v = E(rng) + floor);
  }
  // Normalize, then push the rounding residue into the largest cell.
  double sum = 0.0;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      p[i][j] /= total;
      sum += p[i][j];
      if (p[i][j] > p[bi][bj]) bi = i, bj = j;
    }
  }
  p[bi][bj] += 1.0 - sum;
  return swdisp::JointPmf::from_rows(p);
}

// Central differences of a scalar function.
inline double d1(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}
inline double d2(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// F_n by visiting every sequence pair of length n (tiny n only).
inline double brute_Fn(const swdisp::JointPmf& pmf, int n, double t1, double t2, double t3) {
  const std::size_t k = pmf.cells();
  std::vector<std::size_t> seq(static_cast<std::size_t>(n), 0);
  double total = 0.0;
  for (;;) {
    double p = 1.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (std::size_t c : seq) {
      const std::size_t i = c / pmf.cols(), j = c % pmf.cols();
      const double q = pmf(i, j);
      p *= q;
      if (q > 0.0) {
        s1 -= std::log(q / pmf.marginal2()[j]);
        s2 -= std::log(q / pmf.marginal1()[i]);
        s3 -= std::log(q);
      }
    }
    if (p > 0.0 && (s1 >= t1 || s2 >= t2 || s3 >= t3)) total += p;
    std::size_t pos = 0;
    while (pos < seq.size() && ++seq[pos] == k) seq[pos++] = 0;
    if (pos == seq.size()) break;
  }
  return total;
}

// Run `body(rng, case_index)` for `cases` independently seeded cases; the
// returned string is empty on success and names the first failing case.
inline std::string for_all(int cases, std::uint64_t seed,
                           const std::function<bool(std::mt19937_64&, int)>& body) {
  for (int c = 0; c < cases; ++c) {
    std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(c));
    if (!body(rng, c)) return "case " + std::to_string(c) + " (seed " + std::to_string(seed) + ")";
  }
  return {};
}

}  // namespace oracle
