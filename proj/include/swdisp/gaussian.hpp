#pragma once

// Centered normal CDFs in one, two and three dimensions.
//
// Thresholds may be +/-infinity (kUnbounded); an unbounded coordinate is
// marginalized out exactly rather than approximated by a large float.
// Zero variances are allowed: the corresponding coordinate is the point
// mass at 0 and its CDF is the right-continuous unit step.

#include <Eigen/Core>

#include <array>
#include <initializer_list>
#include <limits>
#include <span>

namespace swdisp {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

// Coordinates of the self-information vector: -log P(x1|x2), -log P(x2|x1),
// -log P(x1,x2).
enum class Coord : int { Cond1 = 0, Cond2 = 1, Joint = 2 };

// Symmetric positive semidefinite 3x3 covariance.
class Cov3 {
 public:
  // Throws NotPSD if asymmetric beyond 1e-12 or an eigenvalue is below
  // -1e-12 (relative to the largest diagonal entry when that exceeds 1).
  explicit Cov3(const Eigen::Matrix3d& m);

  static Cov3 zero() { return Cov3(Eigen::Matrix3d::Zero()); }

  const Eigen::Matrix3d& matrix() const noexcept { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  double operator()(Coord i, Coord j) const {
    return m_(static_cast<int>(i), static_cast<int>(j));
  }
  double min_eigenvalue() const noexcept { return min_eig_; }
  bool positive_definite(double tol = 1e-10) const noexcept { return min_eig_ > tol; }

 private:
  Eigen::Matrix3d m_;
  double min_eig_;
};

// Sorted, duplicate-free, nonempty subset of the three coordinates.
class MarginalIndex {
 public:
  MarginalIndex(std::initializer_list<Coord> coords);

  std::span<const int> indices() const noexcept { return {idx_.data(), size_}; }
  std::size_t size() const noexcept { return size_; }

 private:
  std::array<int, 3> idx_{};
  std::size_t size_ = 0;
};

double phi1(double t, double var);

// Bivariate CDF P(Y1 <= t1, Y2 <= t2). |correlation| = 1 reduces to a
// univariate evaluation on the binding coordinate.
double phi2(double t1, double t2, const Eigen::Matrix2d& cov);

// Trivariate CDF by conditioning on the coordinate of largest variance and
// integrating phi2 of the conditional law. Deterministic.
double phi3(double t1, double t2, double t3, const Cov3& cov);

// Principal submatrix of cov on the kept coordinates.
Eigen::MatrixXd marginal(const Cov3& cov, const MarginalIndex& keep);

// CDF of the marginal on `keep`, evaluated at thresholds listed in the same
// order as keep.indices().
double phi_marginal(const Cov3& cov, const MarginalIndex& keep, std::span<const double> t);

// Smallest t with phi1(t, var) >= q.
double phi1_inv(double q, double var);

}  // namespace swdisp
