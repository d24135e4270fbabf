#pragma once

// Finite-alphabet correlated source pairs and their entropic statistics.
// All quantities are in nats; bits are a presentation concern (to_bits()).

#include "swdisp/gaussian.hpp"

#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace swdisp {

inline constexpr double kLn2 = std::numbers::ln2;

inline double nats_to_bits(double v) { return v / kLn2; }
inline double bits_to_nats(double v) { return v * kLn2; }

// Joint pmf P(x1, x2); rows index X1, columns index X2.
class JointPmf {
 public:
  // Throws NegativeEntry, SumNotOne (|sum-1| > 1e-9, never renormalized),
  // ZeroMarginal, DimensionMismatch for ragged or undersized input.
  static JointPmf from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t cells() const noexcept { return p_.size(); }
  double operator()(std::size_t x1, std::size_t x2) const { return p_[x1 * cols_ + x2]; }
  std::span<const double> flat() const noexcept { return p_; }

  const std::vector<double>& marginal1() const noexcept { return p1_; }
  const std::vector<double>& marginal2() const noexcept { return p2_; }
  double cond1_given_2(std::size_t x1, std::size_t x2) const { return (*this)(x1, x2) / p2_[x2]; }
  double cond2_given_1(std::size_t x1, std::size_t x2) const { return (*this)(x1, x2) / p1_[x1]; }

  std::vector<std::vector<double>> to_rows() const;

  friend bool operator==(const JointPmf&, const JointPmf&) = default;

 private:
  JointPmf(std::size_t rows, std::size_t cols, std::vector<double> p);

  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> p_;
  std::vector<double> p1_;
  std::vector<double> p2_;
};

// Per-cell self-information for the cells of positive probability.
struct CellInfo {
  std::size_t x1;
  std::size_t x2;
  double prob;
  double info1;  // -log P(x1|x2)
  double info2;  // -log P(x2|x1)
  double info3;  // -log P(x1,x2)
};

std::vector<CellInfo> cell_information(const JointPmf& pmf);

struct SourceStats {
  double h1_given_2 = 0.0;
  double h2_given_1 = 0.0;
  double h12 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double mutual_info = 0.0;
  Cov3 sigma = Cov3::zero();
  // Smallest eigenvalue of sigma exceeds 1e-10.
  bool positive_definite = false;

  // Entropies divided by ln 2, sigma by ln^2 2.
  SourceStats to_bits() const;
};

SourceStats compute_stats(const JointPmf& pmf);

class MixedSource {
 public:
  struct Component {
    double weight;
    JointPmf pmf;
  };

  // Throws EmptyMixture, WeightSumNotOne (|sum-1| > 1e-12 or any weight
  // outside (0,1]), DimensionMismatch.
  static MixedSource make(std::vector<Component> components);

  const std::vector<Component>& components() const noexcept { return components_; }
  std::size_t size() const noexcept { return components_.size(); }

 private:
  explicit MixedSource(std::vector<Component> c) : components_(std::move(c)) {}
  std::vector<Component> components_;
};

inline JointPmf make_joint_pmf(const std::vector<std::vector<double>>& rows) {
  return JointPmf::from_rows(rows);
}

inline MixedSource make_mixed(std::vector<MixedSource::Component> components) {
  return MixedSource::make(std::move(components));
}

// Binary reference pair used by the examples and tests:
// P(0,0)=0.5, P(1,0)=0.15, P(0,1)=0.25, P(1,1)=0.1 (x1 first).
JointPmf reference_source();

}  // namespace swdisp
