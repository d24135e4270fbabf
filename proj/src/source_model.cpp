#include "swdisp/source_model.hpp"

#include "swdisp/error.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace swdisp {

namespace {
constexpr double kInputSumTol = 1e-9;
constexpr double kWeightSumTol = 1e-12;
}  // namespace

JointPmf::JointPmf(std::size_t rows, std::size_t cols, std::vector<double> p)
    : rows_(rows), cols_(cols), p_(std::move(p)), p1_(rows, 0.0), p2_(cols, 0.0) {
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      p1_[i] += p_[i * cols_ + j];
      p2_[j] += p_[i * cols_ + j];
    }
  }
}

JointPmf JointPmf::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.size() < 2 || rows.front().size() < 2) {
    throw Error(ErrorCode::DimensionMismatch, "pmf needs at least 2 symbols per alphabet");
  }
  const std::size_t cols = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      throw Error(ErrorCode::DimensionMismatch, "row " + std::to_string(i) + " has a different length");
    }
    for (double v : rows[i]) {
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorCode::NegativeEntry, "entries must be finite and >= 0");
      }
      flat.push_back(v);
    }
  }
  const double sum = std::accumulate(flat.begin(), flat.end(), 0.0);
  if (std::abs(sum - 1.0) > kInputSumTol) {
    throw Error(ErrorCode::SumNotOne, "entries sum to " + std::to_string(sum));
  }
  JointPmf pmf(rows.size(), cols, std::move(flat));
  for (std::size_t i = 0; i < pmf.rows_; ++i) {
    if (pmf.p1_[i] <= 0.0) throw Error(ErrorCode::ZeroMarginal, "x1 symbol " + std::to_string(i) + " has zero mass");
  }
  for (std::size_t j = 0; j < pmf.cols_; ++j) {
    if (pmf.p2_[j] <= 0.0) throw Error(ErrorCode::ZeroMarginal, "x2 symbol " + std::to_string(j) + " has zero mass");
  }
  return pmf;
}

std::vector<std::vector<double>> JointPmf::to_rows() const {
  std::vector<std::vector<double>> out(rows_, std::vector<double>(cols_));
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out[i][j] = (*this)(i, j);
  }
  return out;
}

std::vector<CellInfo> cell_information(const JointPmf& pmf) {
  std::vector<CellInfo> cells;
  cells.reserve(pmf.cells());
  for (std::size_t i = 0; i < pmf.rows(); ++i) {
    for (std::size_t j = 0; j < pmf.cols(); ++j) {
      const double p = pmf(i, j);
      if (p <= 0.0) continue;
      cells.push_back({i, j, p, -std::log(pmf.cond1_given_2(i, j)),
                       -std::log(pmf.cond2_given_1(i, j)), -std::log(p)});
    }
  }
  return cells;
}

SourceStats compute_stats(const JointPmf& pmf) {
  const auto cells = cell_information(pmf);
  SourceStats s;
  for (const auto& c : cells) {
    s.h1_given_2 += c.prob * c.info1;
    s.h2_given_1 += c.prob * c.info2;
    s.h12 += c.prob * c.info3;
  }
  for (double p : pmf.marginal1()) s.h1 -= p * std::log(p);
  for (double p : pmf.marginal2()) s.h2 -= p * std::log(p);
  double mi = 0.0;
  for (const auto& c : cells) {
    mi += c.prob * std::log(c.prob / (pmf.marginal1()[c.x1] * pmf.marginal2()[c.x2]));
  }
  s.mutual_info = std::max(0.0, mi);

  Eigen::Matrix3d sigma = Eigen::Matrix3d::Zero();
  for (const auto& c : cells) {
    const Eigen::Vector3d z(c.info1 - s.h1_given_2, c.info2 - s.h2_given_1, c.info3 - s.h12);
    sigma += c.prob * (z * z.transpose());
  }
  s.sigma = Cov3(sigma);
  s.positive_definite = s.sigma.positive_definite();
  return s;
}

SourceStats SourceStats::to_bits() const {
  SourceStats b = *this;
  b.h1_given_2 = nats_to_bits(h1_given_2);
  b.h2_given_1 = nats_to_bits(h2_given_1);
  b.h12 = nats_to_bits(h12);
  b.h1 = nats_to_bits(h1);
  b.h2 = nats_to_bits(h2);
  b.mutual_info = nats_to_bits(mutual_info);
  b.sigma = Cov3(sigma.matrix() / (kLn2 * kLn2));
  return b;
}

MixedSource MixedSource::make(std::vector<Component> components) {
  if (components.empty()) throw Error(ErrorCode::EmptyMixture, "mixture has no components");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0 && c.weight <= 1.0)) {
      throw Error(ErrorCode::WeightSumNotOne, "component weights must lie in (0,1]");
    }
    if (c.pmf.rows() != components.front().pmf.rows() ||
        c.pmf.cols() != components.front().pmf.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "components have different alphabet sizes");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > kWeightSumTol) {
    throw Error(ErrorCode::WeightSumNotOne, "weights sum to " + std::to_string(total));
  }
  return MixedSource(std::move(components));
}

JointPmf reference_source() { return JointPmf::from_rows({{0.5, 0.25}, {0.15, 0.1}}); }

}  // namespace swdisp
