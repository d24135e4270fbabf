#include "swdisp/simulator.hpp"

#include "random.hpp"
#include "swdisp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace swdisp {

namespace {

std::uint64_t power(std::size_t base, int n) {
  std::uint64_t v = 1;
  for (int i = 0; i < n; ++i) v *= base;
  return v;
}

void check_limits(const JointPmf& pmf, int n, const SimulatorLimits& limits) {
  if (n < 1) throw Error(ErrorCode::OutOfRange, "blocklength must be >= 1");
  const double pairs = std::pow(double(pmf.rows()), n) * std::pow(double(pmf.cols()), n);
  if (pairs > limits.max_pairs) {
    throw Error(ErrorCode::BudgetExceeded,
                std::to_string(pairs) + " sequence pairs exceed the cap " + std::to_string(limits.max_pairs));
  }
}

void build_csr(const std::vector<std::uint64_t>& bins, std::vector<std::uint64_t>& keys,
               std::vector<std::uint32_t>& offsets, std::vector<std::uint32_t>& members) {
  // Only occupied bins are stored, so M may exceed the sequence count by far.
  members.resize(bins.size());
  std::iota(members.begin(), members.end(), 0u);
  std::stable_sort(members.begin(), members.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return bins[a] < bins[b]; });
  keys.clear();
  offsets.clear();
  for (std::uint32_t k = 0; k < members.size(); ++k) {
    const std::uint64_t b = bins[members[k]];
    if (keys.empty() || keys.back() != b) {
      keys.push_back(b);
      offsets.push_back(k);
    }
  }
  offsets.push_back(static_cast<std::uint32_t>(members.size()));
}

// Members of bin i, empty when no sequence landed there.
std::pair<const std::uint32_t*, const std::uint32_t*> bucket(
    const std::vector<std::uint64_t>& keys, const std::vector<std::uint32_t>& offsets,
    const std::vector<std::uint32_t>& members, std::uint64_t i) {
  const auto it = std::lower_bound(keys.begin(), keys.end(), i);
  if (it == keys.end() || *it != i) return {nullptr, nullptr};
  const auto k = static_cast<std::size_t>(it - keys.begin());
  return {members.data() + offsets[k], members.data() + offsets[k + 1]};
}

}  // namespace

BinningCode draw_code(const JointPmf& pmf, int n, std::uint64_t M1, std::uint64_t M2,
                      std::uint64_t seed, const SimulatorLimits& limits) {
  check_limits(pmf, n, limits);
  if (M1 < 1 || M2 < 1) throw Error(ErrorCode::OutOfRange, "bin counts must be >= 1");
  BinningCode code;
  code.n = n;
  code.M1 = M1;
  code.M2 = M2;
  code.seed = seed;
  std::mt19937_64 rng(seed);
  code.bin1.resize(power(pmf.rows(), n));
  code.bin2.resize(power(pmf.cols(), n));
  for (auto& b : code.bin1) b = detail::bounded(rng, M1);
  for (auto& b : code.bin2) b = detail::bounded(rng, M2);
  build_csr(code.bin1, code.keys1, code.offsets1, code.members1);
  build_csr(code.bin2, code.keys2, code.offsets2, code.members2);
  return code;
}

PairTable::PairTable(const JointPmf& pmf, int n, const SimulatorLimits& limits) : n_(n) {
  check_limits(pmf, n, limits);
  const std::size_t a1 = pmf.rows(), a2 = pmf.cols();
  count1_ = power(a1, n);
  count2_ = power(a2, n);
  std::vector<double> cell(pmf.cells());
  for (std::size_t i = 0; i < a1; ++i) {
    for (std::size_t j = 0; j < a2; ++j) cell[i * a2 + j] = std::log(pmf(i, j));
  }
  logp_.assign(count1_ * count2_, 0.0);
  // Extend one position at a time: pairs of length t+1 from pairs of length t.
  std::uint64_t c1 = 1, c2 = 1;
  std::vector<double> next;
  for (int t = 0; t < n; ++t) {
    next.assign(c1 * a1 * c2 * a2, 0.0);
    for (std::uint64_t x1 = 0; x1 < c1; ++x1) {
      for (std::uint64_t x2 = 0; x2 < c2; ++x2) {
        const double base = logp_[x1 * c2 + x2];
        for (std::size_t i = 0; i < a1; ++i) {
          for (std::size_t j = 0; j < a2; ++j) {
            next[(x1 * a1 + i) * (c2 * a2) + (x2 * a2 + j)] = base + cell[i * a2 + j];
          }
        }
      }
    }
    c1 *= a1;
    c2 *= a2;
    std::swap(logp_, next);
  }
}

DecodeResult ml_decode(const BinningCode& code, const PairTable& table, std::uint64_t i1,
                       std::uint64_t i2) {
  if (code.n != table.n()) throw Error(ErrorCode::DimensionMismatch, "code and table blocklengths differ");
  const auto [b1, e1] = bucket(code.keys1, code.offsets1, code.members1, i1);
  const auto [b2, e2] = bucket(code.keys2, code.offsets2, code.members2, i2);
  if (b1 == e1 || b2 == e2) return {0, 0, true};
  DecodeResult best{*b1, *b2, false};
  double best_v = table.log_prob(*b1, *b2);
  for (auto p = b1; p != e1; ++p) {
    for (auto q = b2; q != e2; ++q) {
      const double v = table.log_prob(*p, *q);
      if (v > best_v) {
        best_v = v;
        best.x1 = *p;
        best.x2 = *q;
      }
    }
  }
  return best;
}

DecodeResult ml_decode(const BinningCode& code, const JointPmf& pmf, std::uint64_t i1,
                       std::uint64_t i2) {
  return ml_decode(code, PairTable(pmf, code.n), i1, i2);
}

std::string_view to_string(CodeRedraw r) {
  return r == CodeRedraw::PerTrial ? "per-trial" : "fixed";
}

Interval wilson95(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) throw Error(ErrorCode::InvalidTrials, "trials must be >= 1");
  constexpr double z = 1.959963984540054;
  const double t = double(trials);
  const double p = double(successes) / t;
  const double denom = 1.0 + z * z / t;
  const double center = (p + z * z / (2.0 * t)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / t + z * z / (4.0 * t * t)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

TrialReport ensemble_error(const JointPmf& pmf, int n, std::uint64_t M1, std::uint64_t M2,
                           std::uint64_t trials, CodeRedraw redraw, std::uint64_t seed,
                           EmptyBinPolicy policy, const SimulatorLimits& limits) {
  if (trials == 0) throw Error(ErrorCode::InvalidTrials, "trials must be >= 1");
  const PairTable table(pmf, n, limits);
  BinningCode code = draw_code(pmf, n, M1, M2, seed, limits);

  const std::size_t a1 = pmf.rows(), a2 = pmf.cols();
  std::vector<double> cdf;
  double run = 0.0;
  for (double p : pmf.flat()) cdf.push_back(run += p);
  std::size_t last = 0;
  for (std::size_t c = 0; c < cdf.size(); ++c) {
    if (pmf.flat()[c] > 0.0) last = c;
  }

  TrialReport rep{};
  rep.n = n;
  rep.M1 = M1;
  rep.M2 = M2;
  rep.trials = trials;
  rep.seed = seed;
  rep.redraw = redraw;
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(detail::sub_seed(seed, t));
    if (redraw == CodeRedraw::PerTrial) code = draw_code(pmf, n, M1, M2, rng(), limits);
    std::uint64_t x1 = 0, x2 = 0;
    for (int i = 0; i < n; ++i) {
      const double u = detail::uniform01(rng) * run;
      std::size_t cell = std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
      if (cell >= cdf.size()) cell = last;
      x1 = x1 * a1 + cell / a2;
      x2 = x2 * a2 + cell % a2;
    }
    const DecodeResult d = ml_decode(code, table, code.bin1[x1], code.bin2[x2]);
    bool wrong = d.x1 != x1 || d.x2 != x2;
    if (d.empty_bin_pair) {
      ++rep.empty_bin_pairs;
      if (policy == EmptyBinPolicy::DeclareError) wrong = true;
    }
    rep.errors += wrong;
  }
  rep.rate = double(rep.errors) / double(trials);
  const Interval ci = wilson95(rep.errors, trials);
  rep.ci_low = ci.low;
  rep.ci_high = ci.high;
  rep.ci_half = std::max(rep.rate - ci.low, ci.high - rep.rate);
  return rep;
}

std::uint64_t achievability_code_size(int n, double a, double L, double gamma) {
  if (n < 1) throw Error(ErrorCode::OutOfRange, "blocklength must be >= 1");
  const double lm = n * a + L * std::sqrt(double(n)) + 2.0 * std::pow(double(n), 0.25) * gamma;
  if (!(lm < 63.0 * std::log(2.0))) throw Error(ErrorCode::OutOfRange, "code size does not fit in 64 bits");
  return static_cast<std::uint64_t>(std::max(1.0, std::ceil(std::exp(lm))));
}

}  // namespace swdisp
