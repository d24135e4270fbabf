#pragma once

// Random-binning Slepian-Wolf codes with exact maximum-likelihood decoding,
// for blocklengths small enough to enumerate every sequence pair.

#include "swdisp/source_model.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace swdisp {

struct SimulatorLimits {
  // Largest |X1|^n |X2|^n accepted; 2^20 covers n = 10 for binary pairs.
  double max_pairs = 1048576.0;
};

// Sequences are indexed lexicographically, first symbol most significant.
struct BinningCode {
  int n = 0;
  std::uint64_t M1 = 0;
  std::uint64_t M2 = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> bin1;  // bin of each X1 sequence, in [0, M1)
  std::vector<std::uint64_t> bin2;

  // Occupied bins in increasing order and their members in increasing
  // sequence order (CSR layout): bin keys[k] holds members[offsets[k]..offsets[k+1]).
  std::vector<std::uint64_t> keys1, keys2;
  std::vector<std::uint32_t> offsets1, members1;
  std::vector<std::uint32_t> offsets2, members2;
};

// Throws BudgetExceeded past the limits, OutOfRange for n < 1 or M < 1.
BinningCode draw_code(const JointPmf& pmf, int n, std::uint64_t M1, std::uint64_t M2,
                      std::uint64_t seed, const SimulatorLimits& limits = {});

// log P(x1^n, x2^n) for every sequence pair, row-major in (x1, x2).
class PairTable {
 public:
  PairTable(const JointPmf& pmf, int n, const SimulatorLimits& limits = {});

  int n() const noexcept { return n_; }
  std::uint64_t count1() const noexcept { return count1_; }
  std::uint64_t count2() const noexcept { return count2_; }
  double log_prob(std::uint64_t x1, std::uint64_t x2) const { return logp_[x1 * count2_ + x2]; }

 private:
  int n_;
  std::uint64_t count1_;
  std::uint64_t count2_;
  std::vector<double> logp_;
};

struct DecodeResult {
  std::uint64_t x1;
  std::uint64_t x2;
  // No pair maps to (i1, i2); (x1, x2) is then the first pair overall.
  bool empty_bin_pair;
};

// Most probable pair with bin1 = i1 and bin2 = i2; ties go to the
// lexicographically first (x1, x2).
DecodeResult ml_decode(const BinningCode& code, const PairTable& table, std::uint64_t i1,
                       std::uint64_t i2);
DecodeResult ml_decode(const BinningCode& code, const JointPmf& pmf, std::uint64_t i1,
                       std::uint64_t i2);

enum class CodeRedraw { PerTrial, Fixed };
enum class EmptyBinPolicy { FirstPair, DeclareError };

std::string_view to_string(CodeRedraw r);

struct TrialReport {
  int n;
  std::uint64_t M1;
  std::uint64_t M2;
  std::uint64_t trials;
  std::uint64_t errors;
  std::uint64_t empty_bin_pairs;
  double rate;
  double ci_low;   // Wilson 95%
  double ci_high;
  double ci_half;  // max distance from rate to either end
  std::uint64_t seed;
  CodeRedraw redraw;
};

struct Interval {
  double low;
  double high;
};

Interval wilson95(std::uint64_t successes, std::uint64_t trials);

// Trial t uses the sub-seed derived from (seed, t), so reports do not depend
// on execution order. Throws InvalidTrials for trials == 0.
TrialReport ensemble_error(const JointPmf& pmf, int n, std::uint64_t M1, std::uint64_t M2,
                           std::uint64_t trials, CodeRedraw redraw, std::uint64_t seed,
                           EmptyBinPolicy policy = EmptyBinPolicy::FirstPair,
                           const SimulatorLimits& limits = {});

// ceil(exp(n a + L sqrt(n) + 2 n^(1/4) gamma)), the code size used by the
// achievability argument. Throws OutOfRange if it does not fit in 64 bits.
std::uint64_t achievability_code_size(int n, double a, double L, double gamma);

}  // namespace swdisp
