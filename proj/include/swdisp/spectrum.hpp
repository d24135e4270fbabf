#pragma once

// Finite-n information spectrum of an i.i.d. source pair.
//
// F_n(L1, L2 | a1, a2) is the probability that at least one of
//   -log P(X1^n|X2^n) >= n a1 + sqrt(n) L1
//   -log P(X2^n|X1^n) >= n a2 + sqrt(n) L2
//   -log P(X1^n X2^n) >= n (a1 + a2) + sqrt(n) (L1 + L2)
// holds. The three sums depend on the sequence only through its joint type,
// so F_n is computed exactly by enumerating compositions of n.

#include "swdisp/region.hpp"
#include "swdisp/source_model.hpp"

#include <cstdint>
#include <vector>

namespace swdisp {

struct SpectrumTriple {
  double u1;
  double u2;
  double u3;
};

// Normalize the raw self-information sums of one length-n sample.
SpectrumTriple normalize(double s1, double s2, double s3, int n, const RegionQuery& q);

struct TypeClass {
  std::vector<int> counts;  // over the positive-probability cells, in cell_information order
  double log_prob;          // probability of the whole class, nats
};

struct EnumerationBudget {
  std::size_t max_cells = 8;
  int max_n = 2000;
  double max_compositions = 2e9;
};

// C(n + k - 1, k - 1) in floating point.
double composition_count(int n, int k);

// Throws BudgetExceeded if the enumeration for (pmf, n) is over budget.
void check_budget(const JointPmf& pmf, int n, const EnumerationBudget& budget = {});

// All type classes of length n; intended for small n.
std::vector<TypeClass> type_classes(const JointPmf& pmf, int n,
                                    const EnumerationBudget& budget = {});

// Violation thresholds on the raw sums (nats). A sample violates when any
// sum is >= its threshold.
struct RawThresholds {
  double t1;
  double t2;
  double t3;
};

double exact_violation_probability(const JointPmf& pmf, int n, const RawThresholds& t,
                                   const EnumerationBudget& budget = {});

double exact_Fn(const JointPmf& pmf, int n, const RegionQuery& q, const SecondOrderPoint& pt,
                const EnumerationBudget& budget = {});

struct McEstimate {
  double estimate;
  double std_error;  // sqrt(p (1 - p) / samples)
  std::uint64_t samples;
  std::uint64_t hits;
};

// Reproducible for fixed seed. Throws InvalidArgument for samples == 0.
McEstimate mc_Fn(const JointPmf& pmf, int n, const RegionQuery& q, const SecondOrderPoint& pt,
                 std::uint64_t samples, std::uint64_t seed);

inline constexpr double kDefaultGamma = 0.5;

struct LemmaBound {
  double value;       // clamped to [0, 1]
  double raw;         // event probability +/- 3 z
  double event;       // the threshold-event probability
  double z;
  bool clamped;
};

// Achievability: Pr{any -log P >= log M - n^(1/4) gamma} + 3 z with
// z = exp(-n^(1/4) gamma). M counts are real >= 1.
LemmaBound lemma1_upper(const JointPmf& pmf, int n, double M1, double M2,
                        double gamma = kDefaultGamma, const EnumerationBudget& budget = {});

// Converse: Pr{any -log P >= log M + sqrt(n) gamma} - 3 z with
// z = exp(-sqrt(n) gamma).
LemmaBound lemma2_lower(const JointPmf& pmf, int n, double M1, double M2,
                        double gamma = kDefaultGamma, const EnumerationBudget& budget = {});

struct ConvergenceRow {
  int n;
  double exact;
  double gaussian;  // 1 - Phi_case(L); 0 inside, 1 outside the polygon
  double gap;
};

std::vector<ConvergenceRow> convergence_report(const JointPmf& pmf, const RegionQuery& q,
                                               const SecondOrderPoint& pt,
                                               std::vector<int> n_list,
                                               const EnumerationBudget& budget = {});

}  // namespace swdisp
