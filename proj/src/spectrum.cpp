#include "swdisp/spectrum.hpp"

#include "random.hpp"
#include "swdisp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace swdisp {

namespace {

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) c += (sum - t) + x;
    else c += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

struct Cells {
  std::vector<double> logp;
  std::vector<double> info1, info2, info3;
  std::size_t size() const { return logp.size(); }
};

Cells positive_cells(const JointPmf& pmf) {
  Cells c;
  for (const auto& ci : cell_information(pmf)) {
    c.logp.push_back(std::log(ci.prob));
    c.info1.push_back(ci.info1);
    c.info2.push_back(ci.info2);
    c.info3.push_back(ci.info3);
  }
  return c;
}

// Depth-first walk over compositions of n into the cells. Subtrees whose
// total mass falls below exp(cutoff) are dropped; within a level the mass
// is log-concave in the count, so each level walks outward from its mode.
class Enumerator {
 public:
  template <class Leaf>
  Enumerator(const Cells& cells, int n, double cutoff, Leaf&& leaf)
      : cells_(cells), cutoff_(cutoff), k_(cells.size()), counts_(k_, 0) {
    logfact_.resize(static_cast<std::size_t>(n) + 1);
    logfact_[0] = 0.0;
    for (int i = 1; i <= n; ++i) logfact_[i] = logfact_[i - 1] + std::log(double(i));
    // log of the mass of cells j..k-1
    log_rest_.assign(k_ + 1, -std::numeric_limits<double>::infinity());
    for (std::size_t j = k_; j-- > 0;) {
      const double a = log_rest_[j + 1];
      const double b = cells.logp[j];
      log_rest_[j] = std::isfinite(a) ? std::max(a, b) + std::log1p(std::exp(-std::abs(a - b))) : b;
    }
    walk(0, n, logfact_[static_cast<std::size_t>(n)], 0.0, 0.0, 0.0, leaf);
  }

 private:
  // Log mass of fixing count c at level j with r trials left, given the
  // accumulated prefix term `base` (log n! - sum log c_i! + sum c_i log p_i).
  double level_mass(std::size_t j, int r, int c, double base) const {
    const int rest = r - c;
    double v = base - logfact_[static_cast<std::size_t>(c)] + c * cells_.logp[j];
    if (j + 1 < k_) {
      v += -logfact_[static_cast<std::size_t>(rest)] + (rest > 0 ? rest * log_rest_[j + 1] : 0.0);
    } else if (rest != 0) {
      return -std::numeric_limits<double>::infinity();
    }
    return v;
  }

  template <class Leaf>
  void walk(std::size_t j, int r, double base, double s1, double s2, double s3, Leaf& leaf) {
    if (j + 1 == k_) {
      counts_[j] = r;
      const double lp = level_mass(j, r, r, base);
      if (lp >= cutoff_) {
        leaf(counts_, lp, s1 + r * cells_.info1[j], s2 + r * cells_.info2[j],
             s3 + r * cells_.info3[j]);
      }
      return;
    }
    const double q = std::exp(cells_.logp[j] - log_rest_[j]);
    const int mode = std::clamp(static_cast<int>(std::floor((r + 1) * q)), 0, r);
    auto visit = [&](int c) {
      const double m = level_mass(j, r, c, base);
      if (m < cutoff_) return false;
      counts_[j] = c;
      const double next = base - logfact_[static_cast<std::size_t>(c)] + c * cells_.logp[j];
      walk(j + 1, r - c, next, s1 + c * cells_.info1[j], s2 + c * cells_.info2[j],
           s3 + c * cells_.info3[j], leaf);
      return true;
    };
    for (int c = mode; c <= r && visit(c); ++c) {
    }
    for (int c = mode - 1; c >= 0 && visit(c); --c) {
    }
  }

  const Cells& cells_;
  double cutoff_;
  std::size_t k_;
  std::vector<int> counts_;
  std::vector<double> logfact_;
  std::vector<double> log_rest_;
};

double skip_cutoff(int n, std::size_t k) {
  return std::log(1e-17) - std::log(composition_count(n, static_cast<int>(k)));
}

void require_n(int n) {
  if (n < 1) throw Error(ErrorCode::OutOfRange, "blocklength must be >= 1");
}

}  // namespace

SpectrumTriple normalize(double s1, double s2, double s3, int n, const RegionQuery& q) {
  const double r = std::sqrt(double(n));
  return {(s1 - n * q.a1) / r, (s2 - n * q.a2) / r, (s3 - n * (q.a1 + q.a2)) / r};
}

double composition_count(int n, int k) {
  // Running product of binomials; exact while the value fits in 53 bits.
  double c = 1.0;
  for (int i = 1; i < k; ++i) c = std::round(c * (n + i) / i);
  return c;
}

void check_budget(const JointPmf& pmf, int n, const EnumerationBudget& budget) {
  require_n(n);
  if (pmf.cells() > budget.max_cells) {
    throw Error(ErrorCode::BudgetExceeded,
                "alphabet product " + std::to_string(pmf.cells()) + " exceeds " +
                    std::to_string(budget.max_cells));
  }
  if (n > budget.max_n) {
    throw Error(ErrorCode::BudgetExceeded,
                "n = " + std::to_string(n) + " exceeds " + std::to_string(budget.max_n));
  }
  std::size_t k = 0;
  for (double p : pmf.flat()) k += p > 0.0;
  const double count = composition_count(n, static_cast<int>(k));
  if (count > budget.max_compositions) {
    throw Error(ErrorCode::BudgetExceeded, "too many type classes (" + std::to_string(count) + ")");
  }
}

std::vector<TypeClass> type_classes(const JointPmf& pmf, int n, const EnumerationBudget& budget) {
  check_budget(pmf, n, budget);
  const Cells cells = positive_cells(pmf);
  std::vector<TypeClass> out;
  Enumerator(cells, n, -std::numeric_limits<double>::infinity(),
             [&](const std::vector<int>& c, double lp, double, double, double) {
               out.push_back({c, lp});
             });
  return out;
}

double exact_violation_probability(const JointPmf& pmf, int n, const RawThresholds& t,
                                   const EnumerationBudget& budget) {
  check_budget(pmf, n, budget);
  const Cells cells = positive_cells(pmf);
  CompensatedSum acc;
  Enumerator(cells, n, skip_cutoff(n, cells.size()),
             [&](const std::vector<int>&, double lp, double s1, double s2, double s3) {
               if (s1 >= t.t1 || s2 >= t.t2 || s3 >= t.t3) acc.add(std::exp(lp));
             });
  return std::clamp(acc.value(), 0.0, 1.0);
}

double exact_Fn(const JointPmf& pmf, int n, const RegionQuery& q, const SecondOrderPoint& pt,
                const EnumerationBudget& budget) {
  require_n(n);
  const double r = std::sqrt(double(n));
  return exact_violation_probability(
      pmf, n, {n * q.a1 + r * pt.L1, n * q.a2 + r * pt.L2, n * (q.a1 + q.a2) + r * (pt.L1 + pt.L2)},
      budget);
}

McEstimate mc_Fn(const JointPmf& pmf, int n, const RegionQuery& q, const SecondOrderPoint& pt,
                 std::uint64_t samples, std::uint64_t seed) {
  require_n(n);
  if (samples == 0) throw Error(ErrorCode::InvalidArgument, "samples must be >= 1");
  const auto info = cell_information(pmf);
  std::vector<double> cdf;
  double run = 0.0;
  for (const auto& c : info) cdf.push_back(run += c.prob);
  const double r = std::sqrt(double(n));
  const double t1 = n * q.a1 + r * pt.L1;
  const double t2 = n * q.a2 + r * pt.L2;
  const double t3 = n * (q.a1 + q.a2) + r * (pt.L1 + pt.L2);

  std::mt19937_64 rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = detail::uniform01(rng) * run;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      const auto& c = info[std::min<std::size_t>(it - cdf.begin(), info.size() - 1)];
      s1 += c.info1;
      s2 += c.info2;
      s3 += c.info3;
    }
    hits += (s1 >= t1 || s2 >= t2 || s3 >= t3);
  }
  const double p = double(hits) / double(samples);
  return {p, std::sqrt(p * (1.0 - p) / double(samples)), samples, hits};
}

namespace {

void check_lemma_args(double M1, double M2, double gamma) {
  if (!(M1 >= 1.0) || !(M2 >= 1.0) || !std::isfinite(M1) || !std::isfinite(M2)) {
    throw Error(ErrorCode::OutOfRange, "code sizes must be finite and >= 1");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(ErrorCode::OutOfRange, "gamma must be positive");
}

}  // namespace

LemmaBound lemma1_upper(const JointPmf& pmf, int n, double M1, double M2, double gamma,
                        const EnumerationBudget& budget) {
  require_n(n);
  check_lemma_args(M1, M2, gamma);
  const double shift = std::pow(double(n), 0.25) * gamma;
  const double l1 = std::log(M1), l2 = std::log(M2);
  const double event =
      exact_violation_probability(pmf, n, {l1 - shift, l2 - shift, l1 + l2 - shift}, budget);
  const double z = std::exp(-shift);
  const double raw = event + 3.0 * z;
  return {std::min(raw, 1.0), raw, event, z, raw > 1.0};
}

LemmaBound lemma2_lower(const JointPmf& pmf, int n, double M1, double M2, double gamma,
                        const EnumerationBudget& budget) {
  require_n(n);
  check_lemma_args(M1, M2, gamma);
  const double shift = std::sqrt(double(n)) * gamma;
  const double l1 = std::log(M1), l2 = std::log(M2);
  const double event =
      exact_violation_probability(pmf, n, {l1 + shift, l2 + shift, l1 + l2 + shift}, budget);
  const double z = std::exp(-shift);
  const double raw = event - 3.0 * z;
  return {std::max(raw, 0.0), raw, event, z, raw < 0.0};
}

std::vector<ConvergenceRow> convergence_report(const JointPmf& pmf, const RegionQuery& q,
                                               const SecondOrderPoint& pt,
                                               std::vector<int> n_list,
                                               const EnumerationBudget& budget) {
  std::sort(n_list.begin(), n_list.end());
  const SourceStats stats = compute_stats(pmf);
  const BoundaryCase c = classify(stats, q);
  double gaussian = 0.0;
  if (std::holds_alternative<Exterior>(c)) gaussian = 1.0;
  else if (!std::holds_alternative<Interior>(c)) gaussian = 1.0 - case_probability(stats, c, pt);
  for (int n : n_list) check_budget(pmf, n, budget);
  std::vector<ConvergenceRow> rows;
  for (int n : n_list) {
    const double e = exact_Fn(pmf, n, q, pt, budget);
    rows.push_back({n, e, gaussian, std::abs(e - gaussian)});
  }
  return rows;
}

}  // namespace swdisp
