#pragma once

// Gallager-type upper bound on the Slepian-Wolf error probability with the
// three exponent parameters optimized independently, its Gaussian
// asymptotics, and contour data comparing it with the second-order law.

#include "swdisp/region.hpp"
#include "swdisp/source_model.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <vector>

namespace swdisp {

enum class Exponent { E1, E2, E3 };

// E1(s) = log sum_x2 (sum_x1 P(x1,x2)^(1/(1+s)))^(1+s)
// E2(s) = the same with the roles of x1 and x2 swapped
// E3(s) = (1+s) log sum P(x1,x2)^(1/(1+s))
// Convex on [0,1] with E(0) = 0, E'(0) the matching entropy and E''(0) the
// matching diagonal entry of sigma.
class ExponentFn {
 public:
  ExponentFn(Exponent which, const JointPmf& pmf);

  // Throws OutOfRange unless 0 <= s <= 1.
  double operator()(double s) const;
  Exponent which() const noexcept { return which_; }

 private:
  Exponent which_;
  // log P grouped by the outer summation index; -inf cells dropped.
  std::vector<std::vector<double>> groups_;
};

double exponent(Exponent which, const JointPmf& pmf, double s);

struct ScalarMax {
  double arg;
  double value;
};

// Maximize a function assumed concave on [lo, hi]: a 64-point scan picks the
// bracket, golden-section refines it to 1e-10.
template <class F>
ScalarMax maximize_concave(F&& f, double lo = 0.0, double hi = 1.0, double tol = 1e-10);

struct KoshelevBound {
  double value;  // min(raw, 1)
  double raw;
  bool clamped;
  std::array<double, 3> s;         // optimizers for the R1, R2, R1+R2 terms
  std::array<double, 3> exponent;  // max_s (R s - E(s)) per term, nats
};

// sum over the three terms of min_s exp(-n (R s - E(s))), with R = R1, R2,
// R1 + R2. Rates in nats. Throws OutOfRange for n < 1 or non-finite rates.
KoshelevBound koshelev_bound(const JointPmf& pmf, double R1, double R2, double n);

// Large-n form of the bound for a boundary case. Throws
// SignConstraintViolated when L1 < 0 (or L2 < 0, L1 + L2 < 0) where the
// case requires it, UnsupportedCase for interior and exterior anchors.
double gaussian_tail_bound(const SourceStats& stats, const BoundaryCase& c,
                           const SecondOrderPoint& pt);

struct ComparisonRow {
  double L1;
  double L2;
  double err_second_order;             // 1 - Phi_case(L)
  std::optional<double> err_koshelev;  // empty where the sign constraint fails
  std::optional<double> err_finite_n;  // exact bound at anchor + L / sqrt(n)
};

struct FiniteNBound {
  const JointPmf* pmf;
  RegionQuery anchor;
  double n;
};

std::vector<SecondOrderPoint> rectangular_grid(const LinearGrid& l1, const LinearGrid& l2);
std::vector<SecondOrderPoint> diagonal_sweep(const LinearGrid& l);

std::vector<ComparisonRow> comparison_table(const SourceStats& stats, const BoundaryCase& c,
                                            const std::vector<SecondOrderPoint>& points,
                                            const std::optional<FiniteNBound>& finite = {});

template <class F>
ScalarMax maximize_concave(F&& f, double lo, double hi, double tol) {
  constexpr int kGrid = 64;
  int best = 0;
  double best_v = f(lo);
  for (int k = 1; k < kGrid; ++k) {
    const double v = f(lo + (hi - lo) * k / (kGrid - 1));
    if (v > best_v) {
      best_v = v;
      best = k;
    }
  }
  const double step = (hi - lo) / (kGrid - 1);
  double a = lo + step * std::max(0, best - 1);
  double b = lo + step * std::min(kGrid - 1, best + 1);

  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
  }
  const double arg = 0.5 * (a + b);
  const double v = f(arg);
  if (v >= best_v) return {arg, v};
  return {lo + step * best, best_v};
}

}  // namespace swdisp
