#include "swdisp/bounds.hpp"

#include "swdisp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace swdisp {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double log_sum_exp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

// exp(-L^2 / 2 var), with a zero variance treated as the limit.
double tail(double L, double var) {
  if (var <= 0.0) return L > 0.0 ? 0.0 : 1.0;
  return std::exp(-L * L / (2.0 * var));
}

void require_nonneg(double v, const char* what) {
  if (v < 0.0) throw Error(ErrorCode::SignConstraintViolated, std::string(what) + " must be >= 0");
}

}  // namespace

ExponentFn::ExponentFn(Exponent which, const JointPmf& pmf) : which_(which) {
  auto logp = [&](std::size_t i, std::size_t j) { return std::log(pmf(i, j)); };
  switch (which) {
    case Exponent::E1:
      groups_.resize(pmf.cols());
      for (std::size_t j = 0; j < pmf.cols(); ++j) {
        for (std::size_t i = 0; i < pmf.rows(); ++i) {
          if (pmf(i, j) > 0.0) groups_[j].push_back(logp(i, j));
        }
      }
      break;
    case Exponent::E2:
      groups_.resize(pmf.rows());
      for (std::size_t i = 0; i < pmf.rows(); ++i) {
        for (std::size_t j = 0; j < pmf.cols(); ++j) {
          if (pmf(i, j) > 0.0) groups_[i].push_back(logp(i, j));
        }
      }
      break;
    case Exponent::E3:
      groups_.resize(1);
      for (std::size_t i = 0; i < pmf.rows(); ++i) {
        for (std::size_t j = 0; j < pmf.cols(); ++j) {
          if (pmf(i, j) > 0.0) groups_[0].push_back(logp(i, j));
        }
      }
      break;
  }
}

double ExponentFn::operator()(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorCode::OutOfRange, "exponent parameter must be in [0,1]");
  const double rho = 1.0 + s;
  std::vector<double> outer;
  outer.reserve(groups_.size());
  std::vector<double> scaled;
  for (const auto& g : groups_) {
    scaled.assign(g.begin(), g.end());
    for (double& x : scaled) x /= rho;
    outer.push_back(rho * log_sum_exp(scaled));
  }
  return log_sum_exp(outer);
}

double exponent(Exponent which, const JointPmf& pmf, double s) {
  return ExponentFn(which, pmf)(s);
}

KoshelevBound koshelev_bound(const JointPmf& pmf, double R1, double R2, double n) {
  if (!(n >= 1.0) || !std::isfinite(n)) throw Error(ErrorCode::OutOfRange, "blocklength must be >= 1");
  if (!std::isfinite(R1) || !std::isfinite(R2)) throw Error(ErrorCode::OutOfRange, "rates must be finite");
  const std::array<Exponent, 3> which{Exponent::E1, Exponent::E2, Exponent::E3};
  const std::array<double, 3> rate{R1, R2, R1 + R2};
  KoshelevBound out{};
  out.raw = 0.0;
  for (int i = 0; i < 3; ++i) {
    const ExponentFn e(which[i], pmf);
    const double r = rate[i];
    const ScalarMax m = maximize_concave([&](double s) { return r * s - e(s); });
    out.s[i] = m.arg;
    out.exponent[i] = m.value;
    out.raw += std::exp(-n * m.value);
  }
  out.clamped = out.raw > 1.0;
  out.value = std::min(out.raw, 1.0);
  return out;
}

double gaussian_tail_bound(const SourceStats& stats, const BoundaryCase& c,
                           const SecondOrderPoint& pt) {
  const double v11 = stats.sigma(Coord::Cond1, Coord::Cond1);
  const double v22 = stats.sigma(Coord::Cond2, Coord::Cond2);
  const double v33 = stats.sigma(Coord::Joint, Coord::Joint);
  const double s = pt.L1 + pt.L2;
  return std::visit(
      Overloaded{
          [&](const CornerI& k) {
            switch (k.which) {
              case Corner::First:
                require_nonneg(pt.L1, "L1");
                require_nonneg(s, "L1+L2");
                return tail(pt.L1, v11) + tail(s, v33);
              case Corner::Second:
                require_nonneg(pt.L2, "L2");
                require_nonneg(s, "L1+L2");
                return tail(pt.L2, v22) + tail(s, v33);
              case Corner::Both: break;
            }
            require_nonneg(pt.L1, "L1");
            require_nonneg(pt.L2, "L2");
            return tail(pt.L1, v11) + tail(pt.L2, v22) + tail(s, v33);
          },
          [&](const NonCornerII&) {
            require_nonneg(s, "L1+L2");
            return tail(s, v33);
          },
          [&](const FullSideIII& k) {
            if (k.which == Side::A) {
              require_nonneg(pt.L1, "L1");
              return tail(pt.L1, v11);
            }
            require_nonneg(pt.L2, "L2");
            return tail(pt.L2, v22);
          },
          [](const auto&) -> double {
            throw Error(ErrorCode::UnsupportedCase, "no tail bound for interior or exterior anchors");
          },
      },
      c);
}

std::vector<SecondOrderPoint> rectangular_grid(const LinearGrid& l1, const LinearGrid& l2) {
  std::vector<SecondOrderPoint> out;
  const auto xs = l1.values();
  const auto ys = l2.values();
  out.reserve(xs.size() * ys.size());
  for (double x : xs) {
    for (double y : ys) out.push_back({x, y});
  }
  return out;
}

std::vector<SecondOrderPoint> diagonal_sweep(const LinearGrid& l) {
  std::vector<SecondOrderPoint> out;
  for (double v : l.values()) out.push_back({v, v});
  return out;
}

std::vector<ComparisonRow> comparison_table(const SourceStats& stats, const BoundaryCase& c,
                                            const std::vector<SecondOrderPoint>& points,
                                            const std::optional<FiniteNBound>& finite) {
  std::vector<ComparisonRow> rows;
  rows.reserve(points.size());
  for (const auto& pt : points) {
    ComparisonRow r{pt.L1, pt.L2, 1.0 - case_probability(stats, c, pt), std::nullopt, std::nullopt};
    try {
      r.err_koshelev = gaussian_tail_bound(stats, c, pt);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SignConstraintViolated) throw;
    }
    if (finite) {
      const double rn = std::sqrt(finite->n);
      r.err_finite_n = koshelev_bound(*finite->pmf, finite->anchor.a1 + pt.L1 / rn,
                                      finite->anchor.a2 + pt.L2 / rn, finite->n)
                           .value;
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace swdisp
