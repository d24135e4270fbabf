#include "swdisp/region.hpp"

#include "swdisp/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <sstream>

namespace swdisp {

namespace {

constexpr double kPdTol = 1e-10;
constexpr double kWeightTol = 1e-12;
constexpr double kBisectTol = 1e-9;
constexpr int kBisectMaxIter = 200;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int snap(double d, double tol) { return d < -tol ? -1 : (d > tol ? 1 : 0); }

std::array<double, 3> gaps(const SourceStats& s, const RegionQuery& q) {
  return {q.a1 - s.h1_given_2, q.a2 - s.h2_given_1, q.a1 + q.a2 - s.h12};
}

bool marginal_pd(const Cov3& cov, const MarginalIndex& keep) {
  const Eigen::MatrixXd sub = marginal(cov, keep);
  if (sub.rows() == 1) return sub(0, 0) > kPdTol;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > kPdTol;
}

struct CaseMarginal {
  MarginalIndex keep;
  std::array<double, 2> t;
  std::size_t dim;
};

CaseMarginal case_marginal(const BoundaryCase& c, const SecondOrderPoint& pt) {
  const double s = pt.L1 + pt.L2;
  return std::visit(
      Overloaded{
          [&](const CornerI& k) -> CaseMarginal {
            switch (k.which) {
              case Corner::First: return {{Coord::Cond1, Coord::Joint}, {pt.L1, s}, 2};
              case Corner::Second: return {{Coord::Cond2, Coord::Joint}, {pt.L2, s}, 2};
              case Corner::Both: break;
            }
            return {{Coord::Cond1, Coord::Cond2}, {pt.L1, pt.L2}, 2};
          },
          [&](const NonCornerII&) -> CaseMarginal { return {{Coord::Joint}, {s, 0.0}, 1}; },
          [&](const FullSideIII& k) -> CaseMarginal {
            if (k.which == Side::A) return {{Coord::Cond1}, {pt.L1, 0.0}, 1};
            return {{Coord::Cond2}, {pt.L2, 0.0}, 1};
          },
          [&](const auto&) -> CaseMarginal {
            throw Error(ErrorCode::UnsupportedCase, "interior and exterior anchors have no boundary law");
          },
      },
      c);
}

double quantile_of(const SourceStats& stats, Coord c, double epsilon) {
  const double var = stats.sigma(c, c);
  if (!(var > kPdTol)) throw Error(ErrorCode::DegenerateSigma, "required variance is zero");
  return phi1_inv(1.0 - epsilon, var);
}

void require_open_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::OutOfRange, "epsilon must be in (0,1) for boundary computations");
  }
}

// Coordinates (free, solved) of a corner curve and the marginal they live on.
struct CornerLaw {
  MarginalIndex keep;
  Coord free;
  Coord solved;
};

CornerLaw corner_law(Corner which) {
  switch (which) {
    case Corner::First: return {{Coord::Cond1, Coord::Joint}, Coord::Cond1, Coord::Joint};
    case Corner::Second: return {{Coord::Cond2, Coord::Joint}, Coord::Cond2, Coord::Joint};
    case Corner::Both: break;
  }
  return {{Coord::Cond1, Coord::Cond2}, Coord::Cond1, Coord::Cond2};
}

// Solve Phi_keep(free, s) = 1 - epsilon for s by bracketed bisection.
double solve_corner(const SourceStats& stats, Corner which, double free, double epsilon) {
  const CornerLaw law = corner_law(which);
  if (!marginal_pd(stats.sigma, law.keep)) {
    throw Error(ErrorCode::DegenerateSigma, "corner marginal is not positive definite");
  }
  const double target = 1.0 - epsilon;
  if (!(phi1(free, stats.sigma(law.free, law.free)) > target)) {
    throw Error(ErrorCode::NoSolution, "grid point at or below the corner asymptote");
  }
  const Eigen::Matrix2d sub(marginal(stats.sigma, law.keep));
  auto f = [&](double s) { return phi2(free, s, sub) - target; };

  const double unit = std::sqrt(stats.sigma(law.solved, law.solved));
  double lo = -unit;
  double hi = unit;
  int it = 0;
  for (double w = unit; f(hi) < 0.0; w *= 2.0) {
    if (++it > kBisectMaxIter) throw Error(ErrorCode::NoSolution, "no sign change found");
    lo = hi;
    hi += w;
  }
  for (double w = unit; f(lo) >= 0.0; w *= 2.0) {
    if (++it > kBisectMaxIter) throw Error(ErrorCode::NoSolution, "no sign change found");
    hi = lo;
    lo -= w;
  }
  while (hi - lo > kBisectTol && it++ < kBisectMaxIter) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) >= 0.0) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

double corner_free_sd(const SourceStats& stats, Corner which) {
  const Coord free = corner_law(which).free;
  return std::sqrt(stats.sigma(free, free));
}

}  // namespace

SwPolygon first_order_region(const SourceStats& s) {
  return {s.h1_given_2, s.h2_given_1, s.h12, {s.h1_given_2, s.h2}, {s.h1, s.h2_given_1}};
}

std::string describe(const BoundaryCase& c) {
  return std::visit(
      Overloaded{
          [](const Interior&) -> std::string { return "interior"; },
          [](const Exterior&) -> std::string { return "exterior"; },
          [](const CornerI& k) -> std::string {
            switch (k.which) {
              case Corner::First: return "corner-I(first)";
              case Corner::Second: return "corner-I(second)";
              case Corner::Both: break;
            }
            return "corner-I(coincident)";
          },
          [](const NonCornerII& k) -> std::string {
            std::ostringstream os;
            os.precision(9);
            os << "non-corner-II(lambda=" << k.lambda << ")";
            return os.str();
          },
          [](const FullSideIII& k) -> std::string {
            return k.which == Side::A ? "full-side-III(A)" : "full-side-III(B)";
          },
      },
      c);
}

std::string_view to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Member: return "member";
    case VerdictKind::NonMember: return "non-member";
    case VerdictKind::AllOfPlane: return "all-of-plane";
    case VerdictKind::Empty: return "empty";
  }
  return "unknown";
}

void validate(const RegionQuery& q) {
  if (!std::isfinite(q.a1) || !std::isfinite(q.a2)) {
    throw Error(ErrorCode::OutOfRange, "first-order rates must be finite");
  }
  if (!(q.epsilon >= 0.0 && q.epsilon < 1.0)) {
    throw Error(ErrorCode::OutOfRange, "epsilon must be in [0,1)");
  }
}

BoundaryCase classify(const SourceStats& stats, const RegionQuery& q, double tol) {
  validate(q);
  const auto d = gaps(stats, q);
  const int s1 = snap(d[0], tol), s2 = snap(d[1], tol), s3 = snap(d[2], tol);
  if (s1 < 0 || s2 < 0 || s3 < 0) return Exterior{};
  if (s1 > 0 && s2 > 0 && s3 > 0) return Interior{};
  if (s1 == 0 && s2 == 0) return CornerI{Corner::Both};
  if (s1 == 0 && s3 == 0) return CornerI{Corner::First};
  if (s2 == 0 && s3 == 0) return CornerI{Corner::Second};
  if (s3 == 0) {
    if (!(stats.mutual_info > tol)) {
      throw Error(ErrorCode::DegenerateSigma, "non-corner anchors need correlated X1, X2");
    }
    return NonCornerII{std::clamp(d[0] / stats.mutual_info, 0.0, 1.0)};
  }
  return FullSideIII{s1 == 0 ? Side::A : Side::B};
}

double case_probability(const SourceStats& stats, const BoundaryCase& c,
                        const SecondOrderPoint& pt) {
  const CaseMarginal m = case_marginal(c, pt);
  if (!marginal_pd(stats.sigma, m.keep)) {
    throw Error(ErrorCode::DegenerateSigma, "required marginal of sigma is not positive definite");
  }
  return phi_marginal(stats.sigma, m.keep, std::span<const double>(m.t.data(), m.dim));
}

RegionVerdict membership(const SourceStats& stats, const RegionQuery& q,
                         const SecondOrderPoint& pt, double tol) {
  const BoundaryCase c = classify(stats, q, tol);
  if (std::holds_alternative<Interior>(c)) return {VerdictKind::AllOfPlane, 1.0};
  if (std::holds_alternative<Exterior>(c)) return {VerdictKind::Empty, 0.0};
  const double p = case_probability(stats, c, pt);
  return {p >= 1.0 - q.epsilon ? VerdictKind::Member : VerdictKind::NonMember, p};
}

double canonical_membership(const SourceStats& stats, const RegionQuery& q,
                            const SecondOrderPoint& pt, double n) {
  validate(q);
  if (!(n >= 1.0)) throw Error(ErrorCode::OutOfRange, "blocklength must be >= 1");
  if (!stats.positive_definite) {
    throw Error(ErrorCode::DegenerateSigma, "canonical form needs positive-definite sigma");
  }
  const auto d = gaps(stats, q);
  const double r = std::sqrt(n);
  return phi3(r * d[0] + pt.L1, r * d[1] + pt.L2, r * d[2] + pt.L1 + pt.L2, stats.sigma);
}

RegionQuery anchor_corner1(const SourceStats& s, double epsilon) {
  return {s.h1_given_2, s.h2, epsilon};
}

RegionQuery anchor_corner2(const SourceStats& s, double epsilon) {
  return {s.h1, s.h2_given_1, epsilon};
}

RegionQuery anchor_case2(const SourceStats& s, double lambda, double epsilon) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw Error(ErrorCode::OutOfRange, "lambda must be in (0,1)");
  return {lambda * s.h1 + (1.0 - lambda) * s.h1_given_2,
          (1.0 - lambda) * s.h2 + lambda * s.h2_given_1, epsilon};
}

RegionQuery anchor_case3a(const SourceStats& s, double excess, double epsilon) {
  if (!(excess > 0.0)) throw Error(ErrorCode::OutOfRange, "ray offset must be positive");
  return {s.h1_given_2, s.h2 + excess, epsilon};
}

RegionQuery anchor_case3b(const SourceStats& s, double excess, double epsilon) {
  if (!(excess > 0.0)) throw Error(ErrorCode::OutOfRange, "ray offset must be positive");
  return {s.h1 + excess, s.h2_given_1, epsilon};
}

std::vector<double> LinearGrid::values() const {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "grid needs at least one point");
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    v[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  }
  return v;
}

double corner_asymptote(const SourceStats& stats, Corner which, double epsilon) {
  require_open_epsilon(epsilon);
  return quantile_of(stats, corner_law(which).free, epsilon);
}

std::vector<SecondOrderPoint> boundary_curve(const SourceStats& stats, const RegionQuery& q,
                                             const LinearGrid& grid, InfeasiblePolicy policy,
                                             double tol) {
  validate(q);
  require_open_epsilon(q.epsilon);
  const BoundaryCase c = classify(stats, q, tol);
  const auto xs = grid.values();
  std::vector<SecondOrderPoint> out;
  out.reserve(xs.size());
  std::visit(
      Overloaded{
          [&](const CornerI& k) {
            for (double v : xs) {
              double other = 0.0;
              try {
                other = solve_corner(stats, k.which, v, q.epsilon);
              } catch (const Error& e) {
                if (e.code() == ErrorCode::NoSolution && policy == InfeasiblePolicy::Skip) continue;
                throw;
              }
              switch (k.which) {
                case Corner::First: out.push_back({v, other - v}); break;
                case Corner::Second: out.push_back({other - v, v}); break;
                case Corner::Both: out.push_back({v, other}); break;
              }
            }
          },
          [&](const NonCornerII&) {
            const double t = quantile_of(stats, Coord::Joint, q.epsilon);
            for (double v : xs) out.push_back({v, t - v});
          },
          [&](const FullSideIII& k) {
            if (k.which == Side::A) {
              const double t = quantile_of(stats, Coord::Cond1, q.epsilon);
              for (double v : xs) out.push_back({t, v});
            } else {
              const double t = quantile_of(stats, Coord::Cond2, q.epsilon);
              for (double v : xs) out.push_back({v, t});
            }
          },
          [&](const auto&) {
            throw Error(ErrorCode::UnsupportedCase, "boundary exists only for boundary anchors");
          },
      },
      c);
  return out;
}

std::vector<FiniteNPoint> finite_n_boundary(const SourceStats& stats, double epsilon, double n,
                                            const AnchorSampling& sampling) {
  require_open_epsilon(epsilon);
  if (!(n >= 1.0)) throw Error(ErrorCode::OutOfRange, "blocklength must be >= 1");
  const double r = std::sqrt(n);
  const bool correlated = stats.mutual_info > kDefaultSnapTol;
  const double extent = sampling.ray_extent > 0.0
                            ? sampling.ray_extent
                            : std::max(stats.mutual_info, 0.1);
  std::vector<FiniteNPoint> out;
  auto emit = [&](const BoundaryCase& c, const RegionQuery& a, double L1, double L2) {
    out.push_back({c, a.a1, a.a2, L1, L2, a.a1 + L1 / r, a.a2 + L2 / r});
  };
  auto corner = [&](Corner which, const RegionQuery& a) {
    const double asym = corner_asymptote(stats, which, epsilon);
    const double sd = corner_free_sd(stats, which);
    const int m = std::max(2, sampling.corner_points);
    const double g0 = 1e-3;
    for (int k = 0; k < m; ++k) {
      // Walk from ray A toward ray B: the first corner starts near its
      // vertical asymptote, the second ends near its horizontal one.
      const int kk = which == Corner::Second ? m - 1 - k : k;
      const double g = g0 * std::pow(sampling.corner_span / g0, double(kk) / (m - 1));
      const double v = asym + sd * g;
      const double other = solve_corner(stats, which, v, epsilon);
      switch (which) {
        case Corner::First: emit(CornerI{which}, a, v, other - v); break;
        case Corner::Second: emit(CornerI{which}, a, other - v, v); break;
        case Corner::Both: emit(CornerI{which}, a, v, other); break;
      }
    }
  };

  const double t_a = quantile_of(stats, Coord::Cond1, epsilon);
  const double t_b = quantile_of(stats, Coord::Cond2, epsilon);
  for (int k = sampling.ray_points; k >= 1; --k) {
    const RegionQuery a = anchor_case3a(stats, extent * k / sampling.ray_points, epsilon);
    emit(FullSideIII{Side::A}, a, t_a, 0.0);
  }
  if (correlated) {
    corner(Corner::First, anchor_corner1(stats, epsilon));
    const double t_ii = quantile_of(stats, Coord::Joint, epsilon);
    for (int k = 1; k <= sampling.face_points; ++k) {
      const double lambda = double(k) / (sampling.face_points + 1);
      emit(NonCornerII{lambda}, anchor_case2(stats, lambda, epsilon), 0.5 * t_ii, 0.5 * t_ii);
    }
    corner(Corner::Second, anchor_corner2(stats, epsilon));
  } else {
    corner(Corner::Both, anchor_corner1(stats, epsilon));
  }
  for (int k = 1; k <= sampling.ray_points; ++k) {
    const RegionQuery a = anchor_case3b(stats, extent * k / sampling.ray_points, epsilon);
    emit(FullSideIII{Side::B}, a, 0.0, t_b);
  }
  return out;
}

std::vector<ComponentStats> mixture_stats(const MixedSource& mix) {
  std::vector<ComponentStats> out;
  out.reserve(mix.size());
  for (const auto& c : mix.components()) out.push_back({c.weight, compute_stats(c.pmf)});
  return out;
}

RegionVerdict mixed_membership(const std::vector<ComponentStats>& mix, const RegionQuery& q,
                               const SecondOrderPoint& pt, double tol) {
  validate(q);
  const std::array<double, 3> L{pt.L1, pt.L2, pt.L1 + pt.L2};
  double full = 0.0;      // weight of components whose limit is 1
  double gaussian = 0.0;  // weight of components with a Gaussian limit
  double value = 0.0;
  for (const auto& comp : mix) {
    const auto d = gaps(comp.stats, q);
    std::array<double, 3> args{};
    bool vanishes = false;
    int finite = 0;
    for (int i = 0; i < 3; ++i) {
      const int s = snap(d[i], tol);
      if (s < 0) vanishes = true;
      args[i] = s > 0 ? kUnbounded : L[i];
      if (s == 0) ++finite;
    }
    if (vanishes) continue;
    if (finite == 0) {
      full += comp.weight;
      value += comp.weight;
      continue;
    }
    // All three gaps vanish only for an independent component at its
    // coincident corners, where the joint coordinate is the sum of the
    // other two and the law lives on the (1,2) marginal.
    std::vector<Coord> need;
    if (finite == 3) {
      need = {Coord::Cond1, Coord::Cond2};
    } else {
      for (int i = 0; i < 3; ++i) {
        if (args[i] != kUnbounded) need.push_back(static_cast<Coord>(i));
      }
    }
    const bool pd = need.size() == 1
                        ? marginal_pd(comp.stats.sigma, MarginalIndex{need[0]})
                        : marginal_pd(comp.stats.sigma, MarginalIndex{need[0], need[1]});
    if (!pd) {
      throw Error(ErrorCode::DegenerateComponentSigma, "component marginal is not positive definite");
    }
    gaussian += comp.weight;
    value += comp.weight * phi3(args[0], args[1], args[2], comp.stats.sigma);
  }
  const double target = 1.0 - q.epsilon;
  if (full >= target - kWeightTol) return {VerdictKind::AllOfPlane, value};
  // A finite Gaussian CDF never reaches 1, so the supremum full + gaussian
  // is not attained.
  if (full + gaussian <= target + kWeightTol) return {VerdictKind::Empty, value};
  return {value >= target ? VerdictKind::Member : VerdictKind::NonMember, value};
}

RegionVerdict mixed_membership(const MixedSource& mix, const RegionQuery& q,
                               const SecondOrderPoint& pt, double tol) {
  return mixed_membership(mixture_stats(mix), q, pt, tol);
}

double mixed_phi_lambda(const std::vector<ComponentStats>& mix, const RegionQuery& q,
                        const SecondOrderPoint& pt, double tol) {
  validate(q);
  auto eq = [&](double a, double h) { return std::abs(a - h) <= tol; };
  auto gt = [&](double a, double h) { return a - h > tol; };
  double total = 0.0;
  for (const auto& comp : mix) {
    const SourceStats& s = comp.stats;
    const bool l0 = gt(q.a1, s.h1_given_2) && gt(q.a2, s.h2_given_1) && gt(q.a1 + q.a2, s.h12);
    const bool l1 = eq(q.a1, s.h1_given_2) && gt(q.a2, s.h2);
    const bool l2 = gt(q.a1, s.h1) && eq(q.a2, s.h2_given_1);
    const bool l3 = gt(q.a1, s.h1_given_2) && gt(q.a2, s.h2_given_1) && eq(q.a1 + q.a2, s.h12);
    const bool l4 = eq(q.a1, s.h1_given_2) && eq(q.a2, s.h2);
    const bool l5 = eq(q.a1, s.h1) && eq(q.a2, s.h2_given_1);

    BoundaryCase c = Exterior{};
    if (l0) {
      total += comp.weight;
      continue;
    }
    if (l4 && l5) c = CornerI{Corner::Both};
    else if (l4) c = CornerI{Corner::First};
    else if (l5) c = CornerI{Corner::Second};
    else if (l1) c = FullSideIII{Side::A};
    else if (l2) c = FullSideIII{Side::B};
    else if (l3) c = NonCornerII{0.5};
    else continue;  // some gap is negative: the component's limit is 0

    const CaseMarginal m = case_marginal(c, pt);
    if (!marginal_pd(s.sigma, m.keep)) {
      throw Error(ErrorCode::DegenerateComponentSigma, "component marginal is not positive definite");
    }
    total += comp.weight *
             phi_marginal(s.sigma, m.keep, std::span<const double>(m.t.data(), m.dim));
  }
  return total;
}

double mixed_phi_lambda(const MixedSource& mix, const RegionQuery& q, const SecondOrderPoint& pt,
                        double tol) {
  return mixed_phi_lambda(mixture_stats(mix), q, pt, tol);
}

}  // namespace swdisp
