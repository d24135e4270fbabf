#pragma once

// First- and second-order Slepian-Wolf regions.
//
// A second-order question fixes a first-order anchor (a1, a2) and a target
// error epsilon, and asks which (L1, L2) are achievable with code sizes
// exp(n a_i + L_i sqrt(n)). The answer depends on where the anchor sits on
// the first-order polygon; see classify().

#include "swdisp/source_model.hpp"

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace swdisp {

inline constexpr double kDefaultSnapTol = 1e-9;

struct RegionQuery {
  double a1 = 0.0;
  double a2 = 0.0;
  double epsilon = 0.0;
};

struct SecondOrderPoint {
  double L1 = 0.0;
  double L2 = 0.0;
};

// Slepian-Wolf polygon: R1 >= r1_min, R2 >= r2_min, R1 + R2 >= sum_min.
struct SwPolygon {
  double r1_min;
  double r2_min;
  double sum_min;
  std::pair<double, double> corner1;  // (H(X1|X2), H(X2))
  std::pair<double, double> corner2;  // (H(X1), H(X2|X1))
};

SwPolygon first_order_region(const SourceStats& stats);

enum class Corner {
  First,   // a = (H(X1|X2), H(X2))
  Second,  // a = (H(X1), H(X2|X1))
  Both,    // independent source: the two corners coincide
};

enum class Side {
  A,  // a1 = H(X1|X2), a2 > H(X2)
  B,  // a1 > H(X1),    a2 = H(X2|X1)
};

struct Interior {};
struct Exterior {};
struct CornerI {
  Corner which;
};
struct NonCornerII {
  double lambda;
};
struct FullSideIII {
  Side which;
};

using BoundaryCase = std::variant<Interior, Exterior, CornerI, NonCornerII, FullSideIII>;

std::string describe(const BoundaryCase& c);

enum class VerdictKind { Member, NonMember, AllOfPlane, Empty };

struct RegionVerdict {
  VerdictKind kind;
  // Limit probability compared against 1 - epsilon, when one was evaluated.
  std::optional<double> probability;
};

std::string_view to_string(VerdictKind k);

// Throws OutOfRange unless epsilon is in [0,1) and rates are finite.
void validate(const RegionQuery& q);

// Classify the anchor (q.a1, q.a2) against the polygon with snapping
// tolerance tol (nats). Throws DegenerateSigma for a non-corner anchor of a
// source with I(X1;X2) <= tol.
BoundaryCase classify(const SourceStats& stats, const RegionQuery& q,
                      double tol = kDefaultSnapTol);

// The limiting probability for a boundary case: Phi13(L1, L1+L2) at the
// first corner, Phi23(L2, L1+L2) at the second, Phi12(L1, L2) when the
// corners coincide, Phi3(L1+L2) on the diagonal face, Phi1(L1) / Phi2(L2)
// on the rays. Throws DegenerateSigma when the required marginal is not
// positive definite and UnsupportedCase for Interior/Exterior.
double case_probability(const SourceStats& stats, const BoundaryCase& c,
                        const SecondOrderPoint& pt);

RegionVerdict membership(const SourceStats& stats, const RegionQuery& q,
                         const SecondOrderPoint& pt, double tol = kDefaultSnapTol);

// Phi(sqrt(n)(a1 - H(X1|X2)) + L1, sqrt(n)(a2 - H(X2|X1)) + L2,
//     sqrt(n)(a1 + a2 - H(X1X2)) + L1 + L2). Requires positive-definite sigma.
double canonical_membership(const SourceStats& stats, const RegionQuery& q,
                            const SecondOrderPoint& pt, double n);

// Anchors named by their position on the polygon.
RegionQuery anchor_corner1(const SourceStats& stats, double epsilon);
RegionQuery anchor_corner2(const SourceStats& stats, double epsilon);
RegionQuery anchor_case2(const SourceStats& stats, double lambda, double epsilon);
RegionQuery anchor_case3a(const SourceStats& stats, double excess, double epsilon);
RegionQuery anchor_case3b(const SourceStats& stats, double excess, double epsilon);

struct LinearGrid {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;

  std::vector<double> values() const;
};

enum class InfeasiblePolicy { Throw, Skip };

// Points on the boundary of the second-order region. The grid runs over
// the free coordinate of the case: L1 at the first corner, on the diagonal
// face and on ray B; L2 at the second corner and on ray A. Corner grid
// points at or below the asymptote raise NoSolution (or are skipped).
std::vector<SecondOrderPoint> boundary_curve(const SourceStats& stats, const RegionQuery& q,
                                             const LinearGrid& grid,
                                             InfeasiblePolicy policy = InfeasiblePolicy::Throw,
                                             double tol = kDefaultSnapTol);

// Asymptote of the corner curve in its grid coordinate: the level of the
// free coordinate below which Phi can no longer reach 1 - epsilon.
double corner_asymptote(const SourceStats& stats, Corner which, double epsilon);

struct AnchorSampling {
  int ray_points = 4;       // anchors on each ray, excluding the corner
  double ray_extent = 0.0;  // nats beyond the corner; 0 picks I(X1;X2)
  int face_points = 7;      // interior lambdas on the diagonal face
  int corner_points = 24;   // curve samples per corner
  double corner_span = 6.0; // curve extent past the asymptote, in sigma units
};

struct FiniteNPoint {
  BoundaryCase anchor_case;
  double a1;
  double a2;
  double L1;
  double L2;
  double R1;
  double R2;
};

// Gaussian-approximate boundary of the finite-blocklength achievable set,
// anchor + L* / sqrt(n), walked from ray A through both corners to ray B.
std::vector<FiniteNPoint> finite_n_boundary(const SourceStats& stats, double epsilon, double n,
                                            const AnchorSampling& sampling = {});

// Mixtures of i.i.d. components.
struct ComponentStats {
  double weight;
  SourceStats stats;
};

std::vector<ComponentStats> mixture_stats(const MixedSource& mix);

// Coordinate-wise limit of the mixed canonical form: each component's gap
// a - H is snapped to -inf / finite / +inf and its Phi evaluated there.
RegionVerdict mixed_membership(const std::vector<ComponentStats>& mix, const RegionQuery& q,
                               const SecondOrderPoint& pt, double tol = kDefaultSnapTol);
RegionVerdict mixed_membership(const MixedSource& mix, const RegionQuery& q,
                               const SecondOrderPoint& pt, double tol = kDefaultSnapTol);

// The same limit organized by the partition Lambda_0..Lambda_5 of the
// components, with marginal CDFs evaluated directly.
double mixed_phi_lambda(const std::vector<ComponentStats>& mix, const RegionQuery& q,
                        const SecondOrderPoint& pt, double tol = kDefaultSnapTol);
double mixed_phi_lambda(const MixedSource& mix, const RegionQuery& q,
                        const SecondOrderPoint& pt, double tol = kDefaultSnapTol);

}  // namespace swdisp
