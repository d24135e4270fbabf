#include "swdisp/gaussian.hpp"

#include "swdisp/error.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace swdisp {

namespace {

// Standard normal mass below -9 is 1.1e-19; integration ranges are clipped
// there. Below -38 the density underflows.
constexpr double kTailCut = 9.0;
constexpr double kFloor = -38.0;
constexpr double kSymTol = 1e-12;
constexpr double kPsdSlack = 1e-12;
constexpr double kOuterTol = 1e-11;  // absolute
constexpr double kTolFloor = 1e-16;
constexpr unsigned kMaxDepth = 18;

double std_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double std_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double step(double t) { return t >= 0.0 ? 1.0 : 0.0; }

// Graded breakpoints around a sharp transition of the given width so that
// each quadrature piece sees a smooth integrand at its own scale.
void add_ladder(std::vector<double>& breaks, double center, double width, double lo,
                double hi) {
  if (!std::isfinite(center)) return;
  breaks.push_back(center);
  if (!(width > 0.0) || width >= 0.25) return;
  for (double d = width; d < hi - lo; d *= 4.0) {
    breaks.push_back(center - d);
    breaks.push_back(center + d);
  }
}

using Quad = boost::math::quadrature::gauss_kronrod<double, 15>;

// Bisect until the Kronrod error estimate meets an absolute tolerance;
// relative control never terminates on pieces whose value is ~0.
template <class F>
double adapt(F& f, double a, double b, double tol, unsigned depth) {
  double err = 0.0;
  const double v = Quad::integrate(f, a, b, 0, 0.0, &err);
  if (err <= tol || depth == 0) return v;
  const double m = 0.5 * (a + b);
  const double half = std::max(0.5 * tol, kTolFloor);
  return adapt(f, a, m, half, depth - 1) + adapt(f, m, b, half, depth - 1);
}

template <class F>
double integrate_pieces(F&& f, double lo, double hi, std::vector<double>& breaks,
                        double tol) {
  if (!(hi > lo)) return 0.0;
  std::erase_if(breaks, [&](double b) { return !(b > lo && b < hi); });
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double share = tol * (breaks[i + 1] - breaks[i]) / (hi - lo);
    sum += adapt(f, breaks[i], breaks[i + 1], std::max(share, kTolFloor), kMaxDepth);
  }
  return sum;
}

// Range of the standardized outer variable u <= x that carries mass.
std::pair<double, double> outer_range(double x) {
  const double hi = std::min(x, kTailCut);
  const double lo = std::max(kFloor, std::min(-kTailCut, x - kTailCut));
  return {lo, hi};
}

// Upper orthant P(U > h, V > k) for standard normals with correlation r,
// by Genz's Gauss-Legendre scheme (Drezner-Wesolowsky for |r| < 0.925,
// an asymptotic expansion plus correction near |r| = 1).
double bvn_upper(double h, double k, double r) {
  static constexpr double w6[] = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
  static constexpr double x6[] = {-0.9324695142031522, -0.6612093864662647, -0.2386191860831970};
  static constexpr double w12[] = {0.4717533638651177e-01, 0.1069393259953183, 0.1600783285433464,
                                   0.2031674267230659, 0.2334925365383547, 0.2491470458134029};
  static constexpr double x12[] = {-0.9815606342467191, -0.9041172563704750, -0.7699026741943050,
                                   -0.5873179542866171, -0.3678314989981802, -0.1252334085114692};
  static constexpr double w20[] = {0.1761400713915212e-01, 0.4060142980038694e-01, 0.6267204833410906e-01,
                                   0.8327674157670475e-01, 0.1019301198172404, 0.1181945319615184,
                                   0.1316886384491766, 0.1420961093183821, 0.1491729864726037,
                                   0.1527533871307259};
  static constexpr double x20[] = {-0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
                                   -0.8391169718222188, -0.7463319064601508, -0.6360536807265150,
                                   -0.5108670019508271, -0.3737060887154196, -0.2277858511416451,
                                   -0.7652652113349733e-01};
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double* w = w20;
  const double* x = x20;
  int lg = 10;
  if (std::abs(r) < 0.3) {
    w = w6;
    x = x6;
    lg = 3;
  } else if (std::abs(r) < 0.75) {
    w = w12;
    x = x12;
    lg = 6;
  }
  double hk = h * k;
  double bvn = 0.0;
  if (std::abs(r) < 0.925) {
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(r);
    for (int i = 0; i < lg; ++i) {
      double sn = std::sin(asr * (x[i] + 1.0) / 2.0);
      bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      sn = std::sin(asr * (-x[i] + 1.0) / 2.0);
      bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    return bvn * asr / (2.0 * two_pi) + std_cdf(-h) * std_cdf(-k);
  }
  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::abs(r) < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    bvn = a * std::exp(-(bs / as + hk) / 2.0) *
          (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (hk > -160.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(two_pi) * std_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (int i = 0; i < lg; ++i) {
      double xs = (a * (x[i] + 1.0)) * (a * (x[i] + 1.0));
      double rs = std::sqrt(1.0 - xs);
      bvn += a * w[i] *
             (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
              std::exp(-(bs / xs + hk) / 2.0) * (1.0 + c * xs * (1.0 + d * xs)));
      xs = as * (-x[i] + 1.0) * (-x[i] + 1.0) / 4.0;
      rs = std::sqrt(1.0 - xs);
      bvn += a * w[i] * std::exp(-(bs / xs + hk) / 2.0) *
             (std::exp(-hk * xs / (2.0 * (1.0 + rs) * (1.0 + rs))) / rs - (1.0 + c * xs * (1.0 + d * xs)));
    }
    bvn = -bvn / two_pi;
  }
  if (r > 0.0) return bvn + std_cdf(-std::max(h, k));
  bvn = -bvn;
  if (k > h) {
    if (h < 0.0) bvn += std_cdf(k) - std_cdf(h);
    else bvn += std_cdf(-h) - std_cdf(-k);
  }
  return bvn;
}

// P(U <= x1, V <= x2) for standard normals with correlation rho.
double bvn_std(double x1, double x2, double rho) {
  if (x1 == -kUnbounded || x2 == -kUnbounded) return 0.0;
  if (x1 == kUnbounded) return std_cdf(x2);
  if (x2 == kUnbounded) return std_cdf(x1);
  if (rho == 0.0) return std_cdf(x1) * std_cdf(x2);
  if (rho >= 1.0) return std_cdf(std::min(x1, x2));
  if (rho <= -1.0) return std::max(0.0, std_cdf(x1) - std_cdf(-x2));
  return std::clamp(bvn_upper(-x1, -x2, rho), 0.0, 1.0);
}

}  // namespace

Cov3::Cov3(const Eigen::Matrix3d& m) : m_(m) {
  const double scale = std::max(1.0, m.diagonal().cwiseAbs().maxCoeff());
  if (!m.allFinite()) throw Error(ErrorCode::NotPSD, "covariance has non-finite entries");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymTol * scale) {
    throw Error(ErrorCode::NotPSD, "covariance is not symmetric");
  }
  m_ = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m_, Eigen::EigenvaluesOnly);
  min_eig_ = es.eigenvalues().minCoeff();
  if (min_eig_ < -kPsdSlack * scale) {
    throw Error(ErrorCode::NotPSD, "covariance has a negative eigenvalue");
  }
}

MarginalIndex::MarginalIndex(std::initializer_list<Coord> coords) {
  if (coords.size() == 0 || coords.size() > 3) {
    throw Error(ErrorCode::InvalidArgument, "marginal index must keep 1 to 3 coordinates");
  }
  for (Coord c : coords) idx_[size_++] = static_cast<int>(c);
  std::sort(idx_.begin(), idx_.begin() + size_);
  if (std::adjacent_find(idx_.begin(), idx_.begin() + size_) != idx_.begin() + size_) {
    throw Error(ErrorCode::InvalidArgument, "marginal index has duplicates");
  }
}

double phi1(double t, double var) {
  if (var < 0.0) throw Error(ErrorCode::NegativeVariance, "variance must be >= 0");
  if (t == kUnbounded) return 1.0;
  if (t == -kUnbounded) return 0.0;
  if (var == 0.0) return step(t);
  return std_cdf(t / std::sqrt(var));
}

double phi2(double t1, double t2, const Eigen::Matrix2d& cov) {
  const double scale = std::max(1.0, std::max(std::abs(cov(0, 0)), std::abs(cov(1, 1))));
  if (!cov.allFinite() || std::abs(cov(0, 1) - cov(1, 0)) > kSymTol * scale) {
    throw Error(ErrorCode::NotPSD, "2x2 covariance is not symmetric");
  }
  double v1 = cov(0, 0);
  double v2 = cov(1, 1);
  const double c = 0.5 * (cov(0, 1) + cov(1, 0));
  if (v1 < -kPsdSlack * scale || v2 < -kPsdSlack * scale) {
    throw Error(ErrorCode::NotPSD, "negative variance in 2x2 covariance");
  }
  v1 = std::max(v1, 0.0);
  v2 = std::max(v2, 0.0);
  if (c * c > v1 * v2 * (1.0 + 1e-9) + kPsdSlack * scale * scale) {
    throw Error(ErrorCode::NotPSD, "2x2 covariance has negative determinant");
  }
  if (t1 == -kUnbounded || t2 == -kUnbounded) return 0.0;
  if (t1 == kUnbounded) return phi1(t2, v2);
  if (t2 == kUnbounded) return phi1(t1, v1);
  if (v1 == 0.0) return step(t1) * phi1(t2, v2);
  if (v2 == 0.0) return step(t2) * phi1(t1, v1);
  const double rho = std::clamp(c / std::sqrt(v1 * v2), -1.0, 1.0);
  return bvn_std(t1 / std::sqrt(v1), t2 / std::sqrt(v2), rho);
}

double phi3(double t1, double t2, double t3, const Cov3& cov) {
  const std::array<double, 3> t{t1, t2, t3};
  const Eigen::Matrix3d& m = cov.matrix();
  if (std::any_of(t.begin(), t.end(), [](double x) { return x == -kUnbounded; })) return 0.0;

  std::array<int, 3> bounded{};
  int nb = 0;
  for (int i = 0; i < 3; ++i) {
    if (t[i] != kUnbounded) bounded[nb++] = i;
  }
  if (nb == 0) return 1.0;
  if (nb == 1) return phi1(t[bounded[0]], std::max(0.0, m(bounded[0], bounded[0])));
  if (nb == 2) {
    const int i = bounded[0], j = bounded[1];
    Eigen::Matrix2d sub;
    sub << m(i, i), m(i, j), m(j, i), m(j, j);
    return phi2(t[i], t[j], sub);
  }

  int k = 0;
  for (int i = 1; i < 3; ++i) {
    if (m(i, i) > m(k, k)) k = i;
  }
  const int i = (k + 1) % 3;
  const int j = (k + 2) % 3;
  const double vk = m(k, k);
  if (!(vk > 0.0)) return step(t1) * step(t2) * step(t3);

  const double sk = std::sqrt(vk);
  const double bi = m(i, k) / vk;
  const double bj = m(j, k) / vk;
  Eigen::Matrix2d cond;
  cond(0, 0) = m(i, i) - m(i, k) * m(i, k) / vk;
  cond(1, 1) = m(j, j) - m(j, k) * m(j, k) / vk;
  cond(0, 1) = cond(1, 0) = m(i, j) - m(i, k) * m(j, k) / vk;
  // Rank-deficient directions: conditional variances that are rounding
  // residue of an exact zero are snapped to zero.
  const double scale = std::max(vk, std::max(m(i, i), m(j, j)));
  for (int a = 0; a < 2; ++a) {
    if (cond(a, a) <= 1e-14 * scale) {
      cond(a, a) = 0.0;
      cond(0, 1) = cond(1, 0) = 0.0;
    }
  }
  const double ci = std::sqrt(std::max(cond(0, 0), 0.0));
  const double cj = std::sqrt(std::max(cond(1, 1), 0.0));
  if (ci > 0.0 && cj > 0.0) {
    const double r = cond(0, 1) / (ci * cj);
    if (std::abs(r) > 1.0) cond(0, 1) = cond(1, 0) = std::copysign(ci * cj, r);
  }

  const double xk = t[k] / sk;
  if (xk <= kFloor) return 0.0;
  const auto [lo, hi] = outer_range(xk);

  std::vector<double> breaks;
  const double si = bi * sk;
  const double sj = bj * sk;
  if (si != 0.0) add_ladder(breaks, t[i] / si, ci / std::abs(si), lo, hi);
  if (sj != 0.0) add_ladder(breaks, t[j] / sj, cj / std::abs(sj), lo, hi);
  if (ci > 0.0 && cj > 0.0) {
    // Kink where the two standardized conditional thresholds cross.
    const double den = si / ci - sj / cj;
    if (den != 0.0) breaks.push_back((t[i] / ci - t[j] / cj) / den);
  }

  auto g = [&](double u) {
    return std_pdf(u) * phi2(t[i] - si * u, t[j] - sj * u, cond);
  };
  const double v = integrate_pieces(g, lo, hi, breaks, kOuterTol);
  return std::clamp(v, 0.0, 1.0);
}

Eigen::MatrixXd marginal(const Cov3& cov, const MarginalIndex& keep) {
  const auto idx = keep.indices();
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) out(a, b) = cov.matrix()(idx[a], idx[b]);
  }
  return out;
}

double phi_marginal(const Cov3& cov, const MarginalIndex& keep, std::span<const double> t) {
  if (t.size() != keep.size()) {
    throw Error(ErrorCode::DimensionMismatch, "threshold count differs from marginal size");
  }
  const Eigen::MatrixXd sub = marginal(cov, keep);
  switch (keep.size()) {
    case 1: return phi1(t[0], std::max(0.0, sub(0, 0)));
    case 2: return phi2(t[0], t[1], Eigen::Matrix2d(sub));
    default: return phi3(t[0], t[1], t[2], cov);
  }
}

double phi1_inv(double q, double var) {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorCode::OutOfRange, "quantile level must be in (0,1)");
  if (var < 0.0) throw Error(ErrorCode::NegativeVariance, "variance must be >= 0");
  if (var == 0.0) return 0.0;
  double lo = -40.0;
  double hi = 40.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    // Above the median compare upper tails, which keep their precision.
    const bool reached = q > 0.5 ? 0.5 * std::erfc(mid / std::numbers::sqrt2) <= 1.0 - q : std_cdf(mid) >= q;
    if (reached) hi = mid; else lo = mid;
  }
  return hi * std::sqrt(var);
}

}  // namespace swdisp
