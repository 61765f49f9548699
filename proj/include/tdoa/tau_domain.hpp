#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tdoa/errors.hpp"
#include "tdoa/forward.hpp"
#include "tdoa/sensor_config.hpp"

namespace tdoa {

// ---------------------------------------------------------------------------
// Polygon P2

/// Supporting half-plane alpha*tau1 + beta*tau2 <= gamma of facet F_k^sign.
struct Facet {
  int k{};
  int sign{};  // +1 or -1
  double alpha{}, beta{}, gamma{};

  double signed_distance(const TauPair& t) const {
    return (alpha * t.tau1 + beta * t.tau2 - gamma) / std::hypot(alpha, beta);
  }
};

struct PolygonP2 {
  std::vector<TauPair> vertices;  // counter-clockwise
  std::vector<Facet> facets;      // same cyclic order; vertex j = facets[j] ^ facets[j+1]

  /// Largest signed facet distance; <= 0 inside.
  double max_violation(const TauPair& t) const {
    double m = -std::numeric_limits<double>::infinity();
    for (const Facet& f : facets) m = std::max(m, f.signed_distance(t));
    return m;
  }

  bool contains(const TauPair& t, double tol = 0.0) const { return max_violation(t) <= tol; }
};

inline PolygonP2 build_p2(const SensorConfig& cfg) {
  if (cfg.geometry_class == GeometryClass::Degenerate) {
    throw DegenerateConfig("build_p2: degenerate configuration");
  }
  std::vector<Facet> all = {
      {1, +1, 0.0, 1.0, cfg.d20},  {1, -1, 0.0, -1.0, cfg.d20},
      {2, +1, 1.0, 0.0, cfg.d10},  {2, -1, -1.0, 0.0, cfg.d10},
      {0, +1, -1.0, 1.0, cfg.d21}, {0, -1, 1.0, -1.0, cfg.d21},
  };
  if (cfg.collinear()) {
    // The pair belonging to the sum of the other two distances is redundant.
    const int drop = cfg.between == 0 ? 0 : (cfg.between == 1 ? 1 : 2);
    std::erase_if(all, [&](const Facet& f) { return f.k == drop; });
  }
  std::sort(all.begin(), all.end(), [](const Facet& f, const Facet& g) {
    auto ang = [](const Facet& h) {
      double a = std::atan2(h.beta, h.alpha);
      return a < 0 ? a + 2.0 * M_PI : a;
    };
    return ang(f) < ang(g);
  });
  PolygonP2 p;
  p.facets = all;
  const size_t n = all.size();
  for (size_t j = 0; j < n; ++j) {
    const Facet& f = all[j];
    const Facet& g = all[(j + 1) % n];
    const double det = f.alpha * g.beta - f.beta * g.alpha;
    p.vertices.push_back({(f.gamma * g.beta - f.beta * g.gamma) / det,
                          (f.alpha * g.gamma - f.gamma * g.alpha) / det});
  }
  return p;
}

// ---------------------------------------------------------------------------
// Coefficients of a lambda^2 + 2 b lambda + c = 0

struct TauCoefficients {
  double a{};
  double bbar{};
  double b{};
  double c{};
  double delta{};
  // Intermediate vectors, kept for snap bands.
  EucVec2 u;  // tau2 d10 - tau1 d20
  EucVec2 g;  // |D20|^2 d10 - |D10|^2 d20
  double n10{}, n20{}, n21{};
};

inline TauCoefficients coefficients(const SensorConfig& cfg, const TauPair& t) {
  TauCoefficients r;
  const EucVec2& d10 = cfg.d10_vec;
  const EucVec2& d20 = cfg.d20_vec;
  const double w = cfg.w();
  r.u = d10 * t.tau2 - d20 * t.tau1;
  r.n10 = (cfg.d10 - t.tau1) * (cfg.d10 + t.tau1);
  r.n20 = (cfg.d20 - t.tau2) * (cfg.d20 + t.tau2);
  r.g = d10 * r.n20 - d20 * r.n10;
  r.a = (norm(r.u) - w) * (norm(r.u) + w);
  r.bbar = dot(r.u, r.g);
  r.b = r.bbar / (2.0 * w);
  r.c = dot(r.g, r.g) / (4.0 * w * w);
  const double t21 = t.tau2 - t.tau1;
  r.n21 = (cfg.d21 - t21) * (cfg.d21 + t21);
  // b^2 - ac factors as |D10|^2 |D20|^2 |D21|^2 / 4; the product keeps its
  // sign exact near the facets, where the difference cancels.
  r.delta = 0.25 * r.n10 * r.n20 * r.n21;
  return r;
}

inline double coeff_a(const SensorConfig& cfg, const TauPair& t) { return coefficients(cfg, t).a; }
inline double coeff_b_cubic(const SensorConfig& cfg, const TauPair& t) { return coefficients(cfg, t).bbar; }
inline double coeff_b(const SensorConfig& cfg, const TauPair& t) { return coefficients(cfg, t).b; }
inline double coeff_c(const SensorConfig& cfg, const TauPair& t) { return coefficients(cfg, t).c; }
inline double discriminant(const SensorConfig& cfg, const TauPair& t) { return coefficients(cfg, t).delta; }

inline EucVec2 grad_a(const SensorConfig& cfg, const TauCoefficients& k) {
  return {-2.0 * dot(k.u, cfg.d20_vec), 2.0 * dot(k.u, cfg.d10_vec)};
}

inline EucVec2 grad_bbar(const SensorConfig& cfg, const TauPair& t, const TauCoefficients& k) {
  return {-dot(cfg.d20_vec, k.g) + 2.0 * t.tau1 * dot(k.u, cfg.d20_vec),
          dot(cfg.d10_vec, k.g) - 2.0 * t.tau2 * dot(k.u, cfg.d10_vec)};
}

// ---------------------------------------------------------------------------
// Distinguished points

struct DistinguishedPoints {
  TauPair R0, R1, R2;
  TauPair Rstar, R0_1, Rstar_1;
  TauPair T0p, T0m, T1p, T1m, T2p, T2m;

  std::array<TauPair, 6> tangency() const { return {T0p, T0m, T1p, T1m, T2p, T2m}; }
  const TauPair& R(int i) const { return i == 0 ? R0 : (i == 1 ? R1 : R2); }
};

inline DistinguishedPoints tangency_points(const SensorConfig& cfg) {
  DistinguishedPoints p;
  const double d10 = cfg.d10, d20 = cfg.d20, d21 = cfg.d21;
  p.R0 = {d10, d20};
  p.R1 = {-d10, d21 - d10};
  p.R2 = {d21 - d20, -d20};
  p.Rstar = {-d10, d20};
  p.R0_1 = {-d10, -d20};
  p.Rstar_1 = {d10, -d20};
  const EucVec2 u21 = cfg.d21_vec / d21;
  const EucVec2 u20 = cfg.d20_vec / d20;
  const EucVec2 u10 = cfg.d10_vec / d10;
  p.T0p = {dot(cfg.d10_vec, u21), dot(cfg.d20_vec, u21)};
  p.T1p = {dot(cfg.d10_vec, u20), d20};
  p.T2p = {d10, dot(cfg.d20_vec, u10)};
  p.T0m = -p.T0p;
  p.T1m = -p.T1p;
  p.T2m = -p.T2p;
  return p;
}

// ---------------------------------------------------------------------------
// Region labels

enum class Region { Unique, Double, Infinite, NotInImage };

enum class SubRegion {
  None,
  EMinusInterior,
  EllipseArcBoundary,
  FacetBoundary,
  VertexR,
  OutsideP2,
  EplusCminus,
  TangencyPoint,
  ExcludedVertex,
  DependentLine,
  OutsideTriangle,
};

struct RegionLabel {
  Region region{Region::NotInImage};
  SubRegion sub{SubRegion::None};
  int index{-1};  // i of VertexR(i), or the component of a Double verdict

  /// -1 stands for infinitely many preimages.
  int fiber_count() const {
    switch (region) {
      case Region::Unique: return 1;
      case Region::Double: return 2;
      case Region::Infinite: return -1;
      case Region::NotInImage: return 0;
    }
    return 0;
  }

  bool in_image() const { return region != Region::NotInImage; }

  std::string name() const {
    switch (region) {
      case Region::Double: return index < 0 ? "double" : "double_u" + std::to_string(index);
      case Region::Infinite: return "infinite";
      default: break;
    }
    switch (sub) {
      case SubRegion::EMinusInterior: return "e_minus_interior";
      case SubRegion::EllipseArcBoundary: return "ellipse_arc";
      case SubRegion::FacetBoundary: return "facet_boundary";
      case SubRegion::VertexR: return "vertex_r" + std::to_string(index);
      case SubRegion::OutsideP2: return "outside_p2";
      case SubRegion::EplusCminus: return "e_plus_c_minus";
      case SubRegion::TangencyPoint: return "tangency_point";
      case SubRegion::ExcludedVertex: return "excluded_vertex";
      case SubRegion::DependentLine: return "dependent_line";
      case SubRegion::OutsideTriangle: return "outside_triangle";
      default: return "unknown";
    }
  }

  constexpr bool operator==(const RegionLabel&) const = default;
};

inline RegionLabel unique_label(SubRegion s, int i = -1) { return {Region::Unique, s, i}; }
inline RegionLabel not_in_image(SubRegion s) { return {Region::NotInImage, s, -1}; }

inline double default_tol(const SensorConfig& cfg) { return 1e-9 * (cfg.d10 + cfg.d20); }

namespace detail {

constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Rounding floor added to every snap band so tol = 0 still absorbs roundoff.
inline double point_band(const SensorConfig& cfg, double tol) { return tol + 64.0 * kEps * cfg.scale(); }

struct Bands {
  double a;
  double b;  // on b = bbar / (2w)
};

inline Bands coefficient_bands(const SensorConfig& cfg, const TauPair& t, const TauCoefficients& k, double tol) {
  const double w = cfg.w();
  const double nu = norm(k.u);
  const double ng = norm(k.g);
  const double scale = cfg.scale();
  Bands b;
  b.a = tol * norm(grad_a(cfg, k)) + 1e3 * kEps * (nu * nu + w * w);
  const double bbar_band =
      tol * norm(grad_bbar(cfg, t, k)) + 1e3 * kEps * (nu * ng + nu * scale * scale * scale);
  b.b = bbar_band / (2.0 * w);
  return b;
}

/// True iff the quadratic A s^2 + B s + C has a root in the open interval (0, 1).
inline bool quadratic_root_in_unit(double A, double B, double C) {
  const double scale = std::abs(A) + std::abs(B) + std::abs(C);
  if (scale == 0.0) return true;
  if (std::abs(A) <= 1e-14 * scale) {
    if (B == 0.0) return false;
    const double s = -C / B;
    return s > 0.0 && s < 1.0;
  }
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) return false;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (B + (B >= 0 ? sq : -sq));
  double roots[2] = {q / A, q != 0.0 ? C / q : q / A};
  for (double s : roots) {
    if (s > 0.0 && s < 1.0) return true;
  }
  return false;
}

inline bool segment_clear(const SensorConfig& cfg, const TauPair& from, const TauPair& to) {
  // a is quadratic along the segment: exact root test.
  const EucVec2 u0 = cfg.d10_vec * from.tau2 - cfg.d20_vec * from.tau1;
  const EucVec2 u1 = cfg.d10_vec * to.tau2 - cfg.d20_vec * to.tau1;
  const EucVec2 du = u1 - u0;
  const double w = cfg.w();
  if (quadratic_root_in_unit(dot(du, du), 2.0 * dot(u0, du), dot(u0, u0) - w * w)) return false;
  // bbar: sign sampling at s = j / 256.
  const double s0 = coeff_b_cubic(cfg, from);
  if (s0 == 0.0) return false;
  for (int j = 1; j < 256; ++j) {
    const double s = j / 256.0;
    const double v = coeff_b_cubic(cfg, from + (to - from) * s);
    if ((v > 0) != (s0 > 0) || v == 0.0) return false;
  }
  return true;
}

}  // namespace detail

/// Component U_i containing tau (General configs, Double verdicts).
inline int label_U_component(const SensorConfig& cfg, const TauPair& t) {
  const TauCoefficients k = coefficients(cfg, t);
  const detail::Bands bands = detail::coefficient_bands(cfg, t, k, default_tol(cfg));
  if (std::abs(k.a) <= bands.a || std::abs(k.b) <= bands.b) {
    throw AmbiguousComponent("label_U_component: tau lies on E or C");
  }
  const DistinguishedPoints dp = tangency_points(cfg);
  int found = -1;
  int count = 0;
  for (int i = 0; i < 3; ++i) {
    if (detail::segment_clear(cfg, t, dp.R(i))) {
      found = i;
      ++count;
    }
  }
  if (count != 1) throw AmbiguousComponent("label_U_component: no unique component for tau");
  return found;
}

namespace detail {

inline int nearest_R(const DistinguishedPoints& dp, const TauPair& t) {
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (norm(t - dp.R(i)) < norm(t - dp.R(best))) best = i;
  }
  return best;
}

inline RegionLabel classify_general(const SensorConfig& cfg, const TauPair& t, double tol) {
  const PolygonP2 p2 = build_p2(cfg);
  const double pb = point_band(cfg, tol);
  const double viol = p2.max_violation(t);
  if (viol > pb) return not_in_image(SubRegion::OutsideP2);

  const DistinguishedPoints dp = tangency_points(cfg);
  auto near = [&](const TauPair& q) { return norm(t - q) <= pb; };
  if (near(dp.R0)) return unique_label(SubRegion::VertexR, 0);
  // The P2 vertices other than R0, R1, R2 have no preimage.
  if (near(dp.R0_1) || near({cfg.d20 - cfg.d21, cfg.d20}) || near({cfg.d10, cfg.d10 - cfg.d21})) {
    return not_in_image(SubRegion::ExcludedVertex);
  }
  if (near(dp.R1)) return unique_label(SubRegion::VertexR, 1);
  if (near(dp.R2)) return unique_label(SubRegion::VertexR, 2);

  const TauCoefficients k = coefficients(cfg, t);
  const Bands bands = coefficient_bands(cfg, t, k, tol);
  const bool a_zero = std::abs(k.a) <= bands.a;
  const bool b_zero = std::abs(k.b) <= bands.b;
  for (const TauPair& q : dp.tangency()) {
    if (near(q)) return not_in_image(SubRegion::TangencyPoint);
  }
  if (a_zero && b_zero) return not_in_image(SubRegion::TangencyPoint);
  if (a_zero) {
    return k.b > 0 ? unique_label(SubRegion::EllipseArcBoundary) : not_in_image(SubRegion::EplusCminus);
  }
  if (k.a < 0) return unique_label(SubRegion::EMinusInterior);
  if (k.b <= bands.b) return not_in_image(SubRegion::EplusCminus);
  if (viol >= -pb) return unique_label(SubRegion::FacetBoundary);
  int comp;
  try {
    comp = label_U_component(cfg, t);
  } catch (const AmbiguousComponent&) {
    comp = nearest_R(dp, t);
  }
  return {Region::Double, SubRegion::None, comp};
}

inline RegionLabel classify_collinear(const SensorConfig& cfg, const TauPair& t, double tol) {
  const PolygonP2 p2 = build_p2(cfg);
  const double pb = point_band(cfg, tol);
  const double viol = p2.max_violation(t);
  if (viol > pb) return not_in_image(SubRegion::OutsideP2);

  const double sk = cfg.k > 0 ? 1.0 : -1.0;
  const TauPair vplus{cfg.d10, sk * cfg.d20};
  if (norm(t - vplus) <= pb || norm(t + vplus) <= pb) return {Region::Infinite, SubRegion::None, -1};

  // Dependent line tau2 = k tau1, i.e. d10 tau2 - sgn(k) d20 tau1 = 0.
  const double side = (t.tau2 - cfg.k * t.tau1) / std::hypot(1.0, cfg.k);
  if (std::abs(side) <= pb) return not_in_image(SubRegion::DependentLine);

  const int i = cfg.between;
  const TauPair Ri = tau2(cfg, cfg.sensor(i));
  if (norm(t - Ri) <= pb) return unique_label(SubRegion::VertexR, i);
  const double side_Ri = Ri.tau2 - cfg.k * Ri.tau1;
  if ((side > 0) != (side_Ri > 0)) return not_in_image(SubRegion::OutsideTriangle);
  if (viol >= -pb) return unique_label(SubRegion::FacetBoundary);
  // U components are a General-class notion.
  return {Region::Double, SubRegion::None, -1};
}

}  // namespace detail

/// Sign ratio e(tau) / (2 (tau2 - k tau1)) of the collinear half-cone test.
inline double collinear_ratio(const SensorConfig& cfg, const TauPair& t) {
  const double k = cfg.k;
  const double e = k * t.tau1 * t.tau1 - t.tau2 * t.tau2 + cfg.d10 * cfg.d10 * (k * k - k);
  return e / (2.0 * (t.tau2 - k * t.tau1));
}

inline RegionLabel classify_tau(const SensorConfig& cfg, const TauPair& t, double tol) {
  if (cfg.collinear()) return detail::classify_collinear(cfg, t, tol);
  return detail::classify_general(cfg, t, tol);
}

inline RegionLabel classify_tau(const SensorConfig& cfg, const TauPair& t) {
  return classify_tau(cfg, t, default_tol(cfg));
}

}  // namespace tdoa
