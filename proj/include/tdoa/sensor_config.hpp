#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "tdoa/errors.hpp"
#include "tdoa/exterior_algebra.hpp"

namespace tdoa {

struct Point2 {
  double x{};
  double y{};

  constexpr bool operator==(const Point2&) const = default;
};

constexpr EucVec2 operator-(const Point2& a, const Point2& b) { return {a.x - b.x, a.y - b.y}; }
constexpr Point2 operator+(const Point2& p, const EucVec2& v) { return {p.x + v.u1, p.y + v.u2}; }
constexpr Point2 operator-(const Point2& p, const EucVec2& v) { return {p.x - v.u1, p.y - v.u2}; }

inline double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

enum class GeometryClass { General, Collinear, Degenerate };

struct SensorConfig {
  // Caller order.
  Point2 m0, m1, m2;
  EucVec2 d10_vec, d20_vec, d21_vec;
  double d10{}, d20{}, d21{};
  int orientation{};  // sign of wedge2(d10, d20), caller order
  bool swapped{};     // m1 and m2 exchange roles in the oriented frame
  GeometryClass geometry_class{GeometryClass::General};
  double k{};         // Collinear only: d20 = k d10
  int between{-1};    // Collinear only: index of the interior sensor
  double rel_tol{1e-9};

  bool general() const { return geometry_class == GeometryClass::General; }
  bool collinear() const { return geometry_class == GeometryClass::Collinear; }

  const Point2& sensor(int i) const { return i == 0 ? m0 : (i == 1 ? m1 : m2); }

  /// Max pairwise sensor distance.
  double scale() const { return std::max({d10, d20, d21}); }

  /// Sensors in the positively oriented frame used by the localizer.
  const Point2& om1() const { return swapped ? m2 : m1; }
  const Point2& om2() const { return swapped ? m1 : m2; }
  EucVec2 od10() const { return swapped ? d20_vec : d10_vec; }
  EucVec2 od20() const { return swapped ? d10_vec : d20_vec; }
  double od10_norm() const { return swapped ? d20 : d10; }
  double od20_norm() const { return swapped ? d10 : d20; }

  /// |wedge2(d10, d20)|, the oriented area term.
  double w() const { return std::abs(wedge2(d10_vec, d20_vec)); }
};

inline SensorConfig build_config(Point2 m0, Point2 m1, Point2 m2, double rel_tol = 1e-9) {
  if (!(rel_tol > 0.0 && rel_tol <= 1e-3)) {
    throw DegenerateConfig("build_config: rel_tol must lie in (0, 1e-3]");
  }
  for (const Point2& p : {m0, m1, m2}) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw DegenerateConfig("build_config: non-finite sensor coordinate");
    }
  }
  SensorConfig cfg;
  cfg.m0 = m0;
  cfg.m1 = m1;
  cfg.m2 = m2;
  cfg.rel_tol = rel_tol;
  cfg.d10_vec = m1 - m0;
  cfg.d20_vec = m2 - m0;
  cfg.d21_vec = m2 - m1;
  cfg.d10 = norm(cfg.d10_vec);
  cfg.d20 = norm(cfg.d20_vec);
  cfg.d21 = norm(cfg.d21_vec);

  const double dmax = cfg.scale();
  const double dmin = std::min({cfg.d10, cfg.d20, cfg.d21});
  if (dmax == 0.0 || dmin <= rel_tol * dmax) {
    throw DegenerateConfig("build_config: coincident sensors");
  }

  const double w = wedge2(cfg.d10_vec, cfg.d20_vec);
  if (std::abs(w) <= rel_tol * cfg.d10 * cfg.d20) {
    cfg.geometry_class = GeometryClass::Collinear;
    cfg.orientation = 0;
    cfg.k = dot(cfg.d20_vec, cfg.d10_vec) / (cfg.d10 * cfg.d10);
    if (cfg.k < 0.0) {
      cfg.between = 0;
    } else if (cfg.k < 1.0) {
      cfg.between = 2;
    } else {
      cfg.between = 1;
    }
  } else {
    cfg.geometry_class = GeometryClass::General;
    cfg.orientation = w > 0 ? 1 : -1;
    cfg.swapped = w < 0;
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Line splits

enum class LinePart { Plus, Minus, Zero, Complement };

struct HalfLine {
  Point2 base;
  EucVec2 direction;  // unit
};

struct LineSplit {
  int index{};
  // General: segment r_i^0 = [seg_a, seg_b], plus = r_i^+, minus = r_i^-.
  // Collinear: segment r^0, plus and minus are the two half-lines of r^c.
  Point2 seg_a, seg_b;
  HalfLine plus, minus;
};

struct LineHit {
  int line{};
  LinePart part{};
  constexpr bool operator==(const LineHit&) const = default;
};

namespace detail {

inline double dist_to_segment(const Point2& x, const Point2& a, const Point2& b) {
  const EucVec2 ab = b - a;
  double t = dot(x - a, ab) / dot(ab, ab);
  t = std::clamp(t, 0.0, 1.0);
  return norm(x - (a + ab * t));
}

inline double dist_to_halfline(const Point2& x, const HalfLine& h) {
  const double t = std::max(0.0, dot(x - h.base, h.direction));
  return norm(x - (h.base + h.direction * t));
}

}  // namespace detail

/// The three split lines (General) or the single line (Collinear).
inline std::vector<LineSplit> line_splits(const SensorConfig& cfg) {
  std::vector<LineSplit> out;
  if (cfg.collinear()) {
    const EucVec2 u = cfg.d10_vec / cfg.d10;
    std::array<Point2, 3> ms{cfg.m0, cfg.m1, cfg.m2};
    auto proj = [&](const Point2& p) { return dot(p - cfg.m0, u); };
    auto [lo, hi] = std::minmax_element(ms.begin(), ms.end(),
                                        [&](const Point2& a, const Point2& b) { return proj(a) < proj(b); });
    LineSplit s;
    s.index = 0;
    s.seg_a = *lo;
    s.seg_b = *hi;
    s.plus = {*lo, -u};
    s.minus = {*hi, u};
    out.push_back(s);
    return out;
  }
  static constexpr int pairs[3][2] = {{1, 2}, {0, 2}, {0, 1}};
  for (int i = 0; i < 3; ++i) {
    const Point2& a = cfg.sensor(pairs[i][0]);
    const Point2& b = cfg.sensor(pairs[i][1]);
    const EucVec2 u = (b - a) / distance(a, b);
    LineSplit s;
    s.index = i;
    s.seg_a = a;
    s.seg_b = b;
    s.plus = {a, -u};
    s.minus = {b, u};
    out.push_back(s);
  }
  return out;
}

/// Every split part (closed) within perpendicular distance `band` of x.
inline std::vector<LineHit> halfline_membership(const SensorConfig& cfg, const Point2& x, double band) {
  std::vector<LineHit> hits;
  for (const LineSplit& s : line_splits(cfg)) {
    if (cfg.collinear()) {
      if (detail::dist_to_segment(x, s.seg_a, s.seg_b) <= band) hits.push_back({s.index, LinePart::Zero});
      if (detail::dist_to_halfline(x, s.plus) <= band || detail::dist_to_halfline(x, s.minus) <= band) {
        hits.push_back({s.index, LinePart::Complement});
      }
      continue;
    }
    if (detail::dist_to_halfline(x, s.plus) <= band) hits.push_back({s.index, LinePart::Plus});
    if (detail::dist_to_halfline(x, s.minus) <= band) hits.push_back({s.index, LinePart::Minus});
    if (detail::dist_to_segment(x, s.seg_a, s.seg_b) <= band) hits.push_back({s.index, LinePart::Zero});
  }
  return hits;
}

}  // namespace tdoa
