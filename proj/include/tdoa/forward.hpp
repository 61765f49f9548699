#pragma once

#include <cmath>
#include <vector>

#include "tdoa/errors.hpp"
#include "tdoa/sensor_config.hpp"

namespace tdoa {

struct TauPair {
  double tau1{};
  double tau2{};

  constexpr TauPair operator+(const TauPair& o) const { return {tau1 + o.tau1, tau2 + o.tau2}; }
  constexpr TauPair operator-(const TauPair& o) const { return {tau1 - o.tau1, tau2 - o.tau2}; }
  constexpr TauPair operator-() const { return {-tau1, -tau2}; }
  constexpr TauPair operator*(double s) const { return {tau1 * s, tau2 * s}; }
  constexpr bool operator==(const TauPair&) const = default;
};

inline double norm(const TauPair& t) { return std::hypot(t.tau1, t.tau2); }

struct TauTriple {
  double tau10{};
  double tau20{};
  double tau21{};
  constexpr bool operator==(const TauTriple&) const = default;
};

/// Rows are the gradients of tau1 and tau2.
struct Jacobian2 {
  EucVec2 row1;
  EucVec2 row2;
};

enum class RankLabel { Rank2, Rank1, Rank0, AtSensor };

inline TauPair tau2(const SensorConfig& cfg, const Point2& x) {
  const double d0 = distance(x, cfg.m0);
  return {distance(x, cfg.m1) - d0, distance(x, cfg.m2) - d0};
}

inline TauTriple tau2_star(const SensorConfig& cfg, const Point2& x) {
  const double d0 = distance(x, cfg.m0);
  const double d1 = distance(x, cfg.m1);
  const double d2 = distance(x, cfg.m2);
  return {d1 - d0, d2 - d0, d2 - d1};
}

inline Jacobian2 jacobian(const SensorConfig& cfg, const Point2& x) {
  const double band = 1e-12 * cfg.scale();
  EucVec2 unit[3];
  for (int i = 0; i < 3; ++i) {
    const EucVec2 d = x - cfg.sensor(i);
    const double r = norm(d);
    if (r <= band) throw AtSensorError("jacobian: x coincides with a sensor");
    unit[i] = d / r;
  }
  return {unit[1] - unit[0], unit[2] - unit[0]};
}

inline double det_jacobian(const SensorConfig& cfg, const Point2& x) {
  const Jacobian2 j = jacobian(cfg, x);
  return wedge2(j.row1, j.row2);
}

inline double default_sensor_band(const SensorConfig& cfg) { return 1e-9 * cfg.scale(); }

inline RankLabel rank_at(const SensorConfig& cfg, const Point2& x, double band) {
  for (int i = 0; i < 3; ++i) {
    if (distance(x, cfg.sensor(i)) <= band) return RankLabel::AtSensor;
  }
  const auto hits = halfline_membership(cfg, x, band);
  if (cfg.collinear()) {
    for (const LineHit& h : hits) {
      if (h.part == LinePart::Complement) return RankLabel::Rank0;
    }
    return hits.empty() ? RankLabel::Rank2 : RankLabel::Rank1;
  }
  for (const LineHit& h : hits) {
    if (h.part == LinePart::Plus || h.part == LinePart::Minus) return RankLabel::Rank1;
  }
  return RankLabel::Rank2;
}

/// Points of the level set A_i(tau) = {x : tau_i(x) = tau}, i in {1, 2}.
inline std::vector<Point2> sample_level_set(const SensorConfig& cfg, int i, double tau, int n,
                                            double span = 5.0) {
  std::vector<Point2> pts;
  if (n < 2 || (i != 1 && i != 2)) return pts;
  const Point2& mi = cfg.sensor(i);
  const double d = distance(mi, cfg.m0);
  const EucVec2 u = (mi - cfg.m0) / d;
  const EucVec2 up = hodge_star(u);
  const double eq_band = 1e-12 * d;
  const double at = std::abs(tau);
  if (at > d + eq_band) return pts;
  pts.reserve(static_cast<size_t>(n));

  if (at >= d - eq_band) {
    // Half-line from m0 away from m_i (tau = d) or from m_i away from m0 (tau = -d).
    const Point2 base = tau > 0 ? cfg.m0 : mi;
    const EucVec2 dir = tau > 0 ? -u : u;
    for (int j = 0; j < n; ++j) pts.push_back(base + dir * (span * d * j / (n - 1)));
    return pts;
  }

  const Point2 c{0.5 * (cfg.m0.x + mi.x), 0.5 * (cfg.m0.y + mi.y)};
  if (tau == 0.0) {
    for (int j = 0; j < n; ++j) pts.push_back(c + up * (span * d * (2.0 * j / (n - 1) - 1.0)));
    return pts;
  }

  const double a = 0.5 * at;
  const double f = 0.5 * d;
  const double b = std::sqrt((f - a) * (f + a));
  const double s = tau > 0 ? -1.0 : 1.0;  // positive tau: branch around m0
  const double tmax = std::asinh(span);
  for (int j = 0; j < n; ++j) {
    const double t = tmax * (2.0 * j / (n - 1) - 1.0);
    pts.push_back(c + u * (s * a * std::cosh(t)) + up * (b * std::sinh(t)));
  }
  return pts;
}

}  // namespace tdoa
