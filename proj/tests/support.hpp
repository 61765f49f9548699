#pragma once

// Shared fixtures and independent reference computations for the tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "tdoa/tdoa.hpp"

namespace tdoa::test {

inline SensorConfig demo_right() { return build_config({0, 0}, {2, 0}, {2, 2}); }
inline SensorConfig demo_left() { return build_config({0, 0}, {2, 0}, {-2, 2}); }
inline SensorConfig demo_collinear() { return build_config({0, 0}, {1, 0}, {-1, 0}); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Point2 random_point(std::mt19937_64& rng, double half) {
  return {uniform(rng, -half, half), uniform(rng, -half, half)};
}

/// Random General-class array with sensors in [-5, 5]^2.
inline SensorConfig random_general(std::mt19937_64& rng) {
  for (;;) {
    try {
      SensorConfig cfg = build_config(random_point(rng, 5), random_point(rng, 5), random_point(rng, 5));
      if (cfg.general()) return cfg;
    } catch (const DegenerateConfig&) {
    }
  }
}

/// Random collinear array: three points on a random line, random order.
inline SensorConfig random_collinear(std::mt19937_64& rng) {
  for (;;) {
    const Point2 c = random_point(rng, 3);
    const double th = uniform(rng, 0, 2 * M_PI);
    const EucVec2 u{std::cos(th), std::sin(th)};
    const double s0 = uniform(rng, -4, 4), s1 = uniform(rng, -4, 4), s2 = uniform(rng, -4, 4);
    try {
      SensorConfig cfg = build_config(c + u * s0, c + u * s1, c + u * s2);
      if (cfg.collinear() && std::min({cfg.d10, cfg.d20, cfg.d21}) > 0.05 * cfg.scale()) return cfg;
    } catch (const DegenerateConfig&) {
    }
  }
}

inline MinkVec3 random_mink(std::mt19937_64& rng) {
  return {uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
}

inline MinkBivec3 random_bivec(std::mt19937_64& rng) {
  return {uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
}

/// Uniform sample of P2 by rejection from its bounding box.
inline TauPair random_tau_in_p2(std::mt19937_64& rng, const SensorConfig& cfg, const PolygonP2& p2) {
  for (;;) {
    const TauPair t{uniform(rng, -cfg.d10, cfg.d10), uniform(rng, -cfg.d20, cfg.d20)};
    if (p2.contains(t)) return t;
  }
}

/// a, b, c of the cone/line quadratic computed from the Minkowski picture:
/// v = *(D10 ^ D20) and D0(L0) from a plain linear solve of the two plane
/// equations. Works in the positively oriented frame.
struct OracleCoefficients {
  double a, b, c, bbar, delta;
  MinkVec3 D0L0, v;
};

inline OracleCoefficients oracle_coefficients(const SensorConfig& cfg, const TauPair& tau) {
  const TauPair t = cfg.swapped ? TauPair{tau.tau2, tau.tau1} : tau;
  const EucVec2 d10 = cfg.od10(), d20 = cfg.od20();
  const MinkVec3 D10{d10.u1, d10.u2, t.tau1};
  const MinkVec3 D20{d20.u1, d20.u2, t.tau2};
  Eigen::Matrix2d A;
  A << d10.u1, d10.u2, d20.u1, d20.u2;
  Eigen::Vector2d rhs(0.5 * mink_norm2(D10), 0.5 * mink_norm2(D20));
  const Eigen::Vector2d p = A.partialPivLu().solve(rhs);
  OracleCoefficients o;
  o.D0L0 = {p(0), p(1), 0.0};
  o.v = star_wedge(D10, D20);
  o.a = mink_norm2(o.v);
  o.b = mink_inner(o.D0L0, o.v);
  o.c = mink_norm2(o.D0L0);
  o.bbar = 2.0 * wedge2(d10, d20) * o.b;
  o.delta = o.b * o.b - o.a * o.c;
  return o;
}

/// Central-difference Jacobian of tau2.
inline Jacobian2 fd_jacobian(const SensorConfig& cfg, const Point2& x, double h) {
  const TauPair px = tau2(cfg, {x.x + h, x.y}), mx = tau2(cfg, {x.x - h, x.y});
  const TauPair py = tau2(cfg, {x.x, x.y + h}), my = tau2(cfg, {x.x, x.y - h});
  return {{(px.tau1 - mx.tau1) / (2 * h), (py.tau1 - my.tau1) / (2 * h)},
          {(px.tau2 - mx.tau2) / (2 * h), (py.tau2 - my.tau2) / (2 * h)}};
}

/// Distance from x to the degeneracy locus (union of the six half-lines).
inline double distance_to_degeneracy(const SensorConfig& cfg, const Point2& x) {
  double best = INFINITY;
  for (const LineSplit& s : line_splits(cfg)) {
    for (const HalfLine& h : {s.plus, s.minus}) {
      const double t = std::max(0.0, dot(x - h.base, h.direction));
      best = std::min(best, norm(x - (h.base + h.direction * t)));
    }
  }
  return best;
}

inline double distance_to_sensors(const SensorConfig& cfg, const Point2& x) {
  return std::min({distance(x, cfg.m0), distance(x, cfg.m1), distance(x, cfg.m2)});
}

inline double min_distance(const FiberResult& f, const Point2& x) {
  double best = INFINITY;
  for (const FiberPoint& p : f.points) best = std::min(best, distance(p.x, x));
  return best;
}

/// Square oracle box around the sensor centroid: at least 50 array scales
/// wide, and 1.5 times past the farthest point in `expected`.
inline Box oracle_box(const SensorConfig& cfg, const FiberResult& expected) {
  const Point2 c{(cfg.m0.x + cfg.m1.x + cfg.m2.x) / 3.0, (cfg.m0.y + cfg.m1.y + cfg.m2.y) / 3.0};
  double half = 50.0 * cfg.scale();
  for (const FiberPoint& p : expected.points) {
    half = std::max(half, 1.5 * std::max(std::abs(p.x.x - c.x), std::abs(p.x.y - c.y)));
  }
  return {{c.x - half, c.y - half}, {c.x + half, c.y + half}};
}

/// Oracle fiber from nested boxes around the sensor centroid, from twice the
/// shortest side out to oracle_box in steps of 8; a single grid cannot resolve
/// both short baselines and far preimages.
inline FiberResult oracle_fiber(const SensorConfig& cfg, const TauPair& tau, const FiberResult& expected,
                                int grid_n = 128) {
  const Box far = oracle_box(cfg, expected);
  const Point2 c{0.5 * (far.lo.x + far.hi.x), 0.5 * (far.lo.y + far.hi.y)};
  const double far_half = 0.5 * (far.hi.x - far.lo.x);
  FiberResult out;
  for (double h = 2.0 * std::min({cfg.d10, cfg.d20, cfg.d21}) + 0.5 * cfg.scale();; h *= 8.0) {
    const double hh = std::min(h, far_half);
    for (const FiberPoint& p : oracle_locate(cfg, tau, {{c.x - hh, c.y - hh}, {c.x + hh, c.y + hh}}, grid_n).points) {
      bool dup = false;
      for (const FiberPoint& q : out.points) {
        dup = dup || distance(p.x, q.x) <= 1e-5 * std::max(cfg.scale(), norm(p.x - c));
      }
      if (!dup) out.points.push_back(p);
    }
    if (hh >= far_half) break;
  }
  return out;
}

/// Per-axis standard deviation of the estimate of x when the complete triple
/// carries isotropic noise sigma and is projected onto H before inversion:
/// Cov(tau) = sigma^2 [[2/3, 1/3], [1/3, 2/3]], Cov(x) = J^-1 Cov(tau) J^-T.
inline EucVec2 propagated_sigma(const SensorConfig& cfg, const Point2& x, double sigma) {
  const Jacobian2 j = jacobian(cfg, x);
  Eigen::Matrix2d J;
  J << j.row1.u1, j.row1.u2, j.row2.u1, j.row2.u2;
  Eigen::Matrix2d C;
  C << 2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0;
  const Eigen::Matrix2d Ji = J.inverse();
  const Eigen::Matrix2d cov = Ji * C * Ji.transpose() * (sigma * sigma);
  return {std::sqrt(cov(0, 0)), std::sqrt(cov(1, 1))};
}

/// Unit vectors from x towards the three sensors.
inline std::array<EucVec2, 3> sensor_directions(const SensorConfig& cfg, const Point2& x) {
  std::array<EucVec2, 3> u;
  for (int i = 0; i < 3; ++i) {
    const EucVec2 d = cfg.sensor(i) - x;
    u[static_cast<size_t>(i)] = d / norm(d);
  }
  return u;
}

/// |det J| from the unit-circle triangle of the sensor directions: twice its
/// area, i.e. half the product of its sides.
inline double chord_det(const SensorConfig& cfg, const Point2& x) {
  const auto u = sensor_directions(cfg, x);
  return 0.5 * norm(u[0] - u[1]) * norm(u[1] - u[2]) * norm(u[2] - u[0]);
}

inline double min_chord(const SensorConfig& cfg, const Point2& x) {
  const auto u = sensor_directions(cfg, x);
  return std::min({norm(u[0] - u[1]), norm(u[1] - u[2]), norm(u[2] - u[0])});
}

/// Reflection of p across the line through a and b.
inline Point2 reflect(const Point2& p, const Point2& a, const Point2& b) {
  const EucVec2 u = (b - a) / distance(a, b);
  const EucVec2 d = p - a;
  const EucVec2 along = u * dot(d, u);
  return a + along * 2.0 - d;
}

/// True iff segment [p, q] crosses the half-line h.
inline bool crosses(const Point2& p, const Point2& q, const HalfLine& h) {
  const EucVec2 r = q - p;
  const double den = wedge2(r, h.direction);
  if (den == 0.0) return false;
  const EucVec2 w = h.base - p;
  const double s = wedge2(w, h.direction) / den;  // along the segment
  const double t = wedge2(w, r) / den;            // along the half-line
  return s >= 0.0 && s <= 1.0 && t >= 0.0;
}

}  // namespace tdoa::test
