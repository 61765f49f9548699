#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "tdoa/errors.hpp"
#include "tdoa/exterior_algebra.hpp"
#include "tdoa/forward.hpp"
#include "tdoa/sensor_config.hpp"
#include "tdoa/tau_domain.hpp"

namespace tdoa {

/// L21(tau) = {L0 + lambda v}. For General configs both are expressed in the
/// positively oriented sensor frame (v flips sign with the m1/m2 relabeling).
struct Line3 {
  MinkVec3 L0;
  MinkVec3 v;
};

struct Root {
  double lambda{};
  int multiplicity{1};
  bool admissible{};
};

struct QuadraticCase {
  double a{}, b{}, c{}, delta{};
  bool linear{};   // a snapped to zero
  std::vector<Root> roots;

  int admissible_count() const {
    return static_cast<int>(std::count_if(roots.begin(), roots.end(), [](const Root& r) { return r.admissible; }));
  }
};

struct FiberPoint {
  Point2 x;
  int multiplicity{1};
};

struct FiberResult {
  enum class Kind { Points, HalfLine };
  Kind kind{Kind::Points};
  std::vector<FiberPoint> points;
  tdoa::HalfLine half_line;

  bool is_half_line() const { return kind == Kind::HalfLine; }
  /// -1 for the infinite fiber.
  int count() const { return is_half_line() ? -1 : static_cast<int>(points.size()); }
};

namespace detail {

inline TauPair oriented_tau(const SensorConfig& cfg, const TauPair& t) {
  return cfg.swapped ? TauPair{t.tau2, t.tau1} : t;
}

inline double lambda_snap(const SensorConfig& cfg) { return 1e-9 * cfg.scale(); }

/// Separation of the lifted points below which two roots count as one double root.
inline double merge_distance(const SensorConfig& cfg) { return 1e-7 * cfg.scale(); }

inline void solve_stable(double a, double b, double delta, double c, std::vector<double>& out) {
  const double sq = std::sqrt(delta);
  const double q = -(b + (b >= 0 ? sq : -sq));
  if (q == 0.0) {
    // b = 0 and delta = 0 force c = 0.
    out = {0.0, 0.0};
    return;
  }
  out = {q / a, c / q};
}

inline bool collinear_dependent(const SensorConfig& cfg, const TauPair& t, double band) {
  return std::abs(t.tau2 - cfg.k * t.tau1) / std::hypot(1.0, cfg.k) <= band;
}

}  // namespace detail

inline Line3 l21_line(const SensorConfig& cfg, const TauPair& tau) {
  if (cfg.collinear()) {
    const double band = detail::point_band(cfg, 0.0);
    const double kt = cfg.k * tau.tau1 - tau.tau2;
    if (detail::collinear_dependent(cfg, tau, band)) {
      if (std::abs(std::abs(tau.tau1) - cfg.d10) <= band) {
        throw CoincidentPlanes("l21_line: Pi1 = Pi2 at the collinear special vertex");
      }
      throw DependentPlanes("l21_line: Pi1 and Pi2 are parallel on tau2 = k tau1");
    }
    const double n1 = (cfg.d10 - tau.tau1) * (cfg.d10 + tau.tau1);
    const double n2 = (cfg.d20 - tau.tau2) * (cfg.d20 + tau.tau2);
    const double e = cfg.k * tau.tau1 * tau.tau1 - tau.tau2 * tau.tau2 + cfg.d10 * cfg.d10 * (cfg.k * cfg.k - cfg.k);
    const double alpha = (tau.tau1 * n2 - tau.tau2 * n1) / (2.0 * cfg.d10 * cfg.d10 * kt);
    const EucVec2 p = cfg.d10_vec * alpha;
    Line3 L;
    L.L0 = {cfg.m0.x + p.u1, cfg.m0.y + p.u2, e / (2.0 * kt)};
    L.v = star_wedge(MinkVec3{cfg.d10_vec.u1, cfg.d10_vec.u2, 0.0}, e3);
    return L;
  }
  const TauPair t = detail::oriented_tau(cfg, tau);
  const EucVec2 d10 = cfg.od10();
  const EucVec2 d20 = cfg.od20();
  const double w = wedge2(d10, d20);
  const double n10 = (cfg.od10_norm() - t.tau1) * (cfg.od10_norm() + t.tau1);
  const double n20 = (cfg.od20_norm() - t.tau2) * (cfg.od20_norm() + t.tau2);
  // D0(L0) solves <D0, D_i0> = |D_i0|^2 / 2 with zero e3 component.
  const EucVec2 gp = d20 * n10 - d10 * n20;
  const EucVec2 p = hodge_star(gp) * (-1.0 / (2.0 * w));
  Line3 L;
  L.L0 = {cfg.m0.x + p.u1, cfg.m0.y + p.u2, 0.0};
  L.v = star_wedge(MinkVec3{d10.u1, d10.u2, t.tau1}, MinkVec3{d20.u1, d20.u2, t.tau2});
  return L;
}

/// Roots of a lambda^2 + 2 b lambda + c = 0 along L21(tau), with admissibility.
inline QuadraticCase solve_lambda(const SensorConfig& cfg, const TauPair& tau) {
  const Line3 L = l21_line(cfg, tau);
  QuadraticCase q;
  const double scale = cfg.scale();
  std::vector<double> lambdas;
  double sep_factor;  // |X(lambda1) - X(lambda2)| / |lambda1 - lambda2|, lifted points

  if (cfg.collinear()) {
    const double n1 = (cfg.d10 - tau.tau1) * (cfg.d10 + tau.tau1);
    const double n2 = (cfg.d20 - tau.tau2) * (cfg.d20 + tau.tau2);
    const double t21 = tau.tau2 - tau.tau1;
    const double n21 = (cfg.d21 - t21) * (cfg.d21 + t21);
    const double kt = cfg.k * tau.tau1 - tau.tau2;
    const double d2 = cfg.d10 * cfg.d10;
    q.a = d2;
    q.b = 0.0;
    q.c = -(n1 * n2 * n21) / (4.0 * d2 * kt * kt);
    q.delta = -q.a * q.c;
    const double snap = 1e3 * detail::kEps * scale * scale *
                        (std::abs(n1 * n2) + std::abs(n1 * n21) + std::abs(n2 * n21)) / (4.0 * d2 * kt * kt);
    if (q.delta < -snap * q.a) throw NoRealRoots("solve_lambda: tau outside P2");
    const double lam = std::sqrt(std::max(q.delta, 0.0)) / q.a;
    lambdas = {-lam, lam};
    sep_factor = cfg.d10;
  } else {
    const TauCoefficients k = coefficients(cfg, tau);
    const detail::Bands bands = detail::coefficient_bands(cfg, tau, k, default_tol(cfg));
    q.a = k.a;
    q.b = k.b;
    q.c = k.c;
    q.delta = k.delta;
    // v = (-u2, u1, w): at tau = 0 both roots share x but not the lift.
    sep_factor = std::hypot(norm(k.u), cfg.w());
    if (std::abs(k.a) <= bands.a) {
      q.linear = true;
      if (std::abs(k.b) > bands.b) lambdas = {-k.c / (2.0 * k.b)};
    } else {
      const double s2 = scale * scale;
      const double snap =
          0.25 * 1e3 * detail::kEps * s2 * (std::abs(k.n10 * k.n20) + std::abs(k.n10 * k.n21) + std::abs(k.n20 * k.n21));
      if (k.delta < -snap) throw NoRealRoots("solve_lambda: tau outside P2");
      detail::solve_stable(k.a, k.b, std::max(k.delta, 0.0), k.c, lambdas);
    }
  }

  std::sort(lambdas.begin(), lambdas.end());
  if (lambdas.size() == 2 && std::abs(lambdas[1] - lambdas[0]) * sep_factor <= detail::merge_distance(cfg)) {
    lambdas = {0.5 * (lambdas[0] + lambdas[1])};
    q.roots.push_back({lambdas[0], 2, false});
  } else {
    for (double l : lambdas) q.roots.push_back({l, 1, false});
  }

  // Admissible: the lifted point lies on C0^- and on the past sheets of C1, C2,
  // i.e. emission time tau_e <= min(tau1, tau2, 0).
  const double snap = detail::lambda_snap(cfg);
  for (Root& r : q.roots) {
    const double te = L.L0.u3 + r.lambda * L.v.u3;
    r.admissible = te <= snap && te <= tau.tau1 + snap && te <= tau.tau2 + snap;
  }
  return q;
}

namespace detail {

inline tdoa::HalfLine collinear_half_line(const SensorConfig& cfg, int sign) {
  // sign = +1: tau = (d10, sgn(k) d20); the fiber runs in -d10 direction from
  // the extreme sensor on that side.
  const EucVec2 u = cfg.d10_vec / cfg.d10;
  const EucVec2 dir = sign > 0 ? -u : u;
  Point2 base = cfg.m0;
  double best = 0.0;
  for (int i = 1; i < 3; ++i) {
    const double s = dot(cfg.sensor(i) - cfg.m0, dir);
    if (s > best) {
      best = s;
      base = cfg.sensor(i);
    }
  }
  return {base, dir};
}

}  // namespace detail

inline FiberResult locate(const SensorConfig& cfg, const TauPair& tau) {
  FiberResult out;
  const double pb = detail::point_band(cfg, default_tol(cfg));
  const PolygonP2 p2 = build_p2(cfg);
  if (p2.max_violation(tau) > pb) return out;

  if (cfg.collinear()) {
    const double sk = cfg.k > 0 ? 1.0 : -1.0;
    const TauPair vplus{cfg.d10, sk * cfg.d20};
    if (norm(tau - vplus) <= pb || norm(tau + vplus) <= pb) {
      out.kind = FiberResult::Kind::HalfLine;
      out.half_line = detail::collinear_half_line(cfg, norm(tau - vplus) <= pb ? 1 : -1);
      return out;
    }
    if (detail::collinear_dependent(cfg, tau, pb)) return out;
  }

  QuadraticCase q;
  try {
    q = solve_lambda(cfg, tau);
  } catch (const NoRealRoots&) {
    return out;
  }
  const Line3 L = l21_line(cfg, tau);
  for (const Root& r : q.roots) {
    if (!r.admissible) continue;
    out.points.push_back({{L.L0.u1 + r.lambda * L.v.u1, L.L0.u2 + r.lambda * L.v.u2}, r.multiplicity});
  }
  std::sort(out.points.begin(), out.points.end(), [](const FiberPoint& p, const FiberPoint& q2) {
    return p.x.x < q2.x.x || (p.x.x == q2.x.x && p.x.y < q2.x.y);
  });
  return out;
}

}  // namespace tdoa
