#pragma once

// Grid-search inversion of tau2, used only to cross-check the closed form.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "tdoa/forward.hpp"
#include "tdoa/localizer.hpp"
#include "tdoa/sensor_config.hpp"

namespace tdoa {

struct Box {
  Point2 lo;
  Point2 hi;
};

namespace detail {

inline double residual2(const SensorConfig& cfg, const TauPair& tau, const Point2& x) {
  const TauPair r = tau2(cfg, x) - tau;
  return r.tau1 * r.tau1 + r.tau2 * r.tau2;
}

/// Damped Gauss-Newton on the residual of tau2(x) = tau.
inline Point2 gauss_newton(const SensorConfig& cfg, const TauPair& tau, Point2 x, int max_iter = 50) {
  double rho = residual2(cfg, tau, x);
  const double floor = 1e-13 * cfg.scale();
  for (int it = 0; it < max_iter && rho > floor * floor; ++it) {
    Jacobian2 J;
    try {
      J = jacobian(cfg, x);
    } catch (const AtSensorError&) {
      break;
    }
    const TauPair r = tau2(cfg, x) - tau;
    // Normal equations with a small Levenberg term for the rank-deficient fold.
    const double jtj11 = J.row1.u1 * J.row1.u1 + J.row2.u1 * J.row2.u1;
    const double jtj12 = J.row1.u1 * J.row1.u2 + J.row2.u1 * J.row2.u2;
    const double jtj22 = J.row1.u2 * J.row1.u2 + J.row2.u2 * J.row2.u2;
    const double g1 = J.row1.u1 * r.tau1 + J.row2.u1 * r.tau2;
    const double g2 = J.row1.u2 * r.tau1 + J.row2.u2 * r.tau2;
    const double mu = 1e-12 * (jtj11 + jtj22);
    const double a11 = jtj11 + mu, a22 = jtj22 + mu;
    const double det = a11 * a22 - jtj12 * jtj12;
    if (det <= 0.0) break;
    EucVec2 step{-(a22 * g1 - jtj12 * g2) / det, -(a11 * g2 - jtj12 * g1) / det};
    bool improved = false;
    for (int h = 0; h < 40; ++h) {
      const Point2 xn = x + step;
      const double rn = residual2(cfg, tau, xn);
      if (rn < rho) {
        x = xn;
        rho = rn;
        improved = true;
        break;
      }
      step = step * 0.5;
    }
    if (!improved) break;
  }
  return x;
}

struct GridMinimum {
  Point2 x;
  double rho;
};

inline std::vector<GridMinimum> grid_minima(const SensorConfig& cfg, const TauPair& tau, const Box& box, int n,
                                            double rho_cap) {
  const double hx = (box.hi.x - box.lo.x) / (n - 1);
  const double hy = (box.hi.y - box.lo.y) / (n - 1);
  std::vector<double> rho(static_cast<size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      rho[static_cast<size_t>(j) * n + i] = residual2(cfg, tau, {box.lo.x + i * hx, box.lo.y + j * hy});
    }
  }
  std::vector<GridMinimum> out;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double v = rho[static_cast<size_t>(j) * n + i];
      if (v > rho_cap) continue;
      bool is_min = true;
      for (int dj = -1; dj <= 1 && is_min; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const int ii = i + di, jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= n || jj >= n) continue;
          const double w = rho[static_cast<size_t>(jj) * n + ii];
          // Ties broken by index so plateaus yield one minimum.
          if (w < v || (w == v && (jj < j || (jj == j && ii < i)))) {
            is_min = false;
            break;
          }
        }
      }
      if (is_min) out.push_back({{box.lo.x + i * hx, box.lo.y + j * hy}, v});
    }
  }
  return out;
}

}  // namespace detail

/// Independent inversion: grid minima of |tau2(x) - tau|^2 over `box`, each
/// re-gridded at 16x finer resolution around it, then polished by Gauss-Newton.
inline FiberResult oracle_locate(const SensorConfig& cfg, const TauPair& tau, const Box& box, int grid_n) {
  FiberResult out;
  if (grid_n < 64) grid_n = 64;
  const double size = std::max(box.hi.x - box.lo.x, box.hi.y - box.lo.y);
  const double h = size / (grid_n - 1);
  // |grad tau_i| <= 2, so a root within a cell leaves rho below this at a grid node.
  const double cap = 2.0 * (2.0 * h) * (2.0 * h);
  const double accept = 1e-9 * cfg.scale();

  std::vector<Point2> found;
  for (const auto& coarse : detail::grid_minima(cfg, tau, box, grid_n, cap)) {
    const Box local{{coarse.x.x - 1.5 * h, coarse.x.y - 1.5 * h}, {coarse.x.x + 1.5 * h, coarse.x.y + 1.5 * h}};
    const double hf = 3.0 * h / 47.0;
    const double cap_f = 2.0 * (2.0 * hf) * (2.0 * hf);
    for (const auto& fine : detail::grid_minima(cfg, tau, local, 48, cap_f)) {
      const Point2 x = detail::gauss_newton(cfg, tau, fine.x);
      if (std::sqrt(detail::residual2(cfg, tau, x)) > accept) continue;
      if (x.x < box.lo.x || x.x > box.hi.x || x.y < box.lo.y || x.y > box.hi.y) continue;
      found.push_back(x);
    }
  }
  std::sort(found.begin(), found.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  const double merge = 1e-6 * size;
  for (const Point2& x : found) {
    bool dup = false;
    for (FiberPoint& p : out.points) {
      if (distance(p.x, x) <= merge) {
        dup = true;
        break;
      }
    }
    if (!dup) out.points.push_back({x, 1});
  }
  return out;
}

}  // namespace tdoa
