#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

#include "tdoa/errors.hpp"
#include "tdoa/forward.hpp"
#include "tdoa/localizer.hpp"
#include "tdoa/sensor_config.hpp"
#include "tdoa/tau_domain.hpp"

namespace tdoa {

/// H: tau10 - tau20 + tau21 = 0.
struct HPlane {
  static constexpr double normal[3] = {1.0, -1.0, 1.0};

  static double evaluate(const TauTriple& t) { return t.tau10 - t.tau20 + t.tau21; }
};

struct NoisyTriple {
  TauTriple tau;
  double sigma{};
  std::uint64_t seed{};
};

inline TauTriple project_to_H(const TauTriple& t) {
  const double s = HPlane::evaluate(t) / 3.0;
  return {t.tau10 - s, t.tau20 + s, t.tau21 - s};
}

inline TauPair p3(const TauTriple& t) { return {t.tau10, t.tau20}; }

inline TauTriple lift(const TauPair& t) { return {t.tau1, t.tau2, t.tau2 - t.tau1}; }

inline double default_on_plane_tol() { return 1e-9; }

inline void require_on_H(const SensorConfig& cfg, const TauTriple& t, double on_plane_tol) {
  if (std::abs(HPlane::evaluate(t)) > on_plane_tol * (cfg.d10 + cfg.d20 + cfg.d21)) {
    throw OffPlane("triple is not on H; project_to_H first");
  }
}

/// True iff every |D_ji(tau*)|^2 = d_ji^2 - tau_ji^2 is nonnegative.
inline bool in_complete_polygon(const SensorConfig& cfg, const TauTriple& t) {
  return cfg.d10 * cfg.d10 - t.tau10 * t.tau10 >= 0 && cfg.d20 * cfg.d20 - t.tau20 * t.tau20 >= 0 &&
         cfg.d21 * cfg.d21 - t.tau21 * t.tau21 >= 0;
}

inline FiberResult locate_star(const SensorConfig& cfg, const TauTriple& t,
                               double on_plane_tol = default_on_plane_tol()) {
  require_on_H(cfg, t, on_plane_tol);
  return locate(cfg, p3(t));
}

/// Pair kept by p3 (ref 0), p2 (ref 1: tau10, tau21) or p1 (ref 2: tau20, tau21).
inline TauPair change_reference(const SensorConfig& cfg, const TauTriple& t, int ref,
                                double on_plane_tol = default_on_plane_tol()) {
  require_on_H(cfg, t, on_plane_tol);
  switch (ref) {
    case 0: return {t.tau10, t.tau20};
    case 1: return {t.tau10, t.tau21};
    case 2: return {t.tau20, t.tau21};
    default: throw std::invalid_argument("change_reference: ref must be 0, 1 or 2");
  }
}

/// The array relabeled with m_ref as reference sensor, and the projected pair
/// written as that array's TDOA pair.
inline std::pair<SensorConfig, TauPair> rereferenced(const SensorConfig& cfg, const TauTriple& t, int ref) {
  const TauPair p = change_reference(cfg, t, ref);
  switch (ref) {
    case 1: return {build_config(cfg.m1, cfg.m0, cfg.m2, cfg.rel_tol), {-p.tau1, p.tau2}};
    case 2: return {build_config(cfg.m2, cfg.m0, cfg.m1, cfg.rel_tol), {-p.tau1, -p.tau2}};
    default: return {cfg, p};
  }
}

/// Forward triple plus noise drawn by `sample(rng)` per component.
template <typename Sampler>
NoisyTriple synthesize_noisy_with(const SensorConfig& cfg, const Point2& x, std::uint64_t seed, Sampler&& sample) {
  std::mt19937_64 rng(seed);
  TauTriple t = tau2_star(cfg, x);
  t.tau10 += sample(rng);
  t.tau20 += sample(rng);
  t.tau21 += sample(rng);
  return {t, 0.0, seed};
}

inline NoisyTriple synthesize_noisy(const SensorConfig& cfg, const Point2& x, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("synthesize_noisy: sigma must be >= 0");
  if (sigma == 0.0) return {tau2_star(cfg, x), 0.0, seed};
  std::normal_distribution<double> dist(0.0, sigma);
  NoisyTriple n = synthesize_noisy_with(cfg, x, seed, [&](std::mt19937_64& r) { return dist(r); });
  n.sigma = sigma;
  return n;
}

}  // namespace tdoa
