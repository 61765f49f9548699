#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "tdoa/errors.hpp"
#include "tdoa/forward.hpp"
#include "tdoa/localizer.hpp"
#include "tdoa/sensor_config.hpp"
#include "tdoa/tau_domain.hpp"

namespace tdoa {

struct CurveSample {
  double mu{};
  TauPair tau_on_E;
  Point2 x;
  int branch{-1};  // index i of the adjacent U_i
};

struct BifurcationResult {
  std::vector<CurveSample> samples;
  int skipped{};  // pencil samples dropped by the |b| guard
};

/// Points of E = {a = 0}, from the pencil of lines through the origin at
/// angles mu_j = 2 pi j / N (N = n rounded up to even, so samples j and
/// j + N/2 are antipodal).
inline std::vector<TauPair> sample_E(const SensorConfig& cfg, int n, std::vector<double>* mus = nullptr) {
  std::vector<TauPair> out;
  if (!cfg.general() || n < 8) return out;
  const int N = n + (n % 2);
  const double w = cfg.w();
  out.reserve(static_cast<size_t>(N));
  if (mus) mus->clear();
  for (int j = 0; j < N; ++j) {
    const double mu = 2.0 * M_PI * j / N;
    const double cm = std::cos(mu), sm = std::sin(mu);
    const double t = w / norm(cfg.d10_vec * sm - cfg.d20_vec * cm);
    out.push_back({t * cm, t * sm});
    if (mus) mus->push_back(mu);
  }
  return out;
}

/// x(tau) = L0(tau) - c / (2 b) * (tau2 d10 - tau1 d20 rotated), for tau on E.
inline Point2 quintic_point(const SensorConfig& cfg, const TauPair& tau) {
  const Line3 L = l21_line(cfg, tau);
  const TauCoefficients k = coefficients(cfg, tau);
  const double lambda = -k.c / (2.0 * k.b);
  return {L.L0.u1 + lambda * L.v.u1, L.L0.u2 + lambda * L.v.u2};
}

inline int branch_of(const SensorConfig& cfg, const TauPair& tau) {
  const TauPair outward = tau * (1.0 + 1e-6);
  try {
    return label_U_component(cfg, outward);
  } catch (const AmbiguousComponent&) {
    const DistinguishedPoints dp = tangency_points(cfg);
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (norm(tau - dp.R(i)) < norm(tau - dp.R(best))) best = i;
    }
    return best;
  }
}

inline BifurcationResult bifurcation_samples(const SensorConfig& cfg, int n, double guard = 1e-6) {
  BifurcationResult res;
  std::vector<double> mus;
  const std::vector<TauPair> taus = sample_E(cfg, n, &mus);
  const double s = cfg.scale();
  const double bmin = guard * s * s * s;
  for (size_t j = 0; j < taus.size(); ++j) {
    const TauPair& t = taus[j];
    if (std::abs(coeff_b(cfg, t)) <= bmin) {
      ++res.skipped;
      continue;
    }
    const RegionLabel lab = classify_tau(cfg, t);
    if (!(lab.region == Region::Unique && lab.sub == SubRegion::EllipseArcBoundary)) continue;
    res.samples.push_back({mus[j], t, quintic_point(cfg, t), branch_of(cfg, t)});
  }
  return res;
}

// ---------------------------------------------------------------------------
// x-plane regions

enum class XRegionKind { EMinusPre, UtildePre, NearCurve, NearDegeneracy, AtSensor };

struct XRegion {
  XRegionKind kind{};
  int component{-1};  // UtildePre only

  constexpr bool operator==(const XRegion&) const = default;

  std::string name() const {
    switch (kind) {
      case XRegionKind::EMinusPre: return "e_minus_pre";
      case XRegionKind::UtildePre: return component < 0 ? "u_pre" : "u_pre_" + std::to_string(component);
      case XRegionKind::NearCurve: return "near_curve";
      case XRegionKind::NearDegeneracy: return "near_degeneracy";
      case XRegionKind::AtSensor: return "at_sensor";
    }
    return "unknown";
  }
};

inline XRegion classify_x(const SensorConfig& cfg, const Point2& x) {
  const double band = default_sensor_band(cfg);
  for (int i = 0; i < 3; ++i) {
    if (distance(x, cfg.sensor(i)) <= band) return {XRegionKind::AtSensor, -1};
  }
  const RegionLabel lab = classify_tau(cfg, tau2(cfg, x));
  switch (lab.region) {
    case Region::Double: return {XRegionKind::UtildePre, lab.index};
    case Region::Infinite: return {XRegionKind::NearDegeneracy, -1};
    case Region::Unique:
      if (lab.sub == SubRegion::EMinusInterior) return {XRegionKind::EMinusPre, -1};
      if (lab.sub == SubRegion::EllipseArcBoundary) return {XRegionKind::NearCurve, -1};
      return {XRegionKind::NearDegeneracy, -1};
    case Region::NotInImage:
      if (lab.sub == SubRegion::EplusCminus || lab.sub == SubRegion::TangencyPoint) return {XRegionKind::NearCurve, -1};
      return {XRegionKind::NearDegeneracy, -1};
  }
  return {XRegionKind::NearDegeneracy, -1};
}

// ---------------------------------------------------------------------------
// Implicit quintic

struct QuinticFit {
  // Graded lexicographic: 1, x, y, x^2, xy, y^2, ..., x^5, ..., y^5, in the
  // normalized coordinates (p - center) / scale.
  std::array<double, 21> coefficients{};
  Point2 center;
  double scale{1.0};
  double max_heldout_residual{};
  double rms_heldout_residual{};
  double sigma_min{};
  double sigma_gap{};
  int n_fit{};
  int n_heldout{};

  static std::array<double, 21> monomials(double u, double v) {
    std::array<double, 21> m{};
    int idx = 0;
    for (int d = 0; d <= 5; ++d) {
      for (int j = 0; j <= d; ++j) m[idx++] = std::pow(u, d - j) * std::pow(v, j);
    }
    return m;
  }

  double evaluate(const Point2& p) const {
    const auto m = monomials((p.x - center.x) / scale, (p.y - center.y) / scale);
    double s = 0.0;
    for (int i = 0; i < 21; ++i) s += coefficients[i] * m[i];
    return s;
  }

  /// |F| / (|coefficients| |monomial vector|) at p.
  double normalized_residual(const Point2& p) const {
    const auto m = monomials((p.x - center.x) / scale, (p.y - center.y) / scale);
    double s = 0.0, mm = 0.0, cc = 0.0;
    for (int i = 0; i < 21; ++i) {
      s += coefficients[i] * m[i];
      mm += m[i] * m[i];
      cc += coefficients[i] * coefficients[i];
    }
    return std::abs(s) / std::sqrt(mm * cc);
  }

  double degree5_weight() const {
    double top = 0.0, all = 0.0;
    for (int i = 0; i < 21; ++i) {
      all += coefficients[i] * coefficients[i];
      if (i >= 15) top += coefficients[i] * coefficients[i];
    }
    return std::sqrt(top / all);
  }
};

inline QuinticFit implicitize_quintic(const SensorConfig& cfg, const std::vector<CurveSample>& samples) {
  if (samples.size() < 63) throw IllConditioned("implicitize_quintic: need at least 63 samples");
  QuinticFit fit;
  fit.center = {(cfg.m0.x + cfg.m1.x + cfg.m2.x) / 3.0, (cfg.m0.y + cfg.m1.y + cfg.m2.y) / 3.0};
  fit.scale = cfg.scale();

  // Every third sample is held out.
  std::vector<const CurveSample*> train, held;
  for (size_t i = 0; i < samples.size(); ++i) (i % 3 == 2 ? held : train).push_back(&samples[i]);

  Eigen::MatrixXd A(static_cast<Eigen::Index>(train.size()), 21);
  for (size_t r = 0; r < train.size(); ++r) {
    const Point2& p = train[r]->x;
    const auto m = QuinticFit::monomials((p.x - fit.center.x) / fit.scale, (p.y - fit.center.y) / fit.scale);
    double nrm = 0.0;
    for (double v : m) nrm += v * v;
    nrm = std::sqrt(nrm);
    for (int c = 0; c < 21; ++c) A(static_cast<Eigen::Index>(r), c) = m[c] / nrm;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  fit.sigma_min = sv(20);
  fit.sigma_gap = sv(19) - sv(20);
  if (fit.sigma_gap < 1e3 * std::numeric_limits<double>::epsilon() * sv(0)) {
    throw IllConditioned("implicitize_quintic: null direction not isolated");
  }
  Eigen::VectorXd coef = svd.matrixV().col(20);
  // Fix the overall sign so the largest coefficient is positive.
  Eigen::Index imax = 0;
  coef.cwiseAbs().maxCoeff(&imax);
  if (coef(imax) < 0) coef = -coef;
  for (int i = 0; i < 21; ++i) fit.coefficients[i] = coef(i);

  double sum2 = 0.0;
  for (const CurveSample* s : held) {
    const double r = fit.normalized_residual(s->x);
    fit.max_heldout_residual = std::max(fit.max_heldout_residual, r);
    sum2 += r * r;
  }
  fit.n_fit = static_cast<int>(train.size());
  fit.n_heldout = static_cast<int>(held.size());
  fit.rms_heldout_residual = held.empty() ? 0.0 : std::sqrt(sum2 / held.size());
  return fit;
}

}  // namespace tdoa
