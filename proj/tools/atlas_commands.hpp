#pragma once

// Command implementations behind tdoa-atlas, kept apart from argument parsing
// so the tests can call them directly.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdoa/tdoa.hpp"

namespace tdoa::atlas {

/// Bad arguments, unreadable config or I/O failure: exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::optional<std::vector<double>> tau;      // --tau A,B
  std::optional<std::vector<double>> taustar;  // --taustar A,B,C
  std::optional<std::vector<double>> x;        // --x A,B
  int grid{200};
  std::optional<double> xmin, xmax, ymin, ymax;
  int samples{512};
  double noise{0.0};
  std::uint64_t seed{0};
  std::string out_path;
  bool implicitize{false};
};

/// Grid axis values lo + i (hi - lo) / (n - 1).
struct GridSpec {
  double x0{}, x1{}, y0{}, y1{};
  int n{2};

  double x(int i) const { return i == n - 1 ? x1 : x0 + (x1 - x0) * i / (n - 1); }
  double y(int j) const { return j == n - 1 ? y1 : y0 + (y1 - y0) * j / (n - 1); }
};

// ---------------------------------------------------------------------------
// Formatting

/// 17 significant digits, no negative zero.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);
  return buf;
}

inline double json_num(double v) { return v + 0.0; }

inline nlohmann::json json_point(const Point2& p) { return nlohmann::json::array({json_num(p.x), json_num(p.y)}); }

inline nlohmann::json json_fiber(const FiberResult& f) {
  if (f.is_half_line()) {
    return {{"half_line",
             {{"base", json_point(f.half_line.base)},
              {"direction", nlohmann::json::array({json_num(f.half_line.direction.u1), json_num(f.half_line.direction.u2)})}}}};
  }
  nlohmann::json pts = nlohmann::json::array();
  for (const FiberPoint& p : f.points) pts.push_back(json_point(p.x));
  return pts;
}

inline const char* rank_name(RankLabel r) {
  switch (r) {
    case RankLabel::Rank2: return "rank2";
    case RankLabel::Rank1: return "rank1";
    case RankLabel::Rank0: return "rank0";
    case RankLabel::AtSensor: return "at_sensor";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Input

inline std::vector<double> parse_list(const std::string& s, size_t n, const char* flag) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double d = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size() || !std::isfinite(d)) {
      throw UsageError(std::string(flag) + ": not a number: '" + item + "'");
    }
    v.push_back(d);
  }
  if (v.size() != n) throw UsageError(std::string(flag) + ": expected " + std::to_string(n) + " comma-separated values");
  return v;
}

inline SensorConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config '" + path + "'");
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    auto pt = [&](const char* key) {
      const auto& a = j.at(key);
      if (!a.is_array() || a.size() != 2) throw UsageError(std::string("config: ") + key + " must be [x, y]");
      return Point2{a.at(0).get<double>(), a.at(1).get<double>()};
    };
    const double rel_tol = j.value("rel_tol", 1e-9);
    return build_config(pt("m0"), pt("m1"), pt("m2"), rel_tol);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config '" + path + "': " + e.what());
  } catch (const DegenerateConfig& e) {
    throw UsageError("config '" + path + "': " + e.what());
  }
}

inline int thread_count() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("TDOA_ATLAS_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

/// Rows 0..n-1 produced by `row` on up to thread_count() workers, joined in order.
inline std::string parallel_rows(int n, const std::function<std::string(int)>& row) {
  std::vector<std::string> rows(static_cast<size_t>(n));
  const int workers = std::min(thread_count(), n);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int j = w; j < n; j += workers) rows[static_cast<size_t>(j)] = row(j);
    });
  }
  for (auto& t : pool) t.join();
  std::string s;
  for (const auto& r : rows) s += r;
  return s;
}

inline void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out_path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + o.out_path + "'");
  f << text;
  if (!f.flush()) throw UsageError("write failed for '" + o.out_path + "'");
}

inline GridSpec grid_spec(const Options& o, double x0, double x1, double y0, double y1) {
  GridSpec g{o.xmin.value_or(x0), o.xmax.value_or(x1), o.ymin.value_or(y0), o.ymax.value_or(y1), o.grid};
  if (g.n < 2) throw UsageError("--grid must be >= 2");
  if (!(g.x0 < g.x1) || !(g.y0 < g.y1)) throw UsageError("grid range must be nonempty");
  return g;
}

inline const std::vector<double>& require(const std::optional<std::vector<double>>& v, const char* flag) {
  if (!v) throw UsageError(std::string(flag) + " is required");
  return *v;
}

// ---------------------------------------------------------------------------
// Commands

inline void cmd_forward(const Options& o, std::ostream& out) {
  const SensorConfig cfg = load_config(o.config_path);
  const auto& xv = require(o.x, "--x");
  if (!(o.noise >= 0.0)) throw UsageError("--noise must be >= 0");
  const NoisyTriple n = synthesize_noisy(cfg, {xv[0], xv[1]}, o.noise, o.seed);
  nlohmann::json j;
  j["tau"] = {json_num(n.tau.tau10), json_num(n.tau.tau20)};
  j["taustar"] = {json_num(n.tau.tau10), json_num(n.tau.tau20), json_num(n.tau.tau21)};
  if (o.noise > 0.0) {
    j["noise"] = o.noise;
    j["seed"] = o.seed;
  }
  out << j.dump() << '\n';
}

inline nlohmann::json classify_json(const SensorConfig& cfg, const TauPair& t) {
  const RegionLabel lab = classify_tau(cfg, t);
  nlohmann::json j;
  j["region"] = lab.name();
  j["fiber_count"] = lab.fiber_count();
  if (cfg.general()) {
    const TauCoefficients k = coefficients(cfg, t);
    j["a"] = json_num(k.a);
    j["b"] = json_num(k.b);
    j["c"] = json_num(k.c);
    j["delta"] = json_num(k.delta);
  } else {
    // Collinear: the quadratic along L21 where that line exists.
    try {
      const QuadraticCase q = solve_lambda(cfg, t);
      j["a"] = json_num(q.a);
      j["b"] = json_num(q.b);
      j["c"] = json_num(q.c);
      j["delta"] = json_num(q.delta);
    } catch (const TdoaError&) {
      j["a"] = j["b"] = j["c"] = j["delta"] = nullptr;
    }
  }
  return j;
}

inline void cmd_classify_tau(const Options& o, std::ostream& out) {
  const SensorConfig cfg = load_config(o.config_path);
  const auto& tv = require(o.tau, "--tau");
  out << classify_json(cfg, {tv[0], tv[1]}).dump() << '\n';
}

inline void cmd_locate(const Options& o, std::ostream& out) {
  const SensorConfig cfg = load_config(o.config_path);
  const auto& tv = require(o.tau, "--tau");
  out << json_fiber(locate(cfg, {tv[0], tv[1]})).dump() << '\n';
}

inline void cmd_mle_locate(const Options& o, std::ostream& out) {
  const SensorConfig cfg = load_config(o.config_path);
  const auto& tv = require(o.taustar, "--taustar");
  const TauTriple h = project_to_H({tv[0], tv[1], tv[2]});
  nlohmann::json j;
  j["projected"] = {json_num(h.tau10), json_num(h.tau20), json_num(h.tau21)};
  j["fiber"] = json_fiber(locate_star(cfg, h));
  out << j.dump() << '\n';
}

inline void cmd_image_report(const Options& o, std::ostream& out) {
  const SensorConfig cfg = load_config(o.config_path);
  const double m = 1.05;
  const GridSpec g = grid_spec(o, -m * cfg.d10, m * cfg.d10, -m * cfg.d20, m * cfg.d20);
  std::string text = "tau1,tau2,region,fibers\n";
  text += parallel_rows(g.n, [&](int j) {
    std::string s;
    for (int i = 0; i < g.n; ++i) {
      const TauPair t{g.x(i), g.y(j)};
      const RegionLabel lab = classify_tau(cfg, t);
      s += fmt(t.tau1) + ',' + fmt(t.tau2) + ',' + lab.name() + ',' + std::to_string(lab.fiber_count()) + '\n';
    }
    return s;
  });
  emit(o, text, out);
}

inline void cmd_x_atlas(const Options& o, std::ostream& out) {
  const SensorConfig cfg = load_config(o.config_path);
  double x0 = std::min({cfg.m0.x, cfg.m1.x, cfg.m2.x}), x1 = std::max({cfg.m0.x, cfg.m1.x, cfg.m2.x});
  double y0 = std::min({cfg.m0.y, cfg.m1.y, cfg.m2.y}), y1 = std::max({cfg.m0.y, cfg.m1.y, cfg.m2.y});
  const double pad = 2.0 * cfg.scale();
  const GridSpec g = grid_spec(o, x0 - pad, x1 + pad, y0 - pad, y1 + pad);
  const double band = default_sensor_band(cfg);
  std::string text = "x,y,detJ,rank,region\n";
  text += parallel_rows(g.n, [&](int j) {
    std::string s;
    for (int i = 0; i < g.n; ++i) {
      const Point2 p{g.x(i), g.y(j)};
      double det = NAN;
      try {
        det = det_jacobian(cfg, p);
      } catch (const AtSensorError&) {
      }
      s += fmt(p.x) + ',' + fmt(p.y) + ',' + fmt(det) + ',' + rank_name(rank_at(cfg, p, band)) + ',' +
           classify_x(cfg, p).name() + '\n';
    }
    return s;
  });
  emit(o, text, out);
}

inline void cmd_bifurcation(const Options& o, std::ostream& out) {
  const SensorConfig cfg = load_config(o.config_path);
  if (!cfg.general()) throw UsageError("bifurcation: needs a non-collinear array");
  if (o.samples < 8) throw UsageError("--samples must be >= 8");
  const BifurcationResult r = bifurcation_samples(cfg, o.samples);
  std::string text = "mu,tau1,tau2,x,y,branch\n";
  for (const CurveSample& s : r.samples) {
    text += fmt(s.mu) + ',' + fmt(s.tau_on_E.tau1) + ',' + fmt(s.tau_on_E.tau2) + ',' + fmt(s.x.x) + ',' +
            fmt(s.x.y) + ',' + std::to_string(s.branch) + '\n';
  }
  if (!o.implicitize) {
    emit(o, text, out);
    return;
  }
  // With --implicitize the fit summary owns stdout; the CSV needs --out.
  if (!o.out_path.empty()) emit(o, text, out);
  const QuinticFit fit = implicitize_quintic(cfg, r.samples);
  nlohmann::json j;
  j["center"] = json_point(fit.center);
  j["scale"] = fit.scale;
  nlohmann::json c = nlohmann::json::array();
  for (double v : fit.coefficients) c.push_back(json_num(v));
  j["coefficients"] = c;
  j["max_heldout_residual"] = fit.max_heldout_residual;
  j["rms_heldout_residual"] = fit.rms_heldout_residual;
  j["sigma_min"] = fit.sigma_min;
  j["sigma_gap"] = fit.sigma_gap;
  j["degree5_weight"] = fit.degree5_weight();
  j["n_fit"] = fit.n_fit;
  j["n_heldout"] = fit.n_heldout;
  j["skipped"] = r.skipped;
  out << j.dump() << '\n';
}

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"forward",      "classify-tau", "locate",     "mle-locate",
                                                 "image-report", "x-atlas",      "bifurcation"};
  return names;
}

/// Runs one command; returns the process exit code.
inline int run(const std::string& cmd, const Options& o, std::ostream& out, std::ostream& err) {
  try {
    if (cmd == "forward") cmd_forward(o, out);
    else if (cmd == "classify-tau") cmd_classify_tau(o, out);
    else if (cmd == "locate") cmd_locate(o, out);
    else if (cmd == "mle-locate") cmd_mle_locate(o, out);
    else if (cmd == "image-report") cmd_image_report(o, out);
    else if (cmd == "x-atlas") cmd_x_atlas(o, out);
    else if (cmd == "bifurcation") cmd_bifurcation(o, out);
    else throw UsageError("unknown command '" + cmd + "'");
  } catch (const UsageError& e) {
    err << "tdoa-atlas: " << e.what() << '\n';
    return 2;
  } catch (const TdoaError& e) {
    err << "tdoa-atlas: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace tdoa::atlas
