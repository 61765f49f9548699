// Forward map, classification and inversion on the right-angle demo array.

#include <cstdio>

#include "tdoa/tdoa.hpp"

int main() {
  using namespace tdoa;
  const SensorConfig cfg = build_config({0, 0}, {2, 0}, {2, 2});

  const Point2 sources[] = {{1, 1}, {-3, 0.5}, {4, 4}, {1.5, -2}};
  for (const Point2& x : sources) {
    const TauPair t = tau2(cfg, x);
    const RegionLabel lab = classify_tau(cfg, t);
    const FiberResult f = locate(cfg, t);
    std::printf("x = (%g, %g)  tau = (%.6f, %.6f)  %s\n", x.x, x.y, t.tau1, t.tau2, lab.name().c_str());
    for (const FiberPoint& p : f.points) std::printf("    preimage (%.9f, %.9f)\n", p.x.x, p.x.y);
  }

  const PolygonP2 p2 = build_p2(cfg);
  std::printf("P2 vertices:");
  for (const TauPair& v : p2.vertices) std::printf(" (%.4f, %.4f)", v.tau1, v.tau2);
  std::printf("\n");

  const BifurcationResult bif = bifurcation_samples(cfg, 512);
  const QuinticFit fit = implicitize_quintic(cfg, bif.samples);
  std::printf("bifurcation curve: %zu samples, quintic held-out residual %.2e\n", bif.samples.size(),
              fit.max_heldout_residual);
  return 0;
}
