// tdoa-atlas: JSON verdicts and CSV grids for a three-receiver TDOA array.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "atlas_commands.hpp"

int main(int argc, char** argv) {
  using tdoa::atlas::Options;
  using tdoa::atlas::UsageError;

  CLI::App app{"Planar three-receiver TDOA atlas"};

  std::string command;
  std::string tau, taustar, x;
  Options o;
  app.add_option("command", command, "forward | classify-tau | locate | mle-locate | image-report | x-atlas | bifurcation")
      ->required()
      ->check(CLI::IsMember(tdoa::atlas::command_names()));
  app.add_option("--config", o.config_path, "Sensor config JSON {\"m0\":[x,y],\"m1\":[x,y],\"m2\":[x,y]}")->required();
  app.add_option("--tau", tau, "TDOA pair A,B");
  app.add_option("--taustar", taustar, "Complete triple A,B,C");
  app.add_option("--x", x, "Source point A,B");
  app.add_option("--grid", o.grid, "Grid points per axis")->capture_default_str();
  app.add_option("--xmin", o.xmin, "Grid range (tau1 for image-report)");
  app.add_option("--xmax", o.xmax);
  app.add_option("--ymin", o.ymin, "Grid range (tau2 for image-report)");
  app.add_option("--ymax", o.ymax);
  app.add_option("--samples", o.samples, "Pencil samples on the ellipse")->capture_default_str();
  app.add_option("--noise", o.noise, "Gaussian sigma added by forward")->capture_default_str();
  app.add_option("--seed", o.seed, "Noise seed")->capture_default_str();
  app.add_option("--out", o.out_path, "CSV output path (default stdout)");
  app.add_flag("--implicitize", o.implicitize, "Fit the implicit quintic to the bifurcation samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (!tau.empty()) o.tau = tdoa::atlas::parse_list(tau, 2, "--tau");
    if (!taustar.empty()) o.taustar = tdoa::atlas::parse_list(taustar, 3, "--taustar");
    if (!x.empty()) o.x = tdoa::atlas::parse_list(x, 2, "--x");
  } catch (const UsageError& e) {
    std::cerr << "tdoa-atlas: " << e.what() << '\n';
    return 2;
  }
  return tdoa::atlas::run(command, o, std::cout, std::cerr);
}
