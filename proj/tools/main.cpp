#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "coopnet/scenario.hpp"

// Exit codes: 0 success, 1 usage/parse error, 2 runtime error.

int main(int argc, char** argv) {
  CLI::App app{
      "coopnet: cooperation-game solver, curve generator and network "
      "simulator.\nRuns a scenario file (key = value lines) and emits CSV."};
  std::string scenario_path;
  std::string out_path;
  std::uint64_t seed = 0;
  app.add_option("scenario", scenario_path, "scenario file")->required();
  CLI::Option* out_opt = app.add_option(
      "--out", out_path,
      "output CSV path (overrides the scenario's 'output'; default stdout)");
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "override the scenario seed (sim command)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  std::ifstream in(scenario_path);
  if (!in) {
    std::cerr << "error: cannot read scenario file '" << scenario_path << "'\n";
    return 1;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();

  coopnet::Scenario scn;
  try {
    scn = coopnet::parse_scenario(buffer.str());
  } catch (const coopnet::ScenarioError& e) {
    std::cerr << scenario_path << ": " << e.what() << "\n";
    return 1;
  }

  if (seed_opt->count() > 0) scn.sim.seed = seed;

  const std::string target =
      out_opt->count() > 0 ? out_path : scn.output.value_or("");
  try {
    if (target.empty()) {
      coopnet::run_scenario(scn, std::cout);
      std::cout.flush();
      if (!std::cout) return 2;
    } else {
      std::ofstream os(target);
      if (!os) {
        std::cerr << "error: cannot open '" << target << "' for writing\n";
        return 2;
      }
      coopnet::run_scenario(scn, os);
      os.flush();
      if (!os) {
        std::cerr << "error: write to '" << target << "' failed\n";
        return 2;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
