#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "coopnet/model.hpp"
#include "coopnet/netsim.hpp"
#include "coopnet/solver.hpp"
#include "coopnet/sweep.hpp"

namespace coopnet {

enum class Command { solve, curve, sweep, sim };

// A parsed and validated scenario file. Flat `key = value` lines with `#`
// comments; dotted keys group the mechanism/profile/sweep/sim/solver blocks.
struct Scenario {
  Command command = Command::solve;
  Mechanism mech;
  ServiceProfile profile;  // resolved (s_nx expanded from M when given)
  SolverConfig solver;
  SweepKind sweep_kind = SweepKind::utility_curve;
  SweepRange sweep_range;
  double sweep_observed_policy = 1.0;
  SimConfig sim;  // mech/solver mirrored inside for the sim command
  std::optional<std::string> output;
};

// Parse failure; what() carries "line N: ..." when the offending line is known.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

Scenario parse_scenario(std::string_view text);

// Run the scenario's command and write the CSV: one `#` comment line with the
// resolved parameter set, a column-name row, then data rows. Output is
// deterministic byte for byte.
void run_scenario(const Scenario& scn, std::ostream& out);

// 12-significant-digit formatting; inf/-inf/nan spelled literally.
std::string format_value(double v);

const char* to_string(Command c);

}  // namespace coopnet
