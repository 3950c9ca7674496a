#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "coopnet/model.hpp"
#include "coopnet/solver.hpp"

namespace coopnet {

struct NodeState {
  int id = 0;
  double demand = 0.0;      // the node's own request rate
  double policy = 1.0;      // forwarding fraction currently played
  double reputation = 1.0;  // estimate currently held by the network
  bool opted_out = false;
  bool idle = false;        // no transit demand reaches the node
  double cumulative_utility = 0.0;
};

struct SimConfig {
  int n_nodes = 2;
  Mechanism mech;
  std::vector<double> demands;  // one entry per node, >= 0, at least one > 0
  double g = 1.0;
  double b = kUnboundedBandwidth;
  double hop_factor = 1.0;  // average intermediate hops carried per delivered unit
  double e = 0.0;           // observation error applied by the network
  int rounds = 0;
  std::uint64_t seed = 0;
  SolverConfig solver;
  double initial_policy = 1.0;

  void validate() const;
};

struct RoundMetrics {
  int round = 0;
  double mean_policy = 0.0;
  int opted_out_count = 0;
  double delivered = 0.0;  // own-traffic units the network granted this round
  double offered = 0.0;    // own-traffic units requested by nodes still in the game
};

struct NodeProfile {
  ServiceProfile profile;
  // Peers offer no transit load; s_nx carries the smallest positive value so
  // the transit demand stays formally positive.
  bool idle = false;
};

// Game parameters node i faces given everyone's current state. Transit load
// is hop_factor times the node's share of each active peer's demand: uniform
// across carriers, or reputation-proportional under the rep_split variants.
NodeProfile derive_profile(const SimConfig& cfg,
                           const std::vector<NodeState>& states, int node);

// One best-response pass in node-id order. Each active node gets its
// reputation re-estimated from its current policy (R = T when e == 0),
// derives its profile against current peer states, and adopts the solver's
// verdict. Returns the round's metrics.
RoundMetrics simulation_step(const SimConfig& cfg,
                             std::vector<NodeState>& states, int round);

struct SimResult {
  std::vector<RoundMetrics> rounds;
  std::vector<NodeState> final_states;
  // Last round after which no policy moved by more than grid_step and no
  // opt-out flag changed.
  std::optional<int> converged_round;
};

std::vector<NodeState> initial_states(const SimConfig& cfg);

// Runs simulation_step for cfg.rounds rounds or until a fixed point,
// whichever comes first.
SimResult run_simulation(const SimConfig& cfg);

}  // namespace coopnet
