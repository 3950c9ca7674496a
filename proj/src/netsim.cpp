#include "coopnet/netsim.hpp"

#include <cmath>
#include <stdexcept>

#include "coopnet/reputation.hpp"

namespace coopnet {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t round,
                       std::uint64_t node) {
  // splitmix64 finalizer over a (seed, round, node) combination
  std::uint64_t z = seed ^ (round * 0x9e3779b97f4a7c15ULL) ^
                    ((node + 1) * 0xd1b54a32d192ed03ULL);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool rep_weighted(Variant v) {
  return v == Variant::rep_split || v == Variant::rep_split_threshold;
}

[[noreturn]] void fail(const char* msg) { throw std::invalid_argument(msg); }

}  // namespace

void SimConfig::validate() const {
  mech.validate();
  solver.validate();
  if (n_nodes < 2) fail("n_nodes must be >= 2");
  if (static_cast<int>(demands.size()) != n_nodes)
    fail("demands must list one entry per node");
  bool any_positive = false;
  for (double d : demands) {
    if (!std::isfinite(d) || !(d >= 0.0)) fail("demands must be finite and >= 0");
    any_positive = any_positive || d > 0.0;
  }
  if (!any_positive) fail("at least one demand must be > 0");
  if (!std::isfinite(g) || !(g > 0.0)) fail("g must be finite and > 0");
  if (!(b > 0.0)) fail("b must be > 0");
  if (!std::isfinite(hop_factor) || !(hop_factor >= 1.0))
    fail("hop_factor must be >= 1");
  if (!(e >= 0.0 && e <= 1.0)) fail("e must lie in [0, 1]");
  if (rounds < 0) fail("rounds must be >= 0");
  if (!(initial_policy >= 0.0 && initial_policy <= 1.0))
    fail("initial_policy must lie in [0, 1]");
}

NodeProfile derive_profile(const SimConfig& cfg,
                           const std::vector<NodeState>& states, int node) {
  const NodeState& self = states.at(static_cast<std::size_t>(node));
  NodeProfile out;
  out.profile.g = cfg.g;
  out.profile.b = cfg.b;
  out.profile.e = cfg.e;
  out.profile.s_xn = self.opted_out ? 0.0 : self.demand;

  double transit = 0.0;
  if (!self.opted_out) {
    int n_active = 0;
    for (const NodeState& s : states) n_active += s.opted_out ? 0 : 1;
    for (const NodeState& peer : states) {
      if (peer.id == self.id || peer.opted_out || peer.demand <= 0.0) continue;
      // peer's traffic is carried by the other active nodes
      double share = 1.0 / static_cast<double>(n_active - 1);
      if (rep_weighted(cfg.mech.variant)) {
        double total = 0.0;
        for (const NodeState& k : states)
          if (!k.opted_out && k.id != peer.id) total += k.reputation;
        if (total > 0.0) share = self.reputation / total;
      }
      transit += peer.demand * share;
    }
    transit *= cfg.hop_factor;
  }

  if (!(transit > 0.0)) {
    out.idle = true;
    transit = std::numeric_limits<double>::min();
  }
  out.profile.s_nx = transit;
  return out;
}

RoundMetrics simulation_step(const SimConfig& cfg,
                             std::vector<NodeState>& states, int round) {
  cfg.validate();
  if (static_cast<int>(states.size()) != cfg.n_nodes)
    fail("state vector does not match n_nodes");

  for (NodeState& node : states) {
    if (node.opted_out) continue;

    int active_peers = 0;
    for (const NodeState& peer : states)
      if (peer.id != node.id && !peer.opted_out) ++active_peers;
    if (active_peers == 0) {
      // nobody left to carry the node's own traffic
      node.opted_out = true;
      node.policy = 0.0;
      node.idle = true;
      continue;
    }

    const NodeProfile np = derive_profile(cfg, states, node.id);
    node.idle = np.idle;

    if (cfg.e > 0.0) {
      ObservationModel obs;
      obs.n_samples = default_sample_count(np.profile.s_nx);
      obs.e = cfg.e;
      obs.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(round),
                          static_cast<std::uint64_t>(node.id));
      node.reputation = observe(Policy{node.policy}, obs).r_hat;
    } else {
      node.reputation = node.policy;
    }

    // Best response against the idealized R = T model; noise only affects
    // what the network does with the node, not the node's own optimization.
    const SolveResult res = solve(cfg.mech, np.profile, cfg.solver);
    if (res.status == SolveStatus::interior) {
      node.policy = res.t_star;
      node.cumulative_utility += utility_with_reputation(
          cfg.mech, np.profile, Policy{node.policy},
          Reputation{node.reputation});
    } else {
      node.opted_out = true;
      node.policy = 0.0;
    }
  }

  RoundMetrics m;
  m.round = round;
  double policy_sum = 0.0;
  for (const NodeState& node : states) {
    policy_sum += node.policy;
    if (node.opted_out) {
      ++m.opted_out_count;
      continue;
    }
    m.offered += node.demand;
    m.delivered +=
        node.demand * network_policy(cfg.mech, Reputation{node.reputation});
  }
  m.mean_policy = policy_sum / static_cast<double>(cfg.n_nodes);
  return m;
}

std::vector<NodeState> initial_states(const SimConfig& cfg) {
  cfg.validate();
  std::vector<NodeState> states(static_cast<std::size_t>(cfg.n_nodes));
  for (int i = 0; i < cfg.n_nodes; ++i) {
    NodeState& s = states[static_cast<std::size_t>(i)];
    s.id = i;
    s.demand = cfg.demands[static_cast<std::size_t>(i)];
    s.policy = cfg.initial_policy;
    s.reputation = cfg.initial_policy;
  }
  return states;
}

SimResult run_simulation(const SimConfig& cfg) {
  SimResult result;
  result.final_states = initial_states(cfg);
  std::vector<NodeState>& states = result.final_states;

  std::vector<double> prev_policy(states.size());
  std::vector<char> prev_out(states.size());
  for (int round = 1; round <= cfg.rounds; ++round) {
    for (std::size_t i = 0; i < states.size(); ++i) {
      prev_policy[i] = states[i].policy;
      prev_out[i] = states[i].opted_out ? 1 : 0;
    }
    result.rounds.push_back(simulation_step(cfg, states, round));
    bool moved = false;
    for (std::size_t i = 0; i < states.size(); ++i) {
      moved = moved ||
              std::abs(states[i].policy - prev_policy[i]) > cfg.solver.grid_step ||
              states[i].opted_out != (prev_out[i] != 0);
    }
    if (!moved) {
      result.converged_round = round - 1;
      break;
    }
  }
  return result;
}

}  // namespace coopnet
