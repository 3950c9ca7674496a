#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "coopnet/netsim.hpp"

using namespace coopnet;

namespace {

SimConfig make_config(Mechanism mech, int n_nodes, double demand, double g,
                      int rounds, double hop_factor = 1.0, double e = 0.0,
                      std::uint64_t seed = 1) {
  SimConfig cfg;
  cfg.n_nodes = n_nodes;
  cfg.mech = mech;
  cfg.demands.assign(static_cast<std::size_t>(n_nodes), demand);
  cfg.g = g;
  cfg.hop_factor = hop_factor;
  cfg.e = e;
  cfg.rounds = rounds;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("derive_profile splits transit demand uniformly") {
  const SimConfig cfg = make_config(Mechanism::plain(), 3, 100.0, 10.0, 5);
  const std::vector<NodeState> states = initial_states(cfg);
  for (int i = 0; i < 3; ++i) {
    const NodeProfile np = derive_profile(cfg, states, i);
    CHECK(np.profile.s_xn == 100.0);
    CHECK(np.profile.s_nx == doctest::Approx(100.0));
    CHECK_FALSE(np.idle);
  }
}

TEST_CASE("derive_profile scales transit with the hop factor") {
  const SimConfig cfg = make_config(Mechanism::plain(), 4, 90.0, 10.0, 5, 2.5);
  const std::vector<NodeState> states = initial_states(cfg);
  // three peers contribute 90 each, split over three carriers, times 2.5 hops
  const NodeProfile np = derive_profile(cfg, states, 0);
  CHECK(np.profile.s_nx == doctest::Approx(2.5 * 90.0));
}

TEST_CASE("derive_profile weights transit by reputation under rep-split") {
  SimConfig cfg = make_config(Mechanism::rep_split(), 3, 100.0, 10.0, 5);
  std::vector<NodeState> states = initial_states(cfg);
  states[0].reputation = 1.0;
  states[1].reputation = 0.0;
  states[2].reputation = 1.0;
  // the zero-reputation middle node attracts no transit
  const NodeProfile middle = derive_profile(cfg, states, 1);
  CHECK(middle.idle);
  CHECK(middle.profile.s_nx == std::numeric_limits<double>::min());
  // node 0 carries half of node 1's traffic and all of node 2's
  const NodeProfile first = derive_profile(cfg, states, 0);
  CHECK(first.profile.s_nx == doctest::Approx(50.0 + 100.0));
}

TEST_CASE("derive_profile flags a node with no active peers as idle") {
  SimConfig cfg = make_config(Mechanism::plain(), 3, 100.0, 10.0, 5);
  std::vector<NodeState> states = initial_states(cfg);
  states[1].opted_out = true;
  states[1].policy = 0.0;
  states[2].opted_out = true;
  states[2].policy = 0.0;
  const NodeProfile np = derive_profile(cfg, states, 0);
  CHECK(np.idle);
  CHECK(np.profile.s_nx > 0.0);
  CHECK(np.profile.s_xn == 100.0);
}

TEST_CASE("plain network disintegrates in one round") {
  SimConfig cfg = make_config(Mechanism::plain(), 5, 100.0, 10.0, 10);
  std::vector<NodeState> states = initial_states(cfg);
  const RoundMetrics m = simulation_step(cfg, states, 1);
  CHECK(m.mean_policy == 0.0);
  CHECK(m.opted_out_count == 0);
  // the network still grants service unconditionally
  CHECK(m.delivered == m.offered);
  CHECK(m.offered == 500.0);
  for (const NodeState& s : states) CHECK(s.policy == 0.0);
}

TEST_CASE("binary tit-for-tat settles on the threshold immediately") {
  const double t_s = 0.7;
  SimConfig cfg = make_config(Mechanism::tft_binary(t_s), 4, 100.0, 10.0, 10, 2.0);
  std::vector<NodeState> states = initial_states(cfg);
  simulation_step(cfg, states, 1);
  for (const NodeState& s : states) CHECK(s.policy == t_s);
  // and stays there
  const RoundMetrics m2 = simulation_step(cfg, states, 2);
  for (const NodeState& s : states) CHECK(s.policy == t_s);
  CHECK(m2.mean_policy == doctest::Approx(t_s));
  CHECK(m2.delivered == m2.offered);
}

TEST_CASE("overloaded fine tit-for-tat drives everyone out") {
  // effective M per node equals the hop factor for symmetric demands;
  // 50 is far beyond the opt-out boundary G^2/4 = 25 at G = 10
  SimConfig cfg = make_config(Mechanism::tft_fine(), 4, 100.0, 10.0, 10, 50.0);
  std::vector<NodeState> states = initial_states(cfg);
  const RoundMetrics m = simulation_step(cfg, states, 1);
  CHECK(m.opted_out_count == 4);
  CHECK(m.delivered == 0.0);
  CHECK(m.offered == 0.0);
  for (const NodeState& s : states) CHECK(s.opted_out);
}

TEST_CASE("run converges and reports the convergence round") {
  const SimResult plain =
      run_simulation(make_config(Mechanism::plain(), 5, 100.0, 10.0, 10));
  REQUIRE(plain.converged_round.has_value());
  CHECK(*plain.converged_round == 1);
  REQUIRE(plain.rounds.size() >= 1);
  CHECK(plain.rounds.front().mean_policy == 0.0);
  CHECK(plain.rounds.back().delivered == plain.rounds.back().offered);

  const SimResult tft = run_simulation(
      make_config(Mechanism::tft_binary(0.7), 4, 100.0, 10.0, 10, 2.0));
  REQUIRE(tft.converged_round.has_value());
  CHECK(*tft.converged_round == 1);
  CHECK(tft.rounds.back().mean_policy == doctest::Approx(0.7));
  for (const NodeState& s : tft.final_states) CHECK(s.policy == 0.7);
}

TEST_CASE("zero rounds leave the states untouched") {
  const SimConfig cfg = make_config(Mechanism::plain(), 3, 100.0, 10.0, 0);
  const SimResult res = run_simulation(cfg);
  CHECK(res.rounds.empty());
  CHECK_FALSE(res.converged_round.has_value());
  for (const NodeState& s : res.final_states) {
    CHECK(s.policy == 1.0);
    CHECK_FALSE(s.opted_out);
  }
}

TEST_CASE("a reported fixed point survives one more step") {
  for (double hop : {1.0, 2.0, 50.0}) {
    SimConfig cfg =
        make_config(Mechanism::tft_fine(), 4, 100.0, 10.0, 20, hop);
    SimResult res = run_simulation(cfg);
    if (!res.converged_round.has_value()) continue;
    std::vector<NodeState> states = res.final_states;
    const int next_round = static_cast<int>(res.rounds.size()) + 1;
    simulation_step(cfg, states, next_round);
    for (std::size_t i = 0; i < states.size(); ++i) {
      CHECK(std::abs(states[i].policy - res.final_states[i].policy) <=
            cfg.solver.grid_step);
      CHECK(states[i].opted_out == res.final_states[i].opted_out);
    }
  }
}

TEST_CASE("simulations are deterministic per seed") {
  const SimConfig cfg = make_config(Mechanism::tft_binary(0.7), 5, 100.0, 10.0,
                                    8, 2.0, 0.05, 777);
  const SimResult a = run_simulation(cfg);
  const SimResult b = run_simulation(cfg);
  REQUIRE(a.rounds.size() == b.rounds.size());
  for (std::size_t i = 0; i < a.rounds.size(); ++i) {
    CHECK(a.rounds[i].mean_policy == b.rounds[i].mean_policy);
    CHECK(a.rounds[i].delivered == b.rounds[i].delivered);
    CHECK(a.rounds[i].opted_out_count == b.rounds[i].opted_out_count);
  }
  for (std::size_t i = 0; i < a.final_states.size(); ++i) {
    CHECK(a.final_states[i].policy == b.final_states[i].policy);
    CHECK(a.final_states[i].reputation == b.final_states[i].reputation);
  }
}

TEST_CASE("delivered never exceeds offered") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    SimConfig cfg = make_config(Mechanism::tft_binary(0.7), 6, 50.0, 10.0, 12,
                                3.0, 0.2, seed);
    const SimResult res = run_simulation(cfg);
    for (const RoundMetrics& m : res.rounds) {
      CHECK(m.delivered <= m.offered + 1e-12);
      CHECK(m.delivered >= 0.0);
    }
  }
}

TEST_CASE("heterogeneous demands shift the per-node load") {
  SimConfig cfg = make_config(Mechanism::tft_fine(), 3, 0.0, 10.0, 6);
  cfg.demands = {300.0, 30.0, 30.0};
  std::vector<NodeState> states = initial_states(cfg);
  // node 0 carries little transit (M < 1), nodes 1 and 2 carry half of 330
  const NodeProfile p0 = derive_profile(cfg, states, 0);
  CHECK(p0.profile.s_nx == doctest::Approx(30.0));
  const NodeProfile p1 = derive_profile(cfg, states, 1);
  CHECK(p1.profile.s_nx == doctest::Approx((300.0 + 30.0) / 2.0));
  const SimResult res = run_simulation(cfg);
  // the big sender cooperates fully, the small ones best-respond to M = 5.5
  REQUIRE(res.converged_round.has_value());
  CHECK(res.final_states[0].policy == doctest::Approx(1.0));
  CHECK(res.final_states[1].policy ==
        doctest::Approx(1.0 / std::sqrt(5.5)).epsilon(1e-2));
}

TEST_CASE("cumulative utility accrues only while in the game") {
  // plain network: every executed round is worth (g-1)*demand per node
  const SimResult plain =
      run_simulation(make_config(Mechanism::plain(), 3, 100.0, 10.0, 10));
  const double rounds_run = static_cast<double>(plain.rounds.size());
  for (const NodeState& s : plain.final_states)
    CHECK(s.cumulative_utility == doctest::Approx(rounds_run * 900.0));

  // everyone leaves immediately: nothing accrues
  const SimResult drained = run_simulation(
      make_config(Mechanism::tft_fine(), 4, 100.0, 10.0, 10, 50.0));
  for (const NodeState& s : drained.final_states) {
    CHECK(s.opted_out);
    CHECK(s.cumulative_utility == 0.0);
  }
}

TEST_CASE("config validation") {
  SimConfig cfg = make_config(Mechanism::plain(), 2, 10.0, 10.0, 5);
  CHECK_NOTHROW(cfg.validate());
  cfg.n_nodes = 1;
  cfg.demands = {10.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = make_config(Mechanism::plain(), 3, 0.0, 10.0, 5);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // all demands zero
  cfg = make_config(Mechanism::plain(), 3, 10.0, 10.0, 5);
  cfg.hop_factor = 0.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = make_config(Mechanism::plain(), 3, 10.0, 10.0, 5);
  cfg.demands = {10.0, 10.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
