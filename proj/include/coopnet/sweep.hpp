#pragma once

#include <optional>
#include <vector>

#include "coopnet/model.hpp"
#include "coopnet/solver.hpp"

namespace coopnet {

enum class SweepKind { utility_curve, policy_vs_m, policy_vs_g, exclusion_vs_e };

struct SweepRange {
  double lo = 0.0;
  double hi = 1.0;
  int steps = 2;  // points emitted, endpoints included
};

struct SweepSpec {
  SweepKind kind = SweepKind::utility_curve;
  Mechanism mech;
  ServiceProfile base;
  SweepRange range;
  SolverConfig solver;
  // exclusion_vs_e: the behavior under observation (a fully cooperative node
  // unless overridden).
  double observed_policy = 1.0;

  void validate() const;
};

struct CurvePoint {
  double x = 0.0;
  // Utility (may be -inf), optimal policy (nan marks opt-out), or an
  // exclusion probability, depending on the sweep kind.
  double u = 0.0;
  bool feasible = true;             // meaningful for utility curves
  std::optional<SolveStatus> status;  // present for policy sweeps
};

// Utility vs t_x at fixed mechanism and profile.
std::vector<CurvePoint> utility_curve(const SweepSpec& spec);

// Optimal policy vs M; s_xn stays fixed and s_nx = M * s_xn per point.
std::vector<CurvePoint> policy_vs_m(const SweepSpec& spec);

// Optimal policy vs G at fixed profile.
std::vector<CurvePoint> policy_vs_g(const SweepSpec& spec);

// Exclusion probability of the observed policy vs observation error e.
std::vector<CurvePoint> exclusion_vs_e(const SweepSpec& spec);

const char* to_string(SweepKind k);
std::optional<SweepKind> sweep_kind_from_string(std::string_view name);

}  // namespace coopnet
