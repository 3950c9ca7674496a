#pragma once

#include <optional>
#include <vector>

#include "coopnet/model.hpp"

namespace coopnet {

struct SolverConfig {
  double grid_step = 1e-4;
  // Relative: utilities u1, u2 tie when |u1 - u2| <= tie_tolerance * max(1, |u1|).
  double tie_tolerance = 1e-9;
  bool refine = true;  // golden-section refinement around the best grid point
  double refine_tolerance = 1e-10;
  // When false the node cannot leave the game: a best response is returned
  // even at negative utility, and INFEASIBLE replaces OPT_OUT when nothing
  // satisfies the bandwidth constraint.
  bool allow_opt_out = true;

  void validate() const;
};

enum class SolveStatus { interior, opt_out, infeasible };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::opt_out;
  // Valid only when status == interior.
  double t_star = std::numeric_limits<double>::quiet_NaN();
  double u_star = std::numeric_limits<double>::quiet_NaN();
  // Policies tying the maximum within tie tolerance, merged into maximal
  // intervals of consecutive evaluated points.
  std::vector<Interval> argmax_set;
  double grid_step = 0.0;
  // The true optimum is an open supremum just below a variant threshold;
  // t_star holds its grid representative, threshold - grid_step.
  bool supremum_approach = false;
};

// Constrained argmax of the node's utility over policies in [0, 1].
// Evaluates the step grid plus the variant's threshold points and their left
// neighbors, discards infeasible policies, optionally refines within the
// smooth piece around the best point, and compares against opting out
// (utility 0).
SolveResult solve(const Mechanism& mech, const ServiceProfile& profile,
                  const SolverConfig& cfg = {});

// Analytic optimum where one exists and the bandwidth constraint does not
// bind: plain/rep_split -> 0, tft_fine -> min(1, 1/sqrt(M)). Empty for
// threshold variants and binding constraints. Independent of solve(); used
// to cross-check it.
std::optional<double> closed_form_optimum(const Mechanism& mech,
                                          const ServiceProfile& profile);

const char* to_string(SolveStatus s);

}  // namespace coopnet
