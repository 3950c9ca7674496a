#include "coopnet/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coopnet {

namespace {

double tie_band(double u_ref, double tie_tolerance) {
  return tie_tolerance * std::max(1.0, std::abs(u_ref));
}

// The policy value at which the variant's utility/transit jumps, if any.
std::optional<double> variant_cut(const Mechanism& mech) {
  switch (mech.variant) {
    case Variant::tft_binary:
    case Variant::tft_fine_threshold:
      return mech.t_s;
    case Variant::rep_split_threshold:
      return mech.t_p;
    default:
      return std::nullopt;
  }
}

// Step lattice over [0, 1] plus the cut point and its forced left neighbor.
// Lattice points falling strictly inside (cut - h, cut) are dropped: that
// open strip has no attainable maximum, and cut - h is its representative.
std::vector<double> build_grid(double h, std::optional<double> cut) {
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(1.0 / h) + 4);
  for (long long i = 0;; ++i) {
    const double t = static_cast<double>(i) * h;
    if (t >= 1.0) break;
    pts.push_back(t);
  }
  pts.push_back(1.0);
  if (cut) {
    const double c = *cut;
    const double left = c - h;
    // 0.0 stands in for the left neighbor when the cut sits below one step
    const double strip_lo = std::max(left, 0.0);
    std::erase_if(pts, [&](double t) { return t > strip_lo && t < c; });
    if (left > 0.0) pts.push_back(left);
    pts.push_back(c);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

struct Probe {
  double t = std::numeric_limits<double>::quiet_NaN();
  double u = kNegativeInfinity;
};

// Golden-section maximization over [a, b]; returns the best interior point
// probed. f may return -inf for infeasible arguments.
template <typename F>
Probe golden_max(F&& f, double a, double b, double tol) {
  Probe best;
  if (!(b > a)) return best;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  auto consider = [&best](double t, double u) {
    if (u > best.u) {
      best.t = t;
      best.u = u;
    }
  };
  consider(c, fc);
  consider(d, fd);
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
      consider(d, fd);
    }
  }
  return best;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(grid_step > 0.0 && grid_step < 1.0))
    throw std::invalid_argument("grid_step must lie in (0, 1)");
  if (!(tie_tolerance > 0.0))
    throw std::invalid_argument("tie_tolerance must be > 0");
  if (!(refine_tolerance > 0.0))
    throw std::invalid_argument("refine_tolerance must be > 0");
}

SolveResult solve(const Mechanism& mech, const ServiceProfile& profile,
                  const SolverConfig& cfg) {
  cfg.validate();
  mech.validate();
  profile.validate();

  const double h = cfg.grid_step;
  const auto cut = variant_cut(mech);
  const std::vector<double> grid = build_grid(h, cut);

  // Feasibility implies finite utility, so -inf doubles as the infeasible
  // marker.
  auto value = [&](double t) -> double {
    const Policy pol{t};
    return feasible(mech, profile, pol) ? utility(mech, profile, pol)
                                        : kNegativeInfinity;
  };

  std::vector<double> u(grid.size());
  long long best_i = -1;
  double best_u = kNegativeInfinity;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    u[i] = value(grid[i]);
    if (u[i] > best_u) {
      best_u = u[i];
      best_i = static_cast<long long>(i);
    }
  }

  SolveResult res;
  res.grid_step = h;
  if (best_i < 0) {
    res.status =
        cfg.allow_opt_out ? SolveStatus::opt_out : SolveStatus::infeasible;
    return res;
  }

  double best_t = grid[static_cast<std::size_t>(best_i)];

  // Open-supremum case: the forced left neighbor of a cut wins, and utility
  // strictly climbs into the cut. Refinement would chase the unattainable
  // limit, so the representative point is kept as is.
  const bool sup = cut.has_value() && best_t == *cut - h && best_i > 0 &&
                   best_u > u[static_cast<std::size_t>(best_i) - 1];

  if (cfg.refine && !sup) {
    double piece_lo = 0.0;
    double piece_hi = 1.0;
    if (cut) {
      if (best_t < *cut)
        piece_hi = *cut;
      else
        piece_lo = *cut;
    }
    const double a = std::max(piece_lo, best_t - h);
    const double b = std::min(piece_hi, best_t + h);
    const Probe refined = golden_max(value, a, b, cfg.refine_tolerance);
    if (refined.u > best_u) {
      best_t = refined.t;
      best_u = refined.u;
    }
  }

  // Opting out yields exactly 0; utilities within tie tolerance of 0 stay in.
  if (cfg.allow_opt_out && best_u < 0.0 &&
      -best_u > tie_band(best_u, cfg.tie_tolerance)) {
    res.status = SolveStatus::opt_out;
    return res;
  }

  res.status = SolveStatus::interior;
  res.t_star = best_t;
  res.u_star = best_u;
  res.supremum_approach = sup;

  const double tol = tie_band(best_u, cfg.tie_tolerance);
  bool open = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool tied = u[i] >= best_u - tol;
    if (tied && !open) {
      res.argmax_set.push_back({grid[i], grid[i]});
      open = true;
    } else if (tied) {
      res.argmax_set.back().hi = grid[i];
    } else {
      open = false;
    }
  }

  // A refined t_star sits off-grid; make sure the set contains it.
  bool contained = false;
  for (const Interval& iv : res.argmax_set)
    contained |= iv.lo <= best_t && best_t <= iv.hi;
  if (!contained) {
    bool merged = false;
    for (Interval& iv : res.argmax_set) {
      if (best_t >= iv.lo - h && best_t <= iv.hi + h) {
        iv.lo = std::min(iv.lo, best_t);
        iv.hi = std::max(iv.hi, best_t);
        merged = true;
        break;
      }
    }
    if (!merged) {
      res.argmax_set.push_back({best_t, best_t});
      std::sort(res.argmax_set.begin(), res.argmax_set.end(),
                [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    }
  }
  return res;
}

std::optional<double> closed_form_optimum(const Mechanism& mech,
                                          const ServiceProfile& profile) {
  mech.validate();
  profile.validate();
  switch (mech.variant) {
    case Variant::plain:
    case Variant::rep_split: {
      // Utility strictly decreasing in the policy.
      if (!feasible(mech, profile, Policy{0.0})) return std::nullopt;
      return 0.0;
    }
    case Variant::tft_fine: {
      if (mech.scale_transit_by_reputation) return std::nullopt;
      double t = 0.0;
      if (profile.s_xn > 0.0) {
        const double m = service_ratio(profile);
        t = std::min(1.0, 1.0 / std::sqrt(m));
      }
      if (!feasible(mech, profile, Policy{t})) return std::nullopt;
      return t;
    }
    default:
      return std::nullopt;
  }
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::interior: return "interior";
    case SolveStatus::opt_out: return "opt_out";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "?";
}

}  // namespace coopnet
