#include "coopnet/sweep.hpp"

#include <cmath>
#include <stdexcept>

#include "coopnet/reputation.hpp"

namespace coopnet {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double sweep_x(const SweepRange& r, int i) {
  if (i == r.steps - 1) return r.hi;  // endpoint exact
  return r.lo + (r.hi - r.lo) * static_cast<double>(i) /
                    static_cast<double>(r.steps - 1);
}

[[noreturn]] void fail(const char* msg) { throw std::invalid_argument(msg); }

void check_base_no_snx(const ServiceProfile& p) {
  // s_nx is produced by the sweep itself; validate the remaining fields.
  if (!std::isfinite(p.s_xn) || !(p.s_xn > 0.0))
    fail("policy_vs_m needs a fixed s_xn > 0");
  if (!std::isfinite(p.g) || !(p.g > 0.0)) fail("g must be finite and > 0");
  if (!(p.b > 0.0)) fail("b must be > 0");
  if (!(p.e >= 0.0 && p.e <= 1.0)) fail("e must lie in [0, 1]");
}

void check_base_no_g(const ServiceProfile& p) {
  // g is produced by the sweep itself; validate the remaining fields.
  if (!std::isfinite(p.s_xn) || !(p.s_xn >= 0.0)) fail("s_xn must be >= 0");
  if (!std::isfinite(p.s_nx) || !(p.s_nx > 0.0)) fail("s_nx must be > 0");
  if (!(p.b > 0.0)) fail("b must be > 0");
  if (!(p.e >= 0.0 && p.e <= 1.0)) fail("e must lie in [0, 1]");
}

void require_kind(const SweepSpec& spec, SweepKind kind) {
  if (spec.kind != kind) fail("sweep spec kind does not match the operation");
}

}  // namespace

void SweepSpec::validate() const {
  mech.validate();
  solver.validate();
  if (!(range.lo < range.hi)) fail("sweep range needs lo < hi");
  if (range.steps < 2) fail("sweep needs at least 2 steps");
  switch (kind) {
    case SweepKind::utility_curve:
      base.validate();
      if (!(range.lo >= 0.0 && range.hi <= 1.0))
        fail("t_x range must lie in [0, 1]");
      break;
    case SweepKind::policy_vs_m:
      check_base_no_snx(base);
      if (!(range.lo > 0.0)) fail("M range must be positive");
      break;
    case SweepKind::policy_vs_g:
      check_base_no_g(base);
      if (!(range.lo > 0.0)) fail("G range must be positive");
      break;
    case SweepKind::exclusion_vs_e:
      base.validate();
      if (!(range.lo >= 0.0 && range.hi <= 1.0))
        fail("e range must lie in [0, 1]");
      if (!mech.t_s) fail("exclusion sweep needs a mechanism with t_s");
      if (!(observed_policy >= 0.0 && observed_policy <= 1.0))
        fail("observed_policy must lie in [0, 1]");
      break;
  }
}

std::vector<CurvePoint> utility_curve(const SweepSpec& spec) {
  spec.validate();
  require_kind(spec, SweepKind::utility_curve);
  std::vector<CurvePoint> out;
  out.reserve(static_cast<std::size_t>(spec.range.steps));
  for (int i = 0; i < spec.range.steps; ++i) {
    const double t = sweep_x(spec.range, i);
    CurvePoint pt;
    pt.x = t;
    pt.u = utility(spec.mech, spec.base, Policy{t});
    pt.feasible = feasible(spec.mech, spec.base, Policy{t});
    out.push_back(pt);
  }
  return out;
}

std::vector<CurvePoint> policy_vs_m(const SweepSpec& spec) {
  spec.validate();
  require_kind(spec, SweepKind::policy_vs_m);
  std::vector<CurvePoint> out;
  out.reserve(static_cast<std::size_t>(spec.range.steps));
  for (int i = 0; i < spec.range.steps; ++i) {
    const double m = sweep_x(spec.range, i);
    ServiceProfile profile = spec.base;
    profile.s_nx = m * spec.base.s_xn;
    const SolveResult res = solve(spec.mech, profile, spec.solver);
    CurvePoint pt;
    pt.x = m;
    pt.status = res.status;
    pt.u = res.status == SolveStatus::interior ? res.t_star : kNan;
    out.push_back(pt);
  }
  return out;
}

std::vector<CurvePoint> policy_vs_g(const SweepSpec& spec) {
  spec.validate();
  require_kind(spec, SweepKind::policy_vs_g);
  std::vector<CurvePoint> out;
  out.reserve(static_cast<std::size_t>(spec.range.steps));
  for (int i = 0; i < spec.range.steps; ++i) {
    const double g = sweep_x(spec.range, i);
    ServiceProfile profile = spec.base;
    profile.g = g;
    const SolveResult res = solve(spec.mech, profile, spec.solver);
    CurvePoint pt;
    pt.x = g;
    pt.status = res.status;
    pt.u = res.status == SolveStatus::interior ? res.t_star : kNan;
    out.push_back(pt);
  }
  return out;
}

std::vector<CurvePoint> exclusion_vs_e(const SweepSpec& spec) {
  spec.validate();
  require_kind(spec, SweepKind::exclusion_vs_e);
  std::vector<CurvePoint> out;
  out.reserve(static_cast<std::size_t>(spec.range.steps));
  ObservationModel model;
  model.n_samples = default_sample_count(spec.base.s_nx);
  for (int i = 0; i < spec.range.steps; ++i) {
    const double e = sweep_x(spec.range, i);
    model.e = e;
    CurvePoint pt;
    pt.x = e;
    pt.u = exclusion_probability(Policy{spec.observed_policy}, *spec.mech.t_s,
                                 model);
    out.push_back(pt);
  }
  return out;
}

const char* to_string(SweepKind k) {
  switch (k) {
    case SweepKind::utility_curve: return "utility_curve";
    case SweepKind::policy_vs_m: return "policy_vs_m";
    case SweepKind::policy_vs_g: return "policy_vs_g";
    case SweepKind::exclusion_vs_e: return "exclusion_vs_e";
  }
  return "?";
}

std::optional<SweepKind> sweep_kind_from_string(std::string_view name) {
  if (name == "utility_curve") return SweepKind::utility_curve;
  if (name == "policy_vs_m") return SweepKind::policy_vs_m;
  if (name == "policy_vs_g") return SweepKind::policy_vs_g;
  if (name == "exclusion_vs_e") return SweepKind::exclusion_vs_e;
  return std::nullopt;
}

}  // namespace coopnet
