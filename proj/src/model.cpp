#include "coopnet/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace coopnet {

namespace {

bool is_tft(Variant v) {
  return v == Variant::tft_fine || v == Variant::tft_binary ||
         v == Variant::tft_fine_threshold;
}

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

void require_threshold(const std::optional<double>& v, const char* name,
                       const char* variant) {
  if (!v) fail(std::string(name) + " missing (required by " + variant + ")");
  if (!(*v > 0.0 && *v <= 1.0))
    fail(std::string(name) + " must lie in (0, 1]");
}

void forbid_threshold(const std::optional<double>& v, const char* name,
                      const char* variant) {
  if (v) fail(std::string(name) + " not used by " + variant);
}

}  // namespace

void ServiceProfile::validate() const {
  if (!std::isfinite(s_xn) || !(s_xn >= 0.0)) fail("s_xn must be finite and >= 0");
  if (!std::isfinite(s_nx) || !(s_nx > 0.0)) fail("s_nx must be finite and > 0");
  if (!std::isfinite(g) || !(g > 0.0)) fail("g must be finite and > 0");
  if (!(b > 0.0)) fail("b must be > 0");  // +inf allowed: non-binding bandwidth
  if (!(e >= 0.0 && e <= 1.0)) fail("e must lie in [0, 1]");
}

void Mechanism::validate() const {
  const char* name = to_string(variant);
  switch (variant) {
    case Variant::tft_binary:
    case Variant::tft_fine_threshold:
      require_threshold(t_s, "t_s", name);
      forbid_threshold(t_p, "t_p", name);
      break;
    case Variant::rep_split_threshold:
      require_threshold(t_p, "t_p", name);
      forbid_threshold(t_s, "t_s", name);
      break;
    default:
      forbid_threshold(t_s, "t_s", name);
      forbid_threshold(t_p, "t_p", name);
      break;
  }
  if (scale_transit_by_reputation && variant != Variant::tft_fine)
    fail("scale_transit_by_reputation applies to tft_fine only");
}

Mechanism Mechanism::plain() { return {}; }

Mechanism Mechanism::rep_split() {
  Mechanism m;
  m.variant = Variant::rep_split;
  return m;
}

Mechanism Mechanism::rep_split_threshold(double t_p) {
  Mechanism m;
  m.variant = Variant::rep_split_threshold;
  m.t_p = t_p;
  return m;
}

Mechanism Mechanism::tft_fine(bool scale_transit) {
  Mechanism m;
  m.variant = Variant::tft_fine;
  m.scale_transit_by_reputation = scale_transit;
  return m;
}

Mechanism Mechanism::tft_binary(double t_s) {
  Mechanism m;
  m.variant = Variant::tft_binary;
  m.t_s = t_s;
  return m;
}

Mechanism Mechanism::tft_fine_threshold(double t_s) {
  Mechanism m;
  m.variant = Variant::tft_fine_threshold;
  m.t_s = t_s;
  return m;
}

double network_policy(const Mechanism& mech, Reputation r) {
  switch (mech.variant) {
    case Variant::plain:
    case Variant::rep_split:
    case Variant::rep_split_threshold:
      return 1.0;  // service granted regardless of behavior
    case Variant::tft_fine:
    case Variant::tft_fine_threshold:
      return r.r_x;
    case Variant::tft_binary:
      return r.r_x >= *mech.t_s ? 1.0 : 0.0;
  }
  return 1.0;
}

double effective_transit(const Mechanism& mech, const ServiceProfile& profile,
                         Reputation r) {
  switch (mech.variant) {
    case Variant::plain:
    case Variant::tft_binary:
      return profile.s_nx;
    case Variant::tft_fine:
      return mech.scale_transit_by_reputation ? r.r_x * profile.s_nx
                                              : profile.s_nx;
    case Variant::rep_split:
      return r.r_x * profile.s_nx;
    case Variant::rep_split_threshold:
      return r.r_x < *mech.t_p ? 0.0 : r.r_x * profile.s_nx;
    case Variant::tft_fine_threshold:
      return r.r_x < *mech.t_s ? 0.0 : profile.s_nx;
  }
  return profile.s_nx;
}

Utility utility_with_reputation(const Mechanism& mech,
                                const ServiceProfile& profile, Policy pol,
                                Reputation r) {
  const double transit = effective_transit(mech, profile, r);
  if (!is_tft(mech.variant)) {
    // Unconditional service: (g-1) gain per own unit, transit serviced at cost.
    return (profile.g - 1.0) * profile.s_xn - pol.t_x * transit;
  }
  const double t_n = network_policy(mech, r);
  if (t_n == 0.0) {
    // Nothing serviced: reissue cost diverges unless the node sends nothing.
    if (profile.s_xn > 0.0) return kNegativeInfinity;
    return -pol.t_x * transit;
  }
  return profile.g * profile.s_xn - profile.s_xn / t_n - pol.t_x * transit;
}

Utility utility(const Mechanism& mech, const ServiceProfile& profile,
                Policy pol) {
  return utility_with_reputation(mech, profile, pol, Reputation{pol.t_x});
}

bool feasible(const Mechanism& mech, const ServiceProfile& profile,
              Policy pol) {
  const Reputation r{pol.t_x};
  const double transit = effective_transit(mech, profile, r);
  double lhs = transit * (1.0 + pol.t_x) + profile.s_xn;
  if (is_tft(mech.variant) && profile.s_xn > 0.0) {
    const double t_n = network_policy(mech, r);
    if (t_n == 0.0) return false;  // reissue demand unbounded
    lhs += profile.s_xn / t_n;
  }
  return lhs <= profile.b;
}

double service_ratio(const ServiceProfile& profile) {
  if (profile.s_xn == 0.0)
    throw std::domain_error("service ratio undefined: s_xn is 0");
  return profile.s_nx / profile.s_xn;
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::plain: return "plain";
    case Variant::rep_split: return "rep_split";
    case Variant::rep_split_threshold: return "rep_split_threshold";
    case Variant::tft_fine: return "tft_fine";
    case Variant::tft_binary: return "tft_binary";
    case Variant::tft_fine_threshold: return "tft_fine_threshold";
  }
  return "?";
}

std::optional<Variant> variant_from_string(std::string_view name) {
  if (name == "plain") return Variant::plain;
  if (name == "rep_split") return Variant::rep_split;
  if (name == "rep_split_threshold") return Variant::rep_split_threshold;
  if (name == "tft_fine") return Variant::tft_fine;
  if (name == "tft_binary") return Variant::tft_binary;
  if (name == "tft_fine_threshold") return Variant::tft_fine_threshold;
  return std::nullopt;
}

}  // namespace coopnet
