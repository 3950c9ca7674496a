#pragma once

#include <limits>
#include <optional>
#include <string_view>

namespace coopnet {

// Bandwidth value meaning "the constraint never binds".
inline constexpr double kUnboundedBandwidth =
    std::numeric_limits<double>::infinity();

inline constexpr double kNegativeInfinity =
    -std::numeric_limits<double>::infinity();

// Exogenous parameters of one node-vs-network interaction, per period.
struct ServiceProfile {
  double s_xn = 0.0;  // service the node requests from the network
  double s_nx = 0.0;  // transit service the network requests from the node
  double g = 1.0;     // value the node attaches to one serviced unit of its own traffic
  double b = kUnboundedBandwidth;  // node bandwidth budget
  double e = 0.0;     // probability a single observation of the node is misread

  void validate() const;  // throws std::invalid_argument on a bad field
};

// Fraction of the network's transit requests the node actually services.
struct Policy {
  double t_x = 0.0;
};

// The network's current estimate of that fraction.
struct Reputation {
  double r_x = 0.0;
};

enum class Variant {
  plain,                // service granted unconditionally, behavior not even monitored
  rep_split,            // transit load scaled by reputation, service unconditional
  rep_split_threshold,  // as rep_split, but no transit requested below t_p
  tft_fine,             // service granted in proportion to reputation
  tft_binary,           // full service at reputation >= t_s, none below
  tft_fine_threshold,   // proportional service, transit requested only at/above t_s
};

// Which reciprocity/reputation scheme governs the network side.
struct Mechanism {
  Variant variant = Variant::plain;
  std::optional<double> t_s;  // service threshold (tft_binary, tft_fine_threshold)
  std::optional<double> t_p;  // transit cutoff (rep_split_threshold)
  bool scale_transit_by_reputation = false;  // tft_fine only: transit also scaled by R

  void validate() const;

  static Mechanism plain();
  static Mechanism rep_split();
  static Mechanism rep_split_threshold(double t_p);
  static Mechanism tft_fine(bool scale_transit = false);
  static Mechanism tft_binary(double t_s);
  static Mechanism tft_fine_threshold(double t_s);
};

// Extended real: finite, or -infinity when the network grants nothing while
// the node still has traffic of its own to send.
using Utility = double;

// T_N: fraction of the node's own requests the network services, given the
// node's reputation.
double network_policy(const Mechanism& mech, Reputation r);

// Transit load the network actually directs at the node.
double effective_transit(const Mechanism& mech, const ServiceProfile& profile,
                         Reputation r);

// Node utility with an explicit reputation (general form; the simulator uses
// it when the network's estimate lags or mis-measures the true policy).
Utility utility_with_reputation(const Mechanism& mech,
                                const ServiceProfile& profile, Policy pol,
                                Reputation r);

// Node utility under the identification R = T used for rational analysis.
Utility utility(const Mechanism& mech, const ServiceProfile& profile,
                Policy pol);

// Bandwidth feasibility of a policy under the variant's constraint.
bool feasible(const Mechanism& mech, const ServiceProfile& profile,
              Policy pol);

// M = s_nx / s_xn. Throws std::domain_error when s_xn == 0.
double service_ratio(const ServiceProfile& profile);

const char* to_string(Variant v);
std::optional<Variant> variant_from_string(std::string_view name);

}  // namespace coopnet
