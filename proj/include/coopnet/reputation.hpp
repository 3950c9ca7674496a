#pragma once

#include <cstdint>

#include "coopnet/model.hpp"

namespace coopnet {

struct ObservationModel {
  int n_samples = 1;  // observed transit requests per assessment window
  double e = 0.0;     // per-observation flip probability
  std::uint64_t seed = 0;

  void validate() const;
};

enum class MetricKind { fine_grained, binary };

struct ReputationEstimate {
  double r_hat = 0.0;
  int n_samples = 0;
  MetricKind metric = MetricKind::fine_grained;
};

// Sample n_samples independent service events at rate t_x, flip each
// observation with probability e, and report the observed service fraction.
// Deterministic for a given seed. The effective per-sample success rate is
// p' = t_x(1-e) + (1-t_x)e.
ReputationEstimate observe(Policy t_x, const ObservationModel& model);

// Collapse a fine-grained estimate to {0,1} at threshold t_s (inclusive).
ReputationEstimate binarize(const ReputationEstimate& est, double t_s);

// Exact probability that observe + binarize rates the node 0, i.e.
// P[K/n < t_s] with K ~ Binomial(n, p'). Exact summation, no sampling.
double exclusion_probability(Policy t_x, double t_s,
                             const ObservationModel& model);

// Sample count an assessment window derives from the offered transit load:
// round(s_nx), at least 1.
int default_sample_count(double s_nx);

}  // namespace coopnet
