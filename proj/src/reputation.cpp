#include "coopnet/reputation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace coopnet {

namespace {

// Uniform in [0, 1) from the engine's raw 64-bit output; the engine's output
// sequence is standardized, so estimates are reproducible across platforms.
double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double flip_adjusted_rate(double t_x, double e) {
  return t_x * (1.0 - e) + (1.0 - t_x) * e;
}

double log_binomial_pmf(long long k, long long n, double log_p, double log_q) {
  return std::lgamma(static_cast<double>(n + 1)) -
         std::lgamma(static_cast<double>(k + 1)) -
         std::lgamma(static_cast<double>(n - k + 1)) +
         static_cast<double>(k) * log_p + static_cast<double>(n - k) * log_q;
}

// P[K <= k] for K ~ Binomial(n, p), summing whichever tail carries less mass.
double binomial_cdf(long long k, long long n, double p) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  if (static_cast<double>(k) < static_cast<double>(n) * p) {
    double s = 0.0;
    for (long long j = 0; j <= k; ++j)
      s += std::exp(log_binomial_pmf(j, n, log_p, log_q));
    return std::min(s, 1.0);
  }
  double s = 0.0;
  for (long long j = k + 1; j <= n; ++j)
    s += std::exp(log_binomial_pmf(j, n, log_p, log_q));
  return std::clamp(1.0 - s, 0.0, 1.0);
}

void check_fraction(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

void ObservationModel::validate() const {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  check_fraction(e, "e");
}

ReputationEstimate observe(Policy t_x, const ObservationModel& model) {
  model.validate();
  check_fraction(t_x.t_x, "t_x");
  std::mt19937_64 rng(model.seed);
  long long serviced_seen = 0;
  for (int i = 0; i < model.n_samples; ++i) {
    bool serviced = next_unit(rng) < t_x.t_x;
    if (next_unit(rng) < model.e) serviced = !serviced;
    serviced_seen += serviced ? 1 : 0;
  }
  return {static_cast<double>(serviced_seen) / model.n_samples,
          model.n_samples, MetricKind::fine_grained};
}

ReputationEstimate binarize(const ReputationEstimate& est, double t_s) {
  if (est.metric != MetricKind::fine_grained)
    throw std::invalid_argument("binarize expects a fine-grained estimate");
  check_fraction(t_s, "t_s");
  return {est.r_hat >= t_s ? 1.0 : 0.0, est.n_samples, MetricKind::binary};
}

double exclusion_probability(Policy t_x, double t_s,
                             const ObservationModel& model) {
  model.validate();
  check_fraction(t_x.t_x, "t_x");
  check_fraction(t_s, "t_s");
  const long long n = model.n_samples;
  // Smallest count the binary metric keeps; the comparison replays
  // binarize()'s floating-point arithmetic exactly so the closed form and
  // the sampled path always agree on boundary counts.
  long long k_keep = n + 1;
  const long long start = std::max(
      0LL, static_cast<long long>(std::floor(t_s * static_cast<double>(n))) - 2);
  for (long long k = start; k <= n; ++k) {
    if (static_cast<double>(k) / static_cast<double>(n) >= t_s) {
      k_keep = k;
      break;
    }
  }
  return binomial_cdf(k_keep - 1, n, flip_adjusted_rate(t_x.t_x, model.e));
}

int default_sample_count(double s_nx) {
  if (!(s_nx >= 0.0)) return 1;
  const double capped =
      std::min(s_nx, static_cast<double>(std::numeric_limits<int>::max()));
  return std::max(1, static_cast<int>(std::llround(capped)));
}

}  // namespace coopnet
