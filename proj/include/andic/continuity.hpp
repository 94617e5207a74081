#pragma once

// Property sweep: one fixed buzzers protocol run on two nearby measures has
// costs that differ by at most 2 log|X| d + 2 h(2d), d the statistical
// distance between the measures.

#include <cmath>
#include <random>
#include <vector>

#include <json.hpp>

#include "andic/buzzers.hpp"
#include "andic/errors.hpp"
#include "andic/measures.hpp"

namespace andic {

/// The bound in bits for k players (|X| = 2^k inputs).
inline double continuity_bound(int k, double distance) {
  if (!(distance >= 0.0 && distance <= 0.25))
    fail(ErrorKind::out_of_range, "continuity bound needs distance in [0, 1/4]");
  return 2.0 * k * distance + 2.0 * binary_entropy(2.0 * distance);
}

/// Uniformly random measure with full support {0, e_1..e_k, 1}.
template <class URBG>
InputDistribution random_measure(int k, URBG& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(InputDistribution::support_size(k));
  for (double& x : w) x = e(rng);
  return InputDistribution::normalized(k, std::move(w));
}

struct ContinuityRow {
  int k = 0;
  double distance = 0.0;
  double bound = 0.0;
  double external_gap = 0.0;  // |cost(mu1) - cost(mu2)| under mu1's protocol
  double internal_gap = 0.0;
  bool ok() const { return external_gap <= bound && internal_gap <= bound; }
};

/// Compares the protocol tuned to mu1 on mu1 and on mu2.
inline ContinuityRow continuity_pair(const InputDistribution& mu1, const InputDistribution& mu2) {
  if (mu1.players() != mu2.players()) fail(ErrorKind::invalid_argument, "measures have different player counts");
  const StartTimes fixed = start_times(mu1);
  const ICReport a = information_cost(mu1, fixed);
  const ICReport b = information_cost(mu2, fixed);
  ContinuityRow r;
  r.k = mu1.players();
  r.distance = statistical_distance(mu1, mu2);
  r.bound = continuity_bound(r.k, r.distance);
  r.external_gap = std::abs(a.external_bits - b.external_bits);
  r.internal_gap = std::abs(a.internal_bits - b.internal_bits);
  return r;
}

/// `pairs` random pairs with k drawn from [k_min, k_max] and distance at
/// most max_distance. The second measure mixes the first with another random
/// measure, so both share the full support.
template <class URBG>
std::vector<ContinuityRow> continuity_sweep(int pairs, int k_min, int k_max, double max_distance, URBG& rng) {
  if (k_min < 2 || k_max < k_min) fail(ErrorKind::invalid_argument, "need 2 <= k_min <= k_max");
  if (!(max_distance > 0.0 && max_distance <= 0.25)) fail(ErrorKind::out_of_range, "max distance must lie in (0, 1/4]");
  std::uniform_int_distribution<int> pick_k(k_min, k_max);
  std::uniform_real_distribution<double> pick_t(0.0, max_distance);
  std::vector<ContinuityRow> rows;
  for (int i = 0; i < pairs; ++i) {
    const int k = pick_k(rng);
    const InputDistribution mu1 = random_measure(k, rng);
    const InputDistribution nu = random_measure(k, rng);
    const double t = pick_t(rng);
    std::vector<double> m(mu1.size());
    for (std::size_t x = 0; x < m.size(); ++x) m[x] = (1.0 - t) * mu1.mass(x) + t * nu.mass(x);
    rows.push_back(continuity_pair(mu1, InputDistribution::normalized(k, std::move(m))));
  }
  return rows;
}

inline void to_json(nlohmann::json& j, const ContinuityRow& r) {
  j = nlohmann::json{{"k", r.k},
                     {"distance", r.distance},
                     {"bound_bits", r.bound},
                     {"external_gap_bits", r.external_gap},
                     {"internal_gap_bits", r.internal_gap},
                     {"ok", r.ok()}};
}

}  // namespace andic
