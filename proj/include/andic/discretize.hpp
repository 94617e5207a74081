#pragma once

// Finite-round approximation of the buzzer protocol. Time is cut into slots
// of length delta; in each slot every started player with input 0 in turn
// sends a 1 with probability 1 - exp(-overlap), and the first 1 ends the
// protocol with output 0. At the horizon T all players reveal their inputs,
// so the protocol never errs. The tree is built exactly over transcript
// classes (slot, buzzing player) and its information cost is summed leaf by
// leaf, which makes it an independent check on the quadrature.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "andic/buzzers.hpp"
#include "andic/errors.hpp"
#include "andic/measures.hpp"

namespace andic {

struct ProtocolNode {
  InputDistribution posterior;
  double reach = 1.0;  // probability of arriving at this node
  int depth = 0;
  int slot = -1;
  int speaker = -1;  // player who speaks here; -1 for the reveal node and leaves
  std::vector<std::size_t> children;
  std::vector<double> branch_prob;
  bool terminal = false;
  int output = -1;  // AND value declared at a terminal node
};

struct DiscreteProtocol {
  int k = 0;
  double delta = 0.0;
  double horizon = 0.0;
  int slots = 0;
  StartTimes starts;
  std::vector<ProtocolNode> nodes;  // nodes[0] is the root
};

struct BuildOptions {
  std::size_t max_nodes = 4'000'000;
};

inline DiscreteProtocol build(const InputDistribution& mu, double delta, double horizon,
                              const BuildOptions& opt = {}) {
  if (!(delta > 0.0)) fail(ErrorKind::invalid_argument, "time step must be positive");
  const int k = mu.players();
  DiscreteProtocol proto;
  proto.k = k;
  proto.delta = delta;
  proto.horizon = horizon;
  proto.starts = start_times(mu);
  double last_start = 0.0;
  for (double t : proto.starts.t)
    if (std::isfinite(t)) last_start = std::max(last_start, t);
  if (!(horizon >= last_start + 1.0))
    fail(ErrorKind::invalid_argument, "horizon must exceed the last start time by at least 1");
  proto.slots = static_cast<int>(std::floor(horizon / delta + 1e-9));

  const std::size_t n = mu.size();
  // Unnormalized weight of each input on the all-silent path.
  std::vector<double> w(mu.masses().begin(), mu.masses().end());
  auto normalized = [&](const std::vector<double>& v) { return InputDistribution::normalized(k, v); };
  auto add = [&](ProtocolNode node) {
    if (proto.nodes.size() >= opt.max_nodes)
      fail(ErrorKind::resolution, "protocol tree exceeds " + std::to_string(opt.max_nodes) +
                                      " nodes; use a larger time step");
    proto.nodes.push_back(std::move(node));
    return proto.nodes.size() - 1;
  };
  auto total = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  };

  // The silent path is a chain; `current` is the chain node still to be filled.
  std::size_t current = add(ProtocolNode{mu, 1.0, 0, -1, -1, {}, {}, false, -1});
  std::vector<double> buzz(n), quiet(n);
  for (int r = 0; r < proto.slots; ++r) {
    const double lo = r * delta, hi = (r + 1) * delta;
    for (int i = 0; i < k; ++i) {
      const double ti = proto.starts.t[static_cast<std::size_t>(i)];
      const double overlap = hi - std::max(lo, ti);
      if (!(overlap > 0.0)) continue;
      const double fire = -std::expm1(-overlap);
      double buzz_mass = 0.0;
      for (std::size_t x = 0; x < n; ++x) {
        const bool zero = !InputDistribution::bit(k, x, i);
        buzz[x] = zero ? w[x] * fire : 0.0;
        quiet[x] = w[x] - buzz[x];
        buzz_mass += buzz[x];
      }
      if (buzz_mass <= 0.0) continue;
      const double here = total(w);
      ProtocolNode& node = proto.nodes[current];
      node.slot = r;
      node.speaker = i;
      const int depth = node.depth;
      const std::size_t leaf = add(ProtocolNode{normalized(buzz), buzz_mass, depth + 1, r, -1, {}, {}, true, 0});
      const std::size_t next =
          add(ProtocolNode{normalized(quiet), here - buzz_mass, depth + 1, -1, -1, {}, {}, false, -1});
      ProtocolNode& parent = proto.nodes[current];
      parent.children = {leaf, next};
      parent.branch_prob = {buzz_mass / here, 1.0 - buzz_mass / here};
      w = quiet;
      current = next;
    }
  }

  // Reveal everything at the horizon.
  const double here = total(w);
  std::vector<std::size_t> kids;
  std::vector<double> probs;
  for (std::size_t x = 0; x < n; ++x) {
    if (w[x] <= 0.0) continue;
    std::vector<double> point(n, 0.0);
    point[x] = 1.0;
    const int out = x == InputDistribution::ones_index(k) ? 1 : 0;
    kids.push_back(add(ProtocolNode{InputDistribution(k, point), w[x], proto.nodes[current].depth + 1, -1, -1, {},
                                    {}, true, out}));
    probs.push_back(w[x] / here);
  }
  ProtocolNode& reveal = proto.nodes[current];
  reveal.children = std::move(kids);
  reveal.branch_prob = std::move(probs);
  return proto;
}

/// Information cost of a finite protocol tree, summed over leaves.
inline ICReport exact_ic(const DiscreteProtocol& proto) {
  const int k = proto.k;
  const InputDistribution& mu = proto.nodes.front().posterior;
  double h_ext = 0.0;
  std::vector<double> h_int(static_cast<std::size_t>(k), 0.0);
  for (const ProtocolNode& node : proto.nodes) {
    if (!node.terminal || node.reach <= 0.0) continue;
    const double h = entropy_nats(node.posterior);
    h_ext += node.reach * h;
    for (int j = 0; j < k; ++j) h_int[static_cast<std::size_t>(j)] += node.reach * conditional_entropy_nats(node.posterior, j);
  }
  return report_from_concealed(mu, h_ext, h_int, 0.0);
}

/// Largest deviation, over internal nodes, of the expected child posterior
/// from the node's posterior.
inline double martingale_defect(const DiscreteProtocol& proto) {
  double worst = 0.0;
  for (const ProtocolNode& node : proto.nodes) {
    if (node.children.empty()) continue;
    for (std::size_t x = 0; x < node.posterior.size(); ++x) {
      double mix = 0.0;
      for (std::size_t c = 0; c < node.children.size(); ++c)
        mix += node.branch_prob[c] * proto.nodes[node.children[c]].posterior.mass(x);
      worst = std::max(worst, std::abs(mix - node.posterior.mass(x)));
    }
  }
  return worst;
}

/// True when every leaf's output equals AND(x) for every x it can hold.
inline bool zero_error(const DiscreteProtocol& proto) {
  for (const ProtocolNode& node : proto.nodes) {
    if (!node.terminal) continue;
    for (std::size_t x = 0; x < node.posterior.size(); ++x) {
      if (node.posterior.mass(x) <= 0.0) continue;
      const int value = x == InputDistribution::ones_index(proto.k) ? 1 : 0;
      if (value != node.output) return false;
    }
  }
  return true;
}

struct ConvergenceRow {
  int j = 0;  // delta = 2^-j
  double delta = 0.0;
  double horizon = 0.0;
  std::size_t nodes = 0;
  double external_bits = 0.0;
  double internal_bits = 0.0;
  double external_gap = 0.0;  // relative to the reference cost
  double internal_gap = 0.0;
};

/// exact_ic for delta = 2^-j, j = j_from..j_to, against a reference cost.
inline std::vector<ConvergenceRow> convergence_table(const InputDistribution& mu, double horizon, int j_from, int j_to,
                                                     const ICReport& reference, const BuildOptions& opt = {}) {
  std::vector<ConvergenceRow> rows;
  for (int j = j_from; j <= j_to; ++j) {
    const double delta = std::ldexp(1.0, -j);
    const DiscreteProtocol proto = build(mu, delta, horizon, opt);
    const ICReport r = exact_ic(proto);
    rows.push_back({j, delta, horizon, proto.nodes.size(), r.external_bits, r.internal_bits,
                    std::abs(r.external_bits - reference.external_bits),
                    std::abs(r.internal_bits - reference.internal_bits)});
  }
  return rows;
}

}  // namespace andic
