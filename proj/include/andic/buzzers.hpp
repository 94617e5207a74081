#pragma once

// The continuous-time buzzer protocol for AND: player i with x_i = 0 starts
// an exponential clock at time t_i; the first buzz ends the protocol with
// output 0, and eternal silence means every input bit is 1.
//
// Given x, the first buzz happens at time t by player m with density
// exp(-Phi_x(t)) (if m is active at t), where Phi_x(t) is the total active
// time accumulated by the zero-players of x. Between consecutive start times
// every log-density is affine in t, which is what SegmentedDensity stores.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include <json.hpp>

#include "andic/errors.hpp"
#include "andic/measures.hpp"
#include "andic/quadrature.hpp"

namespace andic {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

struct StartTimes {
  std::vector<double> t;   // indexed by player; kNever = never becomes active
  std::vector<int> order;  // players by increasing start time, ties by index

  int players() const { return static_cast<int>(t.size()); }
  std::vector<double> sorted() const {
    std::vector<double> s;
    s.reserve(t.size());
    for (int p : order) s.push_back(t[static_cast<std::size_t>(p)]);
    return s;
  }
};

inline StartTimes make_start_times(std::vector<double> t) {
  if (t.size() < 2) fail(ErrorKind::invalid_argument, "start times need k >= 2 players");
  for (double v : t)
    if (std::isnan(v) || v == -kNever) fail(ErrorKind::invalid_argument, "start time must be finite or +inf");
  StartTimes s;
  s.t = std::move(t);
  s.order.resize(s.t.size());
  std::iota(s.order.begin(), s.order.end(), 0);
  std::stable_sort(s.order.begin(), s.order.end(),
                   [&](int a, int b) { return s.t[static_cast<std::size_t>(a)] < s.t[static_cast<std::size_t>(b)]; });
  return s;
}

/// Start times t_i = ln(mu_{e_i} / reference). With reference 0, players of
/// zero basis mass start at 0 and all others never start.
inline StartTimes start_times_relative(const InputDistribution& mu, double reference) {
  const int k = mu.players();
  std::vector<double> t(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const double m = mu.basis_mass(i);
    if (reference <= kZeroMass)
      t[static_cast<std::size_t>(i)] = m <= kZeroMass ? 0.0 : kNever;
    else if (m <= kZeroMass)
      fail(ErrorKind::out_of_range, "zero basis mass below a positive reference");
    else
      t[static_cast<std::size_t>(i)] = std::log(m / reference);
  }
  return make_start_times(std::move(t));
}

/// Protocol start times for mu, shifted so the earliest is 0.
///
/// A player whose basis vector has zero mass starts at 0 and every player
/// with positive basis mass then never starts; this is the limit of the
/// positive-mass schedule as the smallest mass goes to zero.
inline StartTimes start_times(const InputDistribution& mu) {
  double smallest = 1.0;
  for (int i = 0; i < mu.players(); ++i) smallest = std::min(smallest, mu.basis_mass(i));
  return start_times_relative(mu, smallest <= kZeroMass ? 0.0 : smallest);
}

inline StartTimes shifted(const StartTimes& s, double dt) {
  std::vector<double> t = s.t;
  for (double& v : t) v += dt;
  return make_start_times(std::move(t));
}

/// Total active time of the zero-players of x before time t.
inline double phi(const InputLabel& x, double t, const StartTimes& starts) {
  if (x.players() != starts.players()) fail(ErrorKind::invalid_argument, "label and start times differ in k");
  double total = 0.0;
  for (int i = 0; i < x.players(); ++i) {
    const double ti = starts.t[static_cast<std::size_t>(i)];
    if (!x[i] && t > ti) total += t - ti;
  }
  return total;
}

/// Piecewise log-affine transcript densities of the protocol for fixed start
/// times. Segment j is [breakpoints[j], breakpoints[j+1]) and the last one is
/// unbounded. On segment j, f_x(pi_t^m) = exp(offset - rate * t) for every
/// started player m with x_m = 0, where rate counts those players.
class SegmentedDensity {
 public:
  SegmentedDensity(int k, StartTimes starts) : k_(k), starts_(std::move(starts)) {
    if (starts_.players() != k_) fail(ErrorKind::invalid_argument, "start times do not match k");
    for (double v : starts_.t)
      if (std::isfinite(v)) breaks_.push_back(v);
    std::sort(breaks_.begin(), breaks_.end());
    breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
    const std::size_t n = InputDistribution::support_size(k_);
    rate_.assign(breaks_.size() * n, 0);
    offset_.assign(breaks_.size() * n, 0.0);
    for (std::size_t j = 0; j < breaks_.size(); ++j)
      for (std::size_t x = 0; x < n; ++x)
        for (int i = 0; i < k_; ++i) {
          const double ti = starts_.t[static_cast<std::size_t>(i)];
          if (ti <= breaks_[j] && !InputDistribution::bit(k_, x, i)) {
            rate_[j * n + x] += 1;
            offset_[j * n + x] += ti;
          }
        }
  }

  int players() const { return k_; }
  const StartTimes& starts() const { return starts_; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  std::size_t segments() const { return breaks_.size(); }

  /// Segment containing t, or -1 before the first start.
  int segment(double t) const {
    if (breaks_.empty() || t < breaks_.front()) return -1;
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    return static_cast<int>(it - breaks_.begin()) - 1;
  }

  int rate(std::size_t x, int seg) const { return seg < 0 ? 0 : rate_[idx(x, seg)]; }
  double offset(std::size_t x, int seg) const { return seg < 0 ? 0.0 : offset_[idx(x, seg)]; }

  bool started(int m, int seg) const {
    return seg >= 0 && starts_.t[static_cast<std::size_t>(m)] <= breaks_[static_cast<std::size_t>(seg)];
  }

  /// Pr[no buzz before t | x] = exp(-Phi_x(t)).
  double survival(std::size_t x, double t) const {
    const int seg = segment(t);
    if (seg < 0) return 1.0;
    return std::exp(offset(x, seg) - rate(x, seg) * t);
  }

  /// f_x(pi_t^m).
  double value(std::size_t x, int m, double t) const {
    const int seg = segment(t);
    if (!started(m, seg) || InputDistribution::bit(k_, x, m)) return 0.0;
    return std::exp(offset(x, seg) - rate(x, seg) * t);
  }

  /// Probability that input x never produces a buzz.
  double atom(std::size_t x) const {
    return rate(x, static_cast<int>(breaks_.size()) - 1) == 0 ? 1.0 : 0.0;
  }

  /// Sum over m of the integral of f_x(pi_t^m), plus the atom; equals 1.
  double total_mass(std::size_t x) const {
    double total = atom(x);
    for (std::size_t j = 0; j < breaks_.size(); ++j) {
      const int n = rate(x, static_cast<int>(j));
      if (n == 0) continue;
      const double c = offset(x, static_cast<int>(j));
      const double a = breaks_[j];
      const double upper = j + 1 < breaks_.size() ? std::exp(c - n * breaks_[j + 1]) : 0.0;
      total += std::exp(c - n * a) - upper;
    }
    return total;
  }

 private:
  std::size_t idx(std::size_t x, int seg) const {
    return static_cast<std::size_t>(seg) * InputDistribution::support_size(k_) + x;
  }

  int k_;
  StartTimes starts_;
  std::vector<double> breaks_;
  std::vector<int> rate_;
  std::vector<double> offset_;
};

inline double xlogx(double v) { return v > kZeroMass ? v * std::log(v) : 0.0; }

/// Rates (in t) of the concealed information H(X | Pi) and H(X | Pi, X_j).
///
/// out[0] = sum_m sum_x g_x ln(f_m / g_x) with g_x = mu_x f_x(pi_t^m) and
/// f_m = sum_x g_x; out[1 + j] is the same with f replaced by the sum over
/// inputs agreeing with x on coordinate j. `g` is scratch of size k + 2.
inline void concealed_rates(std::span<const double> mass, const SegmentedDensity& d, double t, double* out,
                            std::vector<double>& g) {
  const int k = d.players();
  std::fill(out, out + k + 1, 0.0);
  const int seg = d.segment(t);
  if (seg < 0) return;
  g.resize(mass.size());
  double all = 0.0, all_xlogx = 0.0;
  for (std::size_t x = 0; x + 1 < mass.size(); ++x) {
    const int n = d.rate(x, seg);
    g[x] = n == 0 || mass[x] <= 0.0 ? 0.0 : mass[x] * std::exp(d.offset(x, seg) - n * t);
    all += g[x];
    all_xlogx += xlogx(g[x]);
  }
  // The all-ones input never buzzes, so it is left out of the sums.
  for (int m = 0; m < k; ++m) {
    if (!d.started(m, seg)) continue;
    const double gm = g[InputDistribution::basis_index(m)];
    const double f = all - gm;
    if (f <= kZeroMass) continue;
    const double sum_g = all_xlogx - xlogx(gm);
    const double pf = xlogx(f);
    out[0] += pf - sum_g;
    for (int j = 0; j < k; ++j) {
      if (j == m) {
        out[1 + j] += pf - sum_g;
      } else {
        const double gj = g[InputDistribution::basis_index(j)];
        out[1 + j] += xlogx(f - gj) + xlogx(gj) - sum_g;
      }
    }
  }
}

struct ICReport {
  int k = 0;
  double external_bits = 0.0;
  double internal_bits = 0.0;
  std::vector<double> per_player_bits;
  double concealed_external_bits = 0.0;
  double concealed_internal_bits = 0.0;
  double quadrature_error_estimate = 0.0;  // bits
};

inline void to_json(nlohmann::json& j, const ICReport& r) {
  j = nlohmann::json{{"k", r.k},
                     {"external_bits", r.external_bits},
                     {"internal_bits", r.internal_bits},
                     {"per_player_bits", r.per_player_bits},
                     {"concealed_external_bits", r.concealed_external_bits},
                     {"concealed_internal_bits", r.concealed_internal_bits},
                     {"quadrature_error_estimate", r.quadrature_error_estimate}};
}

/// Fills an ICReport from H(X | Pi) and H(X | Pi, X_j) in nats.
inline ICReport report_from_concealed(const InputDistribution& mu, double h_ext, const std::vector<double>& h_int,
                                      double error_nats) {
  const int k = mu.players();
  ICReport r;
  r.k = k;
  const double hx = entropy_nats(mu);
  r.external_bits = nats_to_bits(hx - h_ext);
  r.concealed_external_bits = nats_to_bits(h_ext);
  r.per_player_bits.resize(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const double v = nats_to_bits(conditional_entropy_nats(mu, j) - h_int[static_cast<std::size_t>(j)]);
    r.per_player_bits[static_cast<std::size_t>(j)] = v;
    r.internal_bits += v;
    r.concealed_internal_bits += nats_to_bits(h_int[static_cast<std::size_t>(j)]);
  }
  r.quadrature_error_estimate = nats_to_bits(error_nats);
  return r;
}

/// Concealed-information integrals over [a, b] (b may be +inf), in nats:
/// entry 0 is the external part, entry 1 + j the part given X_j.
inline QuadResult concealed_integral(const InputDistribution& mu, const SegmentedDensity& d, double a, double b,
                                     const QuadOptions& opt = {}) {
  const std::size_t dim = static_cast<std::size_t>(mu.players()) + 1;
  std::vector<double> scratch;
  auto rates = [&](double t, double* out) { concealed_rates(mu.masses(), d, t, out, scratch); };
  QuadResult total;
  total.value.assign(dim, 0.0);
  // Split at every breakpoint inside (a, b) so each piece is smooth.
  std::vector<double> cuts{a};
  for (double br : d.breakpoints())
    if (br > a && br < b) cuts.push_back(br);
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = i + 1 < cuts.size() ? cuts[i + 1] : b;
    if (std::isinf(hi))
      accumulate(total, integrate_tail(rates, lo, dim, opt));
    else
      accumulate(total, integrate(rates, lo, hi, dim, opt));
  }
  return total;
}

/// Information cost of running the protocol with the given start times on
/// inputs drawn from mu.
inline ICReport information_cost(const InputDistribution& mu, const StartTimes& starts, const QuadOptions& opt = {}) {
  const int k = mu.players();
  SegmentedDensity d(k, starts);
  std::vector<double> h(static_cast<std::size_t>(k) + 1, 0.0);
  double err = 0.0;
  if (d.segments() > 0) {
    QuadResult q = concealed_integral(mu, d, d.breakpoints().front(), kNever, opt);
    h = q.value;
    err = q.error * (k + 1);
  }
  // Inputs that never buzz share the transcript at infinity.
  const std::size_t n = mu.size();
  double total = 0.0, sum = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    const double w = mu.mass(x) * d.atom(x);
    total += w;
    sum += xlogx(w);
  }
  h[0] += xlogx(total) - sum;
  for (int j = 0; j < k; ++j) {
    double groups[2] = {0.0, 0.0};
    for (std::size_t x = 0; x < n; ++x) groups[mu.bit(x, j) ? 1 : 0] += mu.mass(x) * d.atom(x);
    h[static_cast<std::size_t>(j) + 1] += xlogx(groups[0]) + xlogx(groups[1]) - sum;
  }
  std::vector<double> h_int(h.begin() + 1, h.end());
  return report_from_concealed(mu, h[0], h_int, err);
}

/// Information cost of the protocol tuned to mu itself.
inline ICReport information_cost(const InputDistribution& mu, const QuadOptions& opt = {}) {
  return information_cost(mu, start_times(mu), opt);
}

/// Costs of the uniform measure on e_1..e_k in bits: (external, internal).
inline std::pair<double, double> closed_form_uniform(int k) {
  if (k < 2) fail(ErrorKind::invalid_argument, "closed_form_uniform needs k >= 2");
  const double kk = k;
  const double ext = std::log2(kk / (kk - 1.0));
  const double in = k == 2 ? 0.0 : (kk - 2.0) * std::log2((kk - 1.0) / (kk - 2.0));
  return {ext, in};
}

}  // namespace andic
