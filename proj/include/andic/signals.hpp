#pragma once

// One-bit signals sent by a single player, their Bayes updates, and the
// walk that replaces an arbitrary signal by a sequence of weak, unbiased,
// non-crossing ones with the same terminal law.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "andic/errors.hpp"
#include "andic/measures.hpp"

namespace andic {

/// Relative tolerance under which two masses count as tied.
inline constexpr double kTieTolerance = 1e-12;

/// A bit B sent by `sender` whose law depends on the input only through the
/// sender's own bit.
struct Signal {
  int sender = 0;  // zero-based player index
  double p0_given_0 = 0.5;
  double p0_given_1 = 0.5;

  double prob(int b, bool xs) const {
    const double p0 = xs ? p0_given_1 : p0_given_0;
    return b == 0 ? p0 : 1.0 - p0;
  }
};

inline Signal make_signal(int sender, double p0_given_0, double p0_given_1) {
  if (sender < 0) fail(ErrorKind::invalid_argument, "signal sender must be a player index");
  for (double p : {p0_given_0, p0_given_1})
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::invalid_argument, "signal conditionals must lie in [0, 1]");
  return Signal{sender, p0_given_0, p0_given_1};
}

inline void require_sender(const InputDistribution& mu, const Signal& b) {
  if (b.sender < 0 || b.sender >= mu.players())
    fail(ErrorKind::invalid_argument, "signal sender " + std::to_string(b.sender + 1) + " is not a player");
}

/// The unbiased eps-weak signal of `sender` relative to a measure: B = 0 is
/// favoured by inputs with x_s = 0 in proportion to Pr[X_s = 1].
struct WeakSignal {
  int sender = 0;
  double eps = 0.0;

  Signal induced(const InputDistribution& mu) const {
    if (!(eps >= 0.0 && eps < 1.0)) fail(ErrorKind::out_of_range, "weakness must lie in [0, 1)");
    const double beta = mu.prob_one(sender);
    const double zeta = 1.0 - beta;
    Signal s{sender, 0.5 * (1.0 + eps * beta), 0.5 * (1.0 - eps * zeta)};
    require_sender(mu, s);
    return s;
  }
};

inline double branch_probability(std::span<const double> mass, int k, const Signal& b, int bit) {
  double p = 0.0;
  for (std::size_t x = 0; x < mass.size(); ++x) p += mass[x] * b.prob(bit, InputDistribution::bit(k, x, b.sender));
  return p;
}

inline double branch_probability(const InputDistribution& mu, const Signal& b, int bit) {
  require_sender(mu, b);
  return branch_probability(mu.masses(), mu.players(), b, bit);
}

/// mu conditioned on B = bit.
inline InputDistribution posterior(const InputDistribution& mu, const Signal& b, int bit) {
  const double pb = branch_probability(mu, b, bit);
  if (!(pb > kZeroMass)) fail(ErrorKind::conditioning, "conditioning on a zero-probability signal value");
  std::vector<double> m(mu.size());
  double total = 0.0;
  for (std::size_t x = 0; x < mu.size(); ++x) {
    m[x] = mu.mass(x) * b.prob(bit, mu.bit(x, b.sender)) / pb;
    total += m[x];
  }
  for (double& v : m) v /= total;
  return InputDistribution(mu.players(), std::move(m));
}

/// I(B; X) in bits.
inline double signal_info_external(const InputDistribution& mu, const Signal& b) {
  require_sender(mu, b);
  Joint2D j{mu.size(), 2, std::vector<double>(mu.size() * 2)};
  for (std::size_t x = 0; x < mu.size(); ++x)
    for (int v = 0; v < 2; ++v) j(x, static_cast<std::size_t>(v)) = mu.mass(x) * b.prob(v, mu.bit(x, b.sender));
  return mutual_information(j);
}

/// Sum over players i of I(B; X | X_i) in bits.
inline double signal_info_internal(const InputDistribution& mu, const Signal& b) {
  require_sender(mu, b);
  double total = 0.0;
  for (int i = 0; i < mu.players(); ++i) {
    for (int xi = 0; xi < 2; ++xi) {
      double weight = 0.0;
      for (std::size_t x = 0; x < mu.size(); ++x)
        if (mu.bit(x, i) == (xi == 1)) weight += mu.mass(x);
      if (weight <= kZeroMass) continue;
      Joint2D j{mu.size(), 2, std::vector<double>(mu.size() * 2, 0.0)};
      for (std::size_t x = 0; x < mu.size(); ++x) {
        if (mu.bit(x, i) != (xi == 1)) continue;
        for (int v = 0; v < 2; ++v)
          j(x, static_cast<std::size_t>(v)) = mu.mass(x) * b.prob(v, mu.bit(x, b.sender)) / weight;
      }
      total += weight * mutual_information_nats(j);
    }
  }
  return nats_to_bits(total);
}

struct SignalClass {
  bool unbiased = false;
  bool noncrossing = false;
  double weakness = 0.0;
};

/// Classifies B on a raw mass vector over the k + 2 support labels.
inline SignalClass classify(int k, std::span<const double> mass, const Signal& b, double tie = kTieTolerance) {
  SignalClass c;
  const std::size_t n = mass.size();
  double p0 = 0.0;
  double p1 = 0.0;
  // Per-input likelihood of B = 0; small instances stay on the stack.
  double stack_lik[16];
  std::vector<double> heap_lik;
  double* lik = stack_lik;
  if (n > 16) {
    heap_lik.resize(n);
    lik = heap_lik.data();
  }
  for (std::size_t x = 0; x < n; ++x) {
    const bool xs = InputDistribution::bit(k, x, b.sender);
    lik[x] = xs ? b.p0_given_1 : b.p0_given_0;
    p0 += mass[x] * lik[x];
    p1 += mass[x] * (1.0 - lik[x]);
    if (mass[x] > kZeroMass) c.weakness = std::max(c.weakness, std::abs(2.0 * lik[x] - 1.0));
  }
  c.unbiased = std::abs(p0 - 0.5) <= 1e-12 && std::abs(p1 - 0.5) <= 1e-12;
  c.noncrossing = true;
  for (int bit = 0; bit < 2; ++bit) {
    if ((bit == 0 ? p0 : p1) <= kZeroMass) continue;
    for (std::size_t x = 0; x < n; ++x) {
      if (mass[x] <= kZeroMass) continue;
      const double lx = bit == 0 ? lik[x] : 1.0 - lik[x];
      for (std::size_t y = 0; y < n; ++y) {
        if (!(mass[x] < mass[y]) || mass[y] - mass[x] <= tie * mass[y]) continue;
        // Posteriors share the 1 / Pr[B = bit] factor, so compare numerators.
        const double px = mass[x] * lx;
        const double py = mass[y] * (bit == 0 ? lik[y] : 1.0 - lik[y]);
        if (px > py + tie * std::max(px, py)) c.noncrossing = false;
      }
    }
  }
  return c;
}

inline SignalClass classify(const InputDistribution& mu, const Signal& b, double tie = kTieTolerance) {
  require_sender(mu, b);
  return classify(mu.players(), mu.masses(), b, tie);
}

namespace detail {

// Coordinate of nu on the line a + alpha (c - a), plus the max deviation
// from that line.
inline std::pair<double, double> segment_coordinate(std::span<const double> a, std::span<const double> c,
                                                    std::span<const double> nu) {
  double num = 0.0, den = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) {
    const double d = c[x] - a[x];
    num += (nu[x] - a[x]) * d;
    den += d * d;
  }
  const double alpha = den > 0.0 ? num / den : 0.0;
  double dev = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) dev = std::max(dev, std::abs(nu[x] - a[x] - alpha * (c[x] - a[x])));
  return {alpha, dev};
}

}  // namespace detail

/// A signal B' of the same sender that splits rho into rho0 and rho1, where
/// all three lie on the segment between the two posteriors of B on mu and
/// rho is strictly between rho0 and rho1.
inline Signal split(const InputDistribution& mu, const Signal& b, const InputDistribution& rho,
                    const InputDistribution& rho0, const InputDistribution& rho1) {
  require_sender(mu, b);
  if (rho.players() != mu.players() || rho0.players() != mu.players() || rho1.players() != mu.players())
    fail(ErrorKind::invalid_argument, "split: measures must share k");
  const InputDistribution end0 = posterior(mu, b, 0);
  const InputDistribution end1 = posterior(mu, b, 1);
  constexpr double tol = 1e-9;
  auto coord = [&](const InputDistribution& nu, const char* name) {
    auto [alpha, dev] = detail::segment_coordinate(end0.masses(), end1.masses(), nu.masses());
    if (dev > tol) fail(ErrorKind::splitting_infeasible, std::string(name) + " is off the posterior segment");
    return alpha;
  };
  const double a0 = coord(rho0, "rho0");
  const double a1 = coord(rho1, "rho1");
  const double a = coord(rho, "rho");
  for (double v : {a0, a1})
    if (v < -tol || v > 1.0 + tol) fail(ErrorKind::splitting_infeasible, "split target outside the segment");

  const int k = mu.players();
  if (std::abs(a1 - a0) <= tol) {
    if (statistical_distance(rho, rho0) <= tol && statistical_distance(rho, rho1) <= tol)
      return Signal{b.sender, 1.0, 1.0};
    fail(ErrorKind::splitting_infeasible, "degenerate split targets differ from rho");
  }
  const double p = (a1 - a) / (a1 - a0);  // Pr[B' = 0]
  if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::splitting_infeasible, "rho is not strictly between rho0 and rho1");

  // Pr[B'=0 | x] = p rho0(x) / rho(x) depends only on x_s; read it off the
  // heaviest supported input for each value of x_s.
  double cond[2] = {p, p};
  double best[2] = {0.0, 0.0};
  for (std::size_t x = 0; x < rho.size(); ++x) {
    const int xs = InputDistribution::bit(k, x, b.sender) ? 1 : 0;
    if (rho.mass(x) > best[xs]) {
      best[xs] = rho.mass(x);
      cond[xs] = std::clamp(p * rho0.mass(x) / rho.mass(x), 0.0, 1.0);
    }
  }
  Signal out{b.sender, cond[0], cond[1]};
  const InputDistribution back0 = posterior(rho, out, 0);
  const InputDistribution back1 = posterior(rho, out, 1);
  for (std::size_t x = 0; x < rho.size(); ++x)
    if (std::abs(back0.mass(x) - rho0.mass(x)) > 1e-10 || std::abs(back1.mass(x) - rho1.mass(x)) > 1e-10)
      fail(ErrorKind::splitting_infeasible, "split round trip failed; targets are not reachable from rho");
  return out;
}

struct SimulationOptions {
  double snap = 1e-9;  // distance to an endpoint treated as arrival
  std::size_t max_steps = 1'000'000;
  double tie = kTieTolerance;
};

/// One step of the walk: the current point, the signal sent there and the
/// bit it produced, and the resulting posterior.
struct SimulationStep {
  Signal signal;
  int bit = 0;
  InputDistribution posterior;
};

struct SimulationTrace {
  double eps = 0.0;
  std::vector<SimulationStep> steps;
  InputDistribution terminal;
  int terminal_branch = -1;  // which posterior of B was reached; -1 if B carries no information
};

/// Random walk along the segment between the two posteriors mu0 = mu|B=0
/// and mu1 = mu|B=1, in the coordinate alpha with mu_c = mu0 + alpha (mu1 -
/// mu0). Every step sends an unbiased signal splitting mu_c into
/// mu_c +/- lambda (target - mu_c), where the target is mu0 while mu_c lies
/// in [mu0, mu] and mu1 otherwise, and lambda is the largest value keeping
/// the step eps-weak, non-crossing, and on the segment.
class SignalWalk {
 public:
  struct StepView {
    double alpha = 0.0;  // before the step
    int target = 0;
    double lambda = 0.0;
    int bit = 0;  // 0 moves toward the target
    double next = 0.0;
  };

  SignalWalk(const InputDistribution& mu, const Signal& b, double eps, SimulationOptions opt = {})
      : k_(mu.players()), eps_(eps), opt_(opt), sender_(b.sender) {
    require_sender(mu, b);
    if (!(eps > 0.0)) fail(ErrorKind::out_of_range, "simulation weakness must be positive");
    const double p0 = branch_probability(mu, b, 0);
    const double p1 = branch_probability(mu, b, 1);
    start_ = p1;
    const std::size_t n = mu.size();
    a_.assign(n, 0.0);
    d_.assign(n, 0.0);
    xs_.assign(n, 0);
    double spread = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      xs_[x] = mu.bit(x, b.sender) ? 1 : 0;
      if (mu.mass(x) <= kZeroMass) continue;
      const double m0 = p0 > kZeroMass ? mu.mass(x) * b.prob(0, xs_[x]) / p0 : mu.mass(x);
      const double m1 = p1 > kZeroMass ? mu.mass(x) * b.prob(1, xs_[x]) / p1 : mu.mass(x);
      a_[x] = m0;
      d_[x] = m1 - m0;
      spread = std::max(spread, std::abs(d_[x]));
      support_.push_back(x);
    }
    informative_ = p0 > kZeroMass && p1 > kZeroMass && spread > 1e-14;
    const SignalClass c = classify(mu, b, opt.tie);
    direct_ = c.unbiased && c.noncrossing && c.weakness <= eps;
  }

  int players() const { return k_; }
  double eps() const { return eps_; }
  double start() const { return start_; }
  bool informative() const { return informative_; }
  /// True when B itself already qualifies as a single step.
  bool direct() const { return direct_; }

  void masses_at(double alpha, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t x : support_) out[x] = a_[x] + alpha * d_[x];
  }

  InputDistribution measure_at(double alpha) const {
    if (alpha == 0.0 || alpha == 1.0) {
      std::vector<double> m(a_.size(), 0.0);
      for (std::size_t x : support_) m[x] = alpha == 0.0 ? a_[x] : a_[x] + d_[x];
      return InputDistribution::normalized(k_, std::move(m));
    }
    std::vector<double> m(a_.size());
    masses_at(alpha, m);
    return InputDistribution::normalized(k_, std::move(m));
  }

  int target(double alpha) const {
    if (std::abs(alpha - start_) <= opt_.tie * start_) return 0;
    return alpha < start_ ? 0 : 1;
  }

  double lambda(double alpha, int target) const {
    const double shift = (target == 0 ? 0.0 : 1.0) - alpha;
    double lam = 1.0;
    // Stay on the segment: the away child is alpha - lambda * shift.
    if (target == 0 && alpha > 0.0) lam = std::min(lam, (1.0 - alpha) / alpha);
    if (target == 1 && alpha < 1.0) lam = std::min(lam, alpha / (1.0 - alpha));
    for (std::size_t x : support_) {
      const double mc = a_[x] + alpha * d_[x];
      const double delta = std::abs(shift * d_[x]);
      if (delta > 0.0 && mc > 0.0) lam = std::min(lam, eps_ * mc / delta);
    }
    for (std::size_t i = 0; i < support_.size(); ++i) {
      const std::size_t x = support_[i];
      const double mx = a_[x] + alpha * d_[x];
      for (std::size_t j = i + 1; j < support_.size(); ++j) {
        const std::size_t y = support_[j];
        const double my = a_[y] + alpha * d_[y];
        const double gap = std::abs(my - mx);
        if (gap <= opt_.tie * std::max(mx, my)) continue;
        const double rel = std::abs(shift * (d_[x] - d_[y]));
        if (rel > 0.0) lam = std::min(lam, gap / rel);
      }
    }
    return lam;
  }

  /// The step signal at alpha: Pr[B_i = 0 | x] = child0(x) / (2 mu_c(x)).
  Signal step_signal(double alpha, int target, double lam) const {
    const double shift = (target == 0 ? 0.0 : 1.0) - alpha;
    double cond[2] = {0.5, 0.5};
    double best[2] = {0.0, 0.0};
    for (std::size_t x : support_) {
      const double mc = a_[x] + alpha * d_[x];
      if (mc > best[xs_[x]]) {
        best[xs_[x]] = mc;
        cond[xs_[x]] = 0.5 * (1.0 + lam * shift * d_[x] / mc);
      }
    }
    return Signal{sender_, std::clamp(cond[0], 0.0, 1.0), std::clamp(cond[1], 0.0, 1.0)};
  }

  /// Runs one walk to an endpoint and returns it (0 or 1). visit(StepView)
  /// is called after each step.
  template <class URBG, class Visitor>
  int run(URBG& rng, Visitor&& visit) const {
    static_assert(std::is_unsigned_v<typename URBG::result_type>);
    BitSource<URBG> bits{rng};
    double alpha = start_;
    for (std::size_t step = 0; step < opt_.max_steps; ++step) {
      StepView v;
      v.alpha = alpha;
      v.target = target(alpha);
      v.lambda = lambda(alpha, v.target);
      v.bit = bits.next();
      const double shift = (v.target == 0 ? 0.0 : 1.0) - alpha;
      if (v.bit == 0)
        alpha = v.lambda >= 1.0 ? static_cast<double>(v.target) : alpha + v.lambda * shift;
      else
        alpha = alpha - v.lambda * shift;
      if (alpha <= opt_.snap) alpha = 0.0;
      if (alpha >= 1.0 - opt_.snap) alpha = 1.0;
      v.next = alpha;
      visit(v);
      if (alpha == 0.0) return 0;
      if (alpha == 1.0) return 1;
    }
    fail(ErrorKind::non_termination,
         "signal simulation exceeded " + std::to_string(opt_.max_steps) + " steps without reaching an endpoint");
  }

 private:
  template <class URBG>
  struct BitSource {
    URBG& rng;
    typename URBG::result_type word = 0;
    int left = 0;
    int next() {
      if (left == 0) {
        word = rng();
        left = std::numeric_limits<typename URBG::result_type>::digits;
      }
      const int b = static_cast<int>(word & 1u);
      word >>= 1;
      --left;
      return b;
    }
  };

  int k_;
  double eps_;
  SimulationOptions opt_;
  int sender_;
  double start_ = 0.0;
  std::vector<double> a_, d_;
  std::vector<int> xs_;
  std::vector<std::size_t> support_;
  bool informative_ = false;
  bool direct_ = false;
};

/// Simulates B by a sequence of unbiased, non-crossing, eps-weak signals and
/// records every step.
template <class URBG>
SimulationTrace simulate_signal(const InputDistribution& mu, const Signal& b, double eps, URBG& rng,
                                const SimulationOptions& opt = {}) {
  SignalWalk walk(mu, b, eps, opt);
  SimulationTrace trace;
  trace.eps = eps;
  if (!walk.informative()) {
    trace.terminal = mu;
    return trace;
  }
  if (walk.direct()) {
    const int bit = static_cast<int>(rng() & 1u);
    trace.steps.push_back({b, bit, posterior(mu, b, bit)});
    trace.terminal = trace.steps.back().posterior;
    trace.terminal_branch = bit;
    return trace;
  }
  const int end = walk.run(rng, [&](const SignalWalk::StepView& v) {
    trace.steps.push_back({walk.step_signal(v.alpha, v.target, v.lambda), v.bit, walk.measure_at(v.next)});
  });
  trace.terminal = walk.measure_at(static_cast<double>(end));
  trace.terminal_branch = end;
  return trace;
}

struct SimulationAudit {
  long traces = 0;
  double exact_p0 = 0.0;  // Pr[B = 0] under mu
  long ended0 = 0, ended1 = 0;
  double tv = 0.0;  // empirical terminal law vs the two-point law
  long total_steps = 0;
  long longest = 0;
  long bad_steps = 0;  // steps failing the unbiased / non-crossing / eps-weak test
  double max_weakness = 0.0;

  double mean_steps() const { return traces > 0 ? static_cast<double>(total_steps) / traces : 0.0; }
  bool ok(double tolerance) const { return bad_steps == 0 && tv <= tolerance; }
};

/// Runs `traces` walks, trace i seeded from (seed, i), classifying every
/// step at the point it is sent from. Results do not depend on `workers`.
inline SimulationAudit audit_simulation(const InputDistribution& mu, const Signal& b, double eps, long traces,
                                        std::uint64_t seed, int workers = 1, const SimulationOptions& opt = {}) {
  if (traces < 1) fail(ErrorKind::invalid_argument, "need at least one trace");
  const SignalWalk walk(mu, b, eps, opt);
  const double limit = eps * (1.0 + 1e-12);
  SimulationAudit total;
  total.traces = traces;
  total.exact_p0 = branch_probability(mu, b, 0);

  const int w = std::max(1, workers);
  std::vector<SimulationAudit> parts(static_cast<std::size_t>(w));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(w));
  auto work = [&](int id) {
    SimulationAudit& a = parts[static_cast<std::size_t>(id)];
    std::vector<double> m(mu.size());
    try {
      for (long i = id; i < traces; i += w) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
        std::mt19937_64 rng(seq);
        if (!walk.informative()) continue;
        if (walk.direct()) {
          const SignalClass c = classify(mu, b, opt.tie);
          a.max_weakness = std::max(a.max_weakness, c.weakness);
          ++a.total_steps;
          a.longest = std::max(a.longest, 1L);
          ((rng() & 1u) ? a.ended1 : a.ended0)++;
          continue;
        }
        long steps = 0;
        const int end = walk.run(rng, [&](const SignalWalk::StepView& v) {
          ++steps;
          walk.masses_at(v.alpha, m);
          const SignalClass c = classify(mu.players(), m, walk.step_signal(v.alpha, v.target, v.lambda), opt.tie);
          a.max_weakness = std::max(a.max_weakness, c.weakness);
          if (!(c.unbiased && c.noncrossing && c.weakness <= limit)) ++a.bad_steps;
        });
        (end == 0 ? a.ended0 : a.ended1)++;
        a.total_steps += steps;
        a.longest = std::max(a.longest, steps);
      }
    } catch (...) {
      errors[static_cast<std::size_t>(id)] = std::current_exception();
    }
  };
  if (w == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int id = 0; id < w; ++id) pool.emplace_back(work, id);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (const auto& a : parts) {
    total.ended0 += a.ended0;
    total.ended1 += a.ended1;
    total.total_steps += a.total_steps;
    total.longest = std::max(total.longest, a.longest);
    total.bad_steps += a.bad_steps;
    total.max_weakness = std::max(total.max_weakness, a.max_weakness);
  }
  if (walk.informative()) total.tv = std::abs(static_cast<double>(total.ended0) / traces - total.exact_p0);
  return total;
}

inline void to_json(nlohmann::json& j, const SimulationAudit& a) {
  j = nlohmann::json{{"traces", a.traces},         {"exact_p0", a.exact_p0},
                     {"ended0", a.ended0},         {"ended1", a.ended1},
                     {"tv", a.tv},                 {"mean_steps", a.mean_steps()},
                     {"longest", a.longest},       {"bad_steps", a.bad_steps},
                     {"max_weakness", a.max_weakness}};
}

// JSON uses one-based player numbers.
inline void to_json(nlohmann::json& j, const Signal& s) {
  j = nlohmann::json{{"sender", s.sender + 1}, {"p0_given_0", s.p0_given_0}, {"p0_given_1", s.p0_given_1}};
}

inline void from_json(const nlohmann::json& j, Signal& s) {
  if (!j.is_object() || !j.contains("sender") || !j.contains("p0_given_0") || !j.contains("p0_given_1"))
    fail(ErrorKind::parse, "signal JSON needs sender, p0_given_0, p0_given_1");
  if (!j["sender"].is_number_integer() || !j["p0_given_0"].is_number() || !j["p0_given_1"].is_number())
    fail(ErrorKind::parse, "signal JSON fields have the wrong type");
  s = make_signal(j["sender"].get<int>() - 1, j["p0_given_0"].get<double>(), j["p0_given_1"].get<double>());
}

inline void to_json(nlohmann::json& j, const SimulationTrace& t) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : t.steps) steps.push_back({{"signal", s.signal}, {"bit", s.bit}, {"posterior", s.posterior}});
  j = nlohmann::json{{"eps", t.eps}, {"steps", steps}, {"terminal", t.terminal}, {"terminal_branch", t.terminal_branch}};
}

}  // namespace andic
