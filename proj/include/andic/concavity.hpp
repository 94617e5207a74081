#pragma once

// Local concavity of the buzzer protocol's cost under a weak signal.
//
// A weak signal of player s splits mu into mu0 and mu1 with mu = (mu0 +
// mu1) / 2. Running the buzzer protocol of mu0 (resp. mu1) moves the
// sender's start time earlier by gamma0 (resp. later by gamma1) and leaves
// every other start time alone. The concavity integrand at time t is the
// concealed-information rate under mu minus the average of the rates under
// mu0 and mu1; its integral over the window [-gamma0, gamma1] is the
// deficit, which must be nonnegative and scales like eps^3.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "andic/buzzers.hpp"
#include "andic/errors.hpp"
#include "andic/measures.hpp"
#include "andic/quadrature.hpp"

namespace andic {

/// The k-player family with basis masses beta for players 1..s-1 and
/// e^{gamma0} beta for players s..k, where gamma0 is the sender's backward
/// shift at weakness eps. s is one-based.
struct CanonicalMeasure {
  int k = 2;
  int s = 1;
  double beta = 0.1;
};

inline void require_canonical(const CanonicalMeasure& c) {
  if (c.k < 2) fail(ErrorKind::invalid_argument, "canonical measure needs k >= 2");
  if (c.s < 1 || c.s > c.k) fail(ErrorKind::invalid_argument, "sender position must lie in 1..k");
  if (!(c.beta > 0.0 && c.beta < 1.0)) fail(ErrorKind::out_of_range, "beta must lie in (0, 1)");
}

/// y = e^{gamma0}, the positive root of eps beta y^2 + (1 - eps - eps beta) y - 1 = 0.
inline double canonical_ratio(const CanonicalMeasure& c, double eps) {
  const double a = eps * c.beta;
  const double b = 1.0 - eps - eps * c.beta;
  // 2 / (b + sqrt(b^2 + 4a)) avoids cancellation as a -> 0.
  return 2.0 / (b + std::sqrt(b * b + 4.0 * a));
}

inline double canonical_zero_mass(const CanonicalMeasure& c, double eps) {
  const double y = canonical_ratio(c, eps);
  return 1.0 - (c.s - 1) * c.beta - (c.k - c.s + 1) * y * c.beta;
}

inline bool canonical_feasible(const CanonicalMeasure& c, double eps) {
  return canonical_zero_mass(c, eps) >= 0.0;
}

inline InputDistribution canonical_measure(const CanonicalMeasure& c, double eps) {
  require_canonical(c);
  const double y = canonical_ratio(c, eps);
  const double zero = canonical_zero_mass(c, eps);
  if (zero < 0.0) {
    std::ostringstream msg;
    msg << "canonical measure k=" << c.k << " s=" << c.s << " beta=" << c.beta << " eps=" << eps
        << " has negative all-zero mass " << zero;
    fail(ErrorKind::out_of_range, msg.str());
  }
  std::vector<double> m(InputDistribution::support_size(c.k), 0.0);
  m[0] = zero;
  for (int i = 0; i < c.k; ++i) m[InputDistribution::basis_index(i)] = i + 1 < c.s ? c.beta : y * c.beta;
  return InputDistribution::normalized(c.k, std::move(m));
}

/// The two measures produced by the eps-weak signal of `sender`, together
/// with the start times of their protocols in the frame where the sender's
/// unperturbed start is 0.
struct Perturbation {
  int sender = 0;  // zero-based
  double eps = 0.0;
  double beta_s = 0.0;  // Pr[X_s = 1]
  double zeta_s = 0.0;  // Pr[X_s = 0]
  double gamma0 = 0.0;
  double gamma1 = 0.0;
  InputDistribution mu, mu0, mu1;
  StartTimes starts, starts0, starts1;
};

inline Perturbation perturb(const InputDistribution& mu, int sender, double eps) {
  const int k = mu.players();
  if (sender < 0 || sender >= k) fail(ErrorKind::invalid_argument, "sender is not a player");
  for (int i = 0; i < k; ++i)
    if (mu.basis_mass(i) <= kZeroMass) fail(ErrorKind::out_of_range, "perturbation needs positive basis masses");
  Perturbation p;
  p.sender = sender;
  p.eps = eps;
  p.beta_s = mu.prob_one(sender);
  p.zeta_s = 1.0 - p.beta_s;
  if (!(eps >= 0.0) || !(1.0 - eps * p.zeta_s > 0.0) || !(1.0 - eps * p.beta_s > 0.0))
    fail(ErrorKind::out_of_range, "weakness out of range for this sender");
  p.gamma0 = std::log((1.0 + eps * p.beta_s) / (1.0 - eps * p.zeta_s));
  p.gamma1 = std::log((1.0 + eps * p.zeta_s) / (1.0 - eps * p.beta_s));
  std::vector<double> m0(mu.size()), m1(mu.size());
  for (std::size_t x = 0; x < mu.size(); ++x) {
    const bool xs = mu.bit(x, sender);
    m0[x] = mu.mass(x) * (xs ? 1.0 - eps * p.zeta_s : 1.0 + eps * p.beta_s);
    m1[x] = mu.mass(x) * (xs ? 1.0 + eps * p.zeta_s : 1.0 - eps * p.beta_s);
  }
  p.mu = mu;
  p.mu0 = InputDistribution(k, std::move(m0));
  p.mu1 = InputDistribution(k, std::move(m1));
  p.starts = start_times_relative(mu, mu.basis_mass(sender));
  p.starts.t[static_cast<std::size_t>(sender)] = 0.0;
  std::vector<double> t0 = p.starts.t, t1 = p.starts.t;
  t0[static_cast<std::size_t>(sender)] = -p.gamma0;
  t1[static_cast<std::size_t>(sender)] = p.gamma1;
  p.starts0 = make_start_times(std::move(t0));
  p.starts1 = make_start_times(std::move(t1));
  return p;
}

/// Mixture density f(pi_t^m) = sum_x mu_x f_x(pi_t^m).
inline double mixture_density(const InputDistribution& mu, const SegmentedDensity& d, int m, double t) {
  double f = 0.0;
  for (std::size_t x = 0; x < mu.size(); ++x) f += mu.mass(x) * d.value(x, m, t);
  return f;
}

struct WindowDensities {
  double f = 0.0, f0 = 0.0, f1 = 0.0;
};

/// Closed forms of f, f0, f1 at time t in [-gamma0, gamma1) for the
/// canonical measure; m is a one-based player.
inline WindowDensities canonical_window_densities(const CanonicalMeasure& c, double eps, int m, double t) {
  require_canonical(c);
  const double y = canonical_ratio(c, eps);
  const double g0 = std::log(y);
  const double beta = c.beta;
  const double yb = y * beta;
  const double zeta = 1.0 - yb;
  const int k = c.k, s = c.s;
  WindowDensities w;
  if (t < 0.0) {
    const double eA = std::exp(-(s - 1) * (t + g0));
    if (m <= s - 1) {
      w.f = (1.0 - (s - 1) * beta + (s - 2) * yb * std::exp(t)) * eA;
      w.f1 = (1.0 + yb * (1.0 - eps * yb) * ((s - 2) * std::exp(t) - (s - 1) * std::exp(-g0))) * eA;
    }
    if (m <= s)
      w.f0 = (1.0 - eps * zeta) * ((1.0 - yb - (s - 1) * beta) * std::exp(-t) + (s - 1) * yb) * eA;
  } else {
    const double eB = std::exp(-(k * t + (s - 1) * g0));
    w.f = (1.0 - (s - 1) * beta - (k - s + 1) * yb + (k - 1) * yb * std::exp(t)) * eB;
    w.f0 = (1.0 - eps * zeta) * w.f;
    if (m != s)
      w.f1 = (1.0 + yb * (1.0 - eps * yb) * ((k - 2) * std::exp(t) - (s - 1) * std::exp(-g0) - k + s)) *
             std::exp(t) * eB;
  }
  return w;
}

/// The same three densities evaluated from the generic protocol densities
/// of mu, mu0 and mu1.
inline WindowDensities generic_window_densities(const Perturbation& p, int m, double t) {
  const int k = p.mu.players();
  SegmentedDensity d(k, p.starts), d0(k, p.starts0), d1(k, p.starts1);
  return {mixture_density(p.mu, d, m - 1, t), mixture_density(p.mu0, d0, m - 1, t),
          mixture_density(p.mu1, d1, m - 1, t)};
}

struct ConcavityIntegral {
  double ext_nats = 0.0;
  double int_nats = 0.0;
  double error = 0.0;
};

inline QuadOptions deficit_quadrature() {
  QuadOptions q;
  q.abs_tol = 1e-16;
  q.rel_tol = 1e-10;
  q.max_intervals = 2000;
  return q;
}

/// Integral of the concavity integrand over [a, b] (b may be +inf).
inline ConcavityIntegral concavity_integral(const Perturbation& p, double a, double b,
                                            const QuadOptions& opt = deficit_quadrature()) {
  const int k = p.mu.players();
  SegmentedDensity d(k, p.starts), d0(k, p.starts0), d1(k, p.starts1);
  std::vector<double> r(static_cast<std::size_t>(k) + 1), r0(r.size()), r1(r.size()), scratch;
  auto integrand = [&](double t, double* out) {
    concealed_rates(p.mu.masses(), d, t, r.data(), scratch);
    concealed_rates(p.mu0.masses(), d0, t, r0.data(), scratch);
    concealed_rates(p.mu1.masses(), d1, t, r1.data(), scratch);
    out[0] = r[0] - 0.5 * (r0[0] + r1[0]);
    double in = 0.0;
    for (int j = 1; j <= k; ++j) in += r[static_cast<std::size_t>(j)] - 0.5 * (r0[static_cast<std::size_t>(j)] + r1[static_cast<std::size_t>(j)]);
    out[1] = in;
  };
  std::vector<double> cuts{a};
  for (const auto* dd : {&d, &d0, &d1})
    for (double br : dd->breakpoints())
      if (br > a && br < b) cuts.push_back(br);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  QuadResult total;
  total.value.assign(2, 0.0);
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = i + 1 < cuts.size() ? cuts[i + 1] : b;
    if (std::isinf(hi))
      accumulate(total, integrate_tail(integrand, lo, 2, opt));
    else
      accumulate(total, integrate(integrand, lo, hi, 2, opt));
  }
  return {total.value[0], total.value[1], total.error};
}

/// Looser settings for long ranges where the integrand is rounding noise.
inline QuadOptions tail_quadrature() {
  QuadOptions q;
  q.abs_tol = 1e-14;
  q.rel_tol = 1e-10;
  q.max_intervals = 2000;
  return q;
}

inline ConcavityIntegral window_integral(const Perturbation& p, const QuadOptions& opt = deficit_quadrature()) {
  return concavity_integral(p, -p.gamma0, p.gamma1, opt);
}

/// Per-input residuals of Pr[X = z, buzz in window] minus the average of the
/// same probability under mu0 and mu1.
inline std::vector<double> same_average_residuals(const Perturbation& p) {
  const int k = p.mu.players();
  SegmentedDensity d(k, p.starts), d0(k, p.starts0), d1(k, p.starts1);
  auto window_mass = [&](const InputDistribution& nu, const SegmentedDensity& dd, std::size_t z) {
    return nu.mass(z) * (dd.survival(z, -p.gamma0) - dd.survival(z, p.gamma1));
  };
  std::vector<double> res(p.mu.size());
  for (std::size_t z = 0; z < p.mu.size(); ++z)
    res[z] = window_mass(p.mu, d, z) - 0.5 * (window_mass(p.mu0, d0, z) + window_mass(p.mu1, d1, z));
  return res;
}

/// Window deficit in bits for a general measure: (external, internal).
inline std::pair<double, double> window_deficit(const InputDistribution& mu, int sender, double eps,
                                                const QuadOptions& opt = deficit_quadrature()) {
  const ConcavityIntegral w = window_integral(perturb(mu, sender, eps), opt);
  return {nats_to_bits(w.ext_nats), nats_to_bits(w.int_nats)};
}

inline double deficit_external(const CanonicalMeasure& c, double eps, const QuadOptions& opt = deficit_quadrature()) {
  return window_deficit(canonical_measure(c, eps), c.s - 1, eps, opt).first;
}

inline double deficit_internal(const CanonicalMeasure& c, double eps, const QuadOptions& opt = deficit_quadrature()) {
  return window_deficit(canonical_measure(c, eps), c.s - 1, eps, opt).second;
}

enum class CostKind { external, internal };

/// Leading eps^3 coefficient of the window deficit, in bits.
inline double taylor_coefficient(const CanonicalMeasure& c, CostKind which) {
  if (c.k < 2 || c.s < 1 || c.s > c.k) fail(ErrorKind::invalid_argument, "bad k or sender position");
  const double k = c.k, s = c.s, b = c.beta;
  if (!(b >= 0.0 && b <= 1.0 / k)) fail(ErrorKind::out_of_range, "beta must lie in [0, 1/k]");
  if (b == 0.0) return 0.0;
  const double lead = (k + 5.0 * s - 6.0) * b;
  if (which == CostKind::external || c.k == 2) return lead * (1.0 - 2.0 * b) / (12.0 * (1.0 - b) * kLn2);
  return lead * ((3.0 * k - 2.0) * b * b - 4.0 * (k - 1.0) * b + k - 1.0) /
         (12.0 * (1.0 - b) * (1.0 - 2.0 * b) * kLn2);
}

/// Admissible weakness c k^-20 min(beta, 1 - k beta)^3.
inline double weakness_budget(const CanonicalMeasure& c, double constant = 1.0) {
  const double m = std::max(0.0, std::min(c.beta, 1.0 - c.k * c.beta));
  return constant * std::pow(static_cast<double>(c.k), -20.0) * m * m * m;
}

/// Checks outside the window for a measure whose players are sorted by
/// increasing basis mass; s is the one-based sender position.
struct OutsideChecks {
  double right_ext = 0.0, right_int = 0.0;  // nats over [gamma1, gamma1 + 5]
  bool right_zero = false;
  double left_ext = 0.0, left_int = 0.0;  // nats over (-inf, -gamma0]
  bool left_nonnegative = false;
  bool gap_checked = false;
  std::string gap_skip_reason;
  double gap_length = 0.0;  // L
  double gap_ext = 0.0, gap_int = 0.0;  // nats over [-L, -gamma0]
  double bound_ext = 0.0, bound_int = 0.0;
  bool gap_ok = false;
};

inline OutsideChecks outside_window_checks(const InputDistribution& mu, int s, double eps,
                                           const QuadOptions& opt = deficit_quadrature()) {
  const int k = mu.players();
  if (s < 1 || s > k) fail(ErrorKind::invalid_argument, "sender position must lie in 1..k");
  for (int i = 1; i < k; ++i)
    if (mu.basis_mass(i) < mu.basis_mass(i - 1))
      fail(ErrorKind::invalid_argument, "players must be sorted by increasing basis mass");
  const Perturbation p = perturb(mu, s - 1, eps);
  OutsideChecks out;
  const ConcavityIntegral right = concavity_integral(p, p.gamma1, p.gamma1 + 5.0, tail_quadrature());
  out.right_ext = right.ext_nats;
  out.right_int = right.int_nats;
  out.right_zero = std::abs(right.ext_nats) <= 1e-12 && std::abs(right.int_nats) <= 1e-12;

  const double first = p.starts.sorted().front();
  const ConcavityIntegral left = first < -p.gamma0 ? concavity_integral(p, first, -p.gamma0, opt)
                                                   : ConcavityIntegral{};
  out.left_ext = left.ext_nats;
  out.left_int = left.int_nats;
  out.left_nonnegative = left.ext_nats >= -1e-12 && left.int_nats >= -1e-12;

  if (s < 2) {
    out.gap_skip_reason = "sender is the earliest player; no gap before it";
    return out;
  }
  const double L = -p.starts.t[static_cast<std::size_t>(s - 2)];
  out.gap_length = L;
  if (!(L > 0.0)) {
    out.gap_skip_reason = "previous player starts together with the sender";
    return out;
  }
  if (p.gamma0 > L / 2.0) {
    out.gap_skip_reason = "gamma0 exceeds half the gap";
    return out;
  }
  const ConcavityIntegral gap = concavity_integral(p, -L, -p.gamma0, opt);
  out.gap_checked = true;
  out.gap_ext = gap.ext_nats;
  out.gap_int = gap.int_nats;
  out.bound_ext = (1.0 - std::exp(-(s - 1) * L / 2.0)) * mu.zero_mass() * mu.basis_mass(s - 1) /
                  (2.0 * (s - 1)) * eps * eps;
  out.bound_int = (k - 1) * out.bound_ext;
  out.gap_ok = gap.ext_nats >= out.bound_ext - 1e-10 && gap.int_nats >= out.bound_int - 1e-10;
  return out;
}

/// Marginal of mu on its first `keep` players. Inputs that become all-zero
/// on those players (basis vectors of dropped players) merge into 0.
inline InputDistribution keep_first_players(const InputDistribution& mu, int keep) {
  const int k = mu.players();
  if (keep < 2 || keep > k) fail(ErrorKind::invalid_argument, "can only keep between 2 and k players");
  std::vector<double> m(InputDistribution::support_size(keep), 0.0);
  m[0] = mu.zero_mass();
  for (int i = 0; i < k; ++i)
    (i < keep ? m[InputDistribution::basis_index(i)] : m[0]) += mu.basis_mass(i);
  m[InputDistribution::ones_index(keep)] = mu.ones_mass();
  return InputDistribution::normalized(keep, std::move(m));
}

struct ConcavityReport {
  CanonicalMeasure canonical;
  double eps = 0.0;
  bool feasible = true;
  std::string note;
  double gamma0 = 0.0, gamma1 = 0.0;
  double ext_deficit = 0.0, int_deficit = 0.0;  // bits
  double taylor_ext = 0.0, taylor_int = 0.0;    // eps^3 coefficients, bits
  double residual_ext = 0.0, residual_int = 0.0;  // deficit - coefficient * eps^3
  double same_average_max = 0.0;
  double right_tail_max = 0.0;  // nats
  double quadrature_error = 0.0;  // nats

  double ratio_ext() const { return ext_deficit / (eps * eps * eps); }
  double ratio_int() const { return int_deficit / (eps * eps * eps); }
  bool nonnegative() const { return ext_deficit >= -1e-12 && int_deficit >= -1e-12; }
  bool same_average_ok() const { return same_average_max <= 1e-11; }
  bool right_tail_zero() const { return right_tail_max <= 1e-12; }
};

inline ConcavityReport verify_concavity(const CanonicalMeasure& c, double eps,
                                        const QuadOptions& opt = deficit_quadrature()) {
  require_canonical(c);
  ConcavityReport r;
  r.canonical = c;
  r.eps = eps;
  if (c.beta > 1.0 / c.k || !canonical_feasible(c, eps)) {
    r.feasible = false;
    r.note = "all-zero mass would be negative";
    return r;
  }
  r.taylor_ext = taylor_coefficient(c, CostKind::external);
  r.taylor_int = taylor_coefficient(c, CostKind::internal);
  const Perturbation p = perturb(canonical_measure(c, eps), c.s - 1, eps);
  r.gamma0 = p.gamma0;
  r.gamma1 = p.gamma1;
  const ConcavityIntegral w = window_integral(p, opt);
  r.ext_deficit = nats_to_bits(w.ext_nats);
  r.int_deficit = nats_to_bits(w.int_nats);
  r.quadrature_error = w.error;
  const double e3 = eps * eps * eps;
  r.residual_ext = r.ext_deficit - r.taylor_ext * e3;
  r.residual_int = r.int_deficit - r.taylor_int * e3;
  for (double v : same_average_residuals(p)) r.same_average_max = std::max(r.same_average_max, std::abs(v));
  const ConcavityIntegral right = concavity_integral(p, p.gamma1, p.gamma1 + 5.0, tail_quadrature());
  r.right_tail_max = std::max(std::abs(right.ext_nats), std::abs(right.int_nats));
  return r;
}

}  // namespace andic
