#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "andic/concavity.hpp"
#include "support.hpp"

using namespace andic;
using Catch::Approx;

namespace {

InputDistribution staggered(const std::vector<double>& basis) {
  std::vector<double> m{0.0};
  double sum = 0.0;
  for (double v : basis) {
    m.push_back(v);
    sum += v;
  }
  m[0] = 1.0 - sum;
  m.push_back(0.0);
  return InputDistribution(static_cast<int>(basis.size()), m);
}

}  // namespace

TEST_CASE("perturbation basics", "[concavity]") {
  // beta_s = 0.25 for player 1.
  const InputDistribution mu(2, {0.5, 0.25, 0.25, 0.0});
  const Perturbation p = perturb(mu, 0, 0.1);
  CHECK(p.gamma0 == Approx(std::log(1.025 / 0.925)).epsilon(1e-14));
  CHECK(p.gamma0 == Approx(0.1026542).margin(1e-7));
  CHECK(p.gamma1 == Approx(std::log(1.075 / 0.975)).epsilon(1e-14));
  for (std::size_t x = 0; x < mu.size(); ++x)
    CHECK(0.5 * (p.mu0.mass(x) + p.mu1.mass(x)) == Approx(mu.mass(x)).margin(1e-15));
  CHECK(p.starts0.t[0] == Approx(-p.gamma0));
  CHECK(p.starts1.t[0] == Approx(p.gamma1));
  CHECK(p.starts0.t[1] == p.starts.t[1]);

  const Perturbation zero = perturb(mu, 0, 0.0);
  CHECK(zero.gamma0 == 0.0);
  CHECK(zero.gamma1 == 0.0);
  CHECK(zero.mu0 == mu);
  CHECK(window_deficit(mu, 0, 0.0).first == 0.0);

  CHECK(thrown_kind([&] { perturb(mu, 0, -0.1); }) == ErrorKind::out_of_range);
  CHECK(thrown_kind([] { perturb(InputDistribution(2, {0.5, 0.0, 0.5, 0.0}), 0, 0.1); }) == ErrorKind::out_of_range);
}

TEST_CASE("window edge derivatives at zero weakness", "[concavity]") {
  // One-sided second-order stencils on gamma(eps) from perturb().
  for (double beta : {0.1, 0.25, 0.4}) {
    const InputDistribution mu(2, {1.0 - beta - 0.3, beta, 0.3, 0.0});
    const double h = 1e-3;
    auto g0 = [&](double e) { return perturb(mu, 0, e).gamma0; };
    auto g1 = [&](double e) { return perturb(mu, 0, e).gamma1; };
    const double d1 = (-3 * g0(0) + 4 * g0(h) - g0(2 * h)) / (2 * h);
    const double d2_0 = (2 * g0(0) - 5 * g0(h) + 4 * g0(2 * h) - g0(3 * h)) / (h * h);
    const double d2_1 = (2 * g1(0) - 5 * g1(h) + 4 * g1(2 * h) - g1(3 * h)) / (h * h);
    CHECK(d1 == Approx(1.0).margin(1e-4));
    CHECK(d2_0 == Approx(1.0 - 2 * beta).margin(1e-4));
    CHECK(d2_1 == Approx(2 * beta - 1.0).margin(1e-4));
  }
}

TEST_CASE("canonical closed forms match the generic densities", "[concavity]") {
  double worst = 0.0;
  for (int k = 2; k <= 5; ++k)
    for (int s = 1; s <= k; ++s)
      for (double beta : {0.05, 0.1}) {
        const CanonicalMeasure c{k, s, beta};
        const double eps = 0.01;
        const Perturbation p = perturb(canonical_measure(c, eps), s - 1, eps);
        // Cell midpoints: the densities jump at -gamma0, where the two
        // sides would disagree by rounding alone.
        for (int i = 0; i < 1000; ++i) {
          const double t = -p.gamma0 + (p.gamma0 + p.gamma1) * (i + 0.5) / 1000.0;
          for (int m = 1; m <= k; ++m) {
            const auto a = canonical_window_densities(c, eps, m, t);
            const auto g = generic_window_densities(p, m, t);
            worst = std::max({worst, std::abs(a.f - g.f), std::abs(a.f0 - g.f0), std::abs(a.f1 - g.f1)});
          }
        }
      }
  CHECK(worst < 1e-12);

  // Sender's density under mu1 vanishes before its delayed start.
  const CanonicalMeasure c{3, 2, 0.1};
  CHECK(canonical_window_densities(c, 0.01, 2, -0.001).f1 == 0.0);
  // In the canonical family the sender's start coincides with the mu0 shift.
  const InputDistribution mu = canonical_measure(c, 0.01);
  const Perturbation p = perturb(mu, 1, 0.01);
  CHECK(p.starts.t[0] == Approx(-p.gamma0).margin(1e-14));
}

TEST_CASE("coefficients evaluated by hand", "[concavity]") {
  CHECK(taylor_coefficient({2, 1, 0.25}, CostKind::external) ==
        Approx(0.25 * 0.5 / (12 * 0.75 * std::log(2.0))).epsilon(1e-14));
  CHECK(taylor_coefficient({2, 1, 0.25}, CostKind::external) == Approx(0.0200374).margin(1e-7));
  CHECK(taylor_coefficient({3, 1, 0.2}, CostKind::external) == Approx(0.0360674).margin(1e-7));
  CHECK(taylor_coefficient({2, 2, 0.3}, CostKind::internal) == taylor_coefficient({2, 2, 0.3}, CostKind::external));
  const double b = 0.1;
  CHECK(taylor_coefficient({3, 2, b}, CostKind::internal) ==
        Approx(7 * (7 * b * b - 8 * b + 2) * b / (12 * (1 - b) * (1 - 2 * b) * std::log(2.0))).epsilon(1e-14));
  CHECK(taylor_coefficient({2, 1, 0.0}, CostKind::external) == 0.0);
  CHECK(taylor_coefficient({2, 1, 0.5}, CostKind::external) == 0.0);
  CHECK(thrown_kind([] { taylor_coefficient({3, 1, 0.5}, CostKind::external); }) == ErrorKind::out_of_range);
}

TEST_CASE("weakness budget", "[concavity]") {
  CHECK(weakness_budget({2, 1, 0.25}) == Approx(std::pow(2.0, -20) * std::pow(0.25, 3)));
  CHECK(weakness_budget({2, 1, 1e-9}) < 1e-30);
  CHECK(weakness_budget({3, 1, 0.1}) < weakness_budget({3, 1, 0.2}));
  CHECK(weakness_budget({3, 1, 0.3}) < weakness_budget({3, 1, 0.2}));
}

TEST_CASE("deficit follows the cubic law", "[concavity]") {
  for (const CanonicalMeasure c : {CanonicalMeasure{2, 1, 0.25}, CanonicalMeasure{3, 2, 0.1}, CanonicalMeasure{4, 3, 0.05},
                                   CanonicalMeasure{5, 5, 0.1}}) {
    const double eps = 2.5e-3;
    const double e3 = eps * eps * eps;
    CHECK(deficit_external(c, eps) / e3 == Approx(taylor_coefficient(c, CostKind::external)).epsilon(0.05));
    CHECK(deficit_internal(c, eps) / e3 == Approx(taylor_coefficient(c, CostKind::internal)).epsilon(0.05));
  }
}

TEST_CASE("residual shrinks like eps^4", "[concavity][property]") {
  const CanonicalMeasure c{3, 2, 0.1};
  const double coef = taylor_coefficient(c, CostKind::external);
  double prev = 0.0;
  for (double eps : {1e-2, 5e-3, 2.5e-3}) {
    const double resid = std::abs(deficit_external(c, eps) - coef * eps * eps * eps);
    if (prev > 0.0) {
      // Halving eps divides an eps^4 remainder by 16.
      CHECK(prev / resid > 12.0);
      CHECK(prev / resid < 20.0);
    }
    prev = resid;
  }
}

TEST_CASE("window plus outside equals the whole-line cost difference", "[concavity][oracle]") {
  // Integrating the concavity integrand over all time gives the difference
  // of concealed information between the three protocols, which the
  // buzzers module computes independently of the window split.
  for (const CanonicalMeasure c : {CanonicalMeasure{2, 1, 0.25}, CanonicalMeasure{3, 2, 0.1}, CanonicalMeasure{4, 4, 0.15}}) {
    const double eps = 0.01;
    const Perturbation p = perturb(canonical_measure(c, eps), c.s - 1, eps);
    const double first = std::min(p.starts0.sorted().front(), p.starts.sorted().front());
    const ConcavityIntegral whole = concavity_integral(p, first, kNever, tail_quadrature());
    const double h = information_cost(p.mu, p.starts).concealed_external_bits;
    const double h0 = information_cost(p.mu0, p.starts0).concealed_external_bits;
    const double h1 = information_cost(p.mu1, p.starts1).concealed_external_bits;
    CHECK(nats_to_bits(whole.ext_nats) == Approx(h - 0.5 * (h0 + h1)).margin(1e-11));
    const double g = information_cost(p.mu, p.starts).concealed_internal_bits;
    const double g0 = information_cost(p.mu0, p.starts0).concealed_internal_bits;
    const double g1 = information_cost(p.mu1, p.starts1).concealed_internal_bits;
    CHECK(nats_to_bits(whole.int_nats) == Approx(g - 0.5 * (g0 + g1)).margin(1e-11));
  }
}

TEST_CASE("grid: deficits nonnegative and window identities hold", "[concavity][property]") {
  int checked = 0;
  for (int k = 2; k <= 5; ++k)
    for (int s = 1; s <= k; ++s)
      for (double beta : {0.02, 0.05, 0.1, 0.2, std::min(0.3, 0.9 / k)})
        for (double eps : {1e-2, 5e-3, 2.5e-3}) {
          const ConcavityReport r = verify_concavity({k, s, beta}, eps);
          if (!r.feasible) continue;
          ++checked;
          CHECK(r.nonnegative());
          CHECK(r.same_average_ok());
          CHECK(r.right_tail_zero());
        }
  // 210 grid points less the 15 with k = 5, beta = 0.2.
  CHECK(checked == 195);
}

TEST_CASE("infeasible canonical points are reported, not evaluated", "[concavity]") {
  // k = 5, beta = 0.2 leaves negative mass on the all-zero input.
  const ConcavityReport r = verify_concavity({5, 1, 0.2}, 0.01);
  CHECK_FALSE(r.feasible);
  CHECK(thrown_kind([] { canonical_measure({5, 1, 0.2}, 0.01); }) == ErrorKind::out_of_range);
}

TEST_CASE("outside the window", "[concavity]") {
  // Players 1 and 2 one time unit apart.
  const InputDistribution mu = staggered({0.08, 0.08 * std::exp(1.0), 0.3});
  const OutsideChecks o = outside_window_checks(mu, 2, 0.05);
  CHECK(o.right_zero);
  CHECK(o.left_nonnegative);
  REQUIRE(o.gap_checked);
  CHECK(o.gap_length == Approx(1.0));
  CHECK(o.bound_ext == Approx((1 - std::exp(-0.5)) * mu.zero_mass() * mu.basis_mass(1) / 2 * 0.0025).epsilon(1e-12));
  CHECK(o.gap_ok);

  const OutsideChecks first = outside_window_checks(mu, 1, 0.05);
  CHECK_FALSE(first.gap_checked);
  CHECK_FALSE(first.gap_skip_reason.empty());
  CHECK(thrown_kind([] { outside_window_checks(staggered({0.3, 0.1, 0.2}), 1, 0.01); }) == ErrorKind::invalid_argument);
}

TEST_CASE("merging the players after the sender keeps the external deficit", "[concavity]") {
  struct Case {
    std::vector<double> basis;
    int s, keep;
  };
  for (const Case& c : {Case{{0.08, 0.12, 0.12, 0.25}, 2, 3}, Case{{0.1, 0.15, 0.2, 0.3}, 3, 3},
                        Case{{0.1, 0.15, 0.25, 0.3}, 2, 2}}) {
    const InputDistribution mu = staggered(c.basis);
    const double full = window_deficit(mu, c.s - 1, 0.01).first;
    const double merged = window_deficit(keep_first_players(mu, c.keep), c.s - 1, 0.01).first;
    CHECK(full == Approx(merged).margin(1e-11));
  }
  const InputDistribution mu = staggered({0.1, 0.15, 0.2, 0.3});
  const InputDistribution m = keep_first_players(mu, 2);
  CHECK(m.players() == 2);
  CHECK(m.zero_mass() == Approx(mu.zero_mass() + 0.5));
}
