#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "andic/signals.hpp"
#include "support.hpp"

using namespace andic;
using Catch::Approx;

namespace {

InputDistribution random_measure(int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.02, 1.0);
  std::vector<double> w(static_cast<std::size_t>(k) + 2);
  for (double& v : w) v = u(rng);
  return InputDistribution::normalized(k, w);
}

double h2(double p) { return binary_entropy(p); }

}  // namespace

TEST_CASE("Bayes update by hand", "[signals]") {
  const InputDistribution mu(2, {0.3, 0.2, 0.4, 0.1});
  const Signal b = make_signal(0, 0.8, 0.3);
  // Pr[B=0] = 0.3*0.8 + 0.2*0.3 + 0.4*0.8 + 0.1*0.3 = 0.65
  CHECK(branch_probability(mu, b, 0) == Approx(0.65));
  const auto post = posterior(mu, b, 0);
  CHECK(post.zero_mass() == Approx(0.24 / 0.65));
  CHECK(post.basis_mass(0) == Approx(0.06 / 0.65));
  CHECK(post.basis_mass(1) == Approx(0.32 / 0.65));
  CHECK(post.ones_mass() == Approx(0.03 / 0.65));
}

TEST_CASE("posteriors average back to the prior", "[signals][property]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + trial % 4;
    const auto mu = random_measure(k, rng);
    const Signal b = make_signal(trial % k, u(rng), u(rng));
    const double p0 = branch_probability(mu, b, 0);
    const auto m0 = posterior(mu, b, 0), m1 = posterior(mu, b, 1);
    for (std::size_t x = 0; x < mu.size(); ++x)
      CHECK(p0 * m0.mass(x) + (1 - p0) * m1.mass(x) == Approx(mu.mass(x)).margin(1e-14));
  }
}

TEST_CASE("conditioning on an impossible value", "[signals]") {
  const InputDistribution mu(2, {0.5, 0.0, 0.5, 0.0});
  const Signal b = make_signal(0, 1.0, 0.0);  // player 1 always holds 0
  CHECK(thrown_kind([&] { posterior(mu, b, 1); }) == ErrorKind::conditioning);
  CHECK(thrown_kind([] { make_signal(0, 1.5, 0.0); }) == ErrorKind::invalid_argument);
  CHECK(thrown_kind([&] { branch_probability(mu, Signal{2, 0.5, 0.5}, 0); }) == ErrorKind::invalid_argument);
}

TEST_CASE("information revealed by a signal", "[signals]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 2 + trial % 3;
    const auto mu = random_measure(k, rng);
    const int s = trial % k;
    const Signal b = make_signal(s, u(rng), u(rng));
    // B depends on X only through X_s: I(B; X) = h(Pr[B=0]) - E h(Pr[B=0 | X_s]).
    const double q = mu.prob_one(s);
    const double ext = h2(branch_probability(mu, b, 0)) - (1 - q) * h2(b.p0_given_0) - q * h2(b.p0_given_1);
    CHECK(signal_info_external(mu, b) == Approx(ext).margin(1e-12));

    // Same identity inside each slice X_i = v, summed over players.
    double in = 0.0;
    for (int i = 0; i < k; ++i) {
      if (i == s) continue;
      for (int v = 0; v < 2; ++v) {
        double w = 0.0, w_s1 = 0.0;
        for (std::size_t x = 0; x < mu.size(); ++x) {
          if (mu.bit(x, i) != (v == 1)) continue;
          w += mu.mass(x);
          if (mu.bit(x, s)) w_s1 += mu.mass(x);
        }
        if (w <= 0) continue;
        const double r = w_s1 / w;
        const double pb0 = (1 - r) * b.p0_given_0 + r * b.p0_given_1;
        in += w * (h2(pb0) - (1 - r) * h2(b.p0_given_0) - r * h2(b.p0_given_1));
      }
    }
    CHECK(signal_info_internal(mu, b) == Approx(in).margin(1e-12));
  }
}

TEST_CASE("weak signals are unbiased and eps-weak", "[signals][property]") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 2 + trial % 4;
    const auto mu = random_measure(k, rng);
    const double eps = 0.01 * (1 + trial % 7);
    const Signal b = WeakSignal{trial % k, eps}.induced(mu);
    const auto c = classify(mu, b);
    CHECK(c.unbiased);
    CHECK(c.weakness <= eps + 1e-15);
    CHECK(branch_probability(mu, b, 0) == Approx(0.5).margin(1e-15));
  }
}

TEST_CASE("classifier examples", "[signals]") {
  const InputDistribution thirds(2, {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0});
  const auto reveal = classify(thirds, make_signal(0, 1.0, 0.0));
  CHECK_FALSE(reveal.unbiased);
  CHECK(reveal.weakness == 1.0);

  // On (0.3, 0.2, 0.4, 0.1) the B = 1 posterior puts 00 below 10.
  const InputDistribution mu(2, {0.3, 0.2, 0.4, 0.1});
  CHECK_FALSE(classify(mu, make_signal(0, 0.9, 0.1)).noncrossing);
  CHECK(classify(mu, make_signal(0, 0.55, 0.45)).noncrossing);
  CHECK(classify(mu, make_signal(0, 0.5, 0.5)).weakness == 0.0);
}

TEST_CASE("split reaches the requested targets", "[signals]") {
  const InputDistribution mu(3, {0.2, 0.1, 0.25, 0.3, 0.15});
  const Signal b = make_signal(1, 0.9, 0.2);
  const auto e0 = posterior(mu, b, 0), e1 = posterior(mu, b, 1);
  auto mix = [&](double a) {
    std::vector<double> m(mu.size());
    for (std::size_t x = 0; x < m.size(); ++x) m[x] = (1 - a) * e0.mass(x) + a * e1.mass(x);
    return InputDistribution::normalized(3, m);
  };
  const auto rho = mix(0.5), rho0 = mix(0.2), rho1 = mix(0.9);
  const Signal s = split(mu, b, rho, rho0, rho1);
  CHECK(s.sender == 1);
  const auto got0 = posterior(rho, s, 0), got1 = posterior(rho, s, 1);
  CHECK(statistical_distance(got0, rho0) < 1e-12);
  CHECK(statistical_distance(got1, rho1) < 1e-12);
  CHECK(branch_probability(rho, s, 0) == Approx((0.9 - 0.5) / (0.9 - 0.2)));

  CHECK(thrown_kind([&] { split(mu, b, mix(0.95), rho0, rho1); }) == ErrorKind::splitting_infeasible);
  const InputDistribution off(3, {0.2, 0.2, 0.2, 0.2, 0.2});
  CHECK(thrown_kind([&] { split(mu, b, off, rho0, rho1); }) == ErrorKind::splitting_infeasible);
  // No split at all: rho is both targets.
  const Signal none = split(mu, b, rho, rho, rho);
  CHECK(none.p0_given_0 == none.p0_given_1);
}

TEST_CASE("simulation trivial cases", "[signals]") {
  std::mt19937_64 rng(1);
  const InputDistribution mu(2, {0.3, 0.2, 0.4, 0.1});
  const auto silent = simulate_signal(mu, make_signal(0, 0.5, 0.5), 0.05, rng);
  CHECK(silent.steps.empty());
  CHECK(silent.terminal == mu);

  const Signal weak = WeakSignal{1, 0.04}.induced(mu);
  const auto one = simulate_signal(mu, weak, 0.05, rng);
  REQUIRE(one.steps.size() == 1);
  CHECK(one.steps[0].signal.p0_given_0 == weak.p0_given_0);
  CHECK(one.terminal == posterior(mu, weak, one.terminal_branch));
}

TEST_CASE("every walk step is unbiased, non-crossing and eps-weak", "[signals][property]") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    const int k = 2 + trial % 3;
    const auto mu = random_measure(k, rng);
    const Signal b = make_signal(trial % k, u(rng), u(rng));
    const double eps = 0.1;
    for (int rep = 0; rep < 3; ++rep) {
      const auto trace = simulate_signal(mu, b, eps, rng);
      InputDistribution at = mu;
      for (const auto& step : trace.steps) {
        const auto c = classify(at, step.signal);
        CHECK(c.unbiased);
        CHECK(c.noncrossing);
        CHECK(c.weakness <= eps * (1 + 1e-12));
        CHECK(statistical_distance(posterior(at, step.signal, step.bit), step.posterior) < 1e-9);
        at = step.posterior;
      }
      REQUIRE(trace.terminal_branch >= 0);
      CHECK(statistical_distance(trace.terminal, posterior(mu, b, trace.terminal_branch)) < 1e-9);
    }
  }
}

TEST_CASE("audit is independent of the worker count", "[signals]") {
  const InputDistribution mu(2, {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0});
  const Signal reveal = make_signal(0, 1.0, 0.0);
  const auto a = audit_simulation(mu, reveal, 0.1, 300, 99, 1);
  const auto b = audit_simulation(mu, reveal, 0.1, 300, 99, 3);
  CHECK(a.ended0 == b.ended0);
  CHECK(a.total_steps == b.total_steps);
  CHECK(a.bad_steps == 0);
  CHECK(a.exact_p0 == Approx(2.0 / 3.0));
  // 300 draws: five standard deviations is about 0.14.
  CHECK(a.tv < 0.14);
}

TEST_CASE("step cap raises", "[signals]") {
  std::mt19937_64 rng(1);
  const InputDistribution mu(2, {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0});
  SimulationOptions opt;
  opt.max_steps = 5;
  CHECK(thrown_kind([&] { simulate_signal(mu, make_signal(0, 1.0, 0.0), 0.05, rng, opt); }) ==
        ErrorKind::non_termination);
}

TEST_CASE("signal JSON uses one-based players", "[signals]") {
  const nlohmann::json j = make_signal(0, 0.55, 0.45);
  CHECK(j["sender"] == 1);
  const Signal back = j.get<Signal>();
  CHECK(back.sender == 0);
  CHECK(back.p0_given_1 == 0.45);
  CHECK(thrown_kind([] { nlohmann::json{{"sender", 1}}.get<Signal>(); }) == ErrorKind::parse);
}
