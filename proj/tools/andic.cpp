// Command-line front end for the andic library.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "andic/andic.hpp"

using nlohmann::json;

namespace {

int default_workers() {
  if (const char* env = std::getenv("ANDIC_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return w;
    } catch (const std::exception&) {
    }
    andic::fail(andic::ErrorKind::invalid_argument, std::string("ANDIC_WORKERS must be a positive integer, got ") + env);
  }
  return 1;
}

std::string read_file(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path);
  if (!in) andic::fail(andic::ErrorKind::parse, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), {}};
}

andic::InputDistribution load_measure(const std::string& path) { return andic::parse_measure(read_file(path)); }

// Writes to the --output file, or stdout when none was given.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) andic::fail(andic::ErrorKind::invalid_argument, "cannot write " + path);
    }
  }
  std::ostream& out() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void write_json(const std::string& path, const json& j) {
  Sink s(path);
  s.out() << j.dump(2) << '\n';
}

std::string num(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

struct Common {
  std::string output;
  int workers = 1;
  double abs_tol = andic::QuadOptions{}.abs_tol;
  double rel_tol = andic::QuadOptions{}.rel_tol;
  andic::QuadOptions quad() const {
    andic::QuadOptions q;
    q.abs_tol = abs_tol;
    q.rel_tol = rel_tol;
    return q;
  }
};

void add_common(CLI::App* app, Common& c, bool quadrature) {
  app->add_option("-o,--output", c.output, "Output file (default stdout)");
  app->add_option("--workers", c.workers, "Worker threads (default $ANDIC_WORKERS or 1)")->check(CLI::PositiveNumber);
  if (quadrature) {
    app->add_option("--abs-tol", c.abs_tol, "Absolute quadrature tolerance")->capture_default_str();
    app->add_option("--rel-tol", c.rel_tol, "Relative quadrature tolerance")->capture_default_str();
  }
}

// ---- subcommands ----

void run_ic(const std::string& measure, const Common& c) {
  const auto mu = load_measure(measure);
  const auto r = andic::information_cost(mu, c.quad());
  json j = r;
  j["measure"] = mu;
  write_json(c.output, j);
}

void run_uniform(const std::vector<int>& ks, const std::string& format, const Common& c) {
  json rows = json::array();
  Sink s(c.output);
  if (format == "csv") s.out() << "k,closed_external_bits,quad_external_bits,closed_internal_bits,quad_internal_bits,max_abs_diff\n";
  for (int k : ks) {
    const auto [ext, in] = andic::closed_form_uniform(k);
    const auto r = andic::information_cost(andic::InputDistribution::uniform_on_basis(k), c.quad());
    const double diff = std::max(std::abs(r.external_bits - ext), std::abs(r.internal_bits - in));
    if (format == "csv")
      s.out() << k << ',' << num(ext) << ',' << num(r.external_bits) << ',' << num(in) << ',' << num(r.internal_bits)
              << ',' << num(diff) << '\n';
    else
      rows.push_back({{"k", k},
                      {"closed_external_bits", ext},
                      {"quad_external_bits", r.external_bits},
                      {"closed_internal_bits", in},
                      {"quad_internal_bits", r.internal_bits},
                      {"max_abs_diff", diff}});
  }
  if (format != "csv") s.out() << rows.dump(2) << '\n';
}

void run_concavity(const std::vector<int>& ks, const std::vector<int>& senders, const std::vector<double>& betas,
                   const std::vector<double>& epss, const Common& c) {
  struct Job {
    int k, s;
    double beta, eps;
  };
  std::vector<Job> jobs;
  for (int k : ks)
    for (int s = 1; s <= k; ++s) {
      if (!senders.empty() && std::find(senders.begin(), senders.end(), s) == senders.end()) continue;
      for (double b : betas)
        for (double e : epss) jobs.push_back({k, s, b, e});
    }
  std::vector<andic::ConcavityReport> out(jobs.size());
  andic::detail::parallel_for(jobs.size(), c.workers, [&](std::size_t i) {
    out[i] = andic::verify_concavity({jobs[i].k, jobs[i].s, jobs[i].beta}, jobs[i].eps);
  });
  Sink sink(c.output);
  auto& o = sink.out();
  o << "k,s,beta,eps,feasible,gamma0,gamma1,ext_deficit_bits,int_deficit_bits,ratio_ext,ratio_int,"
       "taylor_ext,taylor_int,rel_err_ext,rel_err_int,nonnegative,same_average_max,right_tail_max\n";
  for (const auto& r : out) {
    o << r.canonical.k << ',' << r.canonical.s << ',' << num(r.canonical.beta) << ',' << num(r.eps) << ','
      << (r.feasible ? 1 : 0);
    if (!r.feasible) {
      o << ",,,,,,,,,,,,,\n";
      continue;
    }
    auto rel = [](double v, double ref) { return ref != 0.0 ? std::abs(v - ref) / std::abs(ref) : std::abs(v); };
    o << ',' << num(r.gamma0) << ',' << num(r.gamma1) << ',' << num(r.ext_deficit) << ',' << num(r.int_deficit) << ','
      << num(r.ratio_ext()) << ',' << num(r.ratio_int()) << ',' << num(r.taylor_ext) << ',' << num(r.taylor_int)
      << ',' << num(rel(r.ratio_ext(), r.taylor_ext)) << ',' << num(rel(r.ratio_int(), r.taylor_int)) << ','
      << (r.nonnegative() ? 1 : 0) << ',' << num(r.same_average_max) << ',' << num(r.right_tail_max) << '\n';
  }
}

andic::Signal load_signal(const std::string& text_or_path) {
  const std::string text =
      !text_or_path.empty() && text_or_path.front() == '{' ? text_or_path : read_file(text_or_path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    andic::fail(andic::ErrorKind::parse, std::string("signal JSON: ") + e.what());
  }
  return j.get<andic::Signal>();
}

void run_simulate(const std::string& measure, const std::string& signal, double eps, long traces,
                  std::uint64_t seed, int dump, double snap, const Common& c) {
  const auto mu = load_measure(measure);
  const auto b = load_signal(signal);
  andic::SimulationOptions opt;
  opt.snap = snap;
  const auto audit = andic::audit_simulation(mu, b, eps, traces, seed, c.workers, opt);
  json j = audit;
  j["seed"] = seed;
  j["eps"] = eps;
  if (dump > 0) {
    json samples = json::array();
    std::mt19937_64 rng(seed);
    for (int i = 0; i < dump; ++i) samples.push_back(andic::simulate_signal(mu, b, eps, rng, opt));
    j["sample_traces"] = samples;
  }
  write_json(c.output, j);
}

void run_discretize(const std::string& measure, double horizon, int j_from, int j_to, const Common& c) {
  const auto mu = load_measure(measure);
  const auto reference = andic::information_cost(mu, c.quad());
  const auto rows = andic::convergence_table(mu, horizon, j_from, j_to, reference);
  Sink s(c.output);
  s.out() << "j,delta,horizon,nodes,external_bits,internal_bits,external_gap,internal_gap\n";
  for (const auto& r : rows)
    s.out() << r.j << ',' << num(r.delta) << ',' << num(r.horizon) << ',' << r.nodes << ',' << num(r.external_bits)
            << ',' << num(r.internal_bits) << ',' << num(r.external_gap) << ',' << num(r.internal_gap) << '\n';
}

void run_maximize(const std::string& zero, int k, const std::string& objective, andic::OptOptions opt,
                  const std::string& trace_path, const Common& c) {
  const auto pattern = andic::SupportPattern::parse(zero, k);
  opt.workers = c.workers;
  opt.quad = c.quad();
  opt.final_quad.abs_tol = c.abs_tol / 10.0;
  opt.final_quad.rel_tol = c.rel_tol / 10.0;
  andic::OptResult r;
  if (objective == "internal")
    r = andic::maximize_internal(pattern, opt);
  else
    r = andic::maximize_external(pattern, opt);
  write_json(c.output, r);
  if (!trace_path.empty()) {
    Sink s(trace_path);
    s.out() << "evaluation,phase,value_bits,best_bits\n";
    for (const auto& t : r.trace) s.out() << t.evaluation << ',' << t.phase << ',' << num(t.value) << ',' << num(t.best) << '\n';
  }
}

int run_continuity(int pairs, int k_min, int k_max, double max_distance, std::uint64_t seed, const Common& c) {
  std::mt19937_64 rng(seed);
  const auto rows = andic::continuity_sweep(pairs, k_min, k_max, max_distance, rng);
  int violations = 0;
  for (const auto& r : rows) violations += r.ok() ? 0 : 1;
  write_json(c.output, json{{"pairs", pairs}, {"seed", seed}, {"violations", violations}, {"rows", rows}});
  return violations == 0 ? 0 : 1;
}

void print_error(andic::ErrorKind kind, const std::string& what) {
  std::cerr << json{{"error", std::string(andic::to_string(kind))}, {"message", what},
                    {"exit_code", andic::exit_code(kind)}}
                   .dump()
            << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information cost of the multiparty AND function under the buzzers protocol"};
  app.require_subcommand(1);

  Common common;
  int status = 0;
  try {
    common.workers = default_workers();
  } catch (const andic::Error& e) {
    print_error(e.kind(), e.what());
    return andic::exit_code(e.kind());
  }

  std::string measure;
  auto* ic = app.add_subcommand("ic", "Information cost report (JSON) for a measure file");
  ic->add_option("measure", measure, "Measure JSON file, or - for stdin")->required();
  add_common(ic, common, true);

  std::vector<int> uniform_ks{2, 3, 4, 5, 8};
  std::string format = "json";
  auto* uni = app.add_subcommand("uniform", "Closed forms against quadrature for the uniform basis measure");
  uni->add_option("--k", uniform_ks, "Player counts")->delimiter(',')->capture_default_str();
  uni->add_option("--format", format, "json or csv (columns: k, closed/quad external and internal, max_abs_diff)")
      ->check(CLI::IsMember({"json", "csv"}));
  add_common(uni, common, true);

  std::vector<int> conc_ks{2, 3, 4, 5}, senders;
  std::vector<double> betas{0.02, 0.05, 0.1, 0.2}, epss{1e-2, 5e-3, 2.5e-3};
  auto* conc = app.add_subcommand(
      "verify-concavity",
      "Deficit grid as CSV. Columns: k, s, beta, eps, feasible, gamma0, gamma1, ext/int deficit (bits), "
      "deficit/eps^3 ratios, eps^3 coefficients, their relative errors, nonnegative flag, max SameAverage "
      "residual, max right-tail integral");
  conc->add_option("--k", conc_ks, "Player counts")->delimiter(',')->capture_default_str();
  conc->add_option("--s", senders, "Sender positions (default all)")->delimiter(',');
  conc->add_option("--beta", betas, "Basis-mass parameters")->delimiter(',')->capture_default_str();
  conc->add_option("--eps", epss, "Perturbation sizes")->delimiter(',')->capture_default_str();
  add_common(conc, common, false);

  std::string signal;
  double eps = 0.05, snap = andic::SimulationOptions{}.snap;
  long traces = 100000;
  std::uint64_t seed = 1;
  int dump = 0;
  auto* sim = app.add_subcommand("simulate-signal", "Simulate a signal by weak steps; report the terminal law");
  sim->add_option("measure", measure, "Measure JSON file")->required();
  sim->add_option("--signal", signal, "Signal JSON (inline or file), e.g. {\"sender\":1,\"p0_given_0\":1,\"p0_given_1\":0}")
      ->required();
  sim->add_option("--eps", eps, "Step weakness")->capture_default_str();
  sim->add_option("--traces", traces, "Number of walks")->capture_default_str()->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "RNG seed")->capture_default_str();
  sim->add_option("--dump", dump, "Include this many full traces in the output")->capture_default_str();
  sim->add_option("--snap", snap, "Endpoint snapping distance")->capture_default_str();
  add_common(sim, common, false);

  double horizon = 25.0;
  int j_from = 4, j_to = 10;
  auto* disc = app.add_subcommand(
      "discretize",
      "Discretized protocol cost for delta = 2^-j as CSV. Columns: j, delta, horizon, nodes, external_bits, "
      "internal_bits, external_gap, internal_gap (gaps against quadrature)");
  disc->add_option("measure", measure, "Measure JSON file")->required();
  disc->add_option("--T", horizon, "Horizon")->capture_default_str();
  disc->add_option("--j-from", j_from, "Coarsest exponent")->capture_default_str();
  disc->add_option("--j-to", j_to, "Finest exponent")->capture_default_str();
  add_common(disc, common, true);

  std::string zero, objective = "internal", trace_path;
  int players = 0;
  andic::OptOptions opt;
  auto* maxi = app.add_subcommand("maximize", "Maximize the cost over a face of the simplex (JSON result)");
  maxi->add_option("--zero", zero, "Comma-separated labels forced to zero mass, e.g. 11");
  maxi->add_option("--k", players, "Player count when --zero is empty or ambiguous");
  maxi->add_option("--objective", objective, "internal or external")
      ->check(CLI::IsMember({"internal", "external"}))
      ->capture_default_str();
  maxi->add_option("--budget", opt.budget, "Objective evaluations")->capture_default_str();
  maxi->add_option("--grid-step", opt.grid_step, "Grid step on free coordinates")->capture_default_str();
  maxi->add_option("--tolerance", opt.tolerance, "Simplex size for convergence")->capture_default_str();
  maxi->add_option("--trace", trace_path, "Trace CSV (columns: evaluation, phase, value_bits, best_bits)");
  add_common(maxi, common, true);

  int pairs = 100, k_min = 2, k_max = 4;
  double max_distance = 0.1;
  auto* cont = app.add_subcommand("continuity-check",
                                  "Random measure pairs under one fixed protocol against 2k d + 2 h(2d)");
  cont->add_option("--pairs", pairs, "Number of pairs")->capture_default_str();
  cont->add_option("--k-min", k_min, "Smallest player count")->capture_default_str();
  cont->add_option("--k-max", k_max, "Largest player count")->capture_default_str();
  cont->add_option("--max-distance", max_distance, "Largest statistical distance")->capture_default_str();
  cont->add_option("--seed", seed, "RNG seed")->capture_default_str();
  add_common(cont, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error(andic::ErrorKind::invalid_argument, e.what());
    return andic::exit_code(andic::ErrorKind::invalid_argument);
  }

  try {
    if (*ic) run_ic(measure, common);
    if (*uni) run_uniform(uniform_ks, format, common);
    if (*conc) run_concavity(conc_ks, senders, betas, epss, common);
    if (*sim) run_simulate(measure, signal, eps, traces, seed, dump, snap, common);
    if (*disc) run_discretize(measure, horizon, j_from, j_to, common);
    if (*maxi) run_maximize(zero, players, objective, opt, trace_path, common);
    if (*cont) status = run_continuity(pairs, k_min, k_max, max_distance, seed, common);
  } catch (const andic::Error& e) {
    print_error(e.kind(), e.what());
    return andic::exit_code(e.kind());
  } catch (const std::exception& e) {
    print_error(andic::ErrorKind::invalid_argument, e.what());
    return andic::exit_code(andic::ErrorKind::invalid_argument);
  }
  return status;
}
