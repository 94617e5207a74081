#pragma once

// Maximizing the buzzers cost over input distributions on a face of the
// support simplex: a grid scan followed by a projected Nelder-Mead search.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "andic/buzzers.hpp"
#include "andic/errors.hpp"
#include "andic/measures.hpp"

namespace andic {

/// Which support points are forced to zero mass.
struct SupportPattern {
  int k = 2;
  std::vector<bool> frozen;  // by support index

  explicit SupportPattern(int players = 2)
      : k(players), frozen(InputDistribution::support_size(players), false) {
    if (players < 2) fail(ErrorKind::invalid_argument, "player count must be >= 2");
  }

  /// Comma-separated labels, e.g. "11" or "000,111". k comes from the
  /// label length unless `players` is positive.
  static SupportPattern parse(const std::string& zeros, int players = 0) {
    std::vector<InputLabel> labels;
    std::stringstream in(zeros);
    std::string item;
    while (std::getline(in, item, ',')) {
      if (item.empty()) continue;
      labels.push_back(InputLabel::parse(item));
    }
    int k = players;
    for (const auto& l : labels) {
      if (k <= 0) k = l.players();
      if (l.players() != k) fail(ErrorKind::invalid_argument, "zero label " + l.str() + " has the wrong length");
    }
    if (k <= 0) k = 2;
    SupportPattern p(k);
    for (const auto& l : labels) p.frozen[InputDistribution::index_of(l)] = true;
    if (p.free_indices().empty()) fail(ErrorKind::invalid_argument, "support pattern leaves no free mass");
    return p;
  }

  std::vector<std::size_t> free_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < frozen.size(); ++i)
      if (!frozen[i]) out.push_back(i);
    return out;
  }

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < frozen.size(); ++i) {
      if (!frozen[i]) continue;
      if (!s.empty()) s += ',';
      s += InputDistribution::label_at(k, i).str();
    }
    return s;
  }

  /// Measure with the given masses on the free support points.
  InputDistribution embed(const std::vector<double>& free_mass) const {
    std::vector<double> m(frozen.size(), 0.0);
    const auto idx = free_indices();
    for (std::size_t i = 0; i < idx.size(); ++i) m[idx[i]] = std::max(0.0, free_mass[i]);
    return InputDistribution::normalized(k, std::move(m));
  }
};

enum class Objective { internal, external };

inline std::string to_string(Objective o) { return o == Objective::internal ? "internal" : "external"; }

struct OptOptions {
  int budget = 20000;        // objective evaluations, grid included
  double grid_step = 0.02;
  double tolerance = 1e-6;   // simplex size in coordinates
  int workers = 1;
  QuadOptions quad{};
  QuadOptions final_quad{1e-14, 1e-12, 20000, true};
};

struct TraceRow {
  int evaluation = 0;
  std::string phase;
  double value = 0.0;
  double best = 0.0;
};

struct OptResult {
  std::string objective;
  std::string zero_labels;
  InputDistribution argmax;
  double value = 0.0;             // bits, re-evaluated with final_quad
  double search_value = 0.0;      // same point under the search tolerance
  double grid_step = 0.0;         // step actually used after budget coarsening
  int grid_points = 0;
  int evaluations = 0;
  int iterations = 0;
  double simplex_size = 0.0;
  std::string status;             // "converged" or "budget_exhausted"
  std::vector<TraceRow> trace;

  double requadrature_shift() const { return std::abs(value - search_value); }
};

inline void to_json(nlohmann::json& j, const OptResult& r) {
  j = nlohmann::json{{"objective", r.objective},
                     {"zero", r.zero_labels},
                     {"argmax", r.argmax},
                     {"value_bits", r.value},
                     {"search_value_bits", r.search_value},
                     {"requadrature_shift", r.requadrature_shift()},
                     {"grid_step", r.grid_step},
                     {"grid_points", r.grid_points},
                     {"evaluations", r.evaluations},
                     {"iterations", r.iterations},
                     {"simplex_size", r.simplex_size},
                     {"status", r.status}};
}

inline double objective_value(const InputDistribution& mu, Objective o, const QuadOptions& quad = {}) {
  const ICReport r = information_cost(mu, quad);
  return o == Objective::internal ? r.internal_bits : r.external_bits;
}

namespace detail {

inline double binomial(int n, int r) {
  double c = 1.0;
  for (int i = 1; i <= r; ++i) c = c * (n - r + i) / i;
  return c;
}

// All ways to write n as an ordered sum of d nonnegative parts.
inline std::vector<std::vector<int>> compositions(int n, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(d), 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == d - 1) {
      cur[static_cast<std::size_t>(pos)] = left;
      out.push_back(cur);
      return;
    }
    for (int v = left; v >= 0; --v) {
      cur[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, n);
  return out;
}

// Euclidean projection onto the probability simplex.
inline std::vector<double> project_to_simplex(const std::vector<double>& v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(0.0, v[i] - theta);
  return out;
}

template <class F>
void parallel_for(std::size_t n, int workers, F&& body) {
  const std::size_t w = static_cast<std::size_t>(std::max(1, workers));
  if (w == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += w) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Grid scan on the free face, then Nelder-Mead with every trial point
/// projected back onto the simplex. Zero masses are evaluated directly, so
/// no clipping away from the boundary is needed.
inline OptResult maximize(const SupportPattern& pattern, Objective objective, const OptOptions& opt = {}) {
  if (opt.budget < 1) fail(ErrorKind::invalid_argument, "budget must be positive");
  if (!(opt.grid_step > 0.0 && opt.grid_step <= 1.0)) fail(ErrorKind::invalid_argument, "grid step must lie in (0, 1]");
  if (!(opt.tolerance > 0.0)) fail(ErrorKind::invalid_argument, "tolerance must be positive");

  const auto idx = pattern.free_indices();
  const int d = static_cast<int>(idx.size());
  OptResult res;
  res.objective = to_string(objective);
  res.zero_labels = pattern.str();

  int evals = 0;
  double best = -1.0;
  std::vector<double> best_x;
  auto f = [&](const std::vector<double>& x) { return objective_value(pattern.embed(x), objective, opt.quad); };
  auto record = [&](const std::string& phase, double v) {
    ++evals;
    best = std::max(best, v);
    res.trace.push_back({evals, phase, v, best});
  };

  // Grid, coarsened until it uses at most half the budget.
  int n = std::max(1, static_cast<int>(std::lround(1.0 / opt.grid_step)));
  const double grid_share = d == 1 ? opt.budget : std::max(1, opt.budget / 2);
  while (n > 1 && detail::binomial(n + d - 1, d - 1) > grid_share) --n;
  const auto grid = detail::compositions(n, d);
  std::vector<double> values(grid.size());
  detail::parallel_for(grid.size(), opt.workers, [&](std::size_t i) {
    std::vector<double> x(grid[i].begin(), grid[i].end());
    for (double& c : x) c /= n;
    values[i] = f(x);
  });
  std::size_t arg = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    record("grid", values[i]);
    if (values[i] > values[arg]) arg = i;
  }
  res.grid_step = 1.0 / n;
  res.grid_points = static_cast<int>(grid.size());
  best_x.assign(grid[arg].begin(), grid[arg].end());
  for (double& c : best_x) c /= n;
  double best_v = values[arg];

  // Nelder-Mead on the full free vector; projection keeps it on the face.
  bool converged = d == 1;
  int iterations = 0;
  double size = 0.0;
  if (d > 1) {
    struct Vertex {
      std::vector<double> x;
      double v;
    };
    auto eval = [&](std::vector<double> x, const std::string& phase) {
      x = detail::project_to_simplex(x);
      const double v = f(x);
      record(phase, v);
      return Vertex{std::move(x), v};
    };
    std::vector<Vertex> simplex{{best_x, best_v}};
    const double h = res.grid_step;
    // Step toward every face vertex except the one carrying the most mass,
    // which keeps the starting simplex nondegenerate.
    const auto heavy = static_cast<std::size_t>(std::max_element(best_x.begin(), best_x.end()) - best_x.begin());
    for (std::size_t i = 0; i < best_x.size(); ++i) {
      if (i == heavy) continue;
      std::vector<double> x = best_x;
      for (double& c : x) c *= 1.0 - h;
      x[i] += h;
      simplex.push_back(eval(x, "refine"));
    }
    auto by_value = [](const Vertex& a, const Vertex& b) { return a.v > b.v; };
    auto spread = [&] {
      double s = 0.0;
      for (const auto& vx : simplex)
        for (std::size_t j = 0; j < vx.x.size(); ++j) s = std::max(s, std::abs(vx.x[j] - simplex[0].x[j]));
      return s;
    };
    auto combine = [](const std::vector<double>& a, const std::vector<double>& b, double t) {
      std::vector<double> out(a.size());
      for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] + t * (b[j] - a[j]);
      return out;
    };
    while (true) {
      std::stable_sort(simplex.begin(), simplex.end(), by_value);
      size = spread();
      if (size < opt.tolerance) {
        converged = true;
        break;
      }
      if (evals + d + 1 > opt.budget) break;
      ++iterations;
      std::vector<double> centroid(static_cast<std::size_t>(d), 0.0);
      for (std::size_t v = 0; v + 1 < simplex.size(); ++v)
        for (int j = 0; j < d; ++j) centroid[static_cast<std::size_t>(j)] += simplex[v].x[static_cast<std::size_t>(j)];
      for (double& c : centroid) c /= static_cast<double>(simplex.size() - 1);
      Vertex& worst = simplex.back();
      const Vertex reflected = eval(combine(centroid, worst.x, -1.0), "refine");
      if (reflected.v > simplex.front().v) {
        const Vertex expanded = eval(combine(centroid, worst.x, -2.0), "refine");
        worst = expanded.v > reflected.v ? expanded : reflected;
        continue;
      }
      if (reflected.v > simplex[simplex.size() - 2].v) {
        worst = reflected;
        continue;
      }
      const bool outside = reflected.v > worst.v;
      const Vertex contracted = eval(combine(centroid, worst.x, outside ? -0.5 : 0.5), "refine");
      if (contracted.v > std::max(worst.v, outside ? reflected.v : worst.v)) {
        worst = contracted;
        continue;
      }
      for (std::size_t v = 1; v < simplex.size(); ++v)
        simplex[v] = eval(combine(simplex[0].x, simplex[v].x, 0.5), "refine");
    }
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    best_x = simplex[0].x;
    best_v = simplex[0].v;
  }

  res.argmax = pattern.embed(best_x);
  res.search_value = best_v;
  res.value = objective_value(res.argmax, objective, opt.final_quad);
  ++evals;
  res.trace.push_back({evals, "final", res.value, std::max(best, res.value)});
  res.evaluations = evals;
  res.iterations = iterations;
  res.simplex_size = size;
  res.status = converged ? "converged" : "budget_exhausted";
  return res;
}

inline OptResult maximize_internal(const SupportPattern& pattern, const OptOptions& opt = {}) {
  return maximize(pattern, Objective::internal, opt);
}

inline OptResult maximize_external(const SupportPattern& pattern, const OptOptions& opt = {}) {
  return maximize(pattern, Objective::external, opt);
}

}  // namespace andic
