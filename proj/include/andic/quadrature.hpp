#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature for vector-valued integrands.
// Intervals are refined globally: the interval with the largest error
// estimate is bisected until the summed estimate meets the tolerance.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <sstream>
#include <vector>

#include "andic/errors.hpp"

namespace andic {

struct QuadOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  int max_intervals = 5000;
  bool throw_on_failure = true;
};

struct QuadResult {
  std::vector<double> value;
  double error = 0.0;  // max-norm error estimate summed over intervals
  int intervals = 0;
  int evaluations = 0;
  bool converged = true;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for Kronrod nodes 1, 3, 5 and the center.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double a, b;
  double error;
  std::vector<double> value;
  bool operator<(const Interval& o) const { return error < o.error; }
};

template <class F>
Interval gauss_kronrod(F& f, double a, double b, std::size_t dim, std::vector<double>& buf) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::vector<double> kron(dim, 0.0), gauss(dim, 0.0);
  auto accumulate = [&](int node, double x) {
    f(x, buf.data());
    for (std::size_t d = 0; d < dim; ++d) {
      kron[d] += kKronrodWeights[static_cast<std::size_t>(node)] * buf[d];
      if (node % 2 == 1) gauss[d] += kGaussWeights[static_cast<std::size_t>(node / 2)] * buf[d];
    }
  };
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kKronrodNodes[static_cast<std::size_t>(i)];
    accumulate(i, c - dx);
    accumulate(i, c + dx);
  }
  f(c, buf.data());
  for (std::size_t d = 0; d < dim; ++d) {
    kron[d] += kKronrodWeights[7] * buf[d];
    gauss[d] += kGaussWeights[3] * buf[d];
  }
  Interval iv{a, b, 0.0, std::vector<double>(dim)};
  for (std::size_t d = 0; d < dim; ++d) {
    iv.value[d] = kron[d] * h;
    iv.error = std::max(iv.error, std::abs((kron[d] - gauss[d]) * h));
  }
  return iv;
}

}  // namespace detail

/// Integrates f over [a, b]. f(t, out) writes `dim` values into out.
template <class F>
QuadResult integrate(F&& f, double a, double b, std::size_t dim, const QuadOptions& opt = {}) {
  QuadResult res;
  res.value.assign(dim, 0.0);
  if (!(b > a)) return res;
  std::vector<double> buf(dim);
  std::priority_queue<detail::Interval> heap;
  heap.push(detail::gauss_kronrod(f, a, b, dim, buf));
  res.evaluations = 15;
  double total_err = heap.top().error;

  std::vector<double> running = heap.top().value;
  // Intervals too narrow to bisect are retired with their estimate intact.
  std::vector<detail::Interval> retired;
  double retired_err = 0.0;

  auto norm = [&] {
    double n = 0.0;
    for (double v : running) n = std::max(n, std::abs(v));
    return n;
  };

  int count = 1;
  while (!heap.empty() && total_err - retired_err > std::max(opt.abs_tol, opt.rel_tol * norm())) {
    if (count >= opt.max_intervals) break;
    detail::Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) < 1e-15 * std::max({1.0, std::abs(worst.a), std::abs(worst.b)})) {
      retired_err += worst.error;
      retired.push_back(std::move(worst));
      continue;
    }
    detail::Interval left = detail::gauss_kronrod(f, worst.a, mid, dim, buf);
    detail::Interval right = detail::gauss_kronrod(f, mid, worst.b, dim, buf);
    res.evaluations += 30;
    for (std::size_t d = 0; d < dim; ++d) running[d] += left.value[d] + right.value[d] - worst.value[d];
    total_err += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
    ++count;
  }

  // Final sums are recomputed from the pieces to shed running-sum drift.
  double err = 0.0;
  auto absorb = [&](const detail::Interval& iv) {
    for (std::size_t d = 0; d < dim; ++d) res.value[d] += iv.value[d];
    err += iv.error;
  };
  for (const auto& iv : retired) absorb(iv);
  while (!heap.empty()) {
    absorb(heap.top());
    heap.pop();
  }
  res.error = err;
  res.intervals = count;
  double n = 0.0;
  for (double v : res.value) n = std::max(n, std::abs(v));
  const double target = std::max(opt.abs_tol, opt.rel_tol * n);
  res.converged = err <= target || (err - retired_err) <= target;
  if (!res.converged && opt.throw_on_failure) {
    std::ostringstream msg;
    msg << "quadrature on [" << a << ", " << b << "] did not converge: error estimate " << err
        << " > target " << target << " after " << count << " intervals";
    fail(ErrorKind::quadrature, msg.str());
  }
  return res;
}

/// Integrates f over [b, inf) through the substitution u = exp(-(t - b)).
/// f must decay at least like exp(-t) times a polynomial in t.
template <class F>
QuadResult integrate_tail(F&& f, double b, std::size_t dim, const QuadOptions& opt = {}) {
  std::vector<double> inner(dim);
  auto g = [&](double u, double* out) {
    const double t = b - std::log(u);
    if (!std::isfinite(t)) {
      std::fill(out, out + dim, 0.0);
      return;
    }
    f(t, inner.data());
    for (std::size_t d = 0; d < dim; ++d) out[d] = inner[d] / u;
  };
  return integrate(g, 0.0, 1.0, dim, opt);
}

/// Accumulates a piece into a running total.
inline void accumulate(QuadResult& total, const QuadResult& piece) {
  if (total.value.empty()) total.value.assign(piece.value.size(), 0.0);
  for (std::size_t d = 0; d < piece.value.size(); ++d) total.value[d] += piece.value[d];
  total.error += piece.error;
  total.intervals += piece.intervals;
  total.evaluations += piece.evaluations;
  total.converged = total.converged && piece.converged;
}

}  // namespace andic
