#pragma once

// Probability objects on the k-party input cube and the discrete
// information functionals (entropy, divergence, mutual information,
// statistical distance) used by every other header.
//
// Everything is computed in nats; the *_bits / unsuffixed entry points
// divide by ln 2 at the boundary.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "andic/errors.hpp"

namespace andic {

inline constexpr double kLn2 = 0.693147180559945309417232121458176568;

// Masses below this are exact zeros inside log computations.
inline constexpr double kZeroMass = 1e-15;

// Allowed deviation of a distribution's total mass from 1.
inline constexpr double kSumTolerance = 1e-12;

inline constexpr double nats_to_bits(double nats) { return nats / kLn2; }
inline constexpr double bits_to_nats(double bits) { return bits * kLn2; }

/// -p ln p with the 0 ln 0 = 0 convention.
inline double neg_xlogx(double p) {
  return p > kZeroMass ? -p * std::log(p) : 0.0;
}

/// Binary entropy in bits.
inline double binary_entropy(double p) {
  return nats_to_bits(neg_xlogx(p) + neg_xlogx(1.0 - p));
}

/// A k-bit input; position i holds player i's private bit (player 1 leftmost
/// in the string form).
class InputLabel {
 public:
  InputLabel() = default;
  explicit InputLabel(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    if (bits_.size() < 2) fail(ErrorKind::invalid_argument, "input label needs k >= 2 bits");
    for (auto b : bits_)
      if (b > 1) fail(ErrorKind::invalid_argument, "input label bits must be 0 or 1");
  }

  static InputLabel parse(const std::string& text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char c : text) {
      if (c != '0' && c != '1') fail(ErrorKind::parse, "bad input label '" + text + "'");
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return InputLabel(std::move(bits));
  }

  int players() const { return static_cast<int>(bits_.size()); }
  bool operator[](int player) const { return bits_[static_cast<std::size_t>(player)] != 0; }
  int ones() const { return static_cast<int>(std::count(bits_.begin(), bits_.end(), 1)); }

  std::string str() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
  }

  bool operator==(const InputLabel&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Probability measure on inputs restricted to {0, e_1, ..., e_k, 1}.
///
/// Masses are stored densely by support index: 0 is the all-zero input,
/// 1..k are the basis vectors e_1..e_k, and k+1 is the all-ones input.
/// For k = 2 these four labels are the whole cube.
class InputDistribution {
 public:
  InputDistribution() = default;

  InputDistribution(int k, std::vector<double> masses) : k_(k), mass_(std::move(masses)) {
    if (k_ < 2) fail(ErrorKind::invalid_argument, "player count must be >= 2");
    if (mass_.size() != support_size(k_))
      fail(ErrorKind::invalid_distribution, "expected k+2 masses");
    double total = 0.0;
    for (double m : mass_) {
      if (!(m >= 0.0) || !std::isfinite(m))
        fail(ErrorKind::invalid_distribution, "masses must be finite and nonnegative");
      total += m;
    }
    if (std::abs(total - 1.0) > kSumTolerance)
      fail(ErrorKind::invalid_distribution, "masses sum to " + std::to_string(total) + ", not 1");
  }

  /// Rescales nonnegative weights to total mass 1.
  static InputDistribution normalized(int k, std::vector<double> weights) {
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) fail(ErrorKind::invalid_distribution, "weights have zero total");
    for (double& w : weights) w /= total;
    return InputDistribution(k, std::move(weights));
  }

  /// Uniform measure on e_1..e_k.
  static InputDistribution uniform_on_basis(int k) {
    std::vector<double> m(support_size(k), 0.0);
    for (int i = 0; i < k; ++i) m[basis_index(i)] = 1.0 / k;
    return InputDistribution(k, std::move(m));
  }

  static constexpr std::size_t support_size(int k) { return static_cast<std::size_t>(k) + 2; }
  static constexpr std::size_t zero_index() { return 0; }
  static constexpr std::size_t basis_index(int player) { return static_cast<std::size_t>(player) + 1; }
  static constexpr std::size_t ones_index(int k) { return static_cast<std::size_t>(k) + 1; }

  /// Bit of `player` in the label at support index `idx`.
  static constexpr bool bit(int k, std::size_t idx, int player) {
    if (idx == 0) return false;
    if (idx == ones_index(k)) return true;
    return idx == basis_index(player);
  }

  static InputLabel label_at(int k, std::size_t idx) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < k; ++i) bits[static_cast<std::size_t>(i)] = bit(k, idx, i) ? 1 : 0;
    return InputLabel(std::move(bits));
  }

  /// Support index of a label; labels outside {0, e_i, 1} violate the
  /// support assumption (only possible for k >= 3).
  static std::size_t index_of(const InputLabel& label) {
    const int k = label.players();
    const int ones = label.ones();
    if (ones == 0) return zero_index();
    if (ones == k) return ones_index(k);
    if (ones == 1) {
      for (int i = 0; i < k; ++i)
        if (label[i]) return basis_index(i);
    }
    fail(ErrorKind::assumption_violation,
         "label " + label.str() + " is outside the support {0, e_1..e_k, 1}");
  }

  int players() const { return k_; }
  std::size_t size() const { return mass_.size(); }
  std::span<const double> masses() const { return mass_; }
  double mass(std::size_t idx) const { return mass_[idx]; }
  double mass(const InputLabel& label) const {
    if (label.players() != k_) fail(ErrorKind::invalid_argument, "label has wrong length");
    return mass_[index_of(label)];
  }
  double basis_mass(int player) const { return mass_[basis_index(player)]; }
  double zero_mass() const { return mass_[zero_index()]; }
  double ones_mass() const { return mass_[ones_index(k_)]; }
  InputLabel label(std::size_t idx) const { return label_at(k_, idx); }
  bool bit(std::size_t idx, int player) const { return bit(k_, idx, player); }

  /// Pr[X_player = 1].
  double prob_one(int player) const {
    return basis_mass(player) + ones_mass();
  }

  /// The measure conditioned on X != 1.
  InputDistribution without_all_ones() const {
    std::vector<double> m = mass_;
    m[ones_index(k_)] = 0.0;
    return normalized(k_, std::move(m));
  }

  bool operator==(const InputDistribution&) const = default;

 private:
  int k_ = 0;
  std::vector<double> mass_;
};

/// Throws invalid_distribution unless p is nonnegative with total mass 1.
inline void require_distribution(std::span<const double> p) {
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v))
      fail(ErrorKind::invalid_distribution, "negative or non-finite probability");
    total += v;
  }
  if (std::abs(total - 1.0) > kSumTolerance)
    fail(ErrorKind::invalid_distribution, "probabilities sum to " + std::to_string(total));
}

inline double entropy_nats(std::span<const double> p) {
  require_distribution(p);
  double h = 0.0;
  for (double v : p) h += neg_xlogx(v);
  return h;
}

/// Shannon entropy in bits.
inline double entropy(std::span<const double> p) { return nats_to_bits(entropy_nats(p)); }

inline double divergence_nats(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) fail(ErrorKind::invalid_argument, "divergence of different-size distributions");
  require_distribution(p);
  require_distribution(q);
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= kZeroMass) continue;
    if (q[i] <= kZeroMass)
      fail(ErrorKind::absolute_continuity, "p is not absolutely continuous with respect to q");
    d += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(d, 0.0);
}

/// Kullback-Leibler divergence D(p || q) in bits.
inline double divergence(std::span<const double> p, std::span<const double> q) {
  return nats_to_bits(divergence_nats(p, q));
}

/// Row-major joint distribution of two discrete variables.
struct Joint2D {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
};

inline double mutual_information_nats(const Joint2D& joint) {
  if (joint.values.size() != joint.rows * joint.cols)
    fail(ErrorKind::invalid_argument, "joint table has wrong shape");
  require_distribution(joint.values);
  std::vector<double> row(joint.rows, 0.0), col(joint.cols, 0.0);
  for (std::size_t r = 0; r < joint.rows; ++r)
    for (std::size_t c = 0; c < joint.cols; ++c) {
      row[r] += joint(r, c);
      col[c] += joint(r, c);
    }
  double hr = 0.0, hc = 0.0, hj = 0.0;
  for (double v : row) hr += neg_xlogx(v);
  for (double v : col) hc += neg_xlogx(v);
  for (double v : joint.values) hj += neg_xlogx(v);
  const double mi = hr + hc - hj;
  // Tiny negative values are rounding noise.
  return mi < 0.0 && mi > -1e-12 ? 0.0 : mi;
}

/// I(row; col) in bits.
inline double mutual_information(const Joint2D& joint) {
  return nats_to_bits(mutual_information_nats(joint));
}

/// Half the L1 distance between two measures on the same label space.
inline double statistical_distance(const InputDistribution& mu, const InputDistribution& nu) {
  if (mu.players() != nu.players())
    fail(ErrorKind::invalid_argument, "statistical distance of measures with different k");
  double d = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) d += std::abs(mu.mass(i) - nu.mass(i));
  return 0.5 * d;
}

inline double entropy_nats(const InputDistribution& mu) {
  double h = 0.0;
  for (double v : mu.masses()) h += neg_xlogx(v);
  return h;
}

/// H(X | X_player) in nats; X_player is a function of X.
inline double conditional_entropy_nats(const InputDistribution& mu, int player) {
  const double p1 = mu.prob_one(player);
  return entropy_nats(mu) - neg_xlogx(p1) - neg_xlogx(1.0 - p1);
}

// JSON: {"k": 3, "mass": {"000": 0.4, "100": 0.2, ...}}, player 1 leftmost.
inline void to_json(nlohmann::json& j, const InputDistribution& mu) {
  nlohmann::json mass = nlohmann::json::object();
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu.mass(i) > 0.0) mass[mu.label(i).str()] = mu.mass(i);
  j = nlohmann::json{{"k", mu.players()}, {"mass", mass}};
}

inline void from_json(const nlohmann::json& j, InputDistribution& mu) {
  if (!j.is_object() || !j.contains("k") || !j.contains("mass") || !j["k"].is_number_integer() ||
      !j["mass"].is_object())
    fail(ErrorKind::parse, "measure JSON needs integer \"k\" and object \"mass\"");
  const int k = j["k"].get<int>();
  if (k < 2) fail(ErrorKind::invalid_argument, "player count must be >= 2");
  std::vector<double> m(InputDistribution::support_size(k), 0.0);
  for (const auto& [key, value] : j["mass"].items()) {
    if (!value.is_number()) fail(ErrorKind::parse, "mass of " + key + " is not a number");
    const InputLabel label = InputLabel::parse(key);
    if (label.players() != k) fail(ErrorKind::parse, "label " + key + " does not have k bits");
    m[InputDistribution::index_of(label)] += value.get<double>();
  }
  mu = InputDistribution(k, std::move(m));
}

inline InputDistribution parse_measure(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, std::string("malformed measure JSON: ") + e.what());
  }
  return j.get<InputDistribution>();
}

}  // namespace andic
