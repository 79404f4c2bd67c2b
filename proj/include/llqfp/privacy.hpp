//
// Copyright 2026 The LLQFP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Noise planning for a privacy budget and the analytic audit of the released
// coefficients.
//
// The mechanism releases v - noise, where v stacks every player's nonzero
// interaction weights (its own diagonal slot included) followed by the
// marginal benefits. Changing one player's data moves at most that player's
// row, so per-coordinate guarantees compose over at most p = 1 + max degree
// coordinates.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "llqfp/errors.hpp"
#include "llqfp/game.hpp"
#include "llqfp/network.hpp"
#include "llqfp/perturbation.hpp"
#include "llqfp/trunc_laplace.hpp"

namespace llqfp {

struct PrivacyBudget {
  double epsilon;
  double delta;
  double mu;
  std::size_t p = 1;

  PrivacyBudget(double epsilon_, double delta_, double mu_, std::size_t p_ = 1)
      : epsilon(epsilon_), delta(delta_), mu(mu_), p(p_) {
    if (!(std::isfinite(epsilon) && epsilon > 0.0)) throw ParameterError("epsilon must be > 0");
    if (!(delta > 0.0 && delta < 0.5)) throw ParameterError("delta must lie in (0, 1/2)");
    if (!(std::isfinite(mu) && mu > 0.0)) throw ParameterError("mu must be > 0");
    if (p < 1) throw ParameterError("group factor p must be >= 1");
  }
};

// lambda_min = mu / (epsilon - ln(1 - delta))
inline double min_scale(double mu, double epsilon, double delta) {
  if (!(delta < 1.0)) throw DomainError("min_scale: delta must be < 1");
  if (!(delta >= 0.0)) throw DomainError("min_scale: delta must be >= 0");
  if (!(std::isfinite(mu) && mu > 0.0)) throw ParameterError("min_scale: mu must be > 0");
  if (!(std::isfinite(epsilon) && epsilon > 0.0)) {
    throw ParameterError("min_scale: epsilon must be > 0");
  }
  return mu / (epsilon - std::log1p(-delta));
}

// a_min = max(mu, lambda ln((e^{mu/lambda} - 1) / (2 delta) + 1)). For large
// mu/lambda the logarithm is expanded as t + ln((1 - e^{-t}) / (2 delta) + e^{-t}).
inline double min_bound(double mu, double delta, double lambda) {
  if (!(std::isfinite(lambda) && lambda > 0.0)) throw ParameterError("min_bound: lambda must be > 0");
  if (!(std::isfinite(mu) && mu > 0.0)) throw ParameterError("min_bound: mu must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("min_bound: delta must lie in (0, 1)");
  const double t = mu / lambda;
  double log_term = 0.0;
  if (t <= 30.0) {
    log_term = std::log1p(std::expm1(t) / (2.0 * delta));
  } else {
    log_term = t + std::log(-std::expm1(-t) / (2.0 * delta) + std::exp(-t));
  }
  return std::max(mu, lambda * log_term);
}

inline NoiseParams plan(const PrivacyBudget& budget) {
  const double lambda = min_scale(budget.mu, budget.epsilon, budget.delta);
  return NoiseParams(min_bound(budget.mu, budget.delta, lambda), lambda);
}

enum class BoundStatus { compliant, near_violation, violation };

inline std::string_view to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::compliant: return "compliant";
    case BoundStatus::near_violation: return "near_violation";
    case BoundStatus::violation: return "violation";
  }
  return "unknown";
}

// Default relative slack for near violations: half a unit in the fourth
// significant digit, i.e. values that round to the bound.
inline constexpr double kRoundingTolerance = 5e-4;

struct BoundCheck {
  double lambda_min = 0.0;
  double a_min = 0.0;
  BoundStatus lambda_status = BoundStatus::compliant;
  BoundStatus a_status = BoundStatus::compliant;

  // Both parameters meet their bounds, allowing rounding.
  bool acceptable() const {
    return lambda_status != BoundStatus::violation && a_status != BoundStatus::violation;
  }
  bool flagged() const {
    return lambda_status != BoundStatus::compliant || a_status != BoundStatus::compliant;
  }
};

// Compares (a, lambda) with the planner bounds. The a-bound is evaluated at
// the given lambda.
inline BoundCheck check_bounds(const NoiseParams& noise, double mu, double epsilon, double delta,
                               double rounding_tolerance = kRoundingTolerance) {
  auto classify = [&](double value, double bound) {
    if (value >= bound) return BoundStatus::compliant;
    if (value >= bound * (1.0 - rounding_tolerance)) return BoundStatus::near_violation;
    return BoundStatus::violation;
  };
  BoundCheck c;
  c.lambda_min = min_scale(mu, epsilon, delta);
  c.a_min = min_bound(mu, delta, noise.lambda());
  c.lambda_status = classify(noise.lambda(), c.lambda_min);
  c.a_status = classify(noise.a(), c.a_min);
  return c;
}

// v = [g; b] with g listing, player by player, the weights g_ij for j in
// {i} union N_i in ascending j.
class MechanismInput {
 public:
  enum class Kind { diagonal, interaction, benefit };

  struct Coordinate {
    std::size_t player;  // 0-based
    std::size_t column;  // 0-based; equals player for diagonal and benefit
    Kind kind;
  };

  static MechanismInput stack(const Network& net, const Eigen::VectorXd& b) {
    if (static_cast<std::size_t>(b.size()) != net.size()) {
      throw ParameterError("stack: b has wrong dimension");
    }
    MechanismInput v;
    for (std::size_t i = 0; i < net.size(); ++i) {
      v.offsets_.push_back(v.columns_.size());
      std::vector<std::size_t> cols(net.neighbors(i).begin(), net.neighbors(i).end());
      cols.insert(std::upper_bound(cols.begin(), cols.end(), i), i);
      for (auto j : cols) {
        v.columns_.push_back(j);
        v.g_.push_back(net.weight(i, j));
      }
    }
    v.offsets_.push_back(v.columns_.size());
    v.b_ = b;
    return v;
  }

  static MechanismInput stack(const LQGame& game) { return stack(game.network(), game.b()); }

  std::size_t players() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  // m = n + sum |N_i|
  std::size_t m() const { return g_.size(); }
  // l = 2n + sum |N_i|
  std::size_t l() const { return g_.size() + players(); }

  double value(std::size_t k) const {
    return k < m() ? g_.at(k) : b_(static_cast<Eigen::Index>(k - m()));
  }

  void set_value(std::size_t k, double x) {
    if (k >= l()) throw ParameterError("mechanism coordinate out of range");
    if (k < m()) {
      g_[k] = x;
    } else {
      b_(static_cast<Eigen::Index>(k - m())) = x;
    }
  }

  Coordinate coordinate(std::size_t k) const {
    if (k >= l()) throw ParameterError("mechanism coordinate out of range");
    if (k >= m()) return {k - m(), k - m(), Kind::benefit};
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), k);
    const auto player = static_cast<std::size_t>(it - offsets_.begin()) - 1;
    const auto col = columns_[k];
    return {player, col, col == player ? Kind::diagonal : Kind::interaction};
  }

  // Stacked indices belonging to player i: its g row and b_i.
  std::vector<std::size_t> row_indices(std::size_t i) const {
    std::vector<std::size_t> out;
    for (std::size_t k = offsets_.at(i); k < offsets_.at(i + 1); ++k) out.push_back(k);
    out.push_back(m() + i);
    return out;
  }

  bool same_layout(const MechanismInput& other) const {
    return offsets_ == other.offsets_ && columns_ == other.columns_;
  }

  const std::vector<double>& g() const { return g_; }
  const Eigen::VectorXd& b() const { return b_; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> columns_;
  std::vector<double> g_;
  Eigen::VectorXd b_;
};

inline std::string_view to_string(MechanismInput::Kind k) {
  switch (k) {
    case MechanismInput::Kind::diagonal: return "diagonal";
    case MechanismInput::Kind::interaction: return "interaction";
    case MechanismInput::Kind::benefit: return "benefit";
  }
  return "unknown";
}

struct AdjacencyResult {
  bool adjacent = false;
  std::optional<std::size_t> i0;  // 1-based witness; empty when inputs coincide
  double max_gap = 0.0;
  std::vector<std::size_t> differing_players;  // 1-based
};

// Adjacent iff every player's row (g row and b_i) is equal except at most one
// player's, whose entries differ by at most mu.
inline AdjacencyResult adjacency_check(const MechanismInput& v, const MechanismInput& w, double mu) {
  if (!v.same_layout(w)) throw ParameterError("adjacency_check: stacking layouts differ");
  if (!(mu >= 0.0)) throw ParameterError("adjacency_check: mu must be >= 0");
  AdjacencyResult r;
  for (std::size_t i = 0; i < v.players(); ++i) {
    double gap = 0.0;
    for (auto k : v.row_indices(i)) gap = std::max(gap, std::abs(v.value(k) - w.value(k)));
    if (gap > 0.0) {
      r.differing_players.push_back(i + 1);
      r.max_gap = std::max(r.max_gap, gap);
    }
  }
  if (r.differing_players.size() == 1) r.i0 = r.differing_players.front();
  r.adjacent = r.differing_players.size() <= 1 && r.max_gap <= mu;
  return r;
}

// Extremal neighbor of v: player (1-based) moves every interaction weight it
// has and its benefit by sign * mu. The diagonal slot is structurally zero in
// LQ games and only moved when include_diagonal is set.
inline MechanismInput worst_case_neighbor(const MechanismInput& v, std::size_t player, double mu,
                                          double sign = 1.0, bool include_diagonal = false) {
  if (player == 0 || player > v.players()) throw DomainError("worst_case_neighbor: bad player");
  MechanismInput w = v;
  for (auto k : v.row_indices(player - 1)) {
    if (v.coordinate(k).kind == MechanismInput::Kind::diagonal && !include_diagonal) continue;
    w.set_value(k, v.value(k) + sign * mu);
  }
  return w;
}

struct CoordinateAudit {
  std::size_t index;   // 1-based position in v
  std::size_t player;  // 1-based
  std::size_t column;  // 1-based
  MechanismInput::Kind kind;
  double gap;
  // Noise on this coordinate read as a full draw from (a, lambda).
  double delta_required;
  // Diagonal slot read as w/2, i.e. (a/2, lambda/2); equal to delta_required
  // for other coordinates.
  double delta_required_halved;
  bool pass_full;
  bool pass_halved;
};

struct AuditReport {
  double epsilon = 0.0;
  double delta = 0.0;
  double mu = 0.0;
  std::size_t p = 1;
  NoiseParams noise{1.0, 1.0};
  BoundCheck bounds;
  std::optional<std::size_t> i0;
  std::vector<CoordinateAudit> coordinates;
  double composed_epsilon = 0.0;
  double composed_delta = 0.0;
  double network_epsilon = 0.0;
  double network_delta = 0.0;
  double max_delta_required = 0.0;
  bool within_group_factor = true;
  bool pass_full = true;
  bool pass_halved = true;
  bool pass = true;

  std::size_t diff_count() const { return coordinates.size(); }
};

// Certifies the (epsilon, delta) inequality on every coordinate where v and
// v' differ, using the exact delta-profile of the noise.
inline AuditReport audit_mechanism(const Network& net, const PrivacyBudget& budget,
                                   const NoiseParams& noise, const MechanismInput& v,
                                   const MechanismInput& v_prime) {
  const auto layout = MechanismInput::stack(net, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.size())));
  if (!v.same_layout(layout)) throw ParameterError("audit_mechanism: input does not match network");
  const auto adj = adjacency_check(v, v_prime, budget.mu);
  if (!adj.adjacent) {
    throw AssumptionError("audit_mechanism: inputs are not mu-adjacent");
  }
  AuditReport r;
  r.epsilon = budget.epsilon;
  r.delta = budget.delta;
  r.mu = budget.mu;
  r.p = budget.p;
  r.noise = noise;
  r.bounds = check_bounds(noise, budget.mu, budget.epsilon, budget.delta);
  r.i0 = adj.i0;
  const NoiseParams halved = noise.scaled(0.5);
  for (std::size_t k = 0; k < v.l(); ++k) {
    const double gap = std::abs(v.value(k) - v_prime.value(k));
    if (gap == 0.0) continue;
    const auto c = v.coordinate(k);
    CoordinateAudit ca{k + 1, c.player + 1, c.column + 1, c.kind, gap, 0.0, 0.0, false, false};
    ca.delta_required = delta_profile(budget.epsilon, gap, noise);
    ca.delta_required_halved = c.kind == MechanismInput::Kind::diagonal
                                   ? delta_profile(budget.epsilon, gap, halved)
                                   : ca.delta_required;
    ca.pass_full = ca.delta_required <= budget.delta;
    ca.pass_halved = ca.delta_required_halved <= budget.delta;
    r.max_delta_required =
        std::max({r.max_delta_required, ca.delta_required, ca.delta_required_halved});
    r.pass_full = r.pass_full && ca.pass_full;
    r.pass_halved = r.pass_halved && ca.pass_halved;
    r.coordinates.push_back(ca);
  }
  const auto count = static_cast<double>(r.coordinates.size());
  r.composed_epsilon = count * budget.epsilon;
  r.composed_delta = count * budget.delta;
  r.network_epsilon = static_cast<double>(budget.p) * budget.epsilon;
  r.network_delta = static_cast<double>(budget.p) * budget.delta;
  r.within_group_factor = r.coordinates.size() <= budget.p;
  r.pass = r.pass_full && r.pass_halved;
  return r;
}

// Audits the extremal neighbor of every player and returns the report with
// the largest required delta (ties: lowest player).
inline AuditReport audit_worst_case(const Network& net, const PrivacyBudget& budget,
                                    const NoiseParams& noise, const Eigen::VectorXd& b) {
  const auto v = MechanismInput::stack(net, b);
  std::optional<AuditReport> worst;
  for (std::size_t i = 1; i <= net.size(); ++i) {
    auto report = audit_mechanism(net, budget, noise, v, worst_case_neighbor(v, i, budget.mu));
    if (!worst || report.max_delta_required > worst->max_delta_required) {
      worst = std::move(report);
    }
  }
  if (!worst) throw ParameterError("audit_worst_case: empty network");
  return *worst;
}

inline nlohmann::ordered_json to_json(const BoundCheck& c) {
  return {{"lambda_min", c.lambda_min},
          {"a_min", c.a_min},
          {"lambda_status", to_string(c.lambda_status)},
          {"a_status", to_string(c.a_status)},
          {"acceptable", c.acceptable()}};
}

inline nlohmann::ordered_json to_json(const AuditReport& r) {
  nlohmann::ordered_json coords = nlohmann::ordered_json::array();
  for (const auto& c : r.coordinates) {
    coords.push_back({{"index", c.index},
                      {"player", c.player},
                      {"column", c.column},
                      {"kind", to_string(c.kind)},
                      {"gap", c.gap},
                      {"delta_required", c.delta_required},
                      {"delta_required_halved", c.delta_required_halved},
                      {"pass_full", c.pass_full},
                      {"pass_halved", c.pass_halved}});
  }
  nlohmann::ordered_json j;
  j["planner"] = {{"epsilon", r.epsilon}, {"delta", r.delta}, {"mu", r.mu}, {"p", r.p},
                  {"a", r.noise.a()},     {"lambda", r.noise.lambda()}};
  j["bounds"] = to_json(r.bounds);
  j["i0"] = r.i0 ? nlohmann::ordered_json(*r.i0) : nlohmann::ordered_json(nullptr);
  j["coordinates"] = std::move(coords);
  j["composed"] = {{"count", r.diff_count()},
                   {"epsilon", r.composed_epsilon},
                   {"delta", r.composed_delta}};
  j["network"] = {{"epsilon", r.network_epsilon}, {"delta", r.network_delta}};
  j["max_delta_required"] = r.max_delta_required;
  j["within_group_factor"] = r.within_group_factor;
  j["pass_full"] = r.pass_full;
  j["pass_halved"] = r.pass_halved;
  j["pass"] = r.pass;
  return j;
}

}  // namespace llqfp
