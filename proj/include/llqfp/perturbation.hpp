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

// Laplace linear-quadratic functional perturbation.
//
// Player i draws |N_i| + 2 truncated Laplace noises w_{i,1..|N_i|+2} and
// perturbs its payoff to
//
//   f^_i(x) = f_i(x) - x_i q_i^T x - beta_i x_i,
//
// with q_{i,i_k} = w_{i,k} for its k-th neighbor i_k, the diagonal term
// q_ii = w_{i,|N_i|+1} / 2 + a (|N_i| + 1) / 2, and beta_i = w_{i,|N_i|+2}.
// The pseudo-gradient of the perturbed game is phi(x) - D^T x - beta where
// column i of D is q_i with its diagonal entry doubled.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "llqfp/errors.hpp"
#include "llqfp/format.hpp"
#include "llqfp/game.hpp"
#include "llqfp/network.hpp"
#include "llqfp/random.hpp"
#include "llqfp/trunc_laplace.hpp"

namespace llqfp {

using NeighborLists = std::vector<std::vector<std::size_t>>;

class PerturbationDraw {
 public:
  // Builds the coefficients from explicit noises; omega[i] must hold
  // degree(i) + 2 values. Rejects draws that violate the support, sparsity or
  // diagonal-dominance invariants.
  static PerturbationDraw from_noises(NeighborLists neighbors, const NoiseParams& params,
                                      std::vector<std::vector<double>> omega,
                                      std::uint64_t seed = 0) {
    PerturbationDraw d(std::move(neighbors), params, std::move(omega), seed);
    d.build();
    d.validate();
    return d;
  }

  static PerturbationDraw from_noises(const Network& net, const NoiseParams& params,
                                      std::vector<std::vector<double>> omega,
                                      std::uint64_t seed = 0) {
    return from_noises(neighbor_lists(net), params, std::move(omega), seed);
  }

  static NeighborLists neighbor_lists(const Network& net) {
    NeighborLists out(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
      out[i].assign(net.neighbors(i).begin(), net.neighbors(i).end());
    }
    return out;
  }

  std::size_t size() const { return neighbors_.size(); }
  const NoiseParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  const NeighborLists& neighbors() const { return neighbors_; }
  const std::vector<std::vector<double>>& omega() const { return omega_; }
  const Eigen::MatrixXd& q() const { return q_; }
  const Eigen::VectorXd& beta() const { return beta_; }
  // Columns d_i; D^T has rows d_i^T.
  const Eigen::MatrixXd& d() const { return d_; }

  std::size_t noise_count() const {
    std::size_t total = 0;
    for (const auto& w : omega_) total += w.size();
    return total;
  }

  bool matches(const Network& net) const {
    if (net.size() != size()) return false;
    for (std::size_t i = 0; i < size(); ++i) {
      const auto row = net.neighbors(i);
      if (!std::equal(row.begin(), row.end(), neighbors_[i].begin(), neighbors_[i].end())) {
        return false;
      }
    }
    return true;
  }

 private:
  PerturbationDraw(NeighborLists neighbors, const NoiseParams& params,
                   std::vector<std::vector<double>> omega, std::uint64_t seed)
      : neighbors_(std::move(neighbors)), params_(params), omega_(std::move(omega)), seed_(seed) {}

  void build() {
    const auto n = static_cast<Eigen::Index>(size());
    if (omega_.size() != size()) throw ParameterError("omega table has wrong player count");
    q_ = Eigen::MatrixXd::Zero(n, n);
    beta_ = Eigen::VectorXd::Zero(n);
    const double a = params_.a();
    for (std::size_t i = 0; i < size(); ++i) {
      const auto& nb = neighbors_[i];
      const auto& w = omega_[i];
      const std::size_t deg = nb.size();
      if (w.size() != deg + 2) {
        throw ParameterError("player " + std::to_string(i + 1) + " needs " +
                             std::to_string(deg + 2) + " noises, got " + std::to_string(w.size()));
      }
      const auto ii = static_cast<Eigen::Index>(i);
      for (std::size_t k = 0; k < deg; ++k) {
        if (nb[k] >= size() || nb[k] == i || (k > 0 && nb[k] <= nb[k - 1])) {
          throw ParameterError("neighbor list of player " + std::to_string(i + 1) +
                               " is not a strictly ascending list of other players");
        }
        q_(ii, static_cast<Eigen::Index>(nb[k])) = w[k];
      }
      q_(ii, ii) = w[deg] / 2.0 + a * static_cast<double>(deg + 1) / 2.0;
      beta_(ii) = w[deg + 1];
    }
    d_ = q_.transpose();
    d_.diagonal() *= 2.0;
  }

  void validate() const {
    const double a = params_.a();
    for (std::size_t i = 0; i < size(); ++i) {
      const std::string who = "player " + std::to_string(i + 1);
      for (double w : omega_[i]) {
        if (!(std::abs(w) <= a)) throw ParameterError(who + ": noise outside [-a, a]");
      }
      const auto ii = static_cast<Eigen::Index>(i);
      const double deg = static_cast<double>(neighbors_[i].size());
      const double slack = 1e-12 * a * (deg + 2.0);
      const double qii = q_(ii, ii);
      if (qii < a * deg / 2.0 - slack || qii > a * (deg + 2.0) / 2.0 + slack) {
        throw ParameterError(who + ": q_ii outside [a|N_i|/2, a(|N_i|+2)/2]");
      }
      const double off = q_.row(ii).cwiseAbs().sum() - std::abs(qii);
      if (2.0 * qii < off - slack) throw ParameterError(who + ": row of D^T not diagonally dominant");
    }
  }

  NeighborLists neighbors_;
  NoiseParams params_;
  std::vector<std::vector<double>> omega_;
  std::uint64_t seed_ = 0;
  Eigen::MatrixXd q_;
  Eigen::VectorXd beta_;
  Eigen::MatrixXd d_;
};

// Player i uses substream i + 1 of `seed`, so each player's noises depend only
// on (seed, i).
inline PerturbationDraw draw(const Network& net, const NoiseParams& params, std::uint64_t seed) {
  std::vector<std::vector<double>> omega(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    UniformStream stream(seed, i + 1);
    omega[i].resize(net.degree(i) + 2);
    for (auto& w : omega[i]) w = sample_one(stream, params);
  }
  return PerturbationDraw::from_noises(net, params, std::move(omega), seed);
}

inline Eigen::MatrixXd d_matrix(const PerturbationDraw& draw) { return draw.d(); }

// Smallest eigenvalue of (M + M^T)/2; x^T M x >= 0 for all x iff it is >= 0.
inline double check_psd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ParameterError("check_psd: matrix must be square");
  if (m.size() == 0) return 0.0;
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

// The perturbed game in closed LQ form. The original game is kept unchanged.
class PerturbedLQGame {
 public:
  PerturbedLQGame(LQGame base, PerturbationDraw draw)
      : base_(std::move(base)), draw_(std::move(draw)) {
    if (!draw_.matches(base_.network())) {
      throw ParameterError("perturbation draw was made on a different network");
    }
  }

  std::size_t size() const { return base_.size(); }
  const LQGame& base() const { return base_; }
  const PerturbationDraw& draw() const { return draw_; }
  const ActionBox& box() const { return base_.box(); }

  double payoff(std::size_t i, const Eigen::VectorXd& x) const {
    const auto ii = static_cast<Eigen::Index>(i);
    return base_.payoff(i, x) - x(ii) * draw_.q().row(ii).dot(x) - draw_.beta()(ii) * x(ii);
  }

  // d^2 f^_i / dx_i^2 = -1 - 2 q_ii.
  double own_curvature(std::size_t i) const {
    const auto ii = static_cast<Eigen::Index>(i);
    return -1.0 - 2.0 * draw_.q()(ii, ii);
  }

  Eigen::VectorXd pseudo_gradient(const Eigen::VectorXd& x) const {
    return base_.pseudo_gradient(x) - draw_.d().transpose() * x - draw_.beta();
  }

  // I - G + D^T
  Eigen::MatrixXd system_matrix() const {
    return base_.system_matrix() + draw_.d().transpose();
  }
  Eigen::VectorXd offset() const { return base_.b() - draw_.beta(); }

 private:
  LQGame base_;
  PerturbationDraw draw_;
};

inline PerturbedLQGame perturb(const LQGame& game, const PerturbationDraw& draw) {
  return PerturbedLQGame(game, draw);
}

inline Eigen::VectorXd perturbed_pseudo_gradient(const LQGame& game, const PerturbationDraw& draw,
                                                 const Eigen::VectorXd& x) {
  if (!draw.matches(game.network())) {
    throw ParameterError("perturbation draw was made on a different network");
  }
  return game.pseudo_gradient(x) - draw.d().transpose() * x - draw.beta();
}

// Draw record, version 1:
//
//   llqfp-draw 1
//   generator <id>
//   seed <u64>
//   a <real>
//   lambda <real>
//   players <n>
//   omega <i> <deg> <j_1> ... <j_deg> <w_1> ... <w_{deg+2}>     (n lines)
//   q <i> <q_i1> ... <q_in>                                     (n lines)
//   beta <beta_1> ... <beta_n>
//   end
//
// Indices are 1-based; reals use shortest round-trip formatting.
inline constexpr int kDrawFormatVersion = 1;

inline void write_draw(std::ostream& out, const PerturbationDraw& d) {
  out << "llqfp-draw " << kDrawFormatVersion << '\n'
      << "generator " << kGeneratorId << '\n'
      << "seed " << d.seed() << '\n'
      << "a " << format_double(d.params().a()) << '\n'
      << "lambda " << format_double(d.params().lambda()) << '\n'
      << "players " << d.size() << '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    out << "omega " << i + 1 << ' ' << d.neighbors()[i].size();
    for (auto j : d.neighbors()[i]) out << ' ' << j + 1;
    for (double w : d.omega()[i]) out << ' ' << format_double(w);
    out << '\n';
  }
  for (Eigen::Index i = 0; i < d.q().rows(); ++i) {
    out << "q " << i + 1;
    for (Eigen::Index j = 0; j < d.q().cols(); ++j) out << ' ' << format_double(d.q()(i, j));
    out << '\n';
  }
  out << "beta";
  for (Eigen::Index i = 0; i < d.beta().size(); ++i) out << ' ' << format_double(d.beta()(i));
  out << "\nend\n";
}

// Reads a record and rebuilds the coefficients from the noises; the stored Q
// and beta must agree bit for bit with the rebuilt ones.
inline PerturbationDraw read_draw(std::istream& in) {
  std::string line;
  auto next = [&](const std::string& key) {
    if (!std::getline(in, line)) throw FormatError("draw record: missing '" + key + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word != key) throw FormatError("draw record: expected '" + key + "', got '" + word + "'");
    std::vector<std::string> rest;
    while (ss >> word) rest.push_back(word);
    return rest;
  };
  auto one = [&](const std::string& key) {
    auto v = next(key);
    if (v.size() != 1) throw FormatError("draw record: '" + key + "' takes one value");
    return v[0];
  };
  if (const auto version = one("llqfp-draw"); version != std::to_string(kDrawFormatVersion)) {
    throw FormatError("draw record: unsupported version " + version);
  }
  one("generator");
  const auto seed = parse_u64(one("seed"), "seed");
  const double a = parse_double(one("a"), "a");
  const double lambda = parse_double(one("lambda"), "lambda");
  const auto n = parse_size(one("players"), "players");
  NeighborLists neighbors(n);
  std::vector<std::vector<double>> omega(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = next("omega");
    if (f.size() < 2 || parse_size(f[0], "player") != i + 1) {
      throw FormatError("draw record: omega rows must be in player order");
    }
    const auto deg = parse_size(f[1], "degree");
    if (f.size() != 2 + deg + deg + 2) throw FormatError("draw record: bad omega row length");
    for (std::size_t k = 0; k < deg; ++k) {
      const auto j = parse_size(f[2 + k], "neighbor");
      if (j == 0 || j > n) throw FormatError("draw record: neighbor index out of range");
      neighbors[i].push_back(j - 1);
    }
    for (std::size_t k = 0; k < deg + 2; ++k) omega[i].push_back(parse_double(f[2 + deg + k], "omega"));
  }
  auto d = PerturbationDraw::from_noises(std::move(neighbors), NoiseParams(a, lambda),
                                         std::move(omega), seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = next("q");
    if (f.size() != n + 1 || parse_size(f[0], "player") != i + 1) {
      throw FormatError("draw record: bad q row");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (parse_double(f[j + 1], "q") !=
          d.q()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) {
        throw FormatError("draw record: stored Q does not match the noises");
      }
    }
  }
  const auto b = next("beta");
  if (b.size() != n) throw FormatError("draw record: bad beta row");
  for (std::size_t i = 0; i < n; ++i) {
    if (parse_double(b[i], "beta") != d.beta()(static_cast<Eigen::Index>(i))) {
      throw FormatError("draw record: stored beta does not match the noises");
    }
  }
  next("end");
  return d;
}

}  // namespace llqfp
