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

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "llqfp/errors.hpp"
#include "llqfp/network.hpp"
#include "llqfp/random.hpp"

namespace llqfp {

// Product of per-player action intervals [lo_i, hi_i].
struct ActionBox {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static ActionBox uniform(std::size_t n, double lo, double hi) {
    const auto size = static_cast<Eigen::Index>(n);
    return {Eigen::VectorXd::Constant(size, lo), Eigen::VectorXd::Constant(size, hi)};
  }

  std::size_t size() const { return static_cast<std::size_t>(lo.size()); }

  bool contains(const Eigen::VectorXd& x) const {
    return x.size() == lo.size() && (x.array() >= lo.array()).all() &&
           (x.array() <= hi.array()).all();
  }

  // Strictly inside every interval by at least `margin`.
  bool interior(const Eigen::VectorXd& x, double margin = 1e-9) const {
    return x.size() == lo.size() && (x.array() > lo.array() + margin).all() &&
           (x.array() < hi.array() - margin).all();
  }

  Eigen::VectorXd project(const Eigen::VectorXd& x) const { return x.cwiseMax(lo).cwiseMin(hi); }

  double diameter() const { return (hi - lo).norm(); }

  Eigen::VectorXd sample(UniformStream& stream) const {
    Eigen::VectorXd x(lo.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = lo(i) + (hi(i) - lo(i)) * stream.next();
    return x;
  }
};

// Smallest eigenvalue of I - (G + G^T)/2, the strong-monotonicity modulus of
// the LQ pseudo-gradient -(I - G)x + b.
inline double monotonicity_constant(const Eigen::MatrixXd& g) {
  const Eigen::MatrixXd sym =
      Eigen::MatrixXd::Identity(g.rows(), g.cols()) - 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

// Linear-quadratic network game:
//   f_i(x) = -x_i^2 / 2 + b_i x_i + sum_j g_ij x_i x_j.
// Construction rejects games that are not strongly monotone.
class LQGame {
 public:
  LQGame(Network net, Eigen::VectorXd b, ActionBox box)
      : net_(std::move(net)), b_(std::move(b)), box_(std::move(box)) {
    const auto n = static_cast<Eigen::Index>(net_.size());
    if (b_.size() != n) throw ParameterError("b has wrong dimension");
    if (box_.lo.size() != n || box_.hi.size() != n) {
      throw ParameterError("action box has wrong dimension");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(std::isfinite(b_(i)) && b_(i) >= 0.0)) {
        throw ParameterError("marginal benefit b_" + std::to_string(i + 1) + " must be >= 0");
      }
      if (!(box_.lo(i) < box_.hi(i))) {
        throw ParameterError("empty action interval for player " + std::to_string(i + 1));
      }
    }
    modulus_ = llqfp::monotonicity_constant(net_.weights());
    if (!(modulus_ > 0.0)) {
      throw AssumptionError("game is not strongly monotone: smallest eigenvalue of "
                            "I - (G+G^T)/2 is " + std::to_string(modulus_));
    }
  }

  std::size_t size() const { return net_.size(); }
  const Network& network() const { return net_; }
  const Eigen::VectorXd& b() const { return b_; }
  const ActionBox& box() const { return box_; }

  // l_m > 0.
  double monotonicity_constant() const { return modulus_; }

  double payoff(std::size_t i, const Eigen::VectorXd& x) const {
    require_in_box(x);
    const auto ii = static_cast<Eigen::Index>(i);
    return -0.5 * x(ii) * x(ii) + b_(ii) * x(ii) + x(ii) * net_.weights().row(ii).dot(x);
  }

  Eigen::VectorXd payoffs(const Eigen::VectorXd& x) const {
    require_in_box(x);
    return (-0.5 * x.array().square() + b_.array() * x.array() +
            x.array() * (net_.weights() * x).array()).matrix();
  }

  // phi(x) = -(I - G)x + b.
  Eigen::VectorXd pseudo_gradient(const Eigen::VectorXd& x) const {
    return -x + b_ + net_.weights() * x;
  }

  // The pseudo-gradient is -(system_matrix) x + offset.
  Eigen::MatrixXd system_matrix() const {
    const auto n = static_cast<Eigen::Index>(size());
    return Eigen::MatrixXd::Identity(n, n) - net_.weights();
  }
  const Eigen::VectorXd& offset() const { return b_; }

  void require_in_box(const Eigen::VectorXd& x) const {
    if (!box_.contains(x)) throw DomainError("action profile outside the action box");
  }

 private:
  Network net_;
  Eigen::VectorXd b_;
  ActionBox box_;
  double modulus_ = 0.0;
};

// A game known only through its pseudo-gradient and a claimed modulus.
class MonotoneGameOracle {
 public:
  using Gradient = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  MonotoneGameOracle(Gradient pseudo_gradient, double modulus, ActionBox box)
      : gradient_(std::move(pseudo_gradient)), modulus_(modulus), box_(std::move(box)) {
    if (!gradient_) throw ParameterError("oracle needs a pseudo-gradient");
  }

  std::size_t size() const { return box_.size(); }
  double modulus() const { return modulus_; }
  const ActionBox& box() const { return box_; }
  Eigen::VectorXd pseudo_gradient(const Eigen::VectorXd& x) const { return gradient_(x); }

 private:
  Gradient gradient_;
  double modulus_;
  ActionBox box_;
};

inline MonotoneGameOracle as_oracle(const LQGame& game) {
  return MonotoneGameOracle([game](const Eigen::VectorXd& x) { return game.pseudo_gradient(x); },
                            game.monotonicity_constant(), game.box());
}

struct MonotoneCheckReport {
  // min over sampled pairs of <phi(x) - phi(x'), x - x'> / (-|x - x'|^2)
  double worst_ratio = std::numeric_limits<double>::infinity();
  std::size_t pairs = 0;
  bool passed = false;
  bool degenerate = false;
};

// Samples profile pairs uniformly in the box and checks the strong
// monotonicity inequality with the oracle's claimed modulus.
inline MonotoneCheckReport check_monotone(const MonotoneGameOracle& oracle, std::size_t trials,
                                          std::uint64_t seed) {
  if (trials == 0) throw ParameterError("check_monotone: trials must be >= 1");
  MonotoneCheckReport report;
  if (oracle.box().diameter() == 0.0) {
    report.degenerate = true;
    report.passed = true;
    return report;
  }
  UniformStream stream(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const Eigen::VectorXd x = oracle.box().sample(stream);
    const Eigen::VectorXd y = oracle.box().sample(stream);
    const Eigen::VectorXd dx = x - y;
    const double dist2 = dx.squaredNorm();
    if (dist2 == 0.0) continue;
    const double inner = (oracle.pseudo_gradient(x) - oracle.pseudo_gradient(y)).dot(dx);
    report.worst_ratio = std::min(report.worst_ratio, -inner / dist2);
    ++report.pairs;
  }
  report.passed = report.pairs == 0 || report.worst_ratio >= oracle.modulus() - 1e-9;
  report.degenerate = report.pairs == 0;
  return report;
}

}  // namespace llqfp
