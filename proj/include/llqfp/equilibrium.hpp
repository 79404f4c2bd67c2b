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

// Nash equilibria of the original and perturbed LQ games: dense closed-form
// solves, projected-gradient play and best-response dynamics, together with
// the distance bounds between the two equilibria.

#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "llqfp/errors.hpp"
#include "llqfp/format.hpp"
#include "llqfp/game.hpp"
#include "llqfp/network.hpp"
#include "llqfp/perturbation.hpp"

namespace llqfp {

enum class SolveMethod { closed_form, projected_gradient, best_response };

inline std::string_view to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::closed_form: return "closed_form";
    case SolveMethod::projected_gradient: return "projected_gradient";
    case SolveMethod::best_response: return "best_response";
  }
  return "unknown";
}

struct EquilibriumResult {
  Eigen::VectorXd x_star;
  SolveMethod method = SolveMethod::closed_form;
  std::size_t iterations = 0;
  // |phi(x)| for closed-form solves; the natural-map residual
  // |x - Proj(x + phi(x))| for iterative ones (equal to |phi(x)| inside the box).
  double residual = 0.0;
  bool interior = false;
  bool converged = true;
  // |Ax - c| / (|A| |x| + |c|) in the infinity norm, closed form only.
  double backward_error = 0.0;
  // Iterative solvers: step lengths never increased.
  bool monotone_steps = true;
};

template <class Game>
concept PseudoGradientGame = requires(const Game& g, const Eigen::VectorXd& x) {
  { g.pseudo_gradient(x) } -> std::convertible_to<Eigen::VectorXd>;
  { g.box() } -> std::convertible_to<ActionBox>;
};

// Games whose pseudo-gradient is affine: phi(x) = -A x + c.
template <class Game>
concept AffineGame = PseudoGradientGame<Game> && requires(const Game& g) {
  { g.system_matrix() } -> std::convertible_to<Eigen::MatrixXd>;
  { g.offset() } -> std::convertible_to<Eigen::VectorXd>;
};

namespace detail {

inline Eigen::VectorXd solve_dense(const Eigen::MatrixXd& a, const Eigen::VectorXd& c,
                                   double* backward_error) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw NumericalError("equilibrium system is singular");
  Eigen::VectorXd x = lu.solve(c);
  if (!x.allFinite()) throw NumericalError("equilibrium solve produced non-finite values");
  const double scale = a.cwiseAbs().rowwise().sum().maxCoeff() * x.lpNorm<Eigen::Infinity>() +
                       c.lpNorm<Eigen::Infinity>();
  const double err = (a * x - c).lpNorm<Eigen::Infinity>();
  *backward_error = scale > 0.0 ? err / scale : err;
  return x;
}

inline double natural_residual(const ActionBox& box, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& grad) {
  return (x - box.project(x + grad)).norm();
}

}  // namespace detail

// Interior equilibrium of an affine game by a dense solve of A x = c.
template <AffineGame Game>
EquilibriumResult solve_affine(const Game& game) {
  EquilibriumResult r;
  r.method = SolveMethod::closed_form;
  r.x_star = detail::solve_dense(game.system_matrix(), game.offset(), &r.backward_error);
  r.residual = game.pseudo_gradient(r.x_star).norm();
  r.interior = game.box().interior(r.x_star);
  return r;
}

// x* = (I - G)^{-1} b
inline EquilibriumResult solve_lq_ne(const LQGame& game) { return solve_affine(game); }

// Which matrix multiplies x in the perturbed system: D^T follows from
// differentiating the perturbed payoffs; D is the untransposed variant,
// kept for comparison.
enum class PerturbedForm { transposed, untransposed };

// Solves (I - G + D^T) x = b - beta (or with D for the untransposed form).
inline EquilibriumResult solve_perturbed_lq_ne(const LQGame& game, const PerturbationDraw& draw,
                                               PerturbedForm form = PerturbedForm::transposed) {
  const PerturbedLQGame perturbed(game, draw);
  if (form == PerturbedForm::transposed) return solve_affine(perturbed);
  EquilibriumResult r;
  const Eigen::MatrixXd a = game.system_matrix() + draw.d();
  r.x_star = detail::solve_dense(a, perturbed.offset(), &r.backward_error);
  r.residual = (perturbed.offset() - a * r.x_star).norm();
  r.interior = game.box().interior(r.x_star);
  return r;
}

struct ProjectedGradientOptions {
  double step = 0.1;
  double tol = 1e-10;
  std::size_t max_iter = 100000;
  // When both are given, step must lie below 2 * modulus / lipschitz^2.
  std::optional<double> lipschitz;
  std::optional<double> modulus;
};

// x <- Proj_box(x + step * phi(x)) until the move is at most tol.
template <PseudoGradientGame Game>
EquilibriumResult projected_gradient_ne(const Game& game, const ProjectedGradientOptions& opt,
                                        const Eigen::VectorXd& x0) {
  if (!(std::isfinite(opt.step) && opt.step >= 0.0)) {
    throw ParameterError("projected_gradient_ne: step must be finite and >= 0");
  }
  if (!(opt.tol > 0.0)) throw ParameterError("projected_gradient_ne: tol must be > 0");
  if (opt.lipschitz && opt.modulus) {
    const double bound = 2.0 * *opt.modulus / (*opt.lipschitz * *opt.lipschitz);
    if (!(opt.step < bound)) {
      throw ParameterError("projected_gradient_ne: step " + std::to_string(opt.step) +
                           " violates step < 2 l_m / L^2 = " + std::to_string(bound));
    }
  }
  const ActionBox& box = game.box();
  if (static_cast<std::size_t>(x0.size()) != box.size()) {
    throw ParameterError("projected_gradient_ne: x0 has wrong dimension");
  }
  EquilibriumResult r;
  r.method = SolveMethod::projected_gradient;
  r.converged = false;
  Eigen::VectorXd x = box.project(x0);
  if (opt.step > 0.0) {
    double last_move = std::numeric_limits<double>::infinity();
    while (r.iterations < opt.max_iter) {
      Eigen::VectorXd next = box.project(x + opt.step * game.pseudo_gradient(x));
      const double move = (next - x).norm();
      ++r.iterations;
      if (move > last_move * (1.0 + 1e-9) + 1e-300) r.monotone_steps = false;
      last_move = move;
      x = std::move(next);
      if (move <= opt.tol) {
        r.converged = true;
        break;
      }
    }
  }
  // step == 0 never moves, which is a stall, not convergence.
  r.x_star = x;
  r.residual = detail::natural_residual(box, x, game.pseudo_gradient(x));
  r.interior = box.interior(x);
  return r;
}

// One synchronous (Jacobi) best-response round for an affine game: player i
// maximizes its payoff over its interval with the others held fixed.
template <AffineGame Game>
Eigen::VectorXd best_response(const Game& game, const Eigen::MatrixXd& a, const Eigen::VectorXd& c,
                              const Eigen::VectorXd& x) {
  Eigen::VectorXd next(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double coupling = a.row(i).dot(x) - a(i, i) * x(i);
    next(i) = (c(i) - coupling) / a(i, i);
  }
  return game.box().project(next);
}

// Trajectory x_0, x_1, ..., x_rounds of synchronous best responses.
template <AffineGame Game>
std::vector<Eigen::VectorXd> best_response_dynamics(const Game& game, const Eigen::VectorXd& x0,
                                                    std::size_t rounds) {
  const Eigen::MatrixXd a = game.system_matrix();
  const Eigen::VectorXd c = game.offset();
  if (static_cast<std::size_t>(x0.size()) != game.box().size()) {
    throw ParameterError("best_response_dynamics: x0 has wrong dimension");
  }
  if (!(a.diagonal().array() > 0.0).all()) {
    throw AssumptionError("best_response_dynamics: payoffs are not strictly concave in own action");
  }
  std::vector<Eigen::VectorXd> trajectory;
  trajectory.reserve(rounds + 1);
  trajectory.push_back(x0);
  for (std::size_t t = 0; t < rounds; ++t) {
    trajectory.push_back(best_response(game, a, c, trajectory.back()));
  }
  return trajectory;
}

// Runs best-response rounds until the move is at most tol.
template <AffineGame Game>
EquilibriumResult best_response_ne(const Game& game, const Eigen::VectorXd& x0, double tol,
                                   std::size_t max_rounds) {
  const Eigen::MatrixXd a = game.system_matrix();
  const Eigen::VectorXd c = game.offset();
  if (!(a.diagonal().array() > 0.0).all()) {
    throw AssumptionError("best_response_ne: payoffs are not strictly concave in own action");
  }
  EquilibriumResult r;
  r.method = SolveMethod::best_response;
  r.converged = false;
  Eigen::VectorXd x = x0;
  double last_move = std::numeric_limits<double>::infinity();
  while (r.iterations < max_rounds) {
    Eigen::VectorXd next = best_response(game, a, c, x);
    const double move = (next - x).norm();
    ++r.iterations;
    if (move > last_move * (1.0 + 1e-9) + 1e-300) r.monotone_steps = false;
    last_move = move;
    x = std::move(next);
    if (move <= tol) {
      r.converged = true;
      break;
    }
  }
  r.x_star = x;
  r.residual = detail::natural_residual(game.box(), x, game.pseudo_gradient(x));
  r.interior = game.box().interior(x);
  return r;
}

inline double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

inline double min_singular_value(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

namespace detail {
inline void require_modulus(double l_m) {
  if (!(l_m > 0.0)) throw ParameterError("monotonicity modulus l_m must be > 0");
}
}  // namespace detail

// (|beta| + |D|_2 |x*|) / l_m for one realized draw.
inline double gamma_realized(const PerturbationDraw& draw, const Eigen::VectorXd& x_star,
                             double l_m) {
  detail::require_modulus(l_m);
  return (draw.beta().norm() + spectral_norm(draw.d()) * x_star.norm()) / l_m;
}

// Same bound with the Frobenius norm of D, reported for comparison.
inline double gamma_realized_frobenius(const PerturbationDraw& draw, const Eigen::VectorXd& x_star,
                                       double l_m) {
  detail::require_modulus(l_m);
  return (draw.beta().norm() + draw.d().norm() * x_star.norm()) / l_m;
}

// Worst case over all draws with bound a:
//   (sqrt(n) a + sqrt(sum_i (4|N_i|^2 + 5|N_i| + 4)) a |x*|) / l_m.
inline double gamma_worst_case(const Network& net, double a, double x_star_norm, double l_m) {
  detail::require_modulus(l_m);
  if (!(a >= 0.0)) throw ParameterError("gamma_worst_case: a must be >= 0");
  double sum = 0.0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    const double d = static_cast<double>(net.degree(i));
    sum += 4.0 * d * d + 5.0 * d + 4.0;
  }
  return (std::sqrt(static_cast<double>(net.size())) * a + std::sqrt(sum) * a * x_star_norm) / l_m;
}

// Column-wise maximization of |d_i|^2 gives (|N_i| + 2)^2 + |N_i| =
// |N_i|^2 + 5|N_i| + 4, a tighter constant than the one above.
inline double gamma_worst_case_tight(const Network& net, double a, double x_star_norm, double l_m) {
  detail::require_modulus(l_m);
  double sum = 0.0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    const double d = static_cast<double>(net.degree(i));
    sum += d * d + 5.0 * d + 4.0;
  }
  return (std::sqrt(static_cast<double>(net.size())) * a + std::sqrt(sum) * a * x_star_norm) / l_m;
}

// |x* - x^*| <= gamma
inline bool accuracy_check(const Eigen::VectorXd& x_star, const Eigen::VectorXd& x_hat, double gamma) {
  if (x_star.size() != x_hat.size()) throw ParameterError("accuracy_check: dimension mismatch");
  return (x_star - x_hat).norm() <= gamma;
}

// CSV: seed,method,residual,interior,x_1,...,x_n
inline void write_result_header(std::ostream& out, std::size_t n) {
  out << "seed,method,residual,interior";
  for (std::size_t i = 1; i <= n; ++i) out << ",x_" << i;
  out << '\n';
}

inline void write_result_row(std::ostream& out, std::uint64_t seed, const EquilibriumResult& r) {
  out << seed << ',' << to_string(r.method) << ',' << format_double(r.residual) << ','
      << (r.interior ? 1 : 0);
  for (Eigen::Index i = 0; i < r.x_star.size(); ++i) out << ',' << format_double(r.x_star(i));
  out << '\n';
}

}  // namespace llqfp
