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

// Truncated Laplace law on [-a, a] with scale lambda:
//
//   p(x) = B exp(-|x| / lambda)  for |x| <= a,  0 otherwise,
//   B    = 1 / (2 lambda (1 - exp(-a / lambda))).
//
// Besides the probability functions and an inverse-CDF sampler this header
// provides the delta-profile: the smallest delta for which a query released
// through this noise satisfies the (epsilon, delta) inequality when the query
// moves by a given shift.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "llqfp/errors.hpp"
#include "llqfp/random.hpp"

namespace llqfp {

class NoiseParams {
 public:
  NoiseParams(double a, double lambda) : a_(a), lambda_(lambda) {
    if (!(std::isfinite(a) && a > 0.0)) {
      throw ParameterError("truncation bound a must be finite and > 0, got " +
                           std::to_string(a));
    }
    if (!(std::isfinite(lambda) && lambda > 0.0)) {
      throw ParameterError("scale lambda must be finite and > 0, got " +
                           std::to_string(lambda));
    }
    const double b = normalizer();
    if (!(std::isfinite(b) && b > 0.0)) {
      throw ParameterError("truncated Laplace normalizer is not finite");
    }
  }

  double a() const { return a_; }
  double lambda() const { return lambda_; }

  // B in the density above. -expm1 keeps precision when a << lambda.
  double normalizer() const {
    return 1.0 / (2.0 * lambda_ * -std::expm1(-a_ / lambda_));
  }

  // Law of c * X for X ~ this law and c > 0.
  NoiseParams scaled(double c) const { return NoiseParams(c * a_, c * lambda_); }

  friend bool operator==(const NoiseParams&, const NoiseParams&) = default;

 private:
  double a_;
  double lambda_;
};

inline double pdf(double x, const NoiseParams& p) {
  if (std::isnan(x)) throw DomainError("pdf: x is NaN");
  if (std::abs(x) > p.a()) return 0.0;
  return p.normalizer() * std::exp(-std::abs(x) / p.lambda());
}

namespace detail {

// P(X <= x) for -a <= x <= 0.
inline double lower_tail(double x, const NoiseParams& p) {
  const double r = p.a() / p.lambda();
  // exp(x/l) - exp(-a/l) = exp(-a/l) * expm1((x + a)/l); the first form is
  // used once (x + a)/l is large enough that expm1 could overflow.
  const double t = (x + p.a()) / p.lambda();
  const double num = t <= 700.0 ? std::exp(-r) * std::expm1(t)
                                : std::exp(x / p.lambda()) - std::exp(-r);
  return num / (2.0 * -std::expm1(-r));
}

}  // namespace detail

inline double cdf(double x, const NoiseParams& p) {
  if (std::isnan(x)) throw DomainError("cdf: x is NaN");
  if (x <= -p.a()) return 0.0;
  if (x >= p.a()) return 1.0;
  if (x == 0.0) return 0.5;
  if (x < 0.0) return detail::lower_tail(x, p);
  return 1.0 - detail::lower_tail(-x, p);
}

// Closed-form inverse of cdf; no root finding.
inline double inverse_cdf(double u, const NoiseParams& p) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("inverse_cdf: u must lie in [0, 1], got " + std::to_string(u));
  }
  if (u == 0.0) return -p.a();
  if (u == 1.0) return p.a();
  const double r = p.a() / p.lambda();
  const double mass = -std::expm1(-r);  // 1 - exp(-a/l)
  auto left = [&](double v) {
    // Solve exp(x/l) = exp(-a/l) + 2 v (1 - exp(-a/l)) for x.
    const double x = p.lambda() * std::log(std::exp(-r) + 2.0 * v * mass);
    return std::clamp(x, -p.a(), 0.0);
  };
  return u <= 0.5 ? left(u) : -left(1.0 - u);
}

// Draws one value, consuming exactly one uniform.
inline double sample_one(UniformStream& stream, const NoiseParams& p) {
  return inverse_cdf(stream.next(), p);
}

inline std::vector<double> sample(std::size_t count, const NoiseParams& p,
                                  std::uint64_t seed) {
  UniformStream stream(seed);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(sample_one(stream, p));
  return out;
}

// E[X^2] = 2 B l^3 (2 - exp(-r)(r^2 + 2r + 2)), r = a / l. For r < 1 the
// bracket is written as 2 exp(-r) sum_{k>=3} r^k / k! to avoid cancellation.
inline double variance(const NoiseParams& p) {
  const double l = p.lambda();
  const double r = p.a() / l;
  double bracket = 0.0;
  if (r >= 1.0) {
    bracket = 2.0 - std::exp(-r) * (r * r + 2.0 * r + 2.0);
  } else {
    double term = r * r * r / 6.0;
    double sum = 0.0;
    for (int k = 4; term > 1e-18 * sum; ++k) {
      sum += term;
      term *= r / k;
    }
    bracket = 2.0 * std::exp(-r) * sum;
  }
  return 2.0 * p.normalizer() * l * l * l * bracket;
}

namespace detail {

// scale * p(y - centre) on a segment where |y - centre| <= a throughout, so
// the density is a single exponential with the given rate.
struct ExpPiece {
  bool present = false;
  double centre = 0.0;
  double scale = 1.0;
  double rate = 0.0;
  double normalizer = 0.0;
  double lambda = 1.0;

  double at(double y) const {
    return present ? scale * normalizer * std::exp(-std::abs(y - centre) / lambda) : 0.0;
  }
};

inline double integrate(const ExpPiece& f, double lo, double hi) {
  if (!f.present || hi <= lo) return 0.0;
  const double len = hi - lo;
  const double kl = f.rate * len;
  if (std::abs(kl) < 1.0) return f.at(lo) * std::expm1(kl) / f.rate;
  return (f.at(hi) - f.at(lo)) / f.rate;
}

// Integral over [lo, hi] of max(f - g, 0). f/g is monotone on the segment, so
// f - g changes sign at most once.
inline double positive_part(const ExpPiece& f, const ExpPiece& g, double lo, double hi) {
  if (!f.present || hi <= lo) return 0.0;
  if (!g.present) return integrate(f, lo, hi);
  const double dk = f.rate - g.rate;
  double from = lo;
  double to = hi;
  if (dk == 0.0) {
    if (f.at(lo) <= g.at(lo)) return 0.0;
  } else {
    // f(y) > g(y)  <=>  dk * (y - lo) > log(g(lo) / f(lo))
    const double cross = lo + (std::log(g.at(lo)) - std::log(f.at(lo))) / dk;
    if (dk > 0.0) {
      from = std::max(lo, cross);
    } else {
      to = std::min(hi, cross);
    }
    if (to <= from) return 0.0;
  }
  return std::max(integrate(f, from, to) - integrate(g, from, to), 0.0);
}

// scale * p(y - centre) on the segment with midpoint `mid`.
inline ExpPiece density_piece(const NoiseParams& p, double centre, double mid, double scale) {
  const double offset = mid - centre;
  if (std::abs(offset) > p.a()) return {};
  return ExpPiece{true, centre, scale, offset < 0.0 ? 1.0 / p.lambda() : -1.0 / p.lambda(),
                  p.normalizer(), p.lambda()};
}

}  // namespace detail

// Hockey-stick divergence  int max(p(y) - e^eps p(y - shift), 0) dy,  computed
// exactly on the piecewise-exponential segments of the two densities.
inline double hockey_stick(double epsilon, double shift, const NoiseParams& p) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw ParameterError("epsilon must be finite and >= 0");
  }
  if (!(shift >= 0.0) || !std::isfinite(shift)) {
    throw ParameterError("shift must be finite and >= 0");
  }
  if (shift == 0.0) return 0.0;
  const double a = p.a();
  std::array<double, 6> cuts = {-a, -a + shift, 0.0, shift, a, a + shift};
  std::sort(cuts.begin(), cuts.end());
  const double scale = std::exp(epsilon);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi);
    const auto f = detail::density_piece(p, 0.0, mid, 1.0);
    const auto g = detail::density_piece(p, shift, mid, scale);
    total += detail::positive_part(f, g, lo, hi);
  }
  return std::clamp(total, 0.0, 1.0);
}

// Smallest delta such that noise from `p` gives (epsilon, delta)-DP for any
// query gap up to `shift`. The divergence is evaluated at shift itself and at
// every multiple of grid_step below it; with the default step only the shift
// is evaluated, which is the supremum because the divergence is nondecreasing
// in the shift.
inline double delta_profile(double epsilon, double shift, const NoiseParams& p,
                            double grid_step = std::numeric_limits<double>::infinity()) {
  if (!(grid_step > 0.0)) throw ParameterError("grid_step must be > 0");
  double sup = hockey_stick(epsilon, shift, p);
  if (std::isfinite(grid_step)) {
    const auto steps = static_cast<std::size_t>(std::ceil(shift / grid_step));
    for (std::size_t k = 1; k < steps; ++k) {
      sup = std::max(sup, hockey_stick(epsilon, static_cast<double>(k) * grid_step, p));
    }
  }
  return sup;
}

}  // namespace llqfp
