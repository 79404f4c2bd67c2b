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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "llqfp/trunc_laplace.hpp"
#include "test_helpers.hpp"

namespace llqfp {
namespace {

using testing::LaplaceOracle;

const NoiseParams kS1(0.034, 0.013);
const NoiseParams kUnit(1.0, 1.0);

TEST(NoiseParamsTest, RejectsInvalid) {
  EXPECT_THROW(NoiseParams(0.0, 1.0), ParameterError);
  EXPECT_THROW(NoiseParams(1.0, -1.0), ParameterError);
  EXPECT_THROW(NoiseParams(std::nan(""), 1.0), ParameterError);
  EXPECT_THROW(NoiseParams(1.0, INFINITY), ParameterError);
}

TEST(NoiseParamsTest, NormalizerMatchesQuadrature) {
  const LaplaceOracle o(1.0, 1.0);
  EXPECT_NEAR(kUnit.normalizer(), 1.0 / o.mass, 1e-12);
  // Extreme ratios stay finite.
  EXPECT_TRUE(std::isfinite(NoiseParams(1e-9, 1.0).normalizer()));
  EXPECT_TRUE(std::isfinite(NoiseParams(1.0, 1e-6).normalizer()));
}

TEST(PdfTest, OutsideSupportIsZero) {
  EXPECT_EQ(pdf(1.5, kUnit), 0.0);
  EXPECT_EQ(pdf(-1.0000001, kUnit), 0.0);
}

TEST(PdfTest, Symmetric) {
  for (double x : {0.0, 0.001, 0.01, 0.02, 0.0339}) EXPECT_EQ(pdf(x, kS1), pdf(-x, kS1));
}

TEST(PdfTest, AtZeroMatchesOracle) {
  // Normalizer 1 / (2 (1 - e^-1)) evaluates to 0.7909883534.
  const LaplaceOracle o(1.0, 1.0);
  EXPECT_NEAR(pdf(0.0, kUnit), o.pdf(0.0), 1e-12);
  EXPECT_NEAR(pdf(0.0, kUnit), 0.7909883534, 1e-9);
}

TEST(PdfTest, MatchesOracleOnGrid) {
  const LaplaceOracle o(kS1.a(), kS1.lambda());
  for (int k = -50; k <= 50; ++k) {
    const double x = kS1.a() * k / 50.0;
    EXPECT_NEAR(pdf(x, kS1), o.pdf(x), 1e-9 * o.pdf(0.0)) << x;
  }
}

TEST(PdfTest, IntegratesToOne) {
  for (const auto& p : {kS1, kUnit, NoiseParams(0.015, 0.0045), NoiseParams(1.0, 0.01)}) {
    EXPECT_NEAR(cdf(p.a(), p) - cdf(-p.a(), p), 1.0, 1e-10);
    const double q = testing::simpson_pieces([&](double y) { return pdf(y, p); }, -p.a(), p.a(), {0.0});
    EXPECT_NEAR(q, 1.0, 1e-10);
  }
}

TEST(CdfTest, EndpointsAndMedian) {
  EXPECT_EQ(cdf(0.0, kS1), 0.5);
  EXPECT_EQ(cdf(-kS1.a(), kS1), 0.0);
  EXPECT_EQ(cdf(kS1.a(), kS1), 1.0);
  EXPECT_EQ(cdf(-5.0, kS1), 0.0);
  EXPECT_EQ(cdf(5.0, kS1), 1.0);
}

TEST(CdfTest, MatchesIntegrationOracle) {
  const LaplaceOracle o(1.0, 1.0);
  EXPECT_NEAR(cdf(0.5, kUnit), o.cdf(0.5), 1e-10);
  // 0.8112297 to seven places; 0.81122 when truncated to five.
  EXPECT_NEAR(cdf(0.5, kUnit), 0.81122, 1e-5);
  const LaplaceOracle s1(kS1.a(), kS1.lambda());
  for (double x : {-0.03, -0.01, -0.001, 0.002, 0.017, 0.033}) {
    EXPECT_NEAR(cdf(x, kS1), s1.cdf(x), 1e-10) << x;
  }
}

TEST(CdfTest, NondecreasingAndContinuous) {
  double prev = 0.0;
  for (int k = 0; k <= 10000; ++k) {
    const double x = -kS1.a() + 2.0 * kS1.a() * k / 10000.0;
    const double c = cdf(x, kS1);
    EXPECT_GE(c, prev);
    EXPECT_LE(c - prev, 2.0 * kS1.a() / 10000.0 * kS1.normalizer() + 1e-15);
    prev = c;
  }
}

TEST(InverseCdfTest, MedianAndEndpoints) {
  EXPECT_EQ(inverse_cdf(0.5, kS1), 0.0);
  EXPECT_EQ(inverse_cdf(0.0, kS1), -kS1.a());
  EXPECT_EQ(inverse_cdf(1.0, kS1), kS1.a());
  EXPECT_THROW(inverse_cdf(-0.1, kS1), DomainError);
  EXPECT_THROW(inverse_cdf(1.1, kS1), DomainError);
}

TEST(InverseCdfTest, RoundTrip) {
  for (const auto& p : {kS1, kUnit, NoiseParams(0.015, 0.0045)}) {
    for (int k = 0; k < 1000; ++k) {
      const double x = -p.a() + 2.0 * p.a() * (k + 0.5) / 1000.0;
      EXPECT_NEAR(inverse_cdf(cdf(x, p), p), x, 1e-10);
    }
  }
}

TEST(SampleTest, EmptyAndDeterministic) {
  EXPECT_TRUE(sample(0, kS1, 1).empty());
  EXPECT_EQ(sample(100, kS1, 7), sample(100, kS1, 7));
  EXPECT_NE(sample(100, kS1, 7), sample(100, kS1, 8));
}

TEST(SampleTest, SupportAndKolmogorovSmirnov) {
  auto xs = sample(100000, kS1, 2024);
  for (double x : xs) {
    ASSERT_GE(x, -0.034);
    ASSERT_LE(x, 0.034);
  }
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double ks = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double f = testing::laplace_cdf_closed(xs[k], kS1.a(), kS1.lambda());
    ks = std::max({ks, std::abs((k + 1) / n - f), std::abs(k / n - f)});
  }
  EXPECT_LT(ks, 0.01);
}

TEST(SampleTest, MeanWithinThreeSigma) {
  const auto xs = sample(1000000, kS1, 99);
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  const double sigma = std::sqrt(LaplaceOracle(kS1.a(), kS1.lambda()).variance());
  EXPECT_LT(std::abs(mean), 3.0 * sigma / std::sqrt(1e6));
}

TEST(VarianceTest, MatchesQuadrature) {
  for (const auto& p : {kS1, kUnit, NoiseParams(0.015, 0.0045), NoiseParams(1e-3, 10.0)}) {
    const LaplaceOracle o(p.a(), p.lambda());
    EXPECT_NEAR(variance(p), o.variance(), 1e-9 * o.variance());
  }
}

TEST(DeltaProfileTest, ZeroShiftIsZero) { EXPECT_EQ(delta_profile(std::log(2.0), 0.0, kS1), 0.0); }

TEST(DeltaProfileTest, DisjointSupportsGiveOne) {
  EXPECT_NEAR(delta_profile(0.0, 2.0 * kS1.a() + 1.0, kS1), 1.0, 1e-12);
  EXPECT_NEAR(delta_profile(0.0, 3.0, kUnit), 1.0, 1e-12);
}

TEST(DeltaProfileTest, MatchesIntegrationOracle) {
  const std::vector<NoiseParams> params = {kS1, kUnit, NoiseParams(0.015, 0.0045),
                                           NoiseParams(0.0334383, 0.0134329)};
  for (const auto& p : params) {
    const LaplaceOracle o(p.a(), p.lambda());
    for (double eps : {0.0, 0.1, std::log(2.0), 2.0}) {
      for (double frac : {0.05, 0.3, 0.9, 1.5, 2.2}) {
        const double s = frac * p.a();
        EXPECT_NEAR(hockey_stick(eps, s, p), o.hockey_stick(eps, s), 1e-9)
            << "a=" << p.a() << " eps=" << eps << " s=" << s;
      }
    }
  }
}

TEST(DeltaProfileTest, S1ConfigurationValue) {
  // The built-in S1 noise needs delta of about 0.0797 at eps = ln 2, mu = 0.01,
  // more than the stated 0.05.
  const LaplaceOracle o(kS1.a(), kS1.lambda());
  const double d = delta_profile(std::log(2.0), 0.01, kS1);
  EXPECT_NEAR(d, o.hockey_stick(std::log(2.0), 0.01), 1e-10);
  EXPECT_NEAR(d, 0.0797284302, 1e-8);
}

TEST(DeltaProfileTest, MonotoneInShiftAndEpsilon) {
  for (const auto& p : {kS1, NoiseParams(0.015, 0.0045)}) {
    double prev = 0.0;
    for (int k = 0; k <= 200; ++k) {
      const double d = delta_profile(0.5, 2.5 * p.a() * k / 200.0, p);
      EXPECT_GE(d, prev - 1e-14);
      prev = d;
    }
    prev = 1.0;
    for (int k = 0; k <= 100; ++k) {
      const double d = delta_profile(4.0 * k / 100.0, 0.6 * p.a(), p);
      EXPECT_LE(d, prev + 1e-14);
      prev = d;
    }
  }
}

TEST(DeltaProfileTest, GridSupremumEqualsEndpoint) {
  EXPECT_EQ(delta_profile(0.7, 0.01, kS1, 0.001), delta_profile(0.7, 0.01, kS1));
  EXPECT_THROW(delta_profile(0.7, 0.01, kS1, 0.0), ParameterError);
}

TEST(DeltaProfileTest, RejectsInvalid) {
  EXPECT_THROW(delta_profile(-1.0, 0.01, kS1), ParameterError);
  EXPECT_THROW(delta_profile(1.0, -0.01, kS1), ParameterError);
}

// Planner conditions: every (a, lambda) meeting both planner bounds should
// satisfy delta_profile <= delta. This sweep checks that claim.
TEST(DeltaProfileTest, PlannerConditionsImplyBudget) {
  int k = 0;
  for (double eps : {0.2, 0.7, 1.5, 2.5}) {
    for (double delta : {0.02, 0.1, 0.25, 0.4, 0.49}) {
      const double mu = 0.01 * (1 + k++ % 3);
      const double lambda = mu / (eps - std::log(1.0 - delta));
      const double a = std::max(mu, lambda * std::log((std::exp(mu / lambda) - 1.0) / (2.0 * delta) + 1.0));
      EXPECT_LE(delta_profile(eps, mu, NoiseParams(a, lambda)), delta + 1e-6)
          << "mu=" << mu << " eps=" << eps << " delta=" << delta;
    }
  }
}

}  // namespace
}  // namespace llqfp
