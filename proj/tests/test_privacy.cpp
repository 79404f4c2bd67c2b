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

#include <cmath>

#include <gtest/gtest.h>

#include "llqfp/privacy.hpp"
#include "test_helpers.hpp"

namespace llqfp {
namespace {

const double kLn2 = std::log(2.0);

TEST(MinScaleTest, Values) {
  EXPECT_NEAR(min_scale(0.01, kLn2, 0.05), 0.01 / (0.69314718056 + 0.05129329439), 1e-12);
  // High-precision references: 0.0134329074 and 0.0044603819.
  EXPECT_NEAR(min_scale(0.01, kLn2, 0.05), 0.0134329074473084, 1e-15);
  EXPECT_NEAR(min_scale(0.01, 3.0 * kLn2, 0.15), 0.00446038194185797, 1e-15);
  EXPECT_DOUBLE_EQ(min_scale(0.01, 0.5, 0.0), 0.02);
}

TEST(MinScaleTest, Errors) {
  EXPECT_THROW(min_scale(0.01, kLn2, 1.0), DomainError);
  EXPECT_THROW(min_scale(0.01, kLn2, -0.1), DomainError);
  EXPECT_THROW(min_scale(0.0, kLn2, 0.05), ParameterError);
  EXPECT_THROW(min_scale(0.01, 0.0, 0.05), ParameterError);
}

TEST(MinBoundTest, Values) {
  EXPECT_NEAR(min_bound(0.01, 0.05, 0.013434), 0.0334396074355107, 1e-15);
  EXPECT_NEAR(min_bound(0.01, 0.05, min_scale(0.01, kLn2, 0.05)), 0.033438, 5e-7);
  EXPECT_NEAR(min_bound(0.01, 0.15, 0.0045), 0.0150628765603413, 1e-15);
  // The logarithmic branch drops below mu only when 2 delta > 1.
  EXPECT_EQ(min_bound(0.01, 0.9, 0.5), 0.01);
  EXPECT_GT(min_bound(0.01, 0.49, 0.5), 0.01);
}

TEST(MinBoundTest, LargeRatioStaysFinite) {
  // mu / lambda = 1000: e^1000 overflows, the result is about
  // lambda (1000 + ln(1 / (2 delta))).
  const double a = min_bound(1.0, 0.05, 0.001);
  EXPECT_TRUE(std::isfinite(a));
  EXPECT_NEAR(a, 0.001 * (1000.0 + std::log(10.0)), 1e-12);
  // Both branches agree where they meet.
  const double t = 30.0;
  const double direct = 1.0 / t * std::log((std::exp(t) - 1.0) / 0.2 + 1.0);
  EXPECT_NEAR(min_bound(1.0, 0.1, 1.0 / t), direct, 1e-14);
  EXPECT_NEAR(min_bound(1.0, 0.1, 1.0 / 30.5), 1.0 / 30.5 * std::log((std::exp(30.5) - 1.0) / 0.2 + 1.0), 1e-14);
}

TEST(PlanTest, RingBudget) {
  const auto p = plan(PrivacyBudget(kLn2, 0.05, 0.01, 5));
  EXPECT_NEAR(p.a(), 0.03344, 5e-6);
  EXPECT_NEAR(p.lambda(), 0.01343, 5e-6);
}

TEST(PlanTest, Homogeneous) {
  for (double c : {0.1, 3.0, 17.0}) {
    const auto base = plan(PrivacyBudget(1.2, 0.1, 0.01));
    const auto scaled = plan(PrivacyBudget(1.2, 0.1, 0.01 * c));
    EXPECT_NEAR(scaled.a(), c * base.a(), 1e-14 * c);
    EXPECT_NEAR(scaled.lambda(), c * base.lambda(), 1e-14 * c);
  }
}

TEST(PrivacyBudgetTest, Validation) {
  EXPECT_THROW(PrivacyBudget(kLn2, 0.6, 0.01), ParameterError);
  EXPECT_THROW(PrivacyBudget(kLn2, 0.5, 0.01), ParameterError);
  EXPECT_THROW(PrivacyBudget(kLn2, 0.0, 0.01), ParameterError);
  EXPECT_THROW(PrivacyBudget(kLn2, 0.05, 0.0), ParameterError);
  EXPECT_THROW(PrivacyBudget(0.0, 0.05, 0.01), ParameterError);
  EXPECT_THROW(PrivacyBudget(kLn2, 0.05, 0.01, 0), ParameterError);
}

// The planner's (a, lambda) meet the budget on every grid point.
TEST(PlanTest, PlannedNoiseMeetsBudgetOnGrid) {
  for (const auto& g : testing::budget_grid()) {
    const auto p = plan(PrivacyBudget(g.epsilon, g.delta, g.mu));
    const testing::LaplaceOracle o(p.a(), p.lambda());
    EXPECT_LE(o.hockey_stick(g.epsilon, g.mu), g.delta + 1e-6)
        << "mu=" << g.mu << " eps=" << g.epsilon << " delta=" << g.delta;
  }
}

TEST(PlanTest, ShrunkNoiseFailsSomewhere) {
  bool a_fails = false;
  bool lambda_fails = false;
  for (const auto& g : testing::budget_grid()) {
    const auto p = plan(PrivacyBudget(g.epsilon, g.delta, g.mu));
    a_fails = a_fails || delta_profile(g.epsilon, g.mu, NoiseParams(0.9 * p.a(), p.lambda())) > g.delta;
    lambda_fails = lambda_fails || delta_profile(g.epsilon, g.mu, NoiseParams(p.a(), 0.9 * p.lambda())) > g.delta;
  }
  EXPECT_TRUE(a_fails);
  EXPECT_TRUE(lambda_fails);
}

TEST(CheckBoundsTest, BuiltInSettings) {
  const auto s1 = check_bounds(NoiseParams(0.034, 0.013), 0.01, kLn2, 0.05);
  EXPECT_EQ(s1.lambda_status, BoundStatus::violation);
  EXPECT_EQ(s1.a_status, BoundStatus::compliant);
  EXPECT_TRUE(s1.flagged());
  EXPECT_FALSE(s1.acceptable());

  const auto compliant = check_bounds(NoiseParams(0.03344, 0.01343), 0.01, kLn2, 0.05);
  EXPECT_EQ(compliant.lambda_status, BoundStatus::near_violation);
  EXPECT_EQ(compliant.a_status, BoundStatus::compliant);
  EXPECT_TRUE(compliant.acceptable());

  const auto s2 = check_bounds(NoiseParams(0.015, 0.0045), 0.01, 3.0 * kLn2, 0.15);
  EXPECT_EQ(s2.lambda_status, BoundStatus::compliant);
  EXPECT_EQ(s2.a_status, BoundStatus::violation);

  const auto exact = plan(PrivacyBudget(kLn2, 0.05, 0.01));
  const auto planned = check_bounds(exact, 0.01, kLn2, 0.05);
  EXPECT_FALSE(planned.flagged());
}

TEST(MechanismInputTest, StackingLayout) {
  const auto v = MechanismInput::stack(ring_lattice(10, 4, 0.08), Eigen::VectorXd::Constant(10, 10.0));
  EXPECT_EQ(v.players(), 10u);
  EXPECT_EQ(v.m(), 50u);
  EXPECT_EQ(v.l(), 60u);
  // Player 1 lists columns 1, 2, 3, 9, 10.
  const std::size_t cols[] = {0, 1, 2, 8, 9};
  for (std::size_t k = 0; k < 5; ++k) {
    const auto c = v.coordinate(k);
    EXPECT_EQ(c.player, 0u);
    EXPECT_EQ(c.column, cols[k]);
    EXPECT_EQ(c.kind, k == 0 ? MechanismInput::Kind::diagonal : MechanismInput::Kind::interaction);
    EXPECT_EQ(v.value(k), k == 0 ? 0.0 : 0.08);
  }
  // Player 4 lists columns 2, 3, 4, 5, 6 with the diagonal in the middle.
  EXPECT_EQ(v.coordinate(17).kind, MechanismInput::Kind::diagonal);
  EXPECT_EQ(v.coordinate(55).kind, MechanismInput::Kind::benefit);
  EXPECT_EQ(v.coordinate(55).player, 5u);
  EXPECT_EQ(v.value(55), 10.0);
  EXPECT_EQ(v.row_indices(0), (std::vector<std::size_t>{0, 1, 2, 3, 4, 50}));
  EXPECT_THROW(v.coordinate(60), ParameterError);
}

TEST(AdjacencyTest, Cases) {
  const auto net = ring_lattice(10, 4, 0.08);
  const auto v = MechanismInput::stack(net, Eigen::VectorXd::Constant(10, 10.0));
  const auto same = adjacency_check(v, v, 0.01);
  EXPECT_TRUE(same.adjacent);
  EXPECT_FALSE(same.i0.has_value());

  auto w = v;
  w.set_value(v.m() + 2, 10.009);
  const auto one = adjacency_check(v, w, 0.01);
  EXPECT_TRUE(one.adjacent);
  EXPECT_EQ(one.i0, 3u);
  EXPECT_NEAR(one.max_gap, 0.009, 1e-12);

  auto two = v;
  two.set_value(v.m() + 1, 10.001);
  two.set_value(v.m() + 4, 10.001);
  const auto r2 = adjacency_check(v, two, 0.01);
  EXPECT_FALSE(r2.adjacent);
  EXPECT_EQ(r2.differing_players, (std::vector<std::size_t>{2, 5}));

  auto far = v;
  far.set_value(v.m(), 10.02);
  EXPECT_FALSE(adjacency_check(v, far, 0.01).adjacent);

  const auto other = MechanismInput::stack(ring_lattice(10, 2, 0.08), Eigen::VectorXd::Zero(10));
  EXPECT_THROW(adjacency_check(v, other, 0.01), ParameterError);
}

TEST(WorstCaseNeighborTest, MovesRowByMu) {
  const auto net = ring_lattice(10, 4, 0.08);
  const auto v = MechanismInput::stack(net, Eigen::VectorXd::Constant(10, 10.0));
  const auto w = worst_case_neighbor(v, 3, 0.01);
  const auto adj = adjacency_check(v, w, 0.01);
  EXPECT_TRUE(adj.adjacent);
  EXPECT_EQ(adj.i0, 3u);
  std::size_t moved = 0;
  for (std::size_t k = 0; k < v.l(); ++k) moved += v.value(k) != w.value(k);
  EXPECT_EQ(moved, 5u);
  const auto with_diag = worst_case_neighbor(v, 3, 0.01, -1.0, true);
  moved = 0;
  for (std::size_t k = 0; k < v.l(); ++k) moved += v.value(k) != with_diag.value(k);
  EXPECT_EQ(moved, 6u);
  EXPECT_THROW(worst_case_neighbor(v, 0, 0.01), DomainError);
  EXPECT_THROW(worst_case_neighbor(v, 11, 0.01), DomainError);
}

TEST(AuditTest, IdenticalInputsVacuous) {
  const auto net = ring_lattice(10, 4, 0.08);
  const auto v = MechanismInput::stack(net, Eigen::VectorXd::Constant(10, 10.0));
  const auto r = audit_mechanism(net, PrivacyBudget(kLn2, 0.05, 0.01, 5), NoiseParams(0.034, 0.013), v, v);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.diff_count(), 0u);
  EXPECT_EQ(r.composed_epsilon, 0.0);
  EXPECT_EQ(r.composed_delta, 0.0);
}

TEST(AuditTest, NonAdjacentRejected) {
  const auto net = ring_lattice(10, 4, 0.08);
  const auto v = MechanismInput::stack(net, Eigen::VectorXd::Constant(10, 10.0));
  auto w = v;
  w.set_value(v.m(), 11.0);
  EXPECT_THROW(audit_mechanism(net, PrivacyBudget(kLn2, 0.05, 0.01, 5), NoiseParams(0.034, 0.013), v, w),
               AssumptionError);
}

TEST(AuditTest, RingWorstCaseAccounting) {
  const auto game = testing::ring_game();
  const PrivacyBudget budget(kLn2, 0.05, 0.01, 5);
  const NoiseParams s1(0.034, 0.013);
  const auto r = audit_worst_case(game.network(), budget, s1, game.b());
  EXPECT_EQ(r.diff_count(), 5u);
  EXPECT_TRUE(r.within_group_factor);
  EXPECT_DOUBLE_EQ(r.composed_epsilon, 5.0 * kLn2);
  EXPECT_DOUBLE_EQ(r.composed_delta, 0.25);
  EXPECT_DOUBLE_EQ(r.network_epsilon, 5.0 * kLn2);
  EXPECT_DOUBLE_EQ(r.network_delta, 0.25);
  // Each coordinate moves by mu; the oracle divergence there is about 0.0797,
  // so the stated delta = 0.05 is not met.
  const double required = testing::LaplaceOracle(0.034, 0.013).hockey_stick(kLn2, 0.01);
  for (const auto& c : r.coordinates) {
    EXPECT_NEAR(c.gap, 0.01, 1e-12);
    EXPECT_NEAR(c.delta_required, required, 1e-9);
    EXPECT_NE(c.kind, MechanismInput::Kind::diagonal);
  }
  EXPECT_EQ(r.pass, required <= 0.05);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.bounds.lambda_status, BoundStatus::violation);
}

TEST(AuditTest, DiagonalHalvedReading) {
  const auto net = ring_lattice(10, 4, 0.08);
  const auto v = MechanismInput::stack(net, Eigen::VectorXd::Constant(10, 10.0));
  const auto w = worst_case_neighbor(v, 1, 0.01, 1.0, true);
  const NoiseParams noise(0.2, 0.05);
  const auto r = audit_mechanism(net, PrivacyBudget(kLn2, 0.05, 0.01, 5), noise, v, w);
  ASSERT_EQ(r.diff_count(), 6u);
  const testing::LaplaceOracle halved(0.1, 0.025);
  const testing::LaplaceOracle full(0.2, 0.05);
  for (const auto& c : r.coordinates) {
    EXPECT_NEAR(c.delta_required, full.hockey_stick(kLn2, 0.01), 1e-9);
    if (c.kind == MechanismInput::Kind::diagonal) {
      EXPECT_NEAR(c.delta_required_halved, halved.hockey_stick(kLn2, 0.01), 1e-9);
    } else {
      EXPECT_EQ(c.delta_required_halved, c.delta_required);
    }
  }
  EXPECT_EQ(r.pass, r.pass_full && r.pass_halved);
  EXPECT_FALSE(r.within_group_factor);
}

TEST(AuditTest, ShrunkBoundFails) {
  const auto game = testing::ring_game();
  const PrivacyBudget budget(kLn2, 0.05, 0.01, 5);
  const auto planned = plan(budget);
  const auto r = audit_worst_case(game.network(), budget, NoiseParams(0.8 * planned.a(), planned.lambda()),
                                  game.b());
  std::size_t failing = 0;
  for (const auto& c : r.coordinates) failing += !c.pass_full;
  EXPECT_GE(failing, 1u);
  EXPECT_FALSE(r.pass);
}

TEST(AuditTest, GenerousNoisePasses) {
  const auto game = testing::ring_game();
  const PrivacyBudget budget(kLn2, 0.05, 0.01, 5);
  const auto r = audit_worst_case(game.network(), budget, NoiseParams(0.5, 0.05), game.b());
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_delta_required, 0.05);
}

TEST(AuditTest, JsonIsDeterministic) {
  const auto game = testing::ring_game();
  const PrivacyBudget budget(kLn2, 0.05, 0.01, 5);
  const auto a = to_json(audit_worst_case(game.network(), budget, NoiseParams(0.034, 0.013), game.b())).dump();
  const auto b = to_json(audit_worst_case(game.network(), budget, NoiseParams(0.034, 0.013), game.b())).dump();
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("\"coordinates\""), std::string::npos);
}

}  // namespace
}  // namespace llqfp
