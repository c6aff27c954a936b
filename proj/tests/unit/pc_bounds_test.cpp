#include <algorithm>

#include <gtest/gtest.h>

#include "support/instances.hpp"
#include "support/vaccine.hpp"
#include "unitsel/errors.hpp"
#include "unitsel/lp_oracle.hpp"
#include "unitsel/pc_bounds.hpp"

namespace unitsel {
namespace {

using testing::r;

class VaccineBounds : public ::testing::Test {
 protected:
  BoundsEvaluator ev{testing::vaccine_experimental(), testing::vaccine_observational()};
};

TEST_F(VaccineBounds, SameOutcome) {
  EXPECT_EQ(ev.effect_with_same_outcome(0, 0), (Interval{r(14, 1200), r(104, 1200)}));
}

TEST_F(VaccineBounds, OtherOutcome) {
  EXPECT_EQ(ev.effect_with_other_outcome(1, 0, 0), (Interval{r(0), r(91, 1200)}));
  EXPECT_THROW(ev.effect_with_other_outcome(1, 1, 0), InvalidQuery);
}

TEST_F(VaccineBounds, WithTreatmentCollapsesForTwoArms) {
  EXPECT_EQ(ev.effect_with_treatment(0, 0, 1), Interval::point(r(90, 1200)));
  EXPECT_THROW(ev.effect_with_treatment(0, 0, 0), InvalidQuery);
}

TEST_F(VaccineBounds, WithTreatmentOutcome) {
  EXPECT_EQ(ev.effect_with_treatment_outcome(1, 0, 0, 1), (Interval{r(0), r(91, 1200)}));
  EXPECT_EQ(ev.effect_with_treatment_outcome(0, 1, 1, 0), (Interval{r(517, 1200), r(537, 1200)}));
}

TEST_F(VaccineBounds, JointEffects) {
  EXPECT_EQ(ev.joint_effects({{0, 1}, {1, 0}}), (Interval{r(517, 1200), r(628, 1200)}));
  EXPECT_EQ(ev.joint_effects({{0, 0}, {1, 0}}), (Interval{r(0), r(104, 1200)}));
  EXPECT_EQ(ev.joint_effects({{0, 1}, {1, 2}}), (Interval{r(345, 1200), r(426, 1200)}));
  // Pair order does not matter.
  EXPECT_EQ(ev.joint_effects({{1, 0}, {0, 1}}), ev.joint_effects({{0, 1}, {1, 0}}));
}

TEST_F(VaccineBounds, SinglePairIsExperimentalPoint) {
  EXPECT_EQ(ev.joint_effects({{1, 2}}), Interval::point(r(213, 600)));
}

TEST_F(VaccineBounds, JointWithOutcomeCappedByMarginal) {
  const Interval b = ev.joint_effects_with_outcome({{0, 1}, {1, 0}}, 1);
  EXPECT_GE(b.lower, 0);
  EXPECT_LE(b.upper, r(998, 1200));
  const Interval lp = oracle_query_bounds(CounterfactualQuery({{0, 1}, {1, 0}}, {}, 1), testing::vaccine_experimental(),
                                          testing::vaccine_observational());
  EXPECT_TRUE(b.contains(lp));
}

TEST_F(VaccineBounds, ResponseTypeTable) {
  const std::vector<Interval> expected{
      {r(0), r(13, 150)},  {r(0), r(79, 1200)},      {r(0), r(1, 16)},
      {r(517, 1200), r(157, 300)}, {r(31, 1200), r(29, 300)}, {r(23, 80), r(71, 200)},
      {r(0), r(3, 50)},    {r(0), r(71, 1200)},      {r(0), r(67, 1200)},
  };
  EXPECT_EQ(ev.response_type_bounds(), expected);
}

TEST_F(VaccineBounds, QueryDispatchMatchesNamedOperations) {
  EXPECT_EQ(ev.bound(CounterfactualQuery({{0, 0}}, {}, 0)), ev.effect_with_same_outcome(0, 0));
  EXPECT_EQ(ev.bound(CounterfactualQuery({{0, 1}}, {}, 0)), ev.effect_with_other_outcome(1, 0, 0));
  EXPECT_EQ(ev.bound(CounterfactualQuery({{0, 0}}, 1)), ev.effect_with_treatment(0, 0, 1));
  EXPECT_EQ(ev.bound(CounterfactualQuery({{0, 1}}, 1, 0)), ev.effect_with_treatment_outcome(1, 0, 0, 1));
  EXPECT_EQ(ev.bound(CounterfactualQuery({{0, 1}, {1, 0}}, {}, 1)), ev.joint_effects_with_outcome({{0, 1}, {1, 0}}, 1));
}

TEST(CounterfactualQuery, Validation) {
  EXPECT_THROW(CounterfactualQuery({}), InvalidQuery);
  EXPECT_THROW(CounterfactualQuery({{0, 1}, {0, 2}}), InvalidQuery);
  EXPECT_THROW(CounterfactualQuery({{0, 1}}, 0), InvalidQuery);
  EXPECT_THROW(CounterfactualQuery({{0, 3}}).check_arity(2, 3), InvalidQuery);
  EXPECT_THROW(CounterfactualQuery({{0, 1}}, 2).check_arity(2, 3), InvalidQuery);
  EXPECT_EQ(CounterfactualQuery({{1, 0}, {0, 1}}, 2, 1).to_string(), "P(y2_x1, y1_x2, x3, y2)");
}

// P(y_i|do(x_j)) = 0 forces every event containing that pair to zero.
TEST(PcBounds, ZeroEffectGivesZero) {
  const ExperimentalDistribution exp(ProbabilityTable(3, 2, {r(0), r(1), r(1, 2), r(1, 2), r(1, 2), r(1, 2)}));
  const ObservationalDistribution obs(
      ProbabilityTable(3, 2, {r(0), r(1, 3), r(1, 6), r(1, 6), r(1, 6), r(1, 6)}));
  ASSERT_TRUE(validate(exp, obs).ok());
  BoundsEvaluator ev(exp, obs);
  const Interval zero = Interval::point(0);
  EXPECT_EQ(ev.effect_with_same_outcome(0, 0), zero);
  EXPECT_EQ(ev.effect_with_other_outcome(0, 1, 0), zero);
  EXPECT_EQ(ev.effect_with_treatment(0, 0, 1), zero);
  EXPECT_EQ(ev.joint_effects({{0, 0}, {1, 1}}), zero);
  EXPECT_EQ(ev.joint_effects_with_treatment({{0, 0}, {1, 1}}, 2), zero);
  EXPECT_EQ(ev.joint_effects_with_outcome({{0, 0}, {1, 1}}, 0), zero);
  EXPECT_EQ(ev.joint_effects_with_treatment_outcome({{0, 0}, {1, 1}}, 2, 1), zero);
}

TEST(PcBounds, ZeroObservedEventGivesZero) {
  // Nobody picks x3 naturally.
  const ExperimentalDistribution exp(ProbabilityTable(3, 2, std::vector<Rational>(6, r(1, 2))));
  const ObservationalDistribution obs(ProbabilityTable(3, 2, {r(1, 4), r(1, 4), r(1, 4), r(1, 4), r(0), r(0)}));
  BoundsEvaluator ev(exp, obs);
  EXPECT_EQ(ev.joint_effects_with_treatment({{0, 0}, {1, 0}}, 2), Interval::point(0));
  EXPECT_EQ(ev.joint_effects_with_treatment_outcome({{0, 0}, {1, 0}}, 2, 0), Interval::point(0));
  EXPECT_EQ(ev.effect_with_treatment(0, 0, 2), Interval::point(0));
}

TEST(PcBounds, UniformThreeArmToy) {
  const ExperimentalDistribution exp(ProbabilityTable(3, 2, std::vector<Rational>(6, r(1, 2))));
  const ObservationalDistribution obs(ProbabilityTable(3, 2, std::vector<Rational>(6, r(1, 6))));
  BoundsEvaluator ev(exp, obs);
  const CounterfactualQuery query({{0, 0}, {1, 0}}, 2);
  const Interval b = ev.bound(query);
  EXPECT_GE(b.lower, 0);
  EXPECT_LE(b.upper, obs.treatment_marginal(2));
  EXPECT_TRUE(b.contains(oracle_query_bounds(query, exp, obs)));
}

TEST(PcBounds, DeterministicPopulation) {
  // Everyone is response type (2,1,2); natural choice spread over arms.
  std::vector<Rational> joint(8 * 3);
  const std::size_t type = ordinal(ResponseAssignment({1, 0, 1}), 2);
  joint[type * 3 + 0] = r(1, 2);
  joint[type * 3 + 1] = r(1, 3);
  joint[type * 3 + 2] = r(1, 6);
  const auto inst = testing::instance_from_joint(3, 2, joint);
  BoundsEvaluator ev(inst.experimental, inst.observational);
  const auto bounds = ev.response_type_bounds();
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    EXPECT_EQ(bounds[k], Interval::point(k == type ? 1 : 0)) << k;
  }
  // Consistency: Y = y_2 holds exactly for those who took x1 or x3.
  EXPECT_EQ(ev.joint_effects_with_outcome({{0, 1}, {1, 0}}, 1), Interval::point(r(2, 3)));
  EXPECT_EQ(ev.joint_effects_with_treatment_outcome({{0, 1}, {1, 0}}, 2, 1), Interval::point(r(1, 6)));
}

TEST(PcBounds, RequiresValidData) {
  const ExperimentalDistribution exp(ProbabilityTable(2, 2, {r(0), r(1), r(1, 2), r(1, 2)}));
  const ObservationalDistribution obs(ProbabilityTable(2, 2, {r(1, 4), r(1, 4), r(1, 4), r(1, 4)}));
  EXPECT_THROW(BoundsEvaluator(exp, obs), InvalidData);
}

std::vector<CounterfactualQuery> random_queries(testing::Gen& gen, int m, int n, int count) {
  std::vector<CounterfactualQuery> out;
  while (static_cast<int>(out.size()) < count) {
    std::vector<CounterfactualPair> pairs;
    for (int j = 0; j < m; ++j) {
      if (gen.chance(60)) pairs.push_back({j, gen.below(n)});
    }
    if (pairs.empty()) continue;
    std::optional<int> x;
    std::optional<int> y;
    if (static_cast<int>(pairs.size()) < m && gen.chance(50)) {
      int p = gen.below(m);
      while (std::any_of(pairs.begin(), pairs.end(), [&](const auto& pr) { return pr.treatment == p; })) {
        p = (p + 1) % m;
      }
      x = p;
    }
    if (gen.chance(50)) y = gen.below(n);
    out.emplace_back(std::move(pairs), x, y);
  }
  return out;
}

// Caps every interval must respect regardless of the theorem used.
void expect_caps(const CounterfactualQuery& query, const Interval& b, const testing::Instance& inst) {
  EXPECT_LE(0, b.lower);
  EXPECT_LE(b.lower, b.upper);
  EXPECT_LE(b.upper, 1);
  for (const auto& p : query.pairs()) EXPECT_LE(b.upper, inst.experimental.effect(p.treatment, p.outcome));
  const auto& x = query.observed_treatment();
  const auto& y = query.observed_outcome();
  if (x) EXPECT_LE(b.upper, inst.observational.treatment_marginal(*x));
  if (y) EXPECT_LE(b.upper, inst.observational.outcome_marginal(*y));
  if (x && y) EXPECT_LE(b.upper, inst.observational.joint(*x, *y));
}

class PcBoundsProperty : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(PcBoundsProperty, OracleContainmentCapsAndMemoTransparency) {
  const auto [m, n] = GetParam();
  testing::Gen gen(1000 + 10 * m + n);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = testing::random_instance(gen, m, n);
    BoundsEvaluator cached(inst.experimental, inst.observational, true);
    BoundsEvaluator fresh(inst.experimental, inst.observational, false);
    for (const auto& query : random_queries(gen, m, n, 8)) {
      const Interval b = cached.bound(query);
      EXPECT_EQ(b, fresh.bound(query)) << query.to_string();
      expect_caps(query, b, inst);
      const Interval lp = oracle_query_bounds(query, inst.experimental, inst.observational);
      EXPECT_TRUE(b.contains(lp)) << query.to_string() << " theorem [" << to_fraction_string(b.lower) << ", "
                                  << to_fraction_string(b.upper) << "] oracle [" << to_fraction_string(lp.lower)
                                  << ", " << to_fraction_string(lp.upper) << "]";
    }
    const auto types = cached.response_type_bounds();
    for (std::size_t k = 0; k < types.size(); ++k) EXPECT_TRUE(types[k].contains(inst.fractions[k]));
  }
}

INSTANTIATE_TEST_SUITE_P(Arities, PcBoundsProperty,
                         ::testing::Values(std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 2}, std::pair{3, 3}));

}  // namespace
}  // namespace unitsel
