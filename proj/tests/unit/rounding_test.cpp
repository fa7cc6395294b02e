#include "fairround/errors.hpp"
#include "fairround/oracle.hpp"
#include "fairround/rounding.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>

using namespace fairround;
using fairround::testing::uniform;

TEST(Budget, ConditionArithmetic) {
  DeviationBudget tight{{3}, 3, std::nullopt, true, 1};
  EXPECT_EQ(check_condition(tight), 0);

  DeviationBudget failing{{1, 1, 1}, 7, std::nullopt, false, 1};
  EXPECT_LT(check_condition(failing), 0);

  DeviationBudget loose{{3, 3, 3}, 7, std::nullopt, false, 1};
  EXPECT_EQ(check_condition(loose), Rational(1, 8));
}

TEST(Budget, MinimalTotalTolerance) {
  DeviationBudget with_rows{{3}, 3, std::nullopt, true, 1};
  EXPECT_EQ(min_total_tolerance(with_rows), 2);

  DeviationBudget without_rows{{3, 3, 3}, 7, std::nullopt, false, 1};
  EXPECT_EQ(min_total_tolerance(without_rows), 7);

  DeviationBudget tight_without_rows{{1, 1}, std::nullopt, std::nullopt, false, 1};
  EXPECT_EQ(check_condition(tight_without_rows), 0);
  try {
    min_total_tolerance(tight_without_rows);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BudgetViolated);
  }

  // Stable matching with couples: agent rows, any number of dimensions.
  DeviationBudget couples{{}, 3, std::nullopt, true, 2};
  EXPECT_EQ(min_total_tolerance(couples), 2);
}

TEST(Budget, AdmissibleTotals) {
  DeviationBudget b{{3, 3, 3}, 7, 6, false, 1};
  EXPECT_FALSE(total_tolerance_admissible(b));
  b.total = 7;
  EXPECT_TRUE(total_tolerance_admissible(b));
  DeviationBudget rows{{3}, 3, 2, true, 1};
  EXPECT_TRUE(total_tolerance_admissible(rows));
  rows.total = 1;
  EXPECT_FALSE(total_tolerance_admissible(rows));
}

TEST(Rounding, IntegralInputIsUnchanged) {
  Instance inst({{"a1", 1, true}, {"a2", 1, false}}, {{"r1", 1}, {"r2", 1}},
                {{"d", {{"g", {0, 1}}}}});
  auto u = UtilityModel::additive({{1, 2}, {3, 4}});
  Allocation x;
  x.set(0, Bundle({1, 0}), 1);
  x.set(1, Bundle({0, 1}), 1);
  DeviationBudget budget{{3}, 3, 2, true, 1};
  auto result = iterative_round(inst, x, u, budget);
  EXPECT_EQ(result.rounded, x);
  EXPECT_EQ(result.certificate.iterations, 0u);
  EXPECT_TRUE(result.certificate.ok());
  EXPECT_EQ(result.certificate.total_deviation, 0);
}

TEST(Rounding, HalfMatchingBecomesPerfectMatching) {
  Instance inst({{"a1", 1, true}, {"a2", 1, true}}, {{"r1", 1}, {"r2", 1}}, {});
  auto u = UtilityModel::additive({{1, 1}, {1, 1}});
  Allocation x;
  for (std::size_t a = 0; a < 2; ++a) {
    x.set(a, Bundle({1, 0}), Rational(1, 2));
    x.set(a, Bundle({0, 1}), Rational(1, 2));
  }
  // delta = 1 keeps both resource rows active, which forces a matching.
  DeviationBudget budget{{}, 1, 2, true, 1};
  auto result = iterative_round(inst, x, u, budget);
  ASSERT_TRUE(result.certificate.ok());
  EXPECT_TRUE(result.rounded.is_integral());
  EXPECT_EQ(result.certificate.max_resource_deviation(), 0);
  EXPECT_EQ(result.certificate.total_deviation, 0);
  Allocation m1, m2;
  m1.set(0, Bundle({1, 0}), 1);
  m1.set(1, Bundle({0, 1}), 1);
  m2.set(0, Bundle({0, 1}), 1);
  m2.set(1, Bundle({1, 0}), 1);
  EXPECT_TRUE(result.rounded == m1 || result.rounded == m2);

  // With delta = 2 no resource row is needed; the guarantee is only < 2.
  auto loose = iterative_round(inst, x, u, {{}, 2, 2, true, 1});
  ASSERT_TRUE(loose.certificate.ok());
  EXPECT_LT(loose.certificate.max_resource_deviation(), 2);
}

TEST(Rounding, RejectsInvalidBudgets) {
  Instance inst({{"a1", 1, true}, {"a2", 1, true}}, {{"r1", 1}, {"r2", 1}}, {});
  auto u = UtilityModel::additive({{1, 1}, {1, 1}});
  Allocation x;
  for (std::size_t a = 0; a < 2; ++a) {
    x.set(a, Bundle({1, 0}), Rational(1, 2));
    x.set(a, Bundle({0, 1}), Rational(1, 2));
  }
  auto kind_of = [&](const DeviationBudget& b) {
    try {
      iterative_round(inst, x, u, b);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvariantFailure;
  };
  EXPECT_EQ(kind_of({{}, 2, 2, false, 1}), ErrorKind::BudgetViolated);  // rows forced
  EXPECT_EQ(kind_of({{}, 0, 2, true, 1}), ErrorKind::BudgetViolated);   // condition fails
  EXPECT_EQ(kind_of({{}, 2, 1, true, 1}), ErrorKind::BudgetViolated);   // total too small

  Allocation broken;
  broken.set(0, Bundle({1, 0}), Rational(3, 4));
  broken.set(1, Bundle({1, 0}), Rational(3, 4));
  try {
    iterative_round(inst, broken, u, {{}, 2, 2, true, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InputNotAllocation);
  }
}

TEST(Rounding, VerificationIsStrict) {
  Instance inst({{"a1", 1, false}}, {{"r1", 1}}, {{"d", {{"g", {0}}}}});
  auto u = UtilityModel::additive({{2}});
  Allocation x;
  x.set(0, Bundle({1}), Rational(1, 2));
  Allocation y;
  y.set(0, Bundle({1}), 1);
  // Group deviation is 1; with alpha = 1 the limit is 2, so it passes.
  EXPECT_TRUE(verify_approximation(inst, x, y, u, {{1}, 2, 2, true, 1}).ok());
  // Build a case where the deviation equals the limit exactly.
  Allocation zero;
  zero.set(0, Bundle({1}), 1);
  Allocation none;
  auto cert = verify_approximation(inst, zero, none, u, {{1}, 2, 2, true, 1});
  EXPECT_FALSE(cert.ok());  // deviation 2 == 1 * 2, and not a rounding either
}

TEST(Rounding, RandomInstancesPassCertificates) {
  fairround::testing::Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    auto c = fairround::testing::random_mcra(rng);
    auto budget = fairround::testing::random_minimal_budget(c.instance, c.x, rng);
    auto result = iterative_round(c.instance, c.x, c.utilities, budget);
    EXPECT_TRUE(result.certificate.ok()) << "trial " << trial << ": "
                                         << (result.certificate.violations.empty()
                                                 ? ""
                                                 : result.certificate.violations.front());
    for (const auto& rec : result.certificate.trace) {
      EXPECT_LE(rec.constraint_count, rec.support);
    }
    // Integer utilities leave an integer gap below each group limit.
    for (const auto& g : result.certificate.groups) {
      if (g.deviation != 0) {
        EXPECT_LE(g.deviation, g.limit - 1);
      }
    }
    // Rounding property.
    for (const auto& [key, value] : result.rounded.entries()) {
      EXPECT_NE(c.x.value(key.agent, key.bundle), 0);
    }
    for (const auto& [key, value] : c.x.entries()) {
      if (value == 1) {
        EXPECT_EQ(result.rounded.value(key.agent, key.bundle), 1);
      }
    }
    // Binding agents keep exactly one bundle.
    for (std::size_t a = 0; a < c.instance.num_agents(); ++a) {
      if (c.instance.agent(a).binding) {
        EXPECT_EQ(result.rounded.agent_total(a), 1);
      }
      EXPECT_LE(result.rounded.agent_total(a), 1);
    }
  }
}

TEST(Rounding, OracleFindsRoundingAtLeastAsGood) {
  fairround::testing::Rng rng(23);
  int checked = 0;
  for (int trial = 0; trial < 80 && checked < 25; ++trial) {
    auto c = fairround::testing::random_mcra(rng, {5, 3, 2, 2, 2, 4, false});
    if (c.x.fractional_support().size() > 14) continue;
    auto budget = fairround::testing::random_minimal_budget(c.instance, c.x, rng);
    auto result = iterative_round(c.instance, c.x, c.utilities, budget);
    ASSERT_TRUE(result.certificate.ok());
    Rational group_ratio = 0;
    for (const auto& g : result.certificate.groups) {
      if (g.limit != 0 && budget.group[g.dimension] != 0) {
        group_ratio = std::max(group_ratio, g.deviation / (g.limit / budget.group[g.dimension]));
      }
    }
    auto frontier = best_deviation(c.instance, c.x, c.utilities);
    bool dominated = false;
    for (const auto& t : frontier) {
      if (t.group <= group_ratio && t.resource <= result.certificate.max_resource_deviation() &&
          t.total <= result.certificate.total_deviation) {
        dominated = true;
      }
    }
    EXPECT_TRUE(dominated) << "trial " << trial;
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(Rounding, FloorSumStaysBelowZ) {
  fairround::testing::Rng rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const int d = uniform(rng, 1, 4);
    std::vector<Rational> big_theta(d), gamma(d), theta(d), eps(d);
    Rational sum = 0;
    for (int l = 0; l < d; ++l) {
      gamma[l] = Rational(uniform(rng, 1, 20), uniform(rng, 1, 4));
      big_theta[l] = Rational(uniform(rng, 1, 10), uniform(rng, 1, 5));
      sum += big_theta[l] / gamma[l];
    }
    if (sum >= 1) continue;
    for (int l = 0; l < d; ++l) {
      theta[l] = big_theta[l] * Rational(uniform(rng, 0, 5), 5);
      eps[l] = Rational(uniform(rng, 0, 6), uniform(rng, 1, 3));
    }
    const BigInt z = uniform(rng, 1, 200);
    const BigInt total = scaled_floor_sum(theta, eps, gamma, z);
    EXPECT_LE(total, z - 1);
    if (total == z - 1) {
      bool case_one = true;
      for (int l = 0; l < d; ++l) case_one = case_one && eps[l] == 0 && theta[l] == big_theta[l];
      EXPECT_TRUE(case_one || Rational(z) < 1 / (1 - sum));
    }
  }
}
