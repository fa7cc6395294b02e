#include "fairround/errors.hpp"
#include "fairround/model.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>

using namespace fairround;

namespace {

Instance two_resource_instance(int demand, long c1, long c2, long c3 = 0) {
  std::vector<ResourceSpec> resources{{"r1", c1}, {"r2", c2}};
  if (c3 > 0) resources.push_back({"r3", c3});
  return Instance({{"a1", demand, true}}, resources, {});
}

}  // namespace

TEST(Rational, ParsesFractionsAndDecimals) {
  EXPECT_EQ(parse_rational("3/4"), Rational(3, 4));
  EXPECT_EQ(parse_rational("-2/6"), Rational(-1, 3));
  EXPECT_EQ(parse_rational("0.125"), Rational(1, 8));
  EXPECT_EQ(parse_rational("7"), Rational(7));
  EXPECT_EQ(to_string(Rational(6, 3)), "2");
  EXPECT_EQ(to_string(Rational(-1, 3)), "-1/3");
  EXPECT_THROW(parse_rational("abc"), Error);
  EXPECT_THROW(parse_rational("1/0"), Error);
}

TEST(Rational, FloorAndCeil) {
  EXPECT_EQ(floor(Rational(-1, 2)), BigInt(-1));
  EXPECT_EQ(ceil(Rational(-1, 2)), BigInt(0));
  EXPECT_EQ(floor(Rational(7, 2)), BigInt(3));
  EXPECT_EQ(ceil(Rational(7, 2)), BigInt(4));
  EXPECT_EQ(floor(Rational(4)), BigInt(4));
}

TEST(Rational, SnapFindsSimpleFractions) {
  EXPECT_EQ(snap_to_rational(0.333333333333, 1000), Rational(1, 3));
  EXPECT_EQ(snap_to_rational(-2.5, 10), Rational(-5, 2));
  EXPECT_EQ(snap_to_rational(3.14159265358979, 113), Rational(355, 113));
}

TEST(Bundles, SingleResourceBundles) {
  Instance inst = two_resource_instance(1, 1, 1);
  auto bundles = enumerate_bundles(inst, 0);
  ASSERT_EQ(bundles.size(), 2u);
  EXPECT_EQ(bundles[0], Bundle({1, 0}));
  EXPECT_EQ(bundles[1], Bundle({0, 1}));
}

TEST(Bundles, ForcedMultiset) {
  Instance inst({{"a1", 2, true}}, {{"r1", 2}}, {});
  auto bundles = enumerate_bundles(inst, 0);
  ASSERT_EQ(bundles.size(), 1u);
  EXPECT_EQ(bundles[0], Bundle({2}));
}

TEST(Bundles, StarsAndBarsCount) {
  Instance inst = two_resource_instance(2, 2, 2, 2);
  auto bundles = enumerate_bundles(inst, 0);
  EXPECT_EQ(bundles.size(), 6u);
  EXPECT_TRUE(std::is_sorted(bundles.begin(), bundles.end()));
  EXPECT_EQ(bundles, enumerate_bundles(inst, 0));
}

TEST(Bundles, CapacityCapsMultiplicity) {
  // With c(r1) = 1 the bundle {r1:2} is dropped.
  Instance inst = two_resource_instance(2, 1, 2);
  auto bundles = enumerate_bundles(inst, 0);
  ASSERT_EQ(bundles.size(), 2u);
  EXPECT_EQ(bundles[0], Bundle({1, 1}));
  EXPECT_EQ(bundles[1], Bundle({0, 2}));
}

TEST(Bundles, CountMatchesCappedStarsAndBars) {
  fairround::testing::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = fairround::testing::uniform(rng, 1, 4);
    const int demand = fairround::testing::uniform(rng, 1, 3);
    std::vector<ResourceSpec> resources;
    std::vector<int> caps;
    for (int r = 0; r < m; ++r) {
      caps.push_back(fairround::testing::uniform(rng, 1, 3));
      resources.push_back({"r" + std::to_string(r), caps.back()});
    }
    Instance inst({{"a", demand, false}}, resources, {});
    // Count by dynamic programming over resources.
    std::vector<long> ways(demand + 1, 0);
    ways[0] = 1;
    for (int r = 0; r < m; ++r) {
      std::vector<long> next(demand + 1, 0);
      for (int s = 0; s <= demand; ++s) {
        for (int k = 0; k <= std::min(caps[r], demand) && s + k <= demand; ++k) next[s + k] += ways[s];
      }
      ways = next;
    }
    EXPECT_EQ(static_cast<long>(enumerate_bundles(inst, 0).size()), ways[demand]);
  }
}

TEST(Bundles, RespectsAcceptability) {
  Instance inst({{"a1", 1, true}}, {{"r1", 1}, {"r2", 1}}, {},
                std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}});
  auto bundles = enumerate_bundles(inst, 0);
  ASSERT_EQ(bundles.size(), 1u);
  EXPECT_EQ(bundles[0], Bundle({0, 1}));
}

TEST(Bundles, MissingAgentIsInvalid) {
  Instance inst = two_resource_instance(1, 1, 1);
  try {
    enumerate_bundles(inst, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInstance);
  }
}

TEST(Instance, ValidationRejectsBrokenInvariants) {
  Instance overlap({{"a", 1, false}, {"b", 1, false}}, {{"r", 1}},
                   {{"d", {{"g1", {0, 1}}, {"g2", {1}}}}});
  EXPECT_THROW(overlap.validate(), Error);
  Instance zero_cap({{"a", 1, false}}, {{"r", 0}}, {});
  EXPECT_THROW(zero_cap.validate(), Error);
  Instance zero_demand({{"a", 0, false}}, {{"r", 1}}, {});
  EXPECT_THROW(zero_demand.validate(), Error);
  Instance duplicate({{"a", 1, false}, {"a", 1, false}}, {{"r", 1}}, {});
  EXPECT_THROW(duplicate.validate(), Error);
  Instance good({{"a", 1, false}, {"b", 2, true}}, {{"r", 2}},
                {{"d", {{"g1", {0}}, {"g2", {1}}}}});
  EXPECT_NO_THROW(good.validate());
}

TEST(Instance, RandomOverlapsAreRejected) {
  fairround::testing::Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto c = fairround::testing::random_mcra(rng, {6, 3, 1, 1, 3, 3, false});
    EXPECT_NO_THROW(c.instance.validate());
    auto dims = c.instance.dimensions();
    dims.push_back({"extra", {{"x", {0}}, {"y", {0}}}});
    Instance broken(c.instance.agents(), c.instance.resources(), dims);
    EXPECT_THROW(broken.validate(), Error);
  }
}

TEST(Instance, LookupsByIdentifier) {
  Instance inst = two_resource_instance(1, 1, 1);
  EXPECT_EQ(inst.resource_index("r2"), 1u);
  EXPECT_EQ(inst.agent_index("a1"), 0u);
  try {
    inst.resource_index("nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Lookup);
  }
}

TEST(Incidence, ResourceMembershipNotMultiplicity) {
  Instance inst({{"a1", 1, false}, {"a2", 2, false}}, {{"r1", 2}, {"r2", 1}}, {});
  std::vector<AgentBundle> support{{0, Bundle({1, 0})}, {1, Bundle({2, 0})}};
  EXPECT_EQ(incidence(inst, support, ResourceKey{0}), (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(incidence(inst, support, ResourceKey{1}).empty());
  std::vector<AgentBundle> single{{1, Bundle({2, 0})}};
  EXPECT_EQ(incidence(inst, single, ResourceKey{0}).size(), 1u);
  EXPECT_THROW(incidence(inst, support, ResourceKey{7}), Error);
  EXPECT_EQ(support_resources(inst, support), (std::vector<std::size_t>{0}));
  EXPECT_EQ(support_agents(support), (std::vector<std::size_t>{0, 1}));
}

TEST(Incidence, GroupsAndAgents) {
  Instance inst({{"a1", 1, false}, {"a2", 1, false}, {"a3", 1, false}}, {{"r1", 3}},
                {{"d", {{"g1", {0, 2}}, {"g2", {1}}}}});
  std::vector<AgentBundle> support{{0, Bundle({1})}, {1, Bundle({1})}, {2, Bundle({1})}};
  EXPECT_EQ(incidence(inst, support, GroupKey{0, 0}), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(incidence(inst, support, AgentKey{1}), (std::vector<std::size_t>{1}));
  EXPECT_EQ(support_groups(inst, support, 0), (std::vector<std::size_t>{0, 1}));
  EXPECT_THROW(incidence(inst, support, GroupKey{0, 5}), Error);
}

TEST(GroupUtility, HandSums) {
  Instance inst({{"a1", 1, false}, {"a2", 1, false}}, {{"r1", 1}, {"r2", 1}},
                {{"d", {{"empty", {}}, {"one", {0}}, {"both", {0, 1}}}}});
  auto u = UtilityModel::additive({{2, 3}, {4, 0}});
  Allocation x;
  EXPECT_EQ(group_utility(inst, u, x, 0, 0), 0);
  x.set(0, Bundle({0, 1}), 1);
  EXPECT_EQ(group_utility(inst, u, x, 0, 1), 3);

  Allocation half;
  half.set(0, Bundle({1, 0}), Rational(1, 2));
  half.set(1, Bundle({1, 0}), Rational(1, 2));
  EXPECT_EQ(group_utility(inst, u, half, 0, 2), 3);
  EXPECT_EQ(group_max_utility(inst, u, 0, 2), 4);
  EXPECT_EQ(group_max_utility(inst, u, 0, 0), 0);
}

TEST(GroupUtility, IsLinear) {
  fairround::testing::Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto c = fairround::testing::random_mcra(rng, {5, 3, 2, 2, 2, 5, false});
    bool ok = false;
    Allocation y = fairround::testing::random_fractional_allocation(c.instance, rng, 1, ok);
    ASSERT_TRUE(ok);
    const Rational lambda(fairround::testing::uniform(rng, 0, 7), 7);
    Allocation mix;
    for (const auto& [k, v] : c.x.entries()) mix.set(k.agent, k.bundle, lambda * v);
    for (const auto& [k, v] : y.entries()) {
      mix.set(k.agent, k.bundle, mix.value(k.agent, k.bundle) + (1 - lambda) * v);
    }
    for (std::size_t l = 0; l < c.instance.num_dimensions(); ++l) {
      for (std::size_t i = 0; i < c.instance.num_groups(l); ++i) {
        EXPECT_EQ(group_utility(c.instance, c.utilities, mix, l, i),
                  lambda * group_utility(c.instance, c.utilities, c.x, l, i) +
                      (1 - lambda) * group_utility(c.instance, c.utilities, y, l, i));
      }
    }
  }
}

TEST(Allocation, ViolationsAreListed) {
  Instance inst({{"a1", 1, true}, {"a2", 1, false}}, {{"r1", 1}}, {});
  Allocation x;
  EXPECT_FALSE(allocation_violations(inst, x).empty());  // binding agent empty
  x.set(0, Bundle({1}), 1);
  EXPECT_TRUE(allocation_violations(inst, x).empty());
  x.set(1, Bundle({1}), 1);
  EXPECT_FALSE(allocation_violations(inst, x).empty());  // capacity
  EXPECT_TRUE(allocation_violations(inst, x, false).empty());
  EXPECT_EQ(x.resource_load(0), 2);
  EXPECT_TRUE(x.is_integral());
}

TEST(Allocation, ZeroEntriesAreNotStored) {
  Allocation x;
  x.set(0, Bundle({1}), Rational(1, 2));
  x.set(0, Bundle({1}), 0);
  EXPECT_TRUE(x.empty());
}

TEST(Utilities, ExplicitModelReportsMissingPairs) {
  auto u = UtilityModel::explicit_bundles({{{Bundle({1, 0}), Rational(2)}}});
  EXPECT_EQ(u.utility(0, Bundle({1, 0})), 2);
  try {
    u.utility(0, Bundle({0, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Lookup);
  }
}
