#include "fairround/errors.hpp"
#include "fairround/oracle.hpp"

#include <gtest/gtest.h>

using namespace fairround;

TEST(Oracle, IntegralCountsFollowBindingStatus) {
  Instance binding({{"a", 1, true}}, {{"r1", 1}, {"r2", 1}}, {});
  EXPECT_EQ(enumerate_integral(binding).size(), 2u);
  Instance optional({{"a", 1, false}}, {{"r1", 1}, {"r2", 1}}, {});
  EXPECT_EQ(enumerate_integral(optional).size(), 3u);
  Instance two({{"a", 1, true}, {"b", 1, true}}, {{"r1", 1}, {"r2", 1}}, {});
  EXPECT_EQ(enumerate_integral(two).size(), 4u);
}

TEST(Oracle, IntegralEnumerationIsGuarded) {
  std::vector<AgentSpec> agents;
  for (int a = 0; a < 12; ++a) agents.push_back({"a" + std::to_string(a), 1, false});
  std::vector<ResourceSpec> resources;
  for (int r = 0; r < 5; ++r) resources.push_back({"r" + std::to_string(r), 1});
  Instance big(agents, resources, {});
  try {
    enumerate_integral(big);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ScaleExceeded);
  }
}

TEST(Oracle, UnitSquareHasFourVertices) {
  LinearProgram lp;
  lp.add_variable();
  lp.add_variable();
  EXPECT_EQ(vertex_enumerate(lp).size(), 4u);
}

TEST(Oracle, SimplexHasThreeVertices) {
  LinearProgram lp;
  for (int j = 0; j < 3; ++j) lp.add_variable(0, std::nullopt);
  lp.add_constraint({{0, 1}, {1, 1}, {2, 1}}, Relation::Equal, 1);
  auto v = vertex_enumerate(lp);
  ASSERT_EQ(v.size(), 3u);
  for (const auto& p : v) EXPECT_TRUE(is_vertex(lp, p));
}

TEST(Oracle, RedundantRowsDoNotDuplicate) {
  LinearProgram lp;
  lp.add_variable();
  lp.add_variable();
  lp.add_constraint({{0, 1}}, Relation::LessEqual, 1);
  lp.add_constraint({{0, 1}, {1, 1}}, Relation::LessEqual, 2);
  EXPECT_EQ(vertex_enumerate(lp).size(), 4u);
}

TEST(Oracle, VertexEnumerationIsGuarded) {
  LinearProgram lp;
  for (int j = 0; j < 21; ++j) lp.add_variable();
  EXPECT_THROW(vertex_enumerate(lp), Error);
}

TEST(Oracle, IntegralInputHasZeroDeviation) {
  Instance inst({{"a", 1, true}}, {{"r1", 1}}, {{"d", {{"g", {0}}}}});
  auto u = UtilityModel::additive({{3}});
  Allocation x;
  x.set(0, Bundle({1}), 1);
  auto frontier = best_deviation(inst, x, u);
  ASSERT_EQ(frontier.size(), 1u);
  EXPECT_EQ(frontier[0], (DeviationTriple{0, 0, 0}));
}

TEST(Oracle, HalfMatchingRoundsToPerfectMatching) {
  Instance inst({{"a1", 1, true}, {"a2", 1, true}}, {{"r1", 1}, {"r2", 1}}, {});
  auto u = UtilityModel::additive({{1, 1}, {1, 1}});
  Allocation x;
  for (std::size_t a = 0; a < 2; ++a) {
    x.set(a, Bundle({1, 0}), Rational(1, 2));
    x.set(a, Bundle({0, 1}), Rational(1, 2));
  }
  auto frontier = best_deviation(inst, x, u);
  ASSERT_EQ(frontier.size(), 1u);
  EXPECT_EQ(frontier[0], (DeviationTriple{0, 0, 0}));
}
