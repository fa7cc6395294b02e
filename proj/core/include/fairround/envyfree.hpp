#pragma once

#include "fairround/model.hpp"
#include "fairround/rounding.hpp"

#include <string>
#include <vector>

namespace fairround {

/// Assignment instance where all agents share one demand and one acceptable
/// bundle set, and members of a group value every bundle alike.
class HomogeneousInstance {
 public:
  /// Throws NotGroupHomogeneous when the shape does not hold.
  HomogeneousInstance(Instance instance, UtilityModel utilities);

  const Instance& instance() const { return instance_; }
  const UtilityModel& utilities() const { return utilities_; }
  int demand() const { return demand_; }
  /// Common bundle set, in ascending bundle order.
  const std::vector<Bundle>& bundles() const { return bundles_; }
  /// Shared utility of the members of a group.
  Rational group_value(std::size_t dimension, std::size_t group, const Bundle& bundle) const;

 private:
  Instance instance_;
  UtilityModel utilities_;
  int demand_ = 1;
  std::vector<Bundle> bundles_;
};

struct GreedyEvent {
  Rational time = 0;
  std::vector<std::size_t> agents;   // agents saturated at this time
  std::vector<std::size_t> bundles;  // bundle indices saturated at this time
};

struct GreedyTrace {
  std::vector<GreedyEvent> events;
  std::vector<Rational> agent_time;   // T(a)
  std::vector<Rational> bundle_time;  // T(q), indexed like bundles()
};

struct GreedyResult {
  Allocation allocation;
  GreedyTrace trace;
};

/// Continuous-time greedy: every unsaturated agent consumes its favourite
/// available bundle at unit rate; simulated exactly event by event.
GreedyResult greedy_fractional_ef(const HomogeneousInstance& h);

struct EnvyPair {
  std::size_t dimension = 0;
  std::size_t group = 0;  // envying group i
  std::size_t other = 0;  // envied group j
  Rational own = 0;       // U_i(x)
  Rational scaled = 0;    // |G_i|/|G_j| * value of G_j's bundles to G_i
  Rational envy = 0;      // scaled - own
  Rational limit = 0;     // alpha * best single utility of i
  bool pass = false;
};

/// Fractional envy-freeness: own >= scaled for all ordered pairs.
std::vector<EnvyPair> check_fractional_ef(const HomogeneousInstance& h, const Allocation& x);

struct EnvyReport {
  std::vector<EnvyPair> pairs;
  std::vector<Rational> excess;  // per resource, max(0, load - capacity)
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Envy below alpha times the best single utility (zero envy always passes),
/// every agent holding one bundle, and capacity excess at most delta.
EnvyReport check_ef_deviation(const HomogeneousInstance& h, const Allocation& y,
                              const std::vector<long>& alpha, long delta);

/// 1/2 - sum 2(k-1)/(alpha+1) - demand/(delta+1).
Rational envy_condition_slack(const HomogeneousInstance& h, const std::vector<long>& alpha,
                              long delta);

struct EnvyRoundResult {
  Allocation rounded;
  std::vector<IterationRecord> trace;
  EnvyReport report;
};

/// Iterative rounding with pairwise no-new-envy rows in place of the group
/// utility rows and no total row.
EnvyRoundResult ef_round(const HomogeneousInstance& h, const Allocation& x,
                         const std::vector<long>& alpha, long delta);

}  // namespace fairround
