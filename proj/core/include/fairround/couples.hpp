#pragma once

#include "fairround/exact_lp.hpp"
#include "fairround/fairness.hpp"
#include "fairround/model.hpp"
#include "fairround/rounding.hpp"

#include <string>
#include <vector>

namespace fairround {

/// Singles (demand 1) and couples (demand 2) with strict preferences on both
/// sides. No agent is binding.
class CouplesInstance {
 public:
  /// `agent_prefs[a]` ranks a's acceptable bundles, best first;
  /// `resource_prefs[r]` ranks the agents that can use r, best first.
  /// Throws MalformedPreferences or InvalidInstance.
  CouplesInstance(Instance instance, std::vector<std::vector<Bundle>> agent_prefs,
                  std::vector<std::vector<std::size_t>> resource_prefs);

  const Instance& instance() const { return instance_; }
  const std::vector<std::vector<Bundle>>& agent_prefs() const { return agent_prefs_; }
  const std::vector<std::vector<std::size_t>>& resource_prefs() const { return resource_prefs_; }

  /// Position of `bundle` in a's order; nullopt when unacceptable.
  std::optional<std::size_t> agent_rank(std::size_t agent, const Bundle& bundle) const;
  /// Position of `agent` in r's order; nullopt when not ranked.
  std::optional<std::size_t> resource_rank(std::size_t resource, std::size_t agent) const;

 private:
  Instance instance_;
  std::vector<std::vector<Bundle>> agent_prefs_;
  std::vector<std::vector<std::size_t>> resource_prefs_;
  std::vector<std::vector<std::size_t>> resource_rank_;  // [r][a], npos when absent
};

struct BlockWitness {
  int condition = 0;  // 1 single, 2 couple on one resource, 3 couple split
  std::size_t agent = 0;
  Bundle bundle;                        // the preferred bundle
  std::vector<std::size_t> resources;   // resources in that bundle
};

struct BlockReport {
  std::vector<BlockWitness> witnesses;
  bool stable() const { return witnesses.empty(); }
};

/// Every blocking (agent, bundle) pair of an integral allocation. A resource
/// admits the agent when its free units plus the units held by occupants it
/// ranks below the agent cover the agent's need; the agent's own units count
/// as free.
BlockReport stability_check(const CouplesInstance& ci, const Allocation& y,
                            const std::vector<long>& capacities);

/// Occupancy of each resource; the realized capacities of `y`.
std::vector<long> realized_capacities(const Instance& instance, const Allocation& y);

struct StablePolytope {
  LinearProgram lp;
  std::vector<AgentBundle> pairs;  // variable order
};

/// Capacity rows followed by per-agent at-most-one rows.
StablePolytope lp_stable_polytope(const CouplesInstance& ci);

/// Every column is beaten in some tight row: its agent's row, ranked by the
/// agent, or one of its resources' rows, ranked by the resource and then by
/// the agent.
bool is_dominating(const CouplesInstance& ci, const StablePolytope& polytope,
                   const std::vector<Rational>& x);

/// Dominating vertices of the stable polytope all of whose roundings are
/// stable under their realized capacities. Throws ScaleExceeded above the
/// guards.
std::vector<Allocation> qualifying_vertices(const CouplesInstance& ci);

/// First qualifying vertex; throws NoneFound when there is none.
Allocation dominating_vertex_small(const CouplesInstance& ci);

/// Every rounding of `x` that keeps at most one bundle per agent.
std::vector<Allocation> all_roundings(const Allocation& x);

struct CouplesResult {
  Allocation vertex;
  Allocation rounded;
  Certificate certificate;
  DeviationBudget budget;  // what the rounding step was given
  BlockReport blocks;
  std::vector<Rational> excess;
  Rational total_excess = 0;  // weighted assignments minus total capacity
  std::vector<std::string> violations;
};

/// 1/2 - sum 1/(alpha+1) - 2/(delta+2).
Rational couples_condition_slack(const std::vector<long>& alpha, long delta);

CouplesResult fair_stable_allocation(const CouplesInstance& ci, const UtilityModel& utilities,
                                     const FairObjective& objective,
                                     const std::vector<long>& alpha, long delta);

}  // namespace fairround
