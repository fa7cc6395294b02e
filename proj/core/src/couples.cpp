#include "fairround/couples.hpp"

#include "fairround/errors.hpp"
#include "fairround/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fairround {

namespace {

constexpr std::size_t kNotRanked = std::numeric_limits<std::size_t>::max();
constexpr std::size_t kVertexLimit = 100000;

Instance without_binding(const Instance& instance) {
  auto agents = instance.agents();
  for (auto& a : agents) a.binding = false;
  return Instance(std::move(agents), instance.resources(), instance.dimensions(),
                  instance.acceptability());
}

}  // namespace

CouplesInstance::CouplesInstance(Instance instance, std::vector<std::vector<Bundle>> agent_prefs,
                                 std::vector<std::vector<std::size_t>> resource_prefs)
    : instance_(without_binding(instance)),
      agent_prefs_(std::move(agent_prefs)),
      resource_prefs_(std::move(resource_prefs)) {
  instance_.validate();
  const std::size_t n = instance_.num_agents();
  const std::size_t m = instance_.num_resources();
  if (agent_prefs_.size() != n || resource_prefs_.size() != m) {
    fail(ErrorKind::MalformedPreferences, "one preference list per agent and per resource");
  }
  std::vector<std::vector<bool>> uses(m, std::vector<bool>(n, false));
  for (std::size_t a = 0; a < n; ++a) {
    const int w = instance_.agent(a).demand;
    if (w != 1 && w != 2) {
      fail(ErrorKind::InvalidInstance, "agent '" + instance_.agent(a).id + "' has demand " +
                                           std::to_string(w) + "; only singles and couples");
    }
    auto acceptable = enumerate_bundles(instance_, a);
    auto ranked = agent_prefs_[a];
    std::sort(ranked.begin(), ranked.end());
    if (std::adjacent_find(ranked.begin(), ranked.end()) != ranked.end()) {
      fail(ErrorKind::MalformedPreferences,
           "agent '" + instance_.agent(a).id + "' ranks a bundle twice");
    }
    if (ranked != acceptable) {
      fail(ErrorKind::MalformedPreferences,
           "agent '" + instance_.agent(a).id + "' must rank exactly its acceptable bundles");
    }
    for (const auto& q : acceptable) {
      for (std::size_t r = 0; r < m; ++r) {
        if (q[r] > 0) uses[r][a] = true;
      }
    }
  }
  resource_rank_.assign(m, std::vector<std::size_t>(n, kNotRanked));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t pos = 0; pos < resource_prefs_[r].size(); ++pos) {
      const std::size_t a = resource_prefs_[r][pos];
      if (a >= n) fail(ErrorKind::MalformedPreferences, "resource order names an unknown agent");
      if (resource_rank_[r][a] != kNotRanked) {
        fail(ErrorKind::MalformedPreferences,
             "resource '" + instance_.resource(r).id + "' ranks an agent twice");
      }
      if (!uses[r][a]) {
        fail(ErrorKind::MalformedPreferences, "resource '" + instance_.resource(r).id +
                                                  "' ranks agent '" + instance_.agent(a).id +
                                                  "' who cannot use it");
      }
      resource_rank_[r][a] = pos;
    }
    for (std::size_t a = 0; a < n; ++a) {
      if (uses[r][a] && resource_rank_[r][a] == kNotRanked) {
        fail(ErrorKind::MalformedPreferences, "resource '" + instance_.resource(r).id +
                                                  "' does not rank agent '" +
                                                  instance_.agent(a).id + "'");
      }
    }
  }
}

std::optional<std::size_t> CouplesInstance::agent_rank(std::size_t agent,
                                                       const Bundle& bundle) const {
  const auto& prefs = agent_prefs_.at(agent);
  auto it = std::find(prefs.begin(), prefs.end(), bundle);
  if (it == prefs.end()) return std::nullopt;
  return static_cast<std::size_t>(it - prefs.begin());
}

std::optional<std::size_t> CouplesInstance::resource_rank(std::size_t resource,
                                                          std::size_t agent) const {
  const std::size_t pos = resource_rank_.at(resource).at(agent);
  if (pos == kNotRanked) return std::nullopt;
  return pos;
}

std::vector<long> realized_capacities(const Instance& instance, const Allocation& y) {
  std::vector<long> occupancy(instance.num_resources(), 0);
  for (std::size_t r = 0; r < instance.num_resources(); ++r) {
    occupancy[r] = static_cast<long>(floor(y.resource_load(r)).convert_to<long long>());
  }
  return occupancy;
}

BlockReport stability_check(const CouplesInstance& ci, const Allocation& y,
                            const std::vector<long>& capacities) {
  const Instance& inst = ci.instance();
  const std::size_t n = inst.num_agents();
  const std::size_t m = inst.num_resources();
  if (capacities.size() != m) fail(ErrorKind::InvalidInstance, "one capacity per resource");
  if (!y.is_integral()) fail(ErrorKind::InputNotAllocation, "stability needs an integral allocation");

  std::vector<std::optional<Bundle>> held(n);
  for (const auto& [key, value] : y.entries()) {
    if (held[key.agent]) {
      fail(ErrorKind::InputNotAllocation, "agent '" + inst.agent(key.agent).id + "' holds two bundles");
    }
    held[key.agent] = key.bundle;
  }
  // units[r][a]: how much of r agent a holds.
  std::vector<std::vector<int>> units(m, std::vector<int>(n, 0));
  std::vector<long> occupancy(m, 0);
  for (std::size_t a = 0; a < n; ++a) {
    if (!held[a]) continue;
    for (std::size_t r = 0; r < m; ++r) {
      units[r][a] = (*held[a])[r];
      occupancy[r] += units[r][a];
    }
  }

  BlockReport report;
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t limit = ci.agent_prefs()[a].size();
    if (held[a]) {
      auto rank = ci.agent_rank(a, *held[a]);
      if (!rank) fail(ErrorKind::InputNotAllocation, "agent holds an unranked bundle");
      limit = *rank;
    }
    for (std::size_t pos = 0; pos < limit; ++pos) {
      const Bundle& q = ci.agent_prefs()[a][pos];
      bool admitted = true;
      std::vector<std::size_t> touched;
      for (std::size_t r = 0; r < m && admitted; ++r) {
        if (q[r] == 0) continue;
        touched.push_back(r);
        const long free_units = capacities[r] - (occupancy[r] - units[r][a]);
        long displaceable = 0;
        const std::size_t mine = *ci.resource_rank(r, a);
        for (std::size_t b = 0; b < n; ++b) {
          if (b == a || units[r][b] == 0) continue;
          if (*ci.resource_rank(r, b) > mine) displaceable += units[r][b];
        }
        admitted = std::max(0L, free_units) + displaceable >= q[r];
      }
      if (!admitted) continue;
      BlockWitness w;
      w.agent = a;
      w.bundle = q;
      w.resources = touched;
      w.condition = inst.agent(a).demand == 1 ? 1 : (touched.size() == 1 ? 2 : 3);
      report.witnesses.push_back(std::move(w));
    }
  }
  return report;
}

StablePolytope lp_stable_polytope(const CouplesInstance& ci) {
  const Instance& inst = ci.instance();
  StablePolytope out;
  out.pairs = feasible_pairs(inst);
  for (std::size_t e = 0; e < out.pairs.size(); ++e) out.lp.add_variable();
  for (std::size_t r = 0; r < inst.num_resources(); ++r) {
    std::vector<std::pair<std::size_t, Rational>> terms;
    for (std::size_t e = 0; e < out.pairs.size(); ++e) {
      if (out.pairs[e].bundle[r] > 0) terms.emplace_back(e, out.pairs[e].bundle[r]);
    }
    if (!terms.empty()) {
      out.lp.add_constraint(std::move(terms), Relation::LessEqual, inst.resource(r).capacity);
    }
  }
  for (std::size_t a = 0; a < inst.num_agents(); ++a) {
    std::vector<std::pair<std::size_t, Rational>> terms;
    for (std::size_t e = 0; e < out.pairs.size(); ++e) {
      if (out.pairs[e].agent == a) terms.emplace_back(e, 1);
    }
    if (!terms.empty()) out.lp.add_constraint(std::move(terms), Relation::LessEqual, 1);
  }
  return out;
}

std::vector<Allocation> all_roundings(const Allocation& x) {
  std::map<std::size_t, std::vector<Bundle>> options;
  Allocation fixed;
  std::size_t fractional = 0;
  for (const auto& [key, value] : x.entries()) {
    if (value == 1) {
      fixed.set(key.agent, key.bundle, 1);
    } else {
      options[key.agent].push_back(key.bundle);
      ++fractional;
    }
  }
  if (fractional > kRoundingEntryLimit) {
    fail(ErrorKind::ScaleExceeded, "too many fractional entries to enumerate roundings");
  }
  std::vector<Allocation> out{fixed};
  for (const auto& [agent, bundles] : options) {
    std::vector<Allocation> next;
    for (const auto& partial : out) {
      next.push_back(partial);  // everything down
      for (const auto& q : bundles) {
        Allocation up = partial;
        up.set(agent, q, 1);
        next.push_back(std::move(up));
      }
    }
    out = std::move(next);
  }
  return out;
}

bool is_dominating(const CouplesInstance& ci, const StablePolytope& polytope,
                   const std::vector<Rational>& x) {
  const auto& pairs = polytope.pairs;
  const std::size_t m = ci.instance().num_resources();
  // Rank of column e in a row, lower is better. Resource rows order columns by
  // the resource's ranking of agents, then by the agent's own ranking.
  auto agent_key = [&](std::size_t e) { return *ci.agent_rank(pairs[e].agent, pairs[e].bundle); };
  auto resource_key = [&](std::size_t r, std::size_t e) {
    return std::pair{*ci.resource_rank(r, pairs[e].agent), agent_key(e)};
  };
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    bool dominated = false;
    // Agent row.
    {
      Rational load = 0;
      bool worse_active = false;
      for (std::size_t e = 0; e < pairs.size(); ++e) {
        if (pairs[e].agent != pairs[j].agent || x[e] == 0) continue;
        load += x[e];
        worse_active = worse_active || agent_key(e) > agent_key(j);
      }
      dominated = load == 1 && !worse_active;
    }
    for (std::size_t r = 0; r < m && !dominated; ++r) {
      if (pairs[j].bundle[r] == 0) continue;
      Rational load = 0;
      bool worse_active = false;
      for (std::size_t e = 0; e < pairs.size(); ++e) {
        if (pairs[e].bundle[r] == 0 || x[e] == 0) continue;
        load += x[e] * pairs[e].bundle[r];
        worse_active = worse_active || resource_key(r, e) > resource_key(r, j);
      }
      dominated = load == ci.instance().resource(r).capacity && !worse_active;
    }
    if (!dominated) return false;
  }
  return true;
}

std::vector<Allocation> qualifying_vertices(const CouplesInstance& ci) {
  const auto polytope = lp_stable_polytope(ci);
  const auto vertices = vertex_enumerate(polytope.lp);
  if (vertices.size() > kVertexLimit) {
    fail(ErrorKind::ScaleExceeded, "stable polytope has more than 100000 vertices");
  }
  std::vector<Allocation> out;
  for (const auto& v : vertices) {
    if (!is_dominating(ci, polytope, v)) continue;
    Allocation x;
    for (std::size_t e = 0; e < v.size(); ++e) {
      if (v[e] != 0) x.set(polytope.pairs[e].agent, polytope.pairs[e].bundle, v[e]);
    }
    bool all_stable = true;
    for (const auto& y : all_roundings(x)) {
      if (!stability_check(ci, y, realized_capacities(ci.instance(), y)).stable()) {
        all_stable = false;
        break;
      }
    }
    if (all_stable) out.push_back(std::move(x));
  }
  return out;
}

Allocation dominating_vertex_small(const CouplesInstance& ci) {
  auto found = qualifying_vertices(ci);
  if (found.empty()) fail(ErrorKind::NoneFound, "no vertex has only stable roundings");
  return found.front();
}

Rational couples_condition_slack(const std::vector<long>& alpha, long delta) {
  return assignment_condition_slack(alpha, delta, 2);
}

CouplesResult fair_stable_allocation(const CouplesInstance& ci, const UtilityModel& utilities,
                                     const FairObjective& objective,
                                     const std::vector<long>& alpha, long delta) {
  const Instance& inst = ci.instance();
  utilities.validate(inst);
  if (alpha.size() != inst.num_dimensions()) {
    fail(ErrorKind::BudgetViolated, "one group tolerance per dimension is required");
  }
  const Rational slack = couples_condition_slack(alpha, delta);
  if (slack < 0) {
    fail(ErrorKind::BudgetViolated, "stable condition fails (slack " + to_string(slack) + ")");
  }

  // Exhaustive search over qualifying vertices for the best objective.
  auto candidates = qualifying_vertices(ci);
  if (candidates.empty()) fail(ErrorKind::NoneFound, "no vertex has only stable roundings");
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    double value = 0;
    for (std::size_t l = 0; l < inst.num_dimensions(); ++l) {
      for (std::size_t i = 0; i < inst.num_groups(l); ++i) {
        if (objective.kind() == FairObjective::Kind::Proportional &&
            group_max_utility(inst, utilities, l, i) == 0) {
          continue;
        }
        value += objective.value(to_double(group_utility(inst, utilities, candidates[c], l, i)));
      }
    }
    if (value > best_value || (c == 0 && std::isinf(value))) {
      best_value = value;
      best = c;
    }
  }

  CouplesResult result;
  result.vertex = candidates[best];
  DeviationBudget budget{alpha, delta + 1, 2, true, 2};
  auto rounded = iterative_round(inst, result.vertex, utilities, budget);
  result.rounded = std::move(rounded.rounded);
  result.budget = budget;
  result.certificate = std::move(rounded.certificate);
  result.violations = result.certificate.violations;

  result.blocks = stability_check(ci, result.rounded, realized_capacities(inst, result.rounded));
  if (!result.blocks.stable()) {
    result.violations.push_back("rounded allocation is blocked under its realized capacities");
  }
  long capacity_total = 0;
  Rational weighted = 0;
  for (std::size_t r = 0; r < inst.num_resources(); ++r) {
    capacity_total += inst.resource(r).capacity;
    Rational excess = result.rounded.resource_load(r) - inst.resource(r).capacity;
    if (excess < 0) excess = 0;
    if (excess > delta) {
      result.violations.push_back("resource " + inst.resource(r).id + " exceeds capacity by " +
                                  to_string(excess));
    }
    result.excess.push_back(std::move(excess));
  }
  for (const auto& [key, value] : result.rounded.entries()) {
    weighted += value * inst.agent(key.agent).demand;
  }
  result.total_excess = weighted - capacity_total;
  if (result.total_excess > 4) {
    result.violations.push_back("weighted assignments exceed total capacity by " +
                                to_string(result.total_excess));
  }
  for (std::size_t a = 0; a < inst.num_agents(); ++a) {
    if (result.rounded.agent_total(a) > 1) {
      result.violations.push_back("agent '" + inst.agent(a).id + "' holds two bundles");
    }
  }
  return result;
}

}  // namespace fairround
