#include "fairround/model.hpp"

#include "fairround/errors.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_set>

namespace fairround {

Bundle Bundle::single(std::size_t num_resources, std::size_t resource, int count) {
  std::vector<int> counts(num_resources, 0);
  counts.at(resource) = count;
  return Bundle(std::move(counts));
}

int Bundle::total() const { return std::accumulate(counts_.begin(), counts_.end(), 0); }

// ---------------------------------------------------------------------------
// Instance

Instance::Instance(std::vector<AgentSpec> agents, std::vector<ResourceSpec> resources,
                   std::vector<Dimension> dimensions,
                   std::optional<std::vector<std::pair<std::size_t, std::size_t>>> acceptability)
    : agents_(std::move(agents)),
      resources_(std::move(resources)),
      dimensions_(std::move(dimensions)),
      acceptability_(std::move(acceptability)) {
  membership_.assign(agents_.size(), std::vector<std::optional<std::size_t>>(dimensions_.size()));
  for (std::size_t l = 0; l < dimensions_.size(); ++l) {
    for (std::size_t i = 0; i < dimensions_[l].groups.size(); ++i) {
      for (std::size_t a : dimensions_[l].groups[i].members) {
        if (a < agents_.size() && !membership_[a][l]) membership_[a][l] = i;
      }
    }
  }
  acceptable_.assign(agents_.size(), std::vector<bool>(resources_.size(), !acceptability_));
  if (acceptability_) {
    for (auto [a, r] : *acceptability_) {
      if (a < agents_.size() && r < resources_.size()) acceptable_[a][r] = true;
    }
  }
}

void Instance::validate() const {
  std::unordered_set<std::string> ids;
  for (const auto& agent : agents_) {
    if (agent.demand < 1) {
      fail(ErrorKind::InvalidInstance, "agent '" + agent.id + "' has demand < 1");
    }
    if (!ids.insert(agent.id).second) {
      fail(ErrorKind::InvalidInstance, "duplicate agent id '" + agent.id + "'");
    }
  }
  ids.clear();
  for (const auto& resource : resources_) {
    if (resource.capacity < 1) {
      fail(ErrorKind::InvalidInstance, "resource '" + resource.id + "' has capacity < 1");
    }
    if (!ids.insert(resource.id).second) {
      fail(ErrorKind::InvalidInstance, "duplicate resource id '" + resource.id + "'");
    }
  }
  for (const auto& dim : dimensions_) {
    std::vector<int> seen(agents_.size(), 0);
    for (const auto& group : dim.groups) {
      for (std::size_t a : group.members) {
        if (a >= agents_.size()) {
          fail(ErrorKind::InvalidInstance,
               "group '" + group.name + "' references an unknown agent");
        }
        if (++seen[a] > 1) {
          fail(ErrorKind::InvalidInstance, "agent '" + agents_[a].id +
                                               "' belongs to two groups of dimension '" +
                                               dim.name + "'");
        }
      }
    }
  }
  if (acceptability_) {
    for (auto [a, r] : *acceptability_) {
      if (a >= agents_.size() || r >= resources_.size()) {
        fail(ErrorKind::InvalidInstance, "acceptability pair out of range");
      }
    }
  }
}

std::size_t Instance::num_groups(std::size_t dimension) const {
  return dimensions_.at(dimension).groups.size();
}

std::size_t Instance::total_groups() const {
  std::size_t total = 0;
  for (const auto& dim : dimensions_) total += dim.groups.size();
  return total;
}

const std::vector<std::size_t>& Instance::group_members(std::size_t dimension,
                                                        std::size_t group) const {
  if (dimension >= dimensions_.size() || group >= dimensions_[dimension].groups.size()) {
    fail(ErrorKind::Lookup, "unknown group (" + std::to_string(dimension) + ", " +
                                std::to_string(group) + ")");
  }
  return dimensions_[dimension].groups[group].members;
}

std::optional<std::size_t> Instance::group_of(std::size_t agent, std::size_t dimension) const {
  return membership_.at(agent).at(dimension);
}

int Instance::max_demand() const {
  int best = 0;
  for (const auto& agent : agents_) best = std::max(best, agent.demand);
  return best;
}

bool Instance::acceptable(std::size_t agent, std::size_t resource) const {
  return acceptable_.at(agent).at(resource);
}

std::optional<std::size_t> Instance::find_agent(std::string_view id) const {
  for (std::size_t a = 0; a < agents_.size(); ++a) {
    if (agents_[a].id == id) return a;
  }
  return std::nullopt;
}

std::optional<std::size_t> Instance::find_resource(std::string_view id) const {
  for (std::size_t r = 0; r < resources_.size(); ++r) {
    if (resources_[r].id == id) return r;
  }
  return std::nullopt;
}

std::size_t Instance::agent_index(std::string_view id) const {
  if (auto a = find_agent(id)) return *a;
  fail(ErrorKind::Lookup, "unknown agent '" + std::string(id) + "'");
}

std::size_t Instance::resource_index(std::string_view id) const {
  if (auto r = find_resource(id)) return *r;
  fail(ErrorKind::Lookup, "unknown resource '" + std::string(id) + "'");
}

bool Instance::operator==(const Instance& other) const {
  return agents_ == other.agents_ && resources_ == other.resources_ &&
         dimensions_ == other.dimensions_ && acceptable_ == other.acceptable_ &&
         has_acceptability() == other.has_acceptability();
}

// ---------------------------------------------------------------------------
// Allocation

Rational Allocation::value(std::size_t agent, const Bundle& bundle) const {
  auto it = entries_.find(AgentBundle{agent, bundle});
  return it == entries_.end() ? Rational(0) : it->second;
}

void Allocation::set(std::size_t agent, Bundle bundle, const Rational& value) {
  AgentBundle key{agent, std::move(bundle)};
  if (value == 0) {
    entries_.erase(key);
  } else {
    entries_[std::move(key)] = value;
  }
}

bool Allocation::is_integral() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const auto& entry) { return is_integer(entry.second); });
}

Rational Allocation::agent_total(std::size_t agent) const {
  Rational total = 0;
  for (const auto& [key, value] : entries_) {
    if (key.agent == agent) total += value;
  }
  return total;
}

Rational Allocation::resource_load(std::size_t resource) const {
  Rational load = 0;
  for (const auto& [key, value] : entries_) {
    if (resource < key.bundle.num_resources() && key.bundle[resource] > 0) {
      load += value * key.bundle[resource];
    }
  }
  return load;
}

Rational Allocation::weighted_total(const Instance& instance) const {
  Rational total = 0;
  for (const auto& [key, value] : entries_) total += value * instance.agent(key.agent).demand;
  return total;
}

std::vector<AgentBundle> Allocation::fractional_support() const {
  std::vector<AgentBundle> support;
  for (const auto& [key, value] : entries_) {
    if (value > 0 && value < 1) support.push_back(key);
  }
  return support;
}

std::vector<std::size_t> Allocation::split_agents() const {
  std::map<std::size_t, int> positive;
  for (const auto& [key, value] : entries_) {
    if (value > 0) ++positive[key.agent];
  }
  std::vector<std::size_t> agents;
  for (auto [agent, count] : positive) {
    if (count >= 2) agents.push_back(agent);
  }
  return agents;
}

std::vector<std::string> allocation_violations(const Instance& instance, const Allocation& x,
                                               bool check_capacities) {
  std::vector<std::string> problems;
  std::vector<Rational> totals(instance.num_agents(), 0);
  std::vector<Rational> loads(instance.num_resources(), 0);
  for (const auto& [key, value] : x.entries()) {
    if (key.agent >= instance.num_agents()) {
      problems.push_back("entry for unknown agent index " + std::to_string(key.agent));
      continue;
    }
    const auto& agent = instance.agent(key.agent);
    if (value < 0 || value > 1) {
      problems.push_back("value of agent '" + agent.id + "' outside [0,1]");
    }
    if (key.bundle.num_resources() != instance.num_resources() ||
        key.bundle.total() != agent.demand) {
      problems.push_back("bundle of agent '" + agent.id + "' does not match its demand");
      continue;
    }
    for (std::size_t r = 0; r < instance.num_resources(); ++r) {
      if (key.bundle[r] < 0) problems.push_back("negative multiplicity for '" + agent.id + "'");
      if (key.bundle[r] > 0 && !instance.acceptable(key.agent, r)) {
        problems.push_back("agent '" + agent.id + "' holds unacceptable resource '" +
                           instance.resource(r).id + "'");
      }
      loads[r] += value * key.bundle[r];
    }
    totals[key.agent] += value;
  }
  for (std::size_t a = 0; a < instance.num_agents(); ++a) {
    const auto& agent = instance.agent(a);
    if (agent.binding && totals[a] != 1) {
      problems.push_back("binding agent '" + agent.id + "' has total " + to_string(totals[a]));
    } else if (totals[a] > 1) {
      problems.push_back("agent '" + agent.id + "' has total " + to_string(totals[a]) + " > 1");
    }
  }
  if (check_capacities) {
    for (std::size_t r = 0; r < instance.num_resources(); ++r) {
      if (loads[r] > instance.resource(r).capacity) {
        problems.push_back("resource '" + instance.resource(r).id + "' load " +
                           to_string(loads[r]) + " exceeds capacity");
      }
    }
  }
  return problems;
}

// ---------------------------------------------------------------------------
// Utilities

UtilityModel UtilityModel::additive(std::vector<std::vector<Rational>> per_agent_resource) {
  UtilityModel model;
  model.additive_ = true;
  model.per_resource_ = std::move(per_agent_resource);
  return model;
}

UtilityModel UtilityModel::explicit_bundles(std::vector<std::map<Bundle, Rational>> per_agent) {
  UtilityModel model;
  model.additive_ = false;
  model.per_bundle_ = std::move(per_agent);
  return model;
}

Rational UtilityModel::utility(std::size_t agent, const Bundle& bundle) const {
  if (additive_) {
    if (agent >= per_resource_.size()) fail(ErrorKind::Lookup, "no utilities for agent");
    const auto& row = per_resource_[agent];
    Rational total = 0;
    for (std::size_t r = 0; r < bundle.num_resources() && r < row.size(); ++r) {
      if (bundle[r] != 0) total += row[r] * bundle[r];
    }
    return total;
  }
  if (agent < per_bundle_.size()) {
    auto it = per_bundle_[agent].find(bundle);
    if (it != per_bundle_[agent].end()) return it->second;
  }
  fail(ErrorKind::Lookup, "utility undefined for agent index " + std::to_string(agent));
}

bool UtilityModel::defined(std::size_t agent, const Bundle& bundle) const {
  if (additive_) return agent < per_resource_.size();
  return agent < per_bundle_.size() && per_bundle_[agent].count(bundle) > 0;
}

void UtilityModel::validate(const Instance& instance) const {
  if (additive_) {
    if (per_resource_.size() != instance.num_agents()) {
      fail(ErrorKind::InvalidInstance, "utility table has wrong number of agents");
    }
    for (const auto& row : per_resource_) {
      if (row.size() != instance.num_resources()) {
        fail(ErrorKind::InvalidInstance, "utility table has wrong number of resources");
      }
      for (const auto& u : row) {
        if (u < 0) fail(ErrorKind::InvalidInstance, "negative utility");
      }
    }
    return;
  }
  if (per_bundle_.size() != instance.num_agents()) {
    fail(ErrorKind::InvalidInstance, "bundle utility table has wrong number of agents");
  }
  for (const auto& table : per_bundle_) {
    for (const auto& [bundle, u] : table) {
      if (u < 0) fail(ErrorKind::InvalidInstance, "negative utility");
      if (bundle.num_resources() != instance.num_resources()) {
        fail(ErrorKind::InvalidInstance, "bundle utility over wrong resource count");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Bundles and incidence

std::vector<Bundle> enumerate_bundles(const Instance& instance, std::size_t agent) {
  if (agent >= instance.num_agents()) {
    fail(ErrorKind::InvalidInstance, "agent index " + std::to_string(agent) + " does not exist");
  }
  const int demand = instance.agent(agent).demand;
  if (demand < 1) {
    fail(ErrorKind::InvalidInstance, "agent '" + instance.agent(agent).id + "' has demand 0");
  }
  const std::size_t m = instance.num_resources();
  std::vector<int> cap(m, 0);
  for (std::size_t r = 0; r < m; ++r) {
    if (instance.acceptable(agent, r)) {
      cap[r] = static_cast<int>(std::min<long>(demand, instance.resource(r).capacity));
    }
  }
  std::vector<Bundle> result;
  std::vector<int> counts(m, 0);
  // Depth-first over resources, taking the largest multiplicity first so the
  // output is already in ascending Bundle order.
  auto recurse = [&](auto&& self, std::size_t r, int remaining) -> void {
    if (remaining == 0) {
      result.emplace_back(counts);
      return;
    }
    if (r == m) return;
    for (int k = std::min(cap[r], remaining); k >= 0; --k) {
      counts[r] = k;
      self(self, r + 1, remaining - k);
    }
    counts[r] = 0;
  };
  recurse(recurse, 0, demand);
  return result;
}

std::vector<std::size_t> incidence(const Instance& instance, std::span<const AgentBundle> support,
                                   const IncidenceKey& key) {
  std::vector<std::size_t> out;
  if (const auto* k = std::get_if<AgentKey>(&key)) {
    if (k->agent >= instance.num_agents()) fail(ErrorKind::Lookup, "unknown agent key");
    for (std::size_t e = 0; e < support.size(); ++e) {
      if (support[e].agent == k->agent) out.push_back(e);
    }
  } else if (const auto* g = std::get_if<GroupKey>(&key)) {
    if (g->dimension >= instance.num_dimensions() ||
        g->group >= instance.num_groups(g->dimension)) {
      fail(ErrorKind::Lookup, "unknown group key");
    }
    for (std::size_t e = 0; e < support.size(); ++e) {
      if (instance.group_of(support[e].agent, g->dimension) == g->group) out.push_back(e);
    }
  } else {
    const auto& rk = std::get<ResourceKey>(key);
    if (rk.resource >= instance.num_resources()) fail(ErrorKind::Lookup, "unknown resource key");
    for (std::size_t e = 0; e < support.size(); ++e) {
      if (support[e].bundle.contains(rk.resource)) out.push_back(e);
    }
  }
  return out;
}

std::vector<std::size_t> support_agents(std::span<const AgentBundle> support) {
  std::set<std::size_t> agents;
  for (const auto& pair : support) agents.insert(pair.agent);
  return {agents.begin(), agents.end()};
}

std::vector<std::size_t> support_resources(const Instance& instance,
                                           std::span<const AgentBundle> support) {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < instance.num_resources(); ++r) {
    if (std::any_of(support.begin(), support.end(),
                    [r](const AgentBundle& p) { return p.bundle.contains(r); })) {
      out.push_back(r);
    }
  }
  return out;
}

std::vector<std::size_t> support_groups(const Instance& instance,
                                        std::span<const AgentBundle> support,
                                        std::size_t dimension) {
  std::set<std::size_t> groups;
  for (const auto& pair : support) {
    if (auto g = instance.group_of(pair.agent, dimension)) groups.insert(*g);
  }
  return {groups.begin(), groups.end()};
}

Rational group_utility(const Instance& instance, const UtilityModel& utilities,
                       const Allocation& x, std::size_t dimension, std::size_t group) {
  const auto& members = instance.group_members(dimension, group);
  Rational total = 0;
  for (const auto& [key, value] : x.entries()) {
    if (std::find(members.begin(), members.end(), key.agent) != members.end()) {
      total += utilities.utility(key.agent, key.bundle) * value;
    }
  }
  return total;
}

Rational group_max_utility(const Instance& instance, const UtilityModel& utilities,
                           std::size_t dimension, std::size_t group) {
  Rational best = 0;
  for (std::size_t a : instance.group_members(dimension, group)) {
    if (utilities.is_additive()) {
      for (const auto& bundle : enumerate_bundles(instance, a)) {
        best = std::max(best, utilities.utility(a, bundle));
      }
    } else if (a < utilities.bundle_values().size()) {
      for (const auto& [bundle, u] : utilities.bundle_values()[a]) best = std::max(best, u);
    }
  }
  return best;
}

}  // namespace fairround
