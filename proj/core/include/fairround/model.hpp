#pragma once

#include "fairround/rational.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fairround {

struct AgentSpec {
  std::string id;
  int demand = 1;
  bool binding = false;

  bool operator==(const AgentSpec&) const = default;
};

struct ResourceSpec {
  std::string id;
  long capacity = 1;

  bool operator==(const ResourceSpec&) const = default;
};

struct Group {
  std::string name;
  std::vector<std::size_t> members;

  bool operator==(const Group&) const = default;
};

/// One partition dimension; groups inside a dimension must be disjoint but
/// need not cover every agent.
struct Dimension {
  std::string name;
  std::vector<Group> groups;

  bool operator==(const Dimension&) const = default;
};

/// Multiset of resources, stored as a dense multiplicity vector.
///
/// Ordering is lexicographic on the sorted resource list, so {r1:2} < {r1,r2}
/// < {r2:2}; enumeration and tie-breaking rely on it.
class Bundle {
 public:
  Bundle() = default;
  explicit Bundle(std::vector<int> counts) : counts_(std::move(counts)) {}

  static Bundle single(std::size_t num_resources, std::size_t resource, int count = 1);

  int operator[](std::size_t resource) const { return counts_[resource]; }
  bool contains(std::size_t resource) const { return counts_[resource] >= 1; }
  int total() const;
  std::size_t num_resources() const { return counts_.size(); }
  const std::vector<int>& counts() const { return counts_; }

  std::strong_ordering operator<=>(const Bundle& other) const {
    return other.counts_ <=> counts_;
  }
  bool operator==(const Bundle& other) const = default;

 private:
  std::vector<int> counts_;
};

struct AgentBundle {
  std::size_t agent = 0;
  Bundle bundle;

  auto operator<=>(const AgentBundle&) const = default;
  bool operator==(const AgentBundle&) const = default;
};

class Instance {
 public:
  Instance() = default;
  /// `acceptability` lists allowed (agent, resource) pairs; when absent every
  /// pair is acceptable.
  Instance(std::vector<AgentSpec> agents, std::vector<ResourceSpec> resources,
           std::vector<Dimension> dimensions,
           std::optional<std::vector<std::pair<std::size_t, std::size_t>>> acceptability =
               std::nullopt);

  /// Throws Error(InvalidInstance) describing the first violated invariant.
  void validate() const;

  std::size_t num_agents() const { return agents_.size(); }
  std::size_t num_resources() const { return resources_.size(); }
  std::size_t num_dimensions() const { return dimensions_.size(); }
  std::size_t num_groups(std::size_t dimension) const;
  std::size_t total_groups() const;

  const AgentSpec& agent(std::size_t a) const { return agents_.at(a); }
  const ResourceSpec& resource(std::size_t r) const { return resources_.at(r); }
  const Dimension& dimension(std::size_t l) const { return dimensions_.at(l); }
  const std::vector<AgentSpec>& agents() const { return agents_; }
  const std::vector<ResourceSpec>& resources() const { return resources_; }
  const std::vector<Dimension>& dimensions() const { return dimensions_; }

  const std::vector<std::size_t>& group_members(std::size_t dimension, std::size_t group) const;
  std::optional<std::size_t> group_of(std::size_t agent, std::size_t dimension) const;

  int max_demand() const;
  bool acceptable(std::size_t agent, std::size_t resource) const;
  bool has_acceptability() const { return acceptability_.has_value(); }
  const std::optional<std::vector<std::pair<std::size_t, std::size_t>>>& acceptability() const {
    return acceptability_;
  }

  std::optional<std::size_t> find_agent(std::string_view id) const;
  std::optional<std::size_t> find_resource(std::string_view id) const;
  /// Throws Error(Lookup) for unknown ids.
  std::size_t agent_index(std::string_view id) const;
  std::size_t resource_index(std::string_view id) const;

  bool operator==(const Instance& other) const;

 private:
  std::vector<AgentSpec> agents_;
  std::vector<ResourceSpec> resources_;
  std::vector<Dimension> dimensions_;
  std::optional<std::vector<std::pair<std::size_t, std::size_t>>> acceptability_;

  // Derived lookups, rebuilt by the constructor.
  std::vector<std::vector<std::optional<std::size_t>>> membership_;  // [agent][dimension]
  std::vector<std::vector<bool>> acceptable_;                         // [agent][resource]
};

/// Sparse map from agent-bundle pairs to values in [0,1]; zero entries are
/// never stored.
class Allocation {
 public:
  using Entries = std::map<AgentBundle, Rational>;

  Rational value(std::size_t agent, const Bundle& bundle) const;
  void set(std::size_t agent, Bundle bundle, const Rational& value);

  const Entries& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool is_integral() const;

  Rational agent_total(std::size_t agent) const;
  Rational resource_load(std::size_t resource) const;
  /// Sum over entries of demand(a) * value.
  Rational weighted_total(const Instance& instance) const;
  /// Pairs with value strictly between 0 and 1, in map order.
  std::vector<AgentBundle> fractional_support() const;
  /// Agents holding two or more positively valued bundles.
  std::vector<std::size_t> split_agents() const;

  bool operator==(const Allocation&) const = default;

 private:
  Entries entries_;
};

/// Lists every violated condition of a fractional resource allocation
/// (values in [0,1], bundle sizes, binding equality, at-most-one, capacities).
/// An empty result means the allocation is valid.
std::vector<std::string> allocation_violations(const Instance& instance, const Allocation& x,
                                               bool check_capacities = true);

class UtilityModel {
 public:
  UtilityModel() = default;

  /// Bundle utility is the multiplicity-weighted sum of per-resource values.
  static UtilityModel additive(std::vector<std::vector<Rational>> per_agent_resource);
  /// Utilities given per (agent, bundle).
  static UtilityModel explicit_bundles(std::vector<std::map<Bundle, Rational>> per_agent);

  bool is_additive() const { return additive_; }
  /// Throws Error(Lookup) when an explicit model has no entry for the pair.
  Rational utility(std::size_t agent, const Bundle& bundle) const;
  bool defined(std::size_t agent, const Bundle& bundle) const;

  const std::vector<std::vector<Rational>>& additive_values() const { return per_resource_; }
  const std::vector<std::map<Bundle, Rational>>& bundle_values() const { return per_bundle_; }

  /// Throws Error(InvalidInstance) on negative values or shape mismatch.
  void validate(const Instance& instance) const;

  bool operator==(const UtilityModel&) const = default;

 private:
  bool additive_ = true;
  std::vector<std::vector<Rational>> per_resource_;
  std::vector<std::map<Bundle, Rational>> per_bundle_;
};

/// All ω_a-bundles over the agent's acceptable resources, each multiplicity
/// capped at min(ω_a, c(r)), in ascending Bundle order.
std::vector<Bundle> enumerate_bundles(const Instance& instance, std::size_t agent);

struct AgentKey {
  std::size_t agent;
};
struct GroupKey {
  std::size_t dimension;
  std::size_t group;
};
struct ResourceKey {
  std::size_t resource;
};
using IncidenceKey = std::variant<AgentKey, GroupKey, ResourceKey>;

/// Positions in `support` of the pairs incident to `key`. A resource is
/// incident when the bundle holds at least one unit of it.
std::vector<std::size_t> incidence(const Instance& instance, std::span<const AgentBundle> support,
                                   const IncidenceKey& key);
std::vector<std::size_t> support_agents(std::span<const AgentBundle> support);
std::vector<std::size_t> support_resources(const Instance& instance,
                                           std::span<const AgentBundle> support);
std::vector<std::size_t> support_groups(const Instance& instance,
                                        std::span<const AgentBundle> support,
                                        std::size_t dimension);

Rational group_utility(const Instance& instance, const UtilityModel& utilities,
                       const Allocation& x, std::size_t dimension, std::size_t group);
/// Largest single-bundle utility of any member (zero for an empty group).
Rational group_max_utility(const Instance& instance, const UtilityModel& utilities,
                           std::size_t dimension, std::size_t group);

}  // namespace fairround
