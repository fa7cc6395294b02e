#pragma once

#include "fairround/exact_lp.hpp"
#include "fairround/model.hpp"
#include "fairround/rational.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fairround {

/// Allowed deviations: per-dimension group tolerance (alpha), per-resource
/// tolerance (delta), total tolerance (Delta), the agent-row flag (psi) and
/// the largest demand. A missing delta or Delta means that family is not
/// constrained at all; its term drops out of the condition.
struct DeviationBudget {
  std::vector<long> group;
  std::optional<long> resource;
  std::optional<long> total;
  bool agent_rows = false;
  int max_demand = 1;
};

/// psi/2 + sum 1/(alpha+1) + omega/(delta+1).
Rational condition_value(const DeviationBudget& budget);
/// 1 - condition_value; the condition holds iff this is non-negative.
Rational check_condition(const DeviationBudget& budget);
/// Smallest admissible Delta. With psi set this is 2; otherwise it is
/// ceil(1/slack - 1). Throws BudgetViolated when the condition fails or psi is
/// unset and the condition is tight.
long min_total_tolerance(const DeviationBudget& budget);
/// Whether `budget.total` satisfies one of the two admissibility cases.
bool total_tolerance_admissible(const DeviationBudget& budget);
/// Agents must keep unit-mass rows when some agent splits mass or d <= 1.
bool agent_rows_forced(const Instance& instance, const Allocation& x);

struct IterationRecord {
  std::size_t support = 0;        // |F|
  std::size_t active_agents = 0;  // agents held at unit mass
  std::size_t active_groups = 0;  // groups holding utility rows
  std::size_t group_rows = 0;     // rows those groups contributed
  std::size_t active_resources = 0;
  bool total_row = false;
  std::size_t constraint_count = 0;
  std::size_t slack_agent_rows = 0;  // agents under an at-most-one row
  std::size_t pivots = 0;
};

struct GroupDeviation {
  std::size_t dimension = 0;
  std::size_t group = 0;
  Rational before = 0;
  Rational after = 0;
  Rational deviation = 0;
  Rational limit = 0;  // alpha * best single utility
};

struct Certificate {
  std::vector<GroupDeviation> groups;
  std::vector<Rational> resource_deviation;
  Rational total_deviation = 0;
  std::size_t iterations = 0;
  std::vector<IterationRecord> trace;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  Rational max_resource_deviation() const;
};

/// Exact check of the three near-feasibility families (strict inequalities).
/// A group whose deviation is exactly zero always passes. Also flags entries
/// where y is not a rounding of x.
Certificate verify_approximation(const Instance& instance, const Allocation& x,
                                 const Allocation& y, const UtilityModel& utilities,
                                 const DeviationBudget& budget);

/// Builds the rows that replace the utility-equality row of an active group.
/// `support` lists the LP variables in order; `current` holds the fixed
/// integral values.
using GroupRowBuilder = std::function<std::vector<Constraint>(
    const Allocation& current, std::span<const AgentBundle> support, std::size_t dimension,
    std::size_t group)>;

struct RoundingOptions {
  bool check_budget = true;
  bool use_total_row = true;
  GroupRowBuilder group_rows;
  bool verify = true;
};

struct RoundingResult {
  Allocation rounded;
  Certificate certificate;
};

/// Iterative LP rounding. Each iteration fixes the integral entries, builds
/// the constraint system over the fractional support, and moves to a vertex;
/// the remaining fractional entries are rounded per agent (largest entry up).
RoundingResult iterative_round(const Instance& instance, const Allocation& x,
                               const UtilityModel& utilities, const DeviationBudget& budget,
                               const RoundingOptions& options = {});

/// sum_l floor((theta_l z - eps_l) / gamma_l).
BigInt scaled_floor_sum(std::span<const Rational> theta, std::span<const Rational> eps,
                        std::span<const Rational> gamma, const BigInt& z);

}  // namespace fairround
