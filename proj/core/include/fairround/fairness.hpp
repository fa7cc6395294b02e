#pragma once

#include "fairround/exact_lp.hpp"
#include "fairround/model.hpp"
#include "fairround/rounding.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fairround {

/// Concave, non-decreasing group welfare function.
class FairObjective {
 public:
  enum class Kind { Utilitarian, Proportional, Custom };

  static FairObjective utilitarian();
  static FairObjective proportional();
  /// `derivative` returns a supergradient at each point.
  static FairObjective custom(std::function<double(double)> value,
                              std::function<double(double)> derivative);

  Kind kind() const { return kind_; }
  double value(double z) const;
  double derivative(double z) const;
  /// Spot check of monotonicity and concavity on sampled triples in (0, hi].
  bool looks_concave(double hi = 100.0, int samples = 200) const;

 private:
  Kind kind_ = Kind::Utilitarian;
  std::function<double(double)> value_;
  std::function<double(double)> derivative_;
};

/// Copy of the instance with every agent binding, as the assignment model
/// requires.
Instance as_assignment(const Instance& instance);

/// Allocation polytope with variables ordered as in `pairs`.
LinearProgram allocation_polytope(const Instance& instance, const std::vector<AgentBundle>& pairs);
std::vector<AgentBundle> feasible_pairs(const Instance& instance);

struct FrankWolfeOptions {
  double tolerance = 1e-9;
  int max_iterations = 10000;
  std::int64_t snap_denominator = 1000000;
};

struct FairFractional {
  Allocation allocation;                 // snapped iterate
  std::vector<double> group_utilities;   // float group utilities of the iterate
  std::vector<double> objective_trace;   // objective after each outer step
  int iterations = 0;
};

/// Maximizes the sum of f(group utility) over fractional assignments with a
/// fully corrective Frank-Wolfe method whose linear oracle is the exact LP.
/// Groups with zero attainable utility are left out of a proportional sum.
FairFractional solve_fair_fractional(const Instance& instance, const UtilityModel& utilities,
                                     const FairObjective& objective,
                                     const FrankWolfeOptions& options = {});

/// Vertex of {assignment rows, capacities, U >= U(x*) - tol * |U(x*)|}.
/// Tries `tolerance` first and then 1e-4; throws Infeasible if both fail.
Allocation refine_to_vertex(const Instance& instance, const UtilityModel& utilities,
                            const std::vector<double>& target_utilities,
                            double tolerance = 1e-6);

long delta_plus_bound(const Instance& instance, long delta);

/// Rounding condition for the assignment pipeline: sum 1/(a+1) + w/(d+2) <= 1/2.
Rational assignment_condition_slack(const std::vector<long>& alpha, long delta, int max_demand);

struct FairResult {
  Allocation fractional;  // snapped optimum
  Allocation vertex;      // refined vertex
  Allocation rounded;
  long delta_plus = 0;
  DeviationBudget budget;  // what the rounding step was given
  std::vector<Rational> utilities_before;  // per group, flattened by dimension
  std::vector<Rational> utilities_after;
  std::vector<Rational> excess;  // per resource, max(0, load - capacity)
  Rational total_excess = 0;
  Certificate certificate;
  std::vector<std::string> violations;
};

FairResult approx_fair_allocation(const Instance& instance, const UtilityModel& utilities,
                                  const FairObjective& objective, const std::vector<long>& alpha,
                                  long delta, const FrankWolfeOptions& options = {});

/// Lists the ways `y` breaks the near-feasibility of an assignment result
/// against the reference vertex.
std::vector<std::string> check_fair_result(const Instance& instance, const UtilityModel& utilities,
                                           const Allocation& vertex, const Allocation& y,
                                           const std::vector<long>& alpha, long delta,
                                           long delta_plus);

struct ProportionalityCheck {
  std::size_t group = 0;
  Rational achieved = 0;
  Rational best = 0;       // max group utility over fractional assignments
  Rational threshold = 0;  // best / k - alpha * best single utility
  bool pass = false;
};

/// One dimension only: U_i(y) >= max_x U_i(x) / k - alpha * U*_i per group.
std::vector<ProportionalityCheck> check_proportionality(const Instance& instance,
                                                        const UtilityModel& utilities,
                                                        const Allocation& y, long alpha);

struct GeneratedInstance {
  Instance instance;
  UtilityModel utilities;
};

enum class LowerBoundKind { Capacity, UtilityCycle };

/// Capacity: n singleton groups, n unit resources, only r1 valued.
/// Utility cycle: two groups of n/2 agents on a cycle of n unit resources
/// whose odd positions are valued.
GeneratedInstance gen_lower_bound_instance(LowerBoundKind kind, int n);

}  // namespace fairround
