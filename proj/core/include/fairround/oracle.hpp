#pragma once

#include "fairround/exact_lp.hpp"
#include "fairround/model.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace fairround {

inline constexpr double kIntegralEnumerationLimit = 1e6;
inline constexpr std::size_t kVertexVariableLimit = 20;
inline constexpr std::size_t kRoundingEntryLimit = 20;

/// Calls `visit` on every integral mapping meeting the agent constraints
/// (binding agents get exactly one bundle, others at most one). Capacities
/// are not enforced. Stops early when `visit` returns false.
void for_each_integral(const Instance& instance,
                       const std::function<bool(const Allocation&)>& visit);
std::vector<Allocation> enumerate_integral(const Instance& instance);

/// Every vertex of the LP's feasible region, deduplicated, in a fixed order.
std::vector<std::vector<Rational>> vertex_enumerate(const LinearProgram& lp);

struct DeviationTriple {
  Rational group;     // max over groups of |dU| / best single utility
  Rational resource;  // max over resources of |d load|
  Rational total;     // |d weighted total|

  bool operator==(const DeviationTriple&) const = default;
};

/// Pareto frontier of deviation triples over all roundings of x that respect
/// the agent constraints and, when given, `accept`.
std::vector<DeviationTriple> best_deviation(
    const Instance& instance, const Allocation& x, const UtilityModel& utilities,
    const std::function<bool(const Allocation&)>& accept = {});

}  // namespace fairround
