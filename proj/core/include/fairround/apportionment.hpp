#pragma once

#include "fairround/rational.hpp"
#include "fairround/rounding.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace fairround {

/// Signpost sequence s with s(0) = 0, t-1 <= s(t) <= t and strictly
/// increasing from t = 1 on.
class SignpostMethod {
 public:
  enum class Kind { Adams, Webster, Jefferson, Custom };

  static SignpostMethod adams();      // s(t) = t - 1
  static SignpostMethod webster();    // s(t) = t - 1/2
  static SignpostMethod jefferson();  // s(t) = t
  /// `values[t-1]` is s(t). Only that prefix is defined. Throws
  /// InvalidInstance when the prefix is not a signpost sequence.
  static SignpostMethod custom(std::vector<Rational> values);
  /// "adams", "webster" or "jefferson"; throws Lookup otherwise.
  static SignpostMethod parse(const std::string& name);

  Kind kind() const { return kind_; }
  std::string name() const;
  /// Throws ScaleExceeded past the end of a custom prefix.
  Rational operator()(long t) const;

 private:
  Kind kind_ = Kind::Webster;
  std::vector<Rational> values_;
};

/// Admissible roundings of q: {t} when s(t) < q < s(t+1), {t-1, t} when
/// q = s(t). Zero always rounds to {0}.
std::vector<long> rounding_set(const SignpostMethod& method, const Rational& q);

struct MADimension {
  std::string name;
  std::vector<std::string> groups;
  std::vector<long> lower;
  std::vector<long> upper;

  bool operator==(const MADimension&) const = default;
};

struct VoteEntry {
  std::vector<std::size_t> tuple;  // one group index per dimension
  long votes = 1;

  bool operator==(const VoteEntry&) const = default;
};

/// Multidimensional apportionment instance: vote support over group tuples,
/// seat bounds per group and a house size.
struct MAInstance {
  std::vector<MADimension> dimensions;
  std::vector<VoteEntry> votes;
  long house = 0;

  /// Throws InvalidInstance.
  void validate() const;
  bool binding(std::size_t dimension) const;
  std::size_t num_groups(std::size_t dimension) const {
    return dimensions.at(dimension).groups.size();
  }

  bool operator==(const MAInstance&) const = default;
};

struct LpMaSolution {
  std::vector<std::vector<Rational>> x;  // [tuple][t-1]
  std::vector<Rational> seats;           // per tuple
  Rational objective = 0;                // with the snapped coefficients
};

/// Snapped objective coefficient of seat t of tuple e.
Rational lp_ma_cost(const MAInstance& instance, const SignpostMethod& method, std::size_t tuple,
                    long t);

/// Vertex optimum of the seat LP. Throws Infeasible.
LpMaSolution solve_lp_ma(const MAInstance& instance, const SignpostMethod& method);

/// Guaranteed house-size deviation for group tolerances `alpha`. Throws
/// BudgetViolated when sum 1/(alpha+2) exceeds 1.
long delta_bound_ma(const MAInstance& instance, const std::vector<long>& alpha);

struct ApportionmentResult {
  LpMaSolution fractional;
  std::vector<long> seats;                      // per tuple
  std::vector<std::vector<long>> group_seats;   // [dimension][group]
  std::vector<std::vector<long>> group_excess;  // distance outside [lower, upper]
  long total = 0;
  long total_deviation = 0;  // |total - house|
  long delta = 0;            // bound from delta_bound_ma
  Certificate certificate;
  std::vector<std::string> violations;
};

/// Rounds the seat LP optimum so that each group lands within alpha of its
/// bounds and the house size within delta_bound_ma. Throws BudgetViolated or
/// Infeasible.
ApportionmentResult approx_apportionment(const MAInstance& instance, const SignpostMethod& method,
                                         const std::vector<long>& alpha);

}  // namespace fairround
