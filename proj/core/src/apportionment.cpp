#include "fairround/apportionment.hpp"

#include "fairround/errors.hpp"
#include "fairround/exact_lp.hpp"
#include "fairround/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <set>

namespace fairround {

namespace {

constexpr std::int64_t kCostDenominator = 1000000000;

// Seats past the tightest upper bound of a tuple are never used by an optimum:
// costs rise strictly in t, so mass always fills the cheapest seats first.
long horizon(const MAInstance& instance, std::size_t e) {
  long h = instance.house;
  for (std::size_t l = 0; l < instance.dimensions.size(); ++l) {
    h = std::min(h, instance.dimensions[l].upper[instance.votes[e].tuple[l]]);
  }
  return std::max(h, 0L);
}

// ln(s(t)/V) for every seat; nullopt where s(t) = 0.
std::vector<std::vector<std::optional<double>>> log_ratios(const MAInstance& instance,
                                                           const SignpostMethod& method) {
  std::vector<std::vector<std::optional<double>>> out(instance.votes.size());
  for (std::size_t e = 0; e < instance.votes.size(); ++e) {
    for (long t = 1; t <= horizon(instance, e); ++t) {
      const Rational s = method(t);
      if (s == 0) {
        out[e].push_back(std::nullopt);
      } else {
        out[e].push_back(std::log(to_double(s / Rational(instance.votes[e].votes))));
      }
    }
  }
  return out;
}

std::vector<std::vector<Rational>> cost_table(const MAInstance& instance,
                                              const SignpostMethod& method) {
  const auto logs = log_ratios(instance, method);
  double largest = 0;
  for (const auto& row : logs) {
    for (const auto& v : row) {
      if (v) largest = std::max(largest, std::abs(*v));
    }
  }
  // Stand-in for ln 0: outweighs every finite choice of c seats.
  const Rational big = -Rational(static_cast<long long>(
      std::ceil(1 + static_cast<double>(instance.house) * (1 + largest))));
  std::vector<std::vector<Rational>> out(logs.size());
  for (std::size_t e = 0; e < logs.size(); ++e) {
    for (const auto& v : logs[e]) {
      out[e].push_back(v ? snap_to_rational(*v, kCostDenominator) : big);
    }
  }
  return out;
}

long to_long(const Rational& value) { return static_cast<long>(floor(value).convert_to<long long>()); }

}  // namespace

SignpostMethod SignpostMethod::adams() {
  SignpostMethod m;
  m.kind_ = Kind::Adams;
  return m;
}

SignpostMethod SignpostMethod::webster() {
  SignpostMethod m;
  m.kind_ = Kind::Webster;
  return m;
}

SignpostMethod SignpostMethod::jefferson() {
  SignpostMethod m;
  m.kind_ = Kind::Jefferson;
  return m;
}

SignpostMethod SignpostMethod::custom(std::vector<Rational> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Rational t(static_cast<long long>(i + 1));
    if (values[i] < t - 1 || values[i] > t) {
      fail(ErrorKind::InvalidInstance, "signpost s(" + to_string(t) + ") outside [t-1, t]");
    }
    if (i > 0 && values[i] <= values[i - 1]) {
      fail(ErrorKind::InvalidInstance, "signposts must increase strictly");
    }
  }
  SignpostMethod m;
  m.kind_ = Kind::Custom;
  m.values_ = std::move(values);
  return m;
}

SignpostMethod SignpostMethod::parse(const std::string& name) {
  if (name == "adams") return adams();
  if (name == "webster") return webster();
  if (name == "jefferson") return jefferson();
  fail(ErrorKind::Lookup, "unknown method '" + name + "'");
}

std::string SignpostMethod::name() const {
  switch (kind_) {
    case Kind::Adams: return "adams";
    case Kind::Webster: return "webster";
    case Kind::Jefferson: return "jefferson";
    case Kind::Custom: return "custom";
  }
  return "custom";
}

Rational SignpostMethod::operator()(long t) const {
  if (t <= 0) return 0;
  const Rational r(static_cast<long long>(t));
  switch (kind_) {
    case Kind::Adams: return r - 1;
    case Kind::Webster: return r - Rational(1, 2);
    case Kind::Jefferson: return r;
    case Kind::Custom:
      if (static_cast<std::size_t>(t) > values_.size()) {
        fail(ErrorKind::ScaleExceeded, "custom signposts end at t=" + std::to_string(values_.size()));
      }
      return values_[static_cast<std::size_t>(t) - 1];
  }
  return r;
}

std::vector<long> rounding_set(const SignpostMethod& method, const Rational& q) {
  if (q < 0) fail(ErrorKind::InvalidInstance, "cannot round a negative quota");
  if (q == 0) return {0};
  // s(t) >= t-1, so the first signpost at or above q has t <= q + 1.
  long t = 1;
  while (method(t) < q) ++t;
  if (method(t) == q) return {t - 1, t};
  return {t - 1};
}

void MAInstance::validate() const {
  if (dimensions.empty()) fail(ErrorKind::InvalidInstance, "at least one dimension is needed");
  if (house < 0) fail(ErrorKind::InvalidInstance, "house size is negative");
  for (const auto& dim : dimensions) {
    const std::size_t k = dim.groups.size();
    if (k == 0) fail(ErrorKind::InvalidInstance, "dimension '" + dim.name + "' has no groups");
    if (dim.lower.size() != k || dim.upper.size() != k) {
      fail(ErrorKind::InvalidInstance, "dimension '" + dim.name + "' needs one bound pair per group");
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (dim.lower[i] < 0 || dim.lower[i] > dim.upper[i]) {
        fail(ErrorKind::InvalidInstance, "group '" + dim.groups[i] + "' has bounds out of order");
      }
    }
  }
  std::set<std::vector<std::size_t>> seen;
  for (const auto& v : votes) {
    if (v.votes < 1) fail(ErrorKind::InvalidInstance, "vote counts must be positive");
    if (v.tuple.size() != dimensions.size()) {
      fail(ErrorKind::InvalidInstance, "vote tuple length differs from the dimension count");
    }
    for (std::size_t l = 0; l < dimensions.size(); ++l) {
      if (v.tuple[l] >= dimensions[l].groups.size()) {
        fail(ErrorKind::InvalidInstance, "vote tuple names an unknown group");
      }
    }
    if (!seen.insert(v.tuple).second) fail(ErrorKind::InvalidInstance, "vote tuple listed twice");
  }
}

bool MAInstance::binding(std::size_t dimension) const {
  const auto& dim = dimensions.at(dimension);
  return dim.lower == dim.upper;
}

Rational lp_ma_cost(const MAInstance& instance, const SignpostMethod& method, std::size_t tuple,
                    long t) {
  const auto table = cost_table(instance, method);
  if (t < 1 || static_cast<std::size_t>(t) > table.at(tuple).size()) {
    fail(ErrorKind::Lookup, "seat index outside the tuple's range");
  }
  return table[tuple][static_cast<std::size_t>(t) - 1];
}

LpMaSolution solve_lp_ma(const MAInstance& instance, const SignpostMethod& method) {
  instance.validate();
  const auto costs = cost_table(instance, method);
  LinearProgram lp;
  std::vector<std::vector<std::size_t>> var(costs.size());
  for (std::size_t e = 0; e < costs.size(); ++e) {
    for (const auto& c : costs[e]) var[e].push_back(lp.add_variable(0, Rational(1), c));
  }
  for (std::size_t l = 0; l < instance.dimensions.size(); ++l) {
    const auto& dim = instance.dimensions[l];
    for (std::size_t i = 0; i < dim.groups.size(); ++i) {
      std::vector<std::pair<std::size_t, Rational>> terms;
      for (std::size_t e = 0; e < costs.size(); ++e) {
        if (instance.votes[e].tuple[l] != i) continue;
        for (auto v : var[e]) terms.emplace_back(v, 1);
      }
      if (dim.lower[i] == dim.upper[i]) {
        lp.add_constraint(terms, Relation::Equal, dim.lower[i]);
      } else {
        if (dim.lower[i] > 0) lp.add_constraint(terms, Relation::GreaterEqual, dim.lower[i]);
        lp.add_constraint(terms, Relation::LessEqual, dim.upper[i]);
      }
    }
  }
  std::vector<std::pair<std::size_t, Rational>> all;
  for (std::size_t v = 0; v < lp.num_variables(); ++v) all.emplace_back(v, 1);
  lp.add_constraint(std::move(all), Relation::Equal, instance.house);

  const auto sol = solve_vertex(lp);
  if (sol.status != LpStatus::Optimal) {
    fail(ErrorKind::Infeasible, "no fractional apportionment meets the bounds and house size");
  }
  LpMaSolution out;
  out.objective = sol.objective;
  out.x.resize(costs.size());
  out.seats.assign(costs.size(), 0);
  for (std::size_t e = 0; e < costs.size(); ++e) {
    for (auto v : var[e]) {
      out.x[e].push_back(sol.values[v]);
      out.seats[e] += sol.values[v];
    }
  }
  return out;
}

long delta_bound_ma(const MAInstance& instance, const std::vector<long>& alpha) {
  if (alpha.size() != instance.dimensions.size()) {
    fail(ErrorKind::BudgetViolated, "one group tolerance per dimension");
  }
  Rational sum = 0;
  for (long a : alpha) {
    if (a < 0) fail(ErrorKind::BudgetViolated, "group tolerances must be non-negative");
    sum += Rational(1, a + 2);
  }
  if (sum > 1) {
    fail(ErrorKind::BudgetViolated, "sum of 1/(alpha+2) is " + to_string(sum) + ", above 1");
  }
  std::optional<long> best;
  if (sum < 1) best = static_cast<long>(ceil(1 / (1 - sum) - 2).convert_to<long long>());
  for (std::size_t l = 0; l < alpha.size(); ++l) {
    const long k = static_cast<long>(instance.num_groups(l));
    const long per_dim = instance.binding(l) ? alpha[l] * k : (alpha[l] + 1) * k - 1;
    best = best ? std::min(*best, per_dim) : per_dim;
  }
  return std::max(*best, 0L);
}

ApportionmentResult approx_apportionment(const MAInstance& instance, const SignpostMethod& method,
                                         const std::vector<long>& alpha) {
  instance.validate();
  ApportionmentResult result;
  result.delta = delta_bound_ma(instance, alpha);
  result.fractional = solve_lp_ma(instance, method);
  const auto& xs = result.fractional.x;
  const std::size_t d = instance.dimensions.size();

  // One unit-demand agent per potential seat, one resource holding the house.
  std::vector<AgentSpec> agents;
  std::vector<std::pair<std::size_t, long>> seat_of;
  for (std::size_t e = 0; e < xs.size(); ++e) {
    for (std::size_t t = 0; t < xs[e].size(); ++t) {
      agents.push_back({"e" + std::to_string(e) + "#" + std::to_string(t + 1), 1, false});
      seat_of.emplace_back(e, static_cast<long>(t));
    }
  }

  std::vector<std::vector<Rational>> rounded(xs.size());
  for (std::size_t e = 0; e < xs.size(); ++e) rounded[e].assign(xs[e].size(), 0);

  if (!agents.empty()) {
    std::vector<Dimension> dims(d);
    for (std::size_t l = 0; l < d; ++l) {
      dims[l].name = instance.dimensions[l].name;
      for (const auto& g : instance.dimensions[l].groups) dims[l].groups.push_back({g, {}});
    }
    Allocation x;
    for (std::size_t a = 0; a < agents.size(); ++a) {
      const auto [e, t] = seat_of[a];
      for (std::size_t l = 0; l < d; ++l) dims[l].groups[instance.votes[e].tuple[l]].members.push_back(a);
      const Rational& v = xs[e][static_cast<std::size_t>(t)];
      if (v != 0) x.set(a, Bundle({1}), v);
    }
    const Instance lifted(agents, {{"house", instance.house}}, dims);
    const auto ones = UtilityModel::additive(std::vector<std::vector<Rational>>(agents.size(), {1}));

    DeviationBudget budget;
    for (long a : alpha) budget.group.push_back(a + 1);
    budget.agent_rows = agent_rows_forced(lifted, x);
    budget.max_demand = 1;
    if (budget.agent_rows || check_condition(budget) > 0) budget.total = min_total_tolerance(budget);

    auto round = iterative_round(lifted, x, ones, budget);
    result.certificate = round.certificate;
    for (const auto& [key, value] : round.rounded.entries()) {
      const auto [e, t] = seat_of[key.agent];
      rounded[e][static_cast<std::size_t>(t)] = value;
    }
  }

  result.seats.assign(xs.size(), 0);
  for (std::size_t e = 0; e < xs.size(); ++e) {
    for (std::size_t t = 0; t < xs[e].size(); ++t) {
      const Rational& y = rounded[e][t];
      if (y != 0 && y != 1) result.violations.push_back("rounded seat is not integral");
      if ((xs[e][t] == 0 && y != 0) || (xs[e][t] == 1 && y != 1)) {
        result.violations.push_back("tuple " + std::to_string(e) + " seat " + std::to_string(t + 1) +
                                    " is not a rounding of the LP optimum");
      }
      result.seats[e] += to_long(y);
    }
  }
  result.group_seats.resize(d);
  result.group_excess.resize(d);
  for (std::size_t l = 0; l < d; ++l) {
    const auto& dim = instance.dimensions[l];
    result.group_seats[l].assign(dim.groups.size(), 0);
    for (std::size_t e = 0; e < xs.size(); ++e) {
      result.group_seats[l][instance.votes[e].tuple[l]] += result.seats[e];
    }
    for (std::size_t i = 0; i < dim.groups.size(); ++i) {
      const long s = result.group_seats[l][i];
      const long excess = std::max({0L, dim.lower[i] - s, s - dim.upper[i]});
      result.group_excess[l].push_back(excess);
      if (excess > alpha[l]) {
        result.violations.push_back("group '" + dim.groups[i] + "' misses its bounds by " +
                                    std::to_string(excess) + " > " + std::to_string(alpha[l]));
      }
    }
  }
  for (long s : result.seats) result.total += s;
  result.total_deviation = std::labs(result.total - instance.house);
  if (result.total_deviation > result.delta) {
    result.violations.push_back("house size missed by " + std::to_string(result.total_deviation) +
                                " > " + std::to_string(result.delta));
  }
  for (const auto& v : result.certificate.violations) result.violations.push_back(v);
  return result;
}

}  // namespace fairround
