#include "fairround/fairness.hpp"

#include "fairround/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fairround {

FairObjective FairObjective::utilitarian() {
  FairObjective f;
  f.kind_ = Kind::Utilitarian;
  return f;
}

FairObjective FairObjective::proportional() {
  FairObjective f;
  f.kind_ = Kind::Proportional;
  return f;
}

FairObjective FairObjective::custom(std::function<double(double)> value,
                                    std::function<double(double)> derivative) {
  if (!value || !derivative) fail(ErrorKind::InvalidInstance, "custom objective needs f and f'");
  FairObjective f;
  f.kind_ = Kind::Custom;
  f.value_ = std::move(value);
  f.derivative_ = std::move(derivative);
  return f;
}

double FairObjective::value(double z) const {
  switch (kind_) {
    case Kind::Utilitarian:
      return z;
    case Kind::Proportional:
      return z > 0 ? std::log(z) : -std::numeric_limits<double>::infinity();
    case Kind::Custom:
      return value_(z);
  }
  return 0;
}

double FairObjective::derivative(double z) const {
  switch (kind_) {
    case Kind::Utilitarian:
      return 1;
    case Kind::Proportional:
      return z > 0 ? 1 / z : std::numeric_limits<double>::infinity();
    case Kind::Custom:
      return derivative_(z);
  }
  return 0;
}

bool FairObjective::looks_concave(double hi, int samples) const {
  for (int s = 1; s <= samples; ++s) {
    // Deterministic spread of triples a < b < c over (0, hi].
    const double a = hi * s / (samples + 1.0) / 3;
    const double c = std::min(hi, a * 3 + hi / (samples + 1.0));
    const double b = (a + c) / 2;
    const double fa = value(a), fb = value(b), fc = value(c);
    const double scale = 1e-9 * (1 + std::abs(fa) + std::abs(fc));
    if (fb + scale < fa || fc + scale < fb) return false;
    if (fb + scale < (fa + fc) / 2) return false;
  }
  return true;
}

Instance as_assignment(const Instance& instance) {
  auto agents = instance.agents();
  for (auto& a : agents) a.binding = true;
  return Instance(std::move(agents), instance.resources(), instance.dimensions(),
                  instance.acceptability());
}

std::vector<AgentBundle> feasible_pairs(const Instance& instance) {
  std::vector<AgentBundle> pairs;
  for (std::size_t a = 0; a < instance.num_agents(); ++a) {
    for (auto& b : enumerate_bundles(instance, a)) pairs.push_back({a, std::move(b)});
  }
  return pairs;
}

LinearProgram allocation_polytope(const Instance& instance, const std::vector<AgentBundle>& pairs) {
  LinearProgram lp;
  for (std::size_t e = 0; e < pairs.size(); ++e) lp.add_variable();
  std::vector<std::vector<std::pair<std::size_t, Rational>>> agent_rows(instance.num_agents());
  std::vector<std::vector<std::pair<std::size_t, Rational>>> resource_rows(instance.num_resources());
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    agent_rows[pairs[e].agent].emplace_back(e, 1);
    for (std::size_t r = 0; r < instance.num_resources(); ++r) {
      if (pairs[e].bundle[r] > 0) resource_rows[r].emplace_back(e, pairs[e].bundle[r]);
    }
  }
  for (std::size_t a = 0; a < instance.num_agents(); ++a) {
    lp.add_constraint(std::move(agent_rows[a]),
                      instance.agent(a).binding ? Relation::Equal : Relation::LessEqual, 1);
  }
  for (std::size_t r = 0; r < instance.num_resources(); ++r) {
    if (resource_rows[r].empty()) continue;
    lp.add_constraint(std::move(resource_rows[r]), Relation::LessEqual,
                      instance.resource(r).capacity);
  }
  return lp;
}

namespace {

struct GroupRef {
  std::size_t dimension;
  std::size_t group;
};

std::vector<GroupRef> all_groups(const Instance& instance) {
  std::vector<GroupRef> out;
  for (std::size_t l = 0; l < instance.num_dimensions(); ++l) {
    for (std::size_t i = 0; i < instance.num_groups(l); ++i) out.push_back({l, i});
  }
  return out;
}

// weights[g][e]: utility pair e contributes to group g.
std::vector<std::vector<Rational>> group_weights(const Instance& instance,
                                                 const UtilityModel& utilities,
                                                 const std::vector<AgentBundle>& pairs,
                                                 const std::vector<GroupRef>& groups) {
  std::vector<std::vector<Rational>> w(groups.size(), std::vector<Rational>(pairs.size(), 0));
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    const Rational value = utilities.utility(pairs[e].agent, pairs[e].bundle);
    if (value == 0) continue;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      auto member = instance.group_of(pairs[e].agent, groups[g].dimension);
      if (member && *member == groups[g].group) w[g][e] = value;
    }
  }
  return w;
}

Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
  }
  return s;
}

Allocation to_allocation(const std::vector<AgentBundle>& pairs, const std::vector<Rational>& v) {
  Allocation x;
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    if (v[e] != 0) x.set(pairs[e].agent, pairs[e].bundle, v[e]);
  }
  return x;
}

LinearProgram with_cost(LinearProgram lp, const std::vector<Rational>& cost) {
  lp.cost = cost;
  return lp;
}

// Maximizes a concave sum over the convex hull of the atoms' utility vectors
// by pairwise Frank-Wolfe on the simplex weights.
class HullSolver {
 public:
  HullSolver(const FairObjective& f, const std::vector<bool>& active) : f_(f), active_(active) {}

  double objective(const std::vector<double>& u) const {
    double s = 0;
    for (std::size_t g = 0; g < u.size(); ++g) {
      if (active_[g]) s += f_.value(u[g]);
    }
    return s;
  }

  std::vector<double> mix(const std::vector<std::vector<double>>& atoms,
                          const std::vector<double>& lambda) const {
    std::vector<double> u(active_.size(), 0.0);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      for (std::size_t g = 0; g < u.size(); ++g) u[g] += lambda[k] * atoms[k][g];
    }
    return u;
  }

  void optimize(const std::vector<std::vector<double>>& atoms, std::vector<double>& lambda) const {
    const std::size_t groups = active_.size();
    for (int step = 0; step < 20000; ++step) {
      const auto u = mix(atoms, lambda);
      std::vector<double> grad(groups, 0.0);
      for (std::size_t g = 0; g < groups; ++g) {
        if (active_[g]) grad[g] = f_.derivative(u[g]);
      }
      std::size_t toward = 0, away = atoms.size();
      double best = -std::numeric_limits<double>::infinity();
      double worst = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        double score = 0;
        for (std::size_t g = 0; g < groups; ++g) score += grad[g] * atoms[k][g];
        if (score > best) best = score, toward = k;
        if (lambda[k] > 0 && score < worst) worst = score, away = k;
      }
      if (away == atoms.size() || toward == away) return;
      if (best - worst <= 1e-13 * (1 + std::abs(best))) return;

      std::vector<double> dir(groups);
      for (std::size_t g = 0; g < groups; ++g) dir[g] = atoms[toward][g] - atoms[away][g];
      const double gamma = line_search(u, dir, lambda[away]);
      if (gamma <= 0) return;
      lambda[toward] += gamma;
      lambda[away] -= gamma;
      if (lambda[away] < 1e-15) lambda[away] = 0;
    }
  }

 private:
  double slope(const std::vector<double>& u, const std::vector<double>& dir, double gamma) const {
    double s = 0;
    for (std::size_t g = 0; g < u.size(); ++g) {
      if (!active_[g] || dir[g] == 0) continue;
      const double z = u[g] + gamma * dir[g];
      if (f_.kind() == FairObjective::Kind::Proportional && z <= 0) {
        return -std::numeric_limits<double>::infinity();
      }
      s += f_.derivative(z) * dir[g];
    }
    return s;
  }

  // Exact line search on [0, hi] for a concave segment objective.
  double line_search(const std::vector<double>& u, const std::vector<double>& dir, double hi) const {
    if (slope(u, dir, 0) <= 0) return 0;
    if (slope(u, dir, hi) >= 0) return hi;
    double lo = 0;
    for (int it = 0; it < 100; ++it) {
      const double mid = (lo + hi) / 2;
      if (slope(u, dir, mid) > 0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return lo;
  }

  const FairObjective& f_;
  const std::vector<bool>& active_;
};

std::vector<double> to_doubles(const std::vector<std::vector<Rational>>& weights,
                               const std::vector<Rational>& point) {
  std::vector<double> u(weights.size());
  for (std::size_t g = 0; g < weights.size(); ++g) u[g] = to_double(dot(weights[g], point));
  return u;
}

Rational floor_to_grid(double value, double grid) {
  return Rational(static_cast<long long>(std::floor(value * grid)), static_cast<long long>(grid));
}

}  // namespace

FairFractional solve_fair_fractional(const Instance& instance, const UtilityModel& utilities,
                                     const FairObjective& objective,
                                     const FrankWolfeOptions& options) {
  const Instance inst = as_assignment(instance);
  inst.validate();
  utilities.validate(inst);
  const auto pairs = feasible_pairs(inst);
  const LinearProgram polytope = allocation_polytope(inst, pairs);
  const auto groups = all_groups(inst);
  const auto weights = group_weights(inst, utilities, pairs, groups);

  std::vector<std::vector<Rational>> atoms;
  auto add_atom = [&](const std::vector<Rational>& v) {
    if (std::find(atoms.begin(), atoms.end(), v) != atoms.end()) return false;
    atoms.push_back(v);
    return true;
  };

  auto start = feasible_vertex(polytope);
  if (start.status != LpStatus::Optimal) {
    fail(ErrorKind::Infeasible, "no fractional assignment satisfies the capacities");
  }
  add_atom(start.values);

  // Per-group maximizers seed the hull so every attainable group starts positive.
  std::vector<bool> active(groups.size(), true);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<Rational> cost(pairs.size());
    for (std::size_t e = 0; e < pairs.size(); ++e) cost[e] = -weights[g][e];
    auto best = solve_vertex(with_cost(polytope, cost));
    if (best.objective == 0) {
      if (objective.kind() == FairObjective::Kind::Proportional) active[g] = false;
      continue;
    }
    add_atom(best.values);
  }

  std::vector<std::vector<double>> atom_utils;
  for (const auto& a : atoms) atom_utils.push_back(to_doubles(weights, a));
  std::vector<double> lambda(atoms.size(), 1.0 / atoms.size());

  HullSolver hull(objective, active);
  FairFractional out;
  double current = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    hull.optimize(atom_utils, lambda);
    const auto u = hull.mix(atom_utils, lambda);
    const double value = hull.objective(u);
    out.objective_trace.push_back(value);
    out.iterations = iter + 1;
    if (std::isfinite(current) &&
        value - current <= options.tolerance * std::max(1.0, std::abs(value))) {
      current = value;
      break;
    }
    current = value;

    // Linear oracle on the pair gradient, scaled to integer costs.
    std::vector<double> grad(pairs.size(), 0.0);
    double scale = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (!active[g]) continue;
      const double dg = objective.derivative(u[g]);
      for (std::size_t e = 0; e < pairs.size(); ++e) {
        if (weights[g][e] != 0) grad[e] += dg * to_double(weights[g][e]);
      }
    }
    for (double v : grad) scale = std::max(scale, std::abs(v));
    if (scale == 0) break;
    std::vector<Rational> cost(pairs.size());
    const double factor = static_cast<double>(options.snap_denominator) / scale;
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      cost[e] = Rational(-static_cast<long long>(std::llround(grad[e] * factor)));
    }
    auto vertex = solve_vertex(with_cost(polytope, cost));
    const auto s_utils = to_doubles(weights, vertex.values);
    double gap = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (active[g]) gap += objective.derivative(u[g]) * (s_utils[g] - u[g]);
    }
    if (gap <= options.tolerance * std::max(1.0, std::abs(value))) break;
    if (!add_atom(vertex.values)) break;
    atom_utils.push_back(s_utils);
    lambda.push_back(0.0);

    // Drop atoms the hull no longer uses.
    std::size_t keep = 0;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      if (lambda[k] > 0 || k + 1 == atoms.size()) {
        if (keep != k) {  // self-move would empty the vector
          atoms[keep] = std::move(atoms[k]);
          atom_utils[keep] = std::move(atom_utils[k]);
          lambda[keep] = lambda[k];
        }
        ++keep;
      }
    }
    atoms.resize(keep);
    atom_utils.resize(keep);
    lambda.resize(keep);
  }

  // Exact convex combination of exact vertices with snapped weights.
  std::vector<Rational> weights_exact(atoms.size(), 0);
  std::size_t heaviest = 0;
  Rational rest = 0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (lambda[k] > lambda[heaviest]) heaviest = k;
  }
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (k == heaviest) continue;
    Rational w = snap_to_rational(lambda[k], options.snap_denominator);
    if (w < 0) w = 0;
    weights_exact[k] = w;
    rest += w;
  }
  weights_exact[heaviest] = 1 - rest;
  std::vector<Rational> point(pairs.size(), 0);
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (weights_exact[k] == 0) continue;
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      if (atoms[k][e] != 0) point[e] += weights_exact[k] * atoms[k][e];
    }
  }
  out.allocation = to_allocation(pairs, point);
  out.group_utilities = hull.mix(atom_utils, lambda);
  return out;
}

Allocation refine_to_vertex(const Instance& instance, const UtilityModel& utilities,
                            const std::vector<double>& target_utilities, double tolerance) {
  const Instance inst = as_assignment(instance);
  const auto pairs = feasible_pairs(inst);
  const auto groups = all_groups(inst);
  if (target_utilities.size() != groups.size()) {
    fail(ErrorKind::InvalidInstance, "one target utility per group is required");
  }
  const auto weights = group_weights(inst, utilities, pairs, groups);

  auto attempt = [&](double tol) -> std::optional<Allocation> {
    LinearProgram lp = allocation_polytope(inst, pairs);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const double t = target_utilities[g];
      const Rational bound = floor_to_grid(t - tol * std::abs(t), 1e9);
      if (bound <= 0) continue;
      std::vector<std::pair<std::size_t, Rational>> terms;
      for (std::size_t e = 0; e < pairs.size(); ++e) {
        if (weights[g][e] != 0) terms.emplace_back(e, weights[g][e]);
      }
      lp.add_constraint(std::move(terms), Relation::GreaterEqual, bound);
    }
    // Among the qualifying vertices prefer larger total group utility.
    lp.cost.assign(pairs.size(), 0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (std::size_t e = 0; e < pairs.size(); ++e) lp.cost[e] -= weights[g][e];
    }
    auto sol = solve_vertex(lp);
    if (sol.status != LpStatus::Optimal) return std::nullopt;
    return to_allocation(pairs, sol.values);
  };

  if (auto x = attempt(tolerance)) return *x;
  if (tolerance < 1e-4) {
    if (auto x = attempt(1e-4)) return *x;
  }
  fail(ErrorKind::Infeasible, "refinement infeasible: group utility targets cannot be met");
}

long delta_plus_bound(const Instance& instance, long delta) {
  const long w = instance.max_demand();
  long groups = 0;
  for (std::size_t l = 0; l < instance.num_dimensions(); ++l) groups += instance.num_groups(l);
  const long structural = (w - 1) * static_cast<long>(instance.num_agents()) +
                          w * static_cast<long>(instance.num_resources()) + (w + 1) * groups;
  return std::min(structural, delta * static_cast<long>(instance.num_resources()));
}

Rational assignment_condition_slack(const std::vector<long>& alpha, long delta, int max_demand) {
  if (delta < 0) fail(ErrorKind::BudgetViolated, "negative resource tolerance");
  Rational value = Rational(max_demand, delta + 2);
  for (long a : alpha) {
    if (a < 0) fail(ErrorKind::BudgetViolated, "negative group tolerance");
    value += Rational(1, a + 1);
  }
  return Rational(1, 2) - value;
}

std::vector<std::string> check_fair_result(const Instance& instance, const UtilityModel& utilities,
                                           const Allocation& vertex, const Allocation& y,
                                           const std::vector<long>& alpha, long delta,
                                           long delta_plus) {
  const Instance inst = as_assignment(instance);
  std::vector<std::string> out;
  for (auto& v : allocation_violations(inst, y, false)) out.push_back(std::move(v));
  if (!y.is_integral()) out.push_back("rounded allocation is not integral");
  for (std::size_t l = 0; l < inst.num_dimensions(); ++l) {
    for (std::size_t i = 0; i < inst.num_groups(l); ++i) {
      Rational dev = group_utility(inst, utilities, y, l, i) -
                     group_utility(inst, utilities, vertex, l, i);
      if (dev < 0) dev = -dev;
      const Rational limit = alpha.at(l) * group_max_utility(inst, utilities, l, i);
      if (dev != 0 && dev >= limit) {
        out.push_back("group " + inst.dimension(l).groups[i].name + " deviates by " +
                      to_string(dev) + " (limit " + to_string(limit) + ")");
      }
    }
  }
  Rational total = 0;
  for (std::size_t r = 0; r < inst.num_resources(); ++r) {
    const Rational excess = y.resource_load(r) - inst.resource(r).capacity;
    if (excess <= 0) continue;
    total += excess;
    if (excess > delta) {
      out.push_back("resource " + inst.resource(r).id + " exceeds capacity by " + to_string(excess));
    }
  }
  if (total > delta_plus) {
    out.push_back("total excess " + to_string(total) + " above " + std::to_string(delta_plus));
  }
  return out;
}

FairResult approx_fair_allocation(const Instance& instance, const UtilityModel& utilities,
                                  const FairObjective& objective, const std::vector<long>& alpha,
                                  long delta, const FrankWolfeOptions& options) {
  const Instance inst = as_assignment(instance);
  inst.validate();
  if (alpha.size() != inst.num_dimensions()) {
    fail(ErrorKind::BudgetViolated, "one group tolerance per dimension is required");
  }
  const Rational slack = assignment_condition_slack(alpha, delta, inst.max_demand());
  if (slack < 0) {
    fail(ErrorKind::BudgetViolated,
         "assignment condition fails (slack " + to_string(slack) + ")");
  }

  FairResult result;
  auto fractional = solve_fair_fractional(inst, utilities, objective, options);
  result.fractional = fractional.allocation;
  std::vector<double> targets;
  for (std::size_t l = 0; l < inst.num_dimensions(); ++l) {
    for (std::size_t i = 0; i < inst.num_groups(l); ++i) {
      targets.push_back(to_double(group_utility(inst, utilities, result.fractional, l, i)));
    }
  }
  result.vertex = refine_to_vertex(inst, utilities, targets);

  DeviationBudget budget{alpha, delta + 1, 2, true, inst.max_demand()};
  auto rounded = iterative_round(inst, result.vertex, utilities, budget);
  result.rounded = std::move(rounded.rounded);
  result.budget = budget;
  result.certificate = std::move(rounded.certificate);
  result.delta_plus = delta_plus_bound(inst, delta);

  for (std::size_t l = 0; l < inst.num_dimensions(); ++l) {
    for (std::size_t i = 0; i < inst.num_groups(l); ++i) {
      result.utilities_before.push_back(group_utility(inst, utilities, result.vertex, l, i));
      result.utilities_after.push_back(group_utility(inst, utilities, result.rounded, l, i));
    }
  }
  for (std::size_t r = 0; r < inst.num_resources(); ++r) {
    Rational excess = result.rounded.resource_load(r) - inst.resource(r).capacity;
    if (excess < 0) excess = 0;
    result.total_excess += excess;
    result.excess.push_back(excess);
  }
  result.violations = result.certificate.violations;
  for (auto& v : check_fair_result(inst, utilities, result.vertex, result.rounded, alpha, delta,
                                   result.delta_plus)) {
    result.violations.push_back(std::move(v));
  }
  return result;
}

std::vector<ProportionalityCheck> check_proportionality(const Instance& instance,
                                                        const UtilityModel& utilities,
                                                        const Allocation& y, long alpha) {
  if (instance.num_dimensions() != 1) {
    fail(ErrorKind::InvalidInstance, "proportionality is defined for a single dimension");
  }
  const Instance inst = as_assignment(instance);
  const auto pairs = feasible_pairs(inst);
  const auto groups = all_groups(inst);
  const auto weights = group_weights(inst, utilities, pairs, groups);
  const LinearProgram polytope = allocation_polytope(inst, pairs);
  const long k = static_cast<long>(inst.num_groups(0));

  std::vector<ProportionalityCheck> out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<Rational> cost(pairs.size());
    for (std::size_t e = 0; e < pairs.size(); ++e) cost[e] = -weights[g][e];
    auto best = solve_vertex(with_cost(polytope, cost));
    if (best.status != LpStatus::Optimal) {
      fail(ErrorKind::Infeasible, "no fractional assignment satisfies the capacities");
    }
    ProportionalityCheck c;
    c.group = g;
    c.best = -best.objective;
    c.achieved = group_utility(inst, utilities, y, 0, g);
    c.threshold = c.best / k - alpha * group_max_utility(inst, utilities, 0, g);
    c.pass = c.achieved >= c.threshold;
    out.push_back(c);
  }
  return out;
}

GeneratedInstance gen_lower_bound_instance(LowerBoundKind kind, int n) {
  if (n < 2) fail(ErrorKind::InvalidInstance, "lower-bound instances need n >= 2");
  std::vector<ResourceSpec> resources;
  for (int j = 1; j <= n; ++j) resources.push_back({"r" + std::to_string(j), 1});

  if (kind == LowerBoundKind::Capacity) {
    std::vector<AgentSpec> agents;
    std::vector<Group> groups;
    std::vector<std::vector<Rational>> u;
    for (int a = 0; a < n; ++a) {
      agents.push_back({"a" + std::to_string(a + 1), 1, true});
      groups.push_back({"g" + std::to_string(a + 1), {static_cast<std::size_t>(a)}});
      std::vector<Rational> row(n, 0);
      row[0] = 1;
      u.push_back(std::move(row));
    }
    Instance inst(std::move(agents), std::move(resources), {{"singletons", std::move(groups)}});
    return {std::move(inst), UtilityModel::additive(std::move(u))};
  }

  if (n % 2 != 0) fail(ErrorKind::InvalidInstance, "the utility cycle needs an even n");
  const int half = n / 2;
  std::vector<AgentSpec> agents;
  Group first{"G1", {}}, second{"G2", {}};
  std::vector<std::pair<std::size_t, std::size_t>> accept;
  for (int i = 1; i <= half; ++i) {
    const auto a = agents.size();
    agents.push_back({"a" + std::to_string(i), 1, true});
    first.members.push_back(a);
    accept.emplace_back(a, 2 * i - 2);
    accept.emplace_back(a, 2 * i - 1);
  }
  for (int i = 1; i <= half; ++i) {
    const auto b = agents.size();
    agents.push_back({"b" + std::to_string(i), 1, true});
    second.members.push_back(b);
    accept.emplace_back(b, 2 * i - 1);
    accept.emplace_back(b, (2 * i) % n);  // wraps to the first resource
  }
  std::vector<std::vector<Rational>> u(agents.size(), std::vector<Rational>(n, 0));
  for (auto& row : u) {
    for (int j = 0; j < n; j += 2) row[j] = 1;
  }
  std::sort(accept.begin(), accept.end());
  accept.erase(std::unique(accept.begin(), accept.end()), accept.end());
  Instance inst(std::move(agents), std::move(resources), {{"cycle", {first, second}}},
                std::move(accept));
  return {std::move(inst), UtilityModel::additive(std::move(u))};
}

}  // namespace fairround
