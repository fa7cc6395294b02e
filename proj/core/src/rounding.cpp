#include "fairround/rounding.hpp"

#include "fairround/errors.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace fairround {

Rational condition_value(const DeviationBudget& budget) {
  Rational value = budget.agent_rows ? Rational(1, 2) : Rational(0);
  for (long alpha : budget.group) {
    if (alpha < 0) fail(ErrorKind::BudgetViolated, "negative group tolerance");
    value += Rational(1, alpha + 1);
  }
  if (budget.resource) {
    if (*budget.resource < 0) fail(ErrorKind::BudgetViolated, "negative resource tolerance");
    value += Rational(budget.max_demand, *budget.resource + 1);
  }
  return value;
}

Rational check_condition(const DeviationBudget& budget) { return 1 - condition_value(budget); }

long min_total_tolerance(const DeviationBudget& budget) {
  const Rational slack = check_condition(budget);
  if (slack < 0) {
    fail(ErrorKind::BudgetViolated, "deviation condition fails (slack " + to_string(slack) + ")");
  }
  if (budget.agent_rows) return 2;
  if (slack == 0) {
    fail(ErrorKind::BudgetViolated, "no admissible total tolerance: condition is tight without agent rows");
  }
  const BigInt bound = ceil(Rational(1) / slack - 1);
  return std::max(0L, static_cast<long>(bound.convert_to<long long>()));
}

bool total_tolerance_admissible(const DeviationBudget& budget) {
  const Rational slack = check_condition(budget);
  if (slack < 0) return false;
  if (!budget.total) return true;
  if (*budget.total < 0) return false;
  if (budget.agent_rows && *budget.total >= 2) return true;
  return slack > 0 && Rational(*budget.total) >= Rational(1) / slack - 1;
}

bool agent_rows_forced(const Instance& instance, const Allocation& x) {
  return instance.num_dimensions() <= 1 || !x.split_agents().empty();
}

Rational Certificate::max_resource_deviation() const {
  Rational best = 0;
  for (const auto& d : resource_deviation) best = std::max(best, d);
  return best;
}

namespace {

Rational abs_value(const Rational& v) { return v < 0 ? Rational(-v) : v; }

std::string describe_group(const Instance& instance, std::size_t l, std::size_t i) {
  return instance.dimension(l).name + "/" + instance.dimension(l).groups[i].name;
}

}  // namespace

Certificate verify_approximation(const Instance& instance, const Allocation& x,
                                 const Allocation& y, const UtilityModel& utilities,
                                 const DeviationBudget& budget) {
  Certificate cert;
  for (const auto& [key, value] : y.entries()) {
    if (!is_integer(value)) {
      cert.violations.push_back("rounded allocation has a fractional entry");
      break;
    }
  }
  for (const auto& [key, value] : y.entries()) {
    if (x.value(key.agent, key.bundle) == 0) {
      cert.violations.push_back("entry of agent '" + instance.agent(key.agent).id +
                                "' is positive but zero in the reference");
    }
  }
  for (const auto& [key, value] : x.entries()) {
    if (value == 1 && y.value(key.agent, key.bundle) != 1) {
      cert.violations.push_back("entry of agent '" + instance.agent(key.agent).id +
                                "' is one in the reference but not kept");
    }
  }

  for (std::size_t l = 0; l < instance.num_dimensions(); ++l) {
    const Rational alpha = l < budget.group.size() ? Rational(budget.group[l]) : Rational(0);
    for (std::size_t i = 0; i < instance.num_groups(l); ++i) {
      GroupDeviation g;
      g.dimension = l;
      g.group = i;
      g.before = group_utility(instance, utilities, x, l, i);
      g.after = group_utility(instance, utilities, y, l, i);
      g.deviation = abs_value(g.after - g.before);
      g.limit = alpha * group_max_utility(instance, utilities, l, i);
      if (g.deviation != 0 && g.deviation >= g.limit) {
        cert.violations.push_back("group " + describe_group(instance, l, i) + " deviates by " +
                                  to_string(g.deviation) + " >= " + to_string(g.limit));
      }
      cert.groups.push_back(std::move(g));
    }
  }

  cert.resource_deviation.resize(instance.num_resources());
  for (std::size_t r = 0; r < instance.num_resources(); ++r) {
    cert.resource_deviation[r] = abs_value(y.resource_load(r) - x.resource_load(r));
    if (budget.resource && cert.resource_deviation[r] != 0 &&
        cert.resource_deviation[r] >= *budget.resource) {
      cert.violations.push_back("resource '" + instance.resource(r).id + "' deviates by " +
                                to_string(cert.resource_deviation[r]));
    }
  }

  cert.total_deviation = abs_value(y.weighted_total(instance) - x.weighted_total(instance));
  if (budget.total && cert.total_deviation != 0 &&
      cert.total_deviation >= Rational(budget.max_demand) * *budget.total) {
    cert.violations.push_back("total deviation " + to_string(cert.total_deviation) +
                              " reaches the limit");
  }
  return cert;
}

RoundingResult iterative_round(const Instance& instance, const Allocation& x,
                               const UtilityModel& utilities, const DeviationBudget& budget,
                               const RoundingOptions& options) {
  if (auto problems = allocation_violations(instance, x); !problems.empty()) {
    fail(ErrorKind::InputNotAllocation, problems.front());
  }
  if (options.check_budget) {
    if (budget.group.size() != instance.num_dimensions()) {
      fail(ErrorKind::BudgetViolated, "group tolerance count differs from the dimension count");
    }
    if (budget.max_demand < instance.max_demand()) {
      fail(ErrorKind::BudgetViolated, "budget demand is below the instance maximum");
    }
    if (agent_rows_forced(instance, x) && !budget.agent_rows) {
      fail(ErrorKind::BudgetViolated, "agent rows are required for this input");
    }
    if (check_condition(budget) < 0) {
      fail(ErrorKind::BudgetViolated,
           "deviation condition fails (value " + to_string(condition_value(budget)) + ")");
    }
    if (!total_tolerance_admissible(budget)) {
      fail(ErrorKind::BudgetViolated, "total tolerance is not admissible");
    }
  }

  Allocation current = x;
  std::vector<IterationRecord> trace;
  std::optional<std::pair<std::size_t, std::size_t>> last_progress;

  std::vector<AgentBundle> support;
  std::map<std::size_t, std::vector<std::size_t>> by_agent;
  for (;;) {
    support = current.fractional_support();
    by_agent.clear();
    for (std::size_t e = 0; e < support.size(); ++e) by_agent[support[e].agent].push_back(e);

    IterationRecord rec;
    rec.support = support.size();

    std::vector<std::size_t> tight_agents;
    std::vector<std::size_t> loose_agents;
    for (const auto& [agent, positions] : by_agent) {
      Rational mass = 0;
      for (std::size_t e : positions) mass += current.value(agent, support[e].bundle);
      if (positions.size() >= 2 && mass == 1) {
        tight_agents.push_back(agent);
      } else {
        loose_agents.push_back(agent);
      }
    }
    rec.active_agents = tight_agents.size();
    rec.slack_agent_rows = loose_agents.size();

    const std::pair<std::size_t, std::size_t> progress{support.size(), loose_agents.size()};
    if (last_progress && !(progress < *last_progress)) {
      fail(ErrorKind::InvariantFailure,
           "rounding made no progress at support size " + std::to_string(support.size()));
    }
    last_progress = progress;

    std::vector<std::pair<std::size_t, std::size_t>> active_groups;
    for (std::size_t l = 0; l < instance.num_dimensions(); ++l) {
      const long alpha = l < budget.group.size() ? budget.group[l] : 0;
      for (std::size_t i = 0; i < instance.num_groups(l); ++i) {
        if (static_cast<long>(incidence(instance, support, GroupKey{l, i}).size()) >= alpha + 1) {
          active_groups.emplace_back(l, i);
        }
      }
    }
    std::vector<std::size_t> active_resources;
    if (budget.resource) {
      for (std::size_t r = 0; r < instance.num_resources(); ++r) {
        long units = 0;
        for (const auto& pair : support) units += pair.bundle[r];
        if (units >= *budget.resource + 1) active_resources.push_back(r);
      }
    }
    const bool total_row = options.use_total_row && budget.total &&
                           static_cast<long>(loose_agents.size()) >= *budget.total + 1;

    if (tight_agents.empty() && active_groups.empty() && active_resources.empty() && !total_row) {
      break;
    }

    LinearProgram lp;
    for (std::size_t e = 0; e < support.size(); ++e) lp.add_variable();
    std::vector<Rational> reference(support.size());
    for (std::size_t e = 0; e < support.size(); ++e) {
      reference[e] = current.value(support[e].agent, support[e].bundle);
    }

    for (std::size_t agent : tight_agents) {
      std::vector<std::pair<std::size_t, Rational>> terms;
      for (std::size_t e : by_agent[agent]) terms.emplace_back(e, 1);
      lp.add_constraint(std::move(terms), Relation::Equal, 1);
    }
    for (std::size_t agent : loose_agents) {
      std::vector<std::pair<std::size_t, Rational>> terms;
      for (std::size_t e : by_agent[agent]) terms.emplace_back(e, 1);
      lp.add_constraint(std::move(terms), Relation::LessEqual, 1);
    }
    std::size_t group_rows = 0;
    for (auto [l, i] : active_groups) {
      if (options.group_rows) {
        auto rows = options.group_rows(current, support, l, i);
        group_rows += rows.size();
        for (auto& row : rows) lp.constraints.push_back(std::move(row));
        continue;
      }
      std::vector<std::pair<std::size_t, Rational>> terms;
      Rational rhs = 0;
      for (std::size_t e : incidence(instance, support, GroupKey{l, i})) {
        const Rational u = utilities.utility(support[e].agent, support[e].bundle);
        if (u == 0) continue;
        terms.emplace_back(e, u);
        rhs += u * reference[e];
      }
      lp.add_constraint(std::move(terms), Relation::Equal, rhs);
      ++group_rows;
    }
    for (std::size_t r : active_resources) {
      std::vector<std::pair<std::size_t, Rational>> terms;
      Rational rhs = 0;
      for (std::size_t e : incidence(instance, support, ResourceKey{r})) {
        const int q = support[e].bundle[r];
        terms.emplace_back(e, q);
        rhs += reference[e] * q;
      }
      lp.add_constraint(std::move(terms), Relation::Equal, rhs);
    }
    if (total_row) {
      std::vector<std::pair<std::size_t, Rational>> terms;
      Rational rhs = 0;
      for (std::size_t e = 0; e < support.size(); ++e) {
        const int w = instance.agent(support[e].agent).demand;
        terms.emplace_back(e, w);
        rhs += reference[e] * w;
      }
      lp.add_constraint(std::move(terms), Relation::Equal, rhs);
    }

    rec.active_groups = active_groups.size();
    rec.group_rows = group_rows;
    rec.active_resources = active_resources.size();
    rec.total_row = total_row;
    rec.constraint_count =
        tight_agents.size() + group_rows + active_resources.size() + (total_row ? 1 : 0);
    if (rec.constraint_count > support.size()) {
      std::ostringstream msg;
      msg << "constraint count " << rec.constraint_count << " exceeds support " << support.size()
          << " (agents " << tight_agents.size() << ", group rows " << group_rows
          << ", resources " << active_resources.size() << ", total " << total_row << ")";
      fail(ErrorKind::InvariantFailure, msg.str());
    }

    const Rational weighted_before = current.weighted_total(instance);
    const VertexSolution vertex = feasible_vertex(lp);
    if (vertex.status != LpStatus::Optimal) {
      fail(ErrorKind::InvariantFailure, "per-iteration program is infeasible");
    }
    rec.pivots = vertex.pivots;
    for (std::size_t e = 0; e < support.size(); ++e) {
      current.set(support[e].agent, support[e].bundle, vertex.values[e]);
    }
    if (total_row && current.weighted_total(instance) != weighted_before) {
      fail(ErrorKind::InvariantFailure, "weighted total moved under an active total row");
    }
    trace.push_back(rec);
  }

  // Terminal step: per agent, the largest remaining entry goes up, the rest down.
  for (const auto& [agent, positions] : by_agent) {
    std::size_t best = positions.front();
    Rational best_value = current.value(agent, support[best].bundle);
    for (std::size_t e : positions) {
      const Rational v = current.value(agent, support[e].bundle);
      if (v > best_value) {
        best = e;
        best_value = v;
      }
    }
    for (std::size_t e : positions) {
      current.set(agent, support[e].bundle, e == best ? Rational(1) : Rational(0));
    }
  }

  if (auto problems = allocation_violations(instance, current, false); !problems.empty()) {
    fail(ErrorKind::InvariantFailure, "rounded output breaks agent constraints: " + problems.front());
  }

  RoundingResult result;
  result.rounded = std::move(current);
  if (options.verify) {
    result.certificate = verify_approximation(instance, x, result.rounded, utilities, budget);
  }
  result.certificate.iterations = trace.size();
  result.certificate.trace = std::move(trace);
  return result;
}

BigInt scaled_floor_sum(std::span<const Rational> theta, std::span<const Rational> eps,
                        std::span<const Rational> gamma, const BigInt& z) {
  BigInt total = 0;
  const Rational zr(z);
  for (std::size_t l = 0; l < theta.size(); ++l) {
    total += floor((theta[l] * zr - eps[l]) / gamma[l]);
  }
  return total;
}

}  // namespace fairround
