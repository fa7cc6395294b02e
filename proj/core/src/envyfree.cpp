#include "fairround/envyfree.hpp"

#include "fairround/errors.hpp"
#include "fairround/fairness.hpp"

#include <algorithm>
#include <optional>

namespace fairround {

HomogeneousInstance::HomogeneousInstance(Instance instance, UtilityModel utilities)
    : instance_(as_assignment(instance)), utilities_(std::move(utilities)) {
  instance_.validate();
  utilities_.validate(instance_);
  if (instance_.num_agents() == 0) fail(ErrorKind::NotGroupHomogeneous, "no agents");
  demand_ = instance_.agent(0).demand;
  for (std::size_t a = 1; a < instance_.num_agents(); ++a) {
    if (instance_.agent(a).demand != demand_) {
      fail(ErrorKind::NotGroupHomogeneous, "agent '" + instance_.agent(a).id + "' has demand " +
                                               std::to_string(instance_.agent(a).demand) +
                                               ", expected " + std::to_string(demand_));
    }
    for (std::size_t r = 0; r < instance_.num_resources(); ++r) {
      if (instance_.acceptable(a, r) != instance_.acceptable(0, r)) {
        fail(ErrorKind::NotGroupHomogeneous,
             "agent '" + instance_.agent(a).id + "' has a different acceptable set");
      }
    }
  }
  bundles_ = enumerate_bundles(instance_, 0);
  for (std::size_t a = 0; a < instance_.num_agents(); ++a) {
    for (const auto& q : bundles_) {
      if (!utilities_.defined(a, q)) {
        fail(ErrorKind::NotGroupHomogeneous,
             "agent '" + instance_.agent(a).id + "' lacks a utility for a common bundle");
      }
    }
  }
  for (std::size_t l = 0; l < instance_.num_dimensions(); ++l) {
    for (std::size_t i = 0; i < instance_.num_groups(l); ++i) {
      const auto& members = instance_.group_members(l, i);
      for (std::size_t m = 1; m < members.size(); ++m) {
        for (const auto& q : bundles_) {
          if (utilities_.utility(members[m], q) != utilities_.utility(members[0], q)) {
            fail(ErrorKind::NotGroupHomogeneous,
                 "members of group '" + instance_.dimension(l).groups[i].name +
                     "' value a bundle differently");
          }
        }
      }
    }
  }
}

Rational HomogeneousInstance::group_value(std::size_t dimension, std::size_t group,
                                          const Bundle& bundle) const {
  const auto& members = instance_.group_members(dimension, group);
  if (members.empty()) return 0;
  return utilities_.utility(members.front(), bundle);
}

GreedyResult greedy_fractional_ef(const HomogeneousInstance& h) {
  const Instance& inst = h.instance();
  const auto& bundles = h.bundles();
  const std::size_t n = inst.num_agents();
  const std::size_t m = inst.num_resources();

  std::vector<std::vector<Rational>> share(n, std::vector<Rational>(bundles.size(), 0));
  std::vector<Rational> mass(n, 0), load(m, 0);
  std::vector<bool> agent_open(n, true), bundle_open(bundles.size(), true);
  GreedyResult out;
  out.trace.agent_time.assign(n, -1);
  out.trace.bundle_time.assign(bundles.size(), -1);
  Rational now = 0;

  auto close_bundles = [&](GreedyEvent& event) {
    for (std::size_t q = 0; q < bundles.size(); ++q) {
      if (!bundle_open[q]) continue;
      for (std::size_t r = 0; r < m; ++r) {
        if (bundles[q][r] > 0 && load[r] >= inst.resource(r).capacity) {
          bundle_open[q] = false;
          out.trace.bundle_time[q] = now;
          event.bundles.push_back(q);
          break;
        }
      }
    }
  };

  const std::size_t event_cap = n + bundles.size();
  for (;;) {
    GreedyEvent event;
    event.time = now;
    std::vector<std::optional<std::size_t>> choice(n);
    for (std::size_t a = 0; a < n; ++a) {
      if (!agent_open[a]) continue;
      for (std::size_t q = 0; q < bundles.size(); ++q) {
        if (!bundle_open[q]) continue;
        if (!choice[a] ||
            h.utilities().utility(a, bundles[q]) > h.utilities().utility(a, bundles[*choice[a]])) {
          choice[a] = q;
        }
      }
      if (!choice[a]) {
        // Nothing left to consume.
        agent_open[a] = false;
        out.trace.agent_time[a] = now;
        event.agents.push_back(a);
      }
    }
    if (!event.agents.empty()) out.trace.events.push_back(event);

    std::vector<Rational> rate(m, 0);
    bool any = false;
    for (std::size_t a = 0; a < n; ++a) {
      if (!choice[a]) continue;
      any = true;
      for (std::size_t r = 0; r < m; ++r) rate[r] += bundles[*choice[a]][r];
    }
    if (!any) break;

    std::optional<Rational> step;
    for (std::size_t a = 0; a < n; ++a) {
      if (choice[a] && (!step || 1 - mass[a] < *step)) step = 1 - mass[a];
    }
    for (std::size_t r = 0; r < m; ++r) {
      if (rate[r] == 0) continue;
      const Rational until = (inst.resource(r).capacity - load[r]) / rate[r];
      if (until < *step) step = until;
    }

    now += *step;
    for (std::size_t a = 0; a < n; ++a) {
      if (!choice[a]) continue;
      share[a][*choice[a]] += *step;
      mass[a] += *step;
    }
    for (std::size_t r = 0; r < m; ++r) load[r] += rate[r] * *step;

    GreedyEvent saturation;
    saturation.time = now;
    for (std::size_t a = 0; a < n; ++a) {
      if (agent_open[a] && mass[a] >= 1) {
        agent_open[a] = false;
        out.trace.agent_time[a] = now;
        saturation.agents.push_back(a);
      }
    }
    close_bundles(saturation);
    if (saturation.agents.empty() && saturation.bundles.empty()) {
      fail(ErrorKind::InvariantFailure, "greedy step saturated nothing");
    }
    out.trace.events.push_back(std::move(saturation));
    if (out.trace.events.size() > event_cap) {
      fail(ErrorKind::InvariantFailure, "greedy produced more events than agents plus bundles");
    }
  }

  for (auto& t : out.trace.agent_time) {
    if (t < 0) t = now;
  }
  for (auto& t : out.trace.bundle_time) {
    if (t < 0) t = now;
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t q = 0; q < bundles.size(); ++q) {
      if (share[a][q] != 0) out.allocation.set(a, bundles[q], share[a][q]);
    }
  }
  return out;
}

namespace {

// Value to group (l, i) of everything that the agents of `members` hold.
Rational held_value(const HomogeneousInstance& h, const Allocation& x, std::size_t l,
                    std::size_t i, std::size_t owner_dimension, std::size_t owner_group) {
  Rational s = 0;
  for (const auto& [key, value] : x.entries()) {
    auto g = h.instance().group_of(key.agent, owner_dimension);
    if (g && *g == owner_group) s += value * h.group_value(l, i, key.bundle);
  }
  return s;
}

std::vector<EnvyPair> envy_pairs(const HomogeneousInstance& h, const Allocation& x,
                                 const std::vector<long>* alpha) {
  const Instance& inst = h.instance();
  std::vector<EnvyPair> out;
  for (std::size_t l = 0; l < inst.num_dimensions(); ++l) {
    for (std::size_t i = 0; i < inst.num_groups(l); ++i) {
      const auto gi = inst.group_members(l, i).size();
      if (gi == 0) continue;
      const Rational own = held_value(h, x, l, i, l, i);
      const Rational best = group_max_utility(inst, h.utilities(), l, i);
      for (std::size_t j = 0; j < inst.num_groups(l); ++j) {
        const auto gj = inst.group_members(l, j).size();
        if (j == i || gj == 0) continue;
        EnvyPair p;
        p.dimension = l;
        p.group = i;
        p.other = j;
        p.own = own;
        p.scaled = Rational(static_cast<long>(gi), static_cast<long>(gj)) *
                   held_value(h, x, l, i, l, j);
        p.envy = p.scaled - p.own;
        p.limit = alpha ? Rational(alpha->at(l)) * best : Rational(0);
        p.pass = alpha ? (p.envy <= 0 || p.envy < p.limit) : p.envy <= 0;
        out.push_back(std::move(p));
      }
    }
  }
  return out;
}

}  // namespace

std::vector<EnvyPair> check_fractional_ef(const HomogeneousInstance& h, const Allocation& x) {
  return envy_pairs(h, x, nullptr);
}

EnvyReport check_ef_deviation(const HomogeneousInstance& h, const Allocation& y,
                              const std::vector<long>& alpha, long delta) {
  const Instance& inst = h.instance();
  if (alpha.size() != inst.num_dimensions()) {
    fail(ErrorKind::BudgetViolated, "one group tolerance per dimension is required");
  }
  EnvyReport report;
  for (auto& v : allocation_violations(inst, y, false)) report.violations.push_back(std::move(v));
  if (!y.is_integral()) report.violations.push_back("allocation is not integral");
  report.pairs = envy_pairs(h, y, &alpha);
  for (const auto& p : report.pairs) {
    if (p.pass) continue;
    report.violations.push_back("group " + inst.dimension(p.dimension).groups[p.group].name +
                                " envies " + inst.dimension(p.dimension).groups[p.other].name +
                                " by " + to_string(p.envy) + " (limit " + to_string(p.limit) +
                                ")");
  }
  for (std::size_t r = 0; r < inst.num_resources(); ++r) {
    Rational excess = y.resource_load(r) - inst.resource(r).capacity;
    if (excess < 0) excess = 0;
    if (excess > delta) {
      report.violations.push_back("resource " + inst.resource(r).id + " exceeds capacity by " +
                                  to_string(excess));
    }
    report.excess.push_back(std::move(excess));
  }
  return report;
}

Rational envy_condition_slack(const HomogeneousInstance& h, const std::vector<long>& alpha,
                              long delta) {
  const Instance& inst = h.instance();
  if (alpha.size() != inst.num_dimensions()) {
    fail(ErrorKind::BudgetViolated, "one group tolerance per dimension is required");
  }
  if (delta < 0) fail(ErrorKind::BudgetViolated, "negative resource tolerance");
  Rational value = Rational(h.demand(), delta + 1);
  for (std::size_t l = 0; l < alpha.size(); ++l) {
    if (alpha[l] < 0) fail(ErrorKind::BudgetViolated, "negative group tolerance");
    const long k = static_cast<long>(inst.num_groups(l));
    value += Rational(2 * (k - 1), alpha[l] + 1);
  }
  return Rational(1, 2) - value;
}

EnvyRoundResult ef_round(const HomogeneousInstance& h, const Allocation& x,
                         const std::vector<long>& alpha, long delta) {
  const Instance& inst = h.instance();
  const Rational slack = envy_condition_slack(h, alpha, delta);
  if (slack < 0) {
    fail(ErrorKind::BudgetViolated, "envy condition fails (slack " + to_string(slack) + ")");
  }
  if (auto problems = allocation_violations(inst, x); !problems.empty()) {
    fail(ErrorKind::InputNotAllocation, problems.front());
  }
  for (const auto& p : check_fractional_ef(h, x)) {
    if (!p.pass) fail(ErrorKind::InputNotAllocation, "input is not fractionally envy-free");
  }

  RoundingOptions options;
  options.check_budget = false;
  options.use_total_row = false;
  options.verify = false;
  options.group_rows = [&h, &inst](const Allocation& current,
                                    std::span<const AgentBundle> support, std::size_t l,
                                    std::size_t i) {
    std::vector<Constraint> rows;
    // Row "group s does not envy group t", valued by s.
    auto no_envy = [&](std::size_t s, std::size_t t) {
      const Rational ratio(static_cast<long>(inst.group_members(l, s).size()),
                           static_cast<long>(inst.group_members(l, t).size()));
      Constraint row;
      row.relation = Relation::GreaterEqual;
      for (std::size_t e = 0; e < support.size(); ++e) {
        auto g = inst.group_of(support[e].agent, l);
        if (!g || (*g != s && *g != t)) continue;
        const Rational v = h.group_value(l, s, support[e].bundle);
        if (v == 0) continue;
        row.terms.emplace_back(e, *g == s ? v : Rational(-ratio * v));
      }
      Rational fixed_own = 0, fixed_other = 0;
      for (const auto& [key, value] : current.entries()) {
        if (value != 1) continue;
        auto g = inst.group_of(key.agent, l);
        if (!g) continue;
        if (*g == s) fixed_own += h.group_value(l, s, key.bundle);
        if (*g == t) fixed_other += h.group_value(l, s, key.bundle);
      }
      row.rhs = ratio * fixed_other - fixed_own;
      rows.push_back(std::move(row));
    };
    if (inst.group_members(l, i).empty()) return rows;
    for (std::size_t j = 0; j < inst.num_groups(l); ++j) {
      if (j == i || inst.group_members(l, j).empty()) continue;
      no_envy(i, j);
      no_envy(j, i);
    }
    return rows;
  };

  DeviationBudget budget{alpha, delta, std::nullopt, true, h.demand()};
  auto rounded = iterative_round(inst, x, h.utilities(), budget, options);

  for (const auto& rec : rounded.certificate.trace) {
    const BigInt z = rec.support;
    BigInt lhs = floor(Rational(h.demand()) * Rational(z) / (delta + 1));
    for (std::size_t l = 0; l < alpha.size(); ++l) {
      const long k = static_cast<long>(inst.num_groups(l));
      lhs += 2 * (k - 1) * floor(Rational(z) / (alpha[l] + 1));
    }
    if (lhs > ceil(Rational(z) / 2)) {
      fail(ErrorKind::InvariantFailure, "row count bound fails at support " + to_string(Rational(z)));
    }
  }

  EnvyRoundResult result;
  result.rounded = std::move(rounded.rounded);
  result.trace = std::move(rounded.certificate.trace);
  result.report = check_ef_deviation(h, result.rounded, alpha, delta);
  return result;
}

}  // namespace fairround
