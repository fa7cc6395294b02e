#include "support/generators.hpp"

#include "fairround/exact_lp.hpp"

#include <algorithm>
#include <numeric>

namespace fairround::testing {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Allocation random_fractional_allocation(const Instance& instance, Rng& rng, int count, bool& ok) {
  std::vector<AgentBundle> pairs;
  for (std::size_t a = 0; a < instance.num_agents(); ++a) {
    for (auto& q : enumerate_bundles(instance, a)) pairs.push_back({a, std::move(q)});
  }
  LinearProgram lp;
  for (std::size_t e = 0; e < pairs.size(); ++e) lp.add_variable();
  for (std::size_t a = 0; a < instance.num_agents(); ++a) {
    std::vector<std::pair<std::size_t, Rational>> terms;
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      if (pairs[e].agent == a) terms.emplace_back(e, 1);
    }
    lp.add_constraint(std::move(terms),
                      instance.agent(a).binding ? Relation::Equal : Relation::LessEqual, 1);
  }
  for (std::size_t r = 0; r < instance.num_resources(); ++r) {
    std::vector<std::pair<std::size_t, Rational>> terms;
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      if (pairs[e].bundle[r] > 0) terms.emplace_back(e, pairs[e].bundle[r]);
    }
    lp.add_constraint(std::move(terms), Relation::LessEqual, instance.resource(r).capacity);
  }

  std::vector<Rational> mix(pairs.size(), Rational(0));
  Rational weight_sum = 0;
  ok = true;
  for (int v = 0; v < count; ++v) {
    for (auto& c : lp.cost) c = uniform(rng, -10, 4);
    const auto sol = solve_vertex(lp);
    if (sol.status != LpStatus::Optimal) {
      ok = false;
      return {};
    }
    const Rational w = uniform(rng, 1, 5);
    weight_sum += w;
    for (std::size_t e = 0; e < pairs.size(); ++e) mix[e] += w * sol.values[e];
  }
  Allocation x;
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    x.set(pairs[e].agent, pairs[e].bundle, mix[e] / weight_sum);
  }
  return x;
}

McraCase random_mcra(Rng& rng, const McraParams& params) {
  for (;;) {
    const int n = uniform(rng, 1, params.max_agents);
    const int m = uniform(rng, 1, params.max_resources);
    const int d = uniform(rng, 0, params.max_dimensions);

    std::vector<AgentSpec> agents;
    for (int a = 0; a < n; ++a) {
      agents.push_back({"a" + std::to_string(a + 1), uniform(rng, 1, params.max_demand),
                        params.all_binding || uniform(rng, 0, 1) == 1});
    }
    std::vector<ResourceSpec> resources;
    for (int r = 0; r < m; ++r) resources.push_back({"r" + std::to_string(r + 1), uniform(rng, 1, 4)});

    std::vector<Dimension> dims;
    for (int l = 0; l < d; ++l) {
      Dimension dim{"d" + std::to_string(l + 1), {}};
      const int k = uniform(rng, 1, params.max_groups);
      for (int i = 0; i < k; ++i) dim.groups.push_back({"g" + std::to_string(i + 1), {}});
      for (int a = 0; a < n; ++a) {
        if (uniform(rng, 0, 9) == 0) continue;  // ungrouped in this dimension
        dim.groups[uniform(rng, 0, k - 1)].members.push_back(a);
      }
      dims.push_back(std::move(dim));
    }

    std::optional<std::vector<std::pair<std::size_t, std::size_t>>> acceptable;
    if (uniform(rng, 0, 1) == 1) {
      acceptable.emplace();
      for (int a = 0; a < n; ++a) {
        for (int r = 0; r < m; ++r) {
          if (uniform(rng, 0, 4) != 0) acceptable->emplace_back(a, r);
        }
      }
    }
    Instance instance(std::move(agents), std::move(resources), std::move(dims),
                      std::move(acceptable));

    std::vector<std::vector<Rational>> table(n, std::vector<Rational>(m));
    for (auto& row : table) {
      for (auto& u : row) u = uniform(rng, 0, params.max_utility);
    }
    bool ok = false;
    Allocation x = random_fractional_allocation(instance, rng, uniform(rng, 1, 3), ok);
    if (!ok) continue;
    return McraCase{std::move(instance), UtilityModel::additive(std::move(table)), std::move(x)};
  }
}

DeviationBudget random_minimal_budget(const Instance& instance, const Allocation& x, Rng& rng) {
  DeviationBudget budget;
  budget.max_demand = std::max(1, instance.max_demand());
  budget.agent_rows = agent_rows_forced(instance, x) || uniform(rng, 0, 1) == 1;
  budget.group.assign(instance.num_dimensions(), 64);
  budget.resource = 256;

  auto valid = [&](const DeviationBudget& b) {
    const Rational slack = check_condition(b);
    return b.agent_rows ? slack >= 0 : slack > 0;
  };
  // Lower coordinates in random order until none can move; the result is
  // minimal coordinate-wise.
  const std::size_t coords = budget.group.size() + 1;
  std::vector<std::size_t> order(coords);
  std::iota(order.begin(), order.end(), 0);
  bool moved = true;
  while (moved) {
    moved = false;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t c : order) {
      long& value = c < budget.group.size() ? budget.group[c] : *budget.resource;
      // Random partial step so different minimal points are reached.
      long lo = 0, hi = value;
      while (lo < hi) {
        const long mid = (lo + hi) / 2;
        const long saved = value;
        value = mid;
        const bool fine = valid(budget);
        value = saved;
        if (fine) hi = mid; else lo = mid + 1;
      }
      if (lo < value) {
        const long target = uniform(rng, 0, 1) == 1 ? lo : value - (value - lo + 1) / 2;
        value = std::max(lo, target);
        moved = true;
      }
    }
  }
  budget.total = min_total_tolerance(budget);
  return budget;
}

HomogeneousInstance random_homogeneous(Rng& rng, const HomogeneousParams& params) {
  const int n = uniform(rng, 1, params.max_agents);
  const int m = uniform(rng, 1, params.max_resources);
  const int w = uniform(rng, 1, params.max_demand);
  const int types = uniform(rng, 1, params.max_types);
  const int d = uniform(rng, 1, params.max_dimensions);

  std::vector<AgentSpec> agents;
  std::vector<int> type(n);
  for (int a = 0; a < n; ++a) {
    agents.push_back({"a" + std::to_string(a + 1), w, true});
    type[a] = uniform(rng, 0, types - 1);
  }
  std::vector<long> caps(m);
  long total = 0;
  for (auto& c : caps) total += c = uniform(rng, w, w + 3);
  while (total < static_cast<long>(w) * n) {
    ++caps[uniform(rng, 0, m - 1)];
    ++total;
  }
  std::vector<ResourceSpec> resources;
  for (int r = 0; r < m; ++r) resources.push_back({"r" + std::to_string(r + 1), caps[r]});

  // A group is (type, label); labels split a type into at most two groups.
  std::vector<Dimension> dims;
  for (int l = 0; l < d; ++l) {
    Dimension dim{"d" + std::to_string(l + 1), {}};
    std::vector<std::vector<std::size_t>> slots(types * 2);
    for (int a = 0; a < n; ++a) {
      if (uniform(rng, 0, 9) == 0) continue;
      slots[type[a] * 2 + uniform(rng, 0, 1)].push_back(a);
    }
    for (auto& s : slots) {
      if (s.empty()) continue;
      dim.groups.push_back({"g" + std::to_string(dim.groups.size() + 1), std::move(s)});
    }
    dims.push_back(std::move(dim));
  }

  std::vector<std::vector<Rational>> per_type(types, std::vector<Rational>(m));
  for (auto& row : per_type) {
    for (auto& u : row) u = uniform(rng, 0, params.max_utility);
  }
  std::vector<std::vector<Rational>> table;
  for (int a = 0; a < n; ++a) table.push_back(per_type[type[a]]);
  Instance instance(std::move(agents), std::move(resources), std::move(dims));
  return HomogeneousInstance(std::move(instance), UtilityModel::additive(std::move(table)));
}

std::vector<long> minimal_envy_alpha(const HomogeneousInstance& h, long delta) {
  std::vector<long> alpha(h.instance().num_dimensions(), 0);
  if (Rational(h.demand(), delta + 1) > Rational(1, 2)) return alpha;  // no alpha can help
  while (envy_condition_slack(h, alpha, delta) < 0) {
    for (auto& a : alpha) ++a;
  }
  return alpha;
}

CouplesCase random_couples(Rng& rng, int max_dimensions, std::size_t max_variables) {
  for (;;) {
    const int n = uniform(rng, 1, 4);
    const int m = uniform(rng, 1, 3);
    std::vector<AgentSpec> agents;
    for (int a = 0; a < n; ++a) agents.push_back({"a" + std::to_string(a + 1), uniform(rng, 1, 2), false});
    std::vector<ResourceSpec> resources;
    for (int r = 0; r < m; ++r) resources.push_back({"r" + std::to_string(r + 1), uniform(rng, 1, 2)});
    std::vector<std::pair<std::size_t, std::size_t>> accept;
    for (int a = 0; a < n; ++a) {
      for (int r = 0; r < m; ++r) {
        if (uniform(rng, 0, 3) != 0) accept.emplace_back(a, r);
      }
    }
    std::vector<Dimension> dims;
    const int d = uniform(rng, 0, max_dimensions);
    for (int l = 0; l < d; ++l) {
      Dimension dim{"d" + std::to_string(l + 1), {{"g1", {}}, {"g2", {}}}};
      for (int a = 0; a < n; ++a) dim.groups[uniform(rng, 0, 1)].members.push_back(a);
      dims.push_back(std::move(dim));
    }
    Instance instance(std::move(agents), std::move(resources), std::move(dims), std::move(accept));

    std::vector<std::vector<Bundle>> agent_prefs(n);
    std::size_t variables = 0;
    for (int a = 0; a < n; ++a) {
      agent_prefs[a] = enumerate_bundles(instance, a);
      std::shuffle(agent_prefs[a].begin(), agent_prefs[a].end(), rng);
      variables += agent_prefs[a].size();
    }
    if (variables > max_variables) continue;
    std::vector<std::vector<std::size_t>> resource_prefs(m);
    for (int r = 0; r < m; ++r) {
      for (int a = 0; a < n; ++a) {
        bool uses = false;
        for (const auto& q : agent_prefs[a]) uses = uses || q[r] > 0;
        if (uses) resource_prefs[r].push_back(a);
      }
      std::shuffle(resource_prefs[r].begin(), resource_prefs[r].end(), rng);
    }
    std::vector<std::vector<Rational>> table(n, std::vector<Rational>(m));
    for (auto& row : table) {
      for (auto& u : row) u = uniform(rng, 0, 5);
    }
    return CouplesCase{CouplesInstance(std::move(instance), std::move(agent_prefs),
                                       std::move(resource_prefs)),
                       UtilityModel::additive(std::move(table))};
  }
}

}  // namespace fairround::testing

namespace fairround::testing {

MAInstance random_ma(Rng& rng, const MaParams& params) {
  MAInstance inst;
  std::vector<std::size_t> k(params.dimensions);
  for (int l = 0; l < params.dimensions; ++l) {
    k[l] = l == params.binding && params.binding_groups > 0
               ? params.binding_groups
               : uniform(rng, params.min_groups, params.max_groups);
    MADimension dim;
    dim.name = "d" + std::to_string(l);
    for (std::size_t i = 0; i < k[l]; ++i) dim.groups.push_back(dim.name + "g" + std::to_string(i));
    inst.dimensions.push_back(std::move(dim));
  }
  std::bernoulli_distribution keep(params.density);
  std::vector<std::size_t> tuple(params.dimensions, 0);
  while (true) {
    if (keep(rng)) inst.votes.push_back({tuple, uniform(rng, 1, params.max_votes)});
    std::size_t l = 0;
    while (l < tuple.size() && ++tuple[l] == k[l]) tuple[l++] = 0;
    if (l == tuple.size()) break;
  }
  if (inst.votes.empty()) inst.votes.push_back({tuple, uniform(rng, 1, params.max_votes)});

  inst.house = uniform(rng, 1, params.max_house);
  std::vector<long> hidden(inst.votes.size(), 0);
  for (long s = 0; s < inst.house; ++s) {
    ++hidden[uniform(rng, 0, static_cast<int>(inst.votes.size()) - 1)];
  }
  for (int l = 0; l < params.dimensions; ++l) {
    auto& dim = inst.dimensions[l];
    std::vector<long> sums(k[l], 0);
    for (std::size_t e = 0; e < inst.votes.size(); ++e) sums[inst.votes[e].tuple[l]] += hidden[e];
    for (std::size_t i = 0; i < k[l]; ++i) {
      if (l == params.binding) {
        dim.lower.push_back(sums[i]);
        dim.upper.push_back(sums[i]);
      } else {
        dim.lower.push_back(std::max(0L, sums[i] - uniform(rng, 0, params.slack)));
        dim.upper.push_back(sums[i] + uniform(rng, 0, params.slack));
      }
    }
  }
  return inst;
}

}  // namespace fairround::testing
