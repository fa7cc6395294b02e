#include "fairround/oracle.hpp"

#include "fairround/errors.hpp"

#include <algorithm>
#include <set>

namespace fairround {

void for_each_integral(const Instance& instance,
                       const std::function<bool(const Allocation&)>& visit) {
  const std::size_t n = instance.num_agents();
  std::vector<std::vector<Bundle>> options(n);
  double combos = 1;
  for (std::size_t a = 0; a < n; ++a) {
    options[a] = enumerate_bundles(instance, a);
    combos *= static_cast<double>(options[a].size() + (instance.agent(a).binding ? 0 : 1));
    if (combos > kIntegralEnumerationLimit) {
      fail(ErrorKind::ScaleExceeded, "integral enumeration exceeds 1e6 mappings");
    }
  }
  // choice[a] == options[a].size() means "no bundle".
  std::vector<std::size_t> choice(n, 0);
  Allocation current;
  bool stop = false;
  auto recurse = [&](auto&& self, std::size_t a) -> void {
    if (stop) return;
    if (a == n) {
      if (!visit(current)) stop = true;
      return;
    }
    const std::size_t count = options[a].size();
    if (!instance.agent(a).binding) {
      self(self, a + 1);
    }
    for (std::size_t b = 0; b < count && !stop; ++b) {
      current.set(a, options[a][b], 1);
      self(self, a + 1);
      current.set(a, options[a][b], 0);
    }
  };
  recurse(recurse, 0);
}

std::vector<Allocation> enumerate_integral(const Instance& instance) {
  std::vector<Allocation> all;
  for_each_integral(instance, [&](const Allocation& y) {
    all.push_back(y);
    return true;
  });
  return all;
}

namespace {

struct DenseRow {
  std::vector<Rational> coef;
  Relation relation;
  Rational rhs;
};

bool row_satisfied(const DenseRow& row, const Rational& value) {
  switch (row.relation) {
    case Relation::LessEqual: return value <= row.rhs;
    case Relation::Equal: return value == row.rhs;
    case Relation::GreaterEqual: return value >= row.rhs;
  }
  return false;
}

enum class Status { Lower, Upper, Interior, Open };

class VertexSearch {
 public:
  explicit VertexSearch(const LinearProgram& lp) : lp_(lp), n_(lp.num_variables()) {
    for (const auto& con : lp.constraints) {
      DenseRow row{std::vector<Rational>(n_, Rational(0)), con.relation, con.rhs};
      for (const auto& [j, a] : con.terms) row.coef.at(j) += a;
      rows_.push_back(std::move(row));
    }
    status_.assign(n_, Status::Open);
  }

  std::vector<std::vector<Rational>> run() {
    for (std::size_t j = 0; j < n_; ++j) {
      if (lp_.upper[j] && *lp_.upper[j] < lp_.lower[j]) return {};
    }
    dfs(0, 0);
    return {found_.begin(), found_.end()};
  }

 private:
  // Interval reachable by a row given the current partial assignment.
  bool rows_possible() const {
    for (const auto& row : rows_) {
      Rational lo = 0, hi = 0;
      bool lo_inf = false, hi_inf = false;
      for (std::size_t j = 0; j < n_; ++j) {
        const Rational& a = row.coef[j];
        if (a == 0) continue;
        if (status_[j] == Status::Lower || status_[j] == Status::Upper) {
          const Rational v = status_[j] == Status::Lower ? lp_.lower[j] : *lp_.upper[j];
          lo += a * v;
          hi += a * v;
          continue;
        }
        const Rational& l = lp_.lower[j];
        if (a > 0) {
          lo += a * l;
          if (lp_.upper[j]) hi += a * *lp_.upper[j]; else hi_inf = true;
        } else {
          hi += a * l;
          if (lp_.upper[j]) lo += a * *lp_.upper[j]; else lo_inf = true;
        }
      }
      switch (row.relation) {
        case Relation::LessEqual:
          if (!lo_inf && lo > row.rhs) return false;
          break;
        case Relation::GreaterEqual:
          if (!hi_inf && hi < row.rhs) return false;
          break;
        case Relation::Equal:
          if ((!lo_inf && lo > row.rhs) || (!hi_inf && hi < row.rhs)) return false;
          break;
      }
    }
    return true;
  }

  void dfs(std::size_t j, std::size_t interior) {
    if (!rows_possible()) return;
    if (j == n_) {
      leaf(interior);
      return;
    }
    status_[j] = Status::Lower;
    dfs(j + 1, interior);
    if (lp_.upper[j] && *lp_.upper[j] > lp_.lower[j]) {
      status_[j] = Status::Upper;
      dfs(j + 1, interior);
    }
    if ((!lp_.upper[j] || *lp_.upper[j] > lp_.lower[j]) && interior < rows_.size()) {
      status_[j] = Status::Interior;
      dfs(j + 1, interior + 1);
    }
    status_[j] = Status::Open;
  }

  void leaf(std::size_t f) {
    std::vector<std::size_t> inner;
    std::vector<Rational> point(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      if (status_[j] == Status::Interior) {
        inner.push_back(j);
      } else {
        point[j] = status_[j] == Status::Lower ? lp_.lower[j] : *lp_.upper[j];
      }
    }
    std::vector<Rational> residual(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      residual[i] = rows_[i].rhs;
      for (std::size_t j = 0; j < n_; ++j) {
        if (status_[j] != Status::Interior && rows_[i].coef[j] != 0) {
          residual[i] -= rows_[i].coef[j] * point[j];
        }
      }
    }
    if (f == 0) {
      accept(point);
      return;
    }
    // Try every f-subset of rows as the tight set.
    std::vector<std::size_t> pick(f);
    for (std::size_t k = 0; k < f; ++k) pick[k] = k;
    const std::size_t m = rows_.size();
    for (;;) {
      std::vector<std::vector<Rational>> mat(f, std::vector<Rational>(f));
      std::vector<Rational> rhs(f);
      for (std::size_t r = 0; r < f; ++r) {
        for (std::size_t c = 0; c < f; ++c) mat[r][c] = rows_[pick[r]].coef[inner[c]];
        rhs[r] = residual[pick[r]];
      }
      if (auto sol = solve_square(std::move(mat), std::move(rhs))) {
        bool strict = true;
        for (std::size_t c = 0; c < f && strict; ++c) {
          const std::size_t j = inner[c];
          const Rational& v = (*sol)[c];
          if (v <= lp_.lower[j] || (lp_.upper[j] && v >= *lp_.upper[j])) strict = false;
          point[j] = v;
        }
        if (strict) accept(point);
      }
      // Next combination.
      std::size_t k = f;
      while (k > 0 && pick[k - 1] == m - f + k - 1) --k;
      if (k == 0) break;
      ++pick[k - 1];
      for (std::size_t t = k; t < f; ++t) pick[t] = pick[t - 1] + 1;
    }
  }

  void accept(const std::vector<Rational>& point) {
    for (const auto& row : rows_) {
      Rational v = 0;
      for (std::size_t j = 0; j < n_; ++j) {
        if (row.coef[j] != 0) v += row.coef[j] * point[j];
      }
      if (!row_satisfied(row, v)) return;
    }
    found_.insert(point);
  }

  const LinearProgram& lp_;
  std::size_t n_;
  std::vector<DenseRow> rows_;
  std::vector<Status> status_;
  std::set<std::vector<Rational>> found_;
};

Rational abs_value(const Rational& v) { return v < 0 ? Rational(-v) : v; }

}  // namespace

std::vector<std::vector<Rational>> vertex_enumerate(const LinearProgram& lp) {
  if (lp.num_variables() > kVertexVariableLimit) {
    fail(ErrorKind::ScaleExceeded, "vertex enumeration is limited to 20 variables");
  }
  return VertexSearch(lp).run();
}

std::vector<DeviationTriple> best_deviation(const Instance& instance, const Allocation& x,
                                            const UtilityModel& utilities,
                                            const std::function<bool(const Allocation&)>& accept) {
  const auto fractional = x.fractional_support();
  if (fractional.size() > kRoundingEntryLimit) {
    fail(ErrorKind::ScaleExceeded, "rounding enumeration is limited to 20 fractional entries");
  }
  Allocation base;
  for (const auto& [key, value] : x.entries()) {
    if (value == 1) base.set(key.agent, key.bundle, 1);
  }
  std::vector<std::size_t> agents;
  std::vector<std::vector<std::size_t>> entries_of;
  for (std::size_t e = 0; e < fractional.size(); ++e) {
    if (agents.empty() || agents.back() != fractional[e].agent) {
      agents.push_back(fractional[e].agent);
      entries_of.emplace_back();
    }
    entries_of.back().push_back(e);
  }

  std::vector<std::vector<Rational>> best_single(instance.num_dimensions());
  std::vector<std::vector<Rational>> before(instance.num_dimensions());
  for (std::size_t l = 0; l < instance.num_dimensions(); ++l) {
    for (std::size_t i = 0; i < instance.num_groups(l); ++i) {
      best_single[l].push_back(group_max_utility(instance, utilities, l, i));
      before[l].push_back(group_utility(instance, utilities, x, l, i));
    }
  }
  std::vector<Rational> loads(instance.num_resources());
  for (std::size_t r = 0; r < instance.num_resources(); ++r) loads[r] = x.resource_load(r);
  const Rational weighted = x.weighted_total(instance);

  std::vector<DeviationTriple> all;
  Allocation current = base;
  auto evaluate = [&]() {
    if (!allocation_violations(instance, current, false).empty()) return;
    if (accept && !accept(current)) return;
    DeviationTriple t{0, 0, 0};
    for (std::size_t l = 0; l < instance.num_dimensions(); ++l) {
      for (std::size_t i = 0; i < instance.num_groups(l); ++i) {
        if (best_single[l][i] == 0) continue;
        const Rational dev =
            abs_value(group_utility(instance, utilities, current, l, i) - before[l][i]) /
            best_single[l][i];
        t.group = std::max(t.group, dev);
      }
    }
    for (std::size_t r = 0; r < instance.num_resources(); ++r) {
      t.resource = std::max(t.resource, abs_value(current.resource_load(r) - loads[r]));
    }
    t.total = abs_value(current.weighted_total(instance) - weighted);
    all.push_back(std::move(t));
  };
  auto recurse = [&](auto&& self, std::size_t k) -> void {
    if (k == agents.size()) {
      evaluate();
      return;
    }
    self(self, k + 1);  // every fractional entry of this agent rounded down
    for (std::size_t e : entries_of[k]) {
      current.set(fractional[e].agent, fractional[e].bundle, 1);
      self(self, k + 1);
      current.set(fractional[e].agent, fractional[e].bundle, 0);
    }
  };
  recurse(recurse, 0);

  std::vector<DeviationTriple> frontier;
  auto dominates = [](const DeviationTriple& a, const DeviationTriple& b) {
    return a.group <= b.group && a.resource <= b.resource && a.total <= b.total &&
           (a.group < b.group || a.resource < b.resource || a.total < b.total);
  };
  for (const auto& t : all) {
    bool dominated = false;
    for (const auto& other : all) {
      if (dominates(other, t)) {
        dominated = true;
        break;
      }
    }
    if (!dominated && std::find(frontier.begin(), frontier.end(), t) == frontier.end()) {
      frontier.push_back(t);
    }
  }
  std::sort(frontier.begin(), frontier.end(), [](const auto& a, const auto& b) {
    if (a.group != b.group) return a.group < b.group;
    if (a.resource != b.resource) return a.resource < b.resource;
    return a.total < b.total;
  });
  return frontier;
}

}  // namespace fairround
