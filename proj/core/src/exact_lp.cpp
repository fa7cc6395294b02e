#include "fairround/exact_lp.hpp"

#include "fairround/errors.hpp"

#include <algorithm>

namespace fairround {

std::size_t LinearProgram::add_variable(Rational lo, std::optional<Rational> hi,
                                        Rational objective) {
  lower.push_back(std::move(lo));
  upper.push_back(std::move(hi));
  cost.push_back(std::move(objective));
  return lower.size() - 1;
}

std::size_t LinearProgram::add_constraint(std::vector<std::pair<std::size_t, Rational>> terms,
                                          Relation rel, Rational rhs) {
  constraints.push_back(Constraint{std::move(terms), rel, std::move(rhs)});
  return constraints.size() - 1;
}

Rational LinearProgram::row_value(std::size_t row, const std::vector<Rational>& point) const {
  Rational total = 0;
  for (const auto& [j, a] : constraints.at(row).terms) total += a * point.at(j);
  return total;
}

Rational LinearProgram::objective_value(const std::vector<Rational>& point) const {
  Rational total = 0;
  for (std::size_t j = 0; j < cost.size() && j < point.size(); ++j) {
    if (cost[j] != 0) total += cost[j] * point[j];
  }
  return total;
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

// Dense tableau over shifted variables (every lower bound moved to 0).
class Simplex {
 public:
  explicit Simplex(const LinearProgram& lp) : lp_(lp) {
    n_ = lp.num_variables();
    if (lp.upper.size() != n_ || (!lp.cost.empty() && lp.cost.size() != n_)) {
      fail(ErrorKind::InvalidInstance, "linear program has inconsistent variable arrays");
    }
    const std::size_t m = lp.constraints.size();

    // Column layout: structural, then one slack per inequality, then artificials.
    std::vector<int> slack_of(m, -1);
    std::size_t cols = n_;
    for (std::size_t i = 0; i < m; ++i) {
      if (lp.constraints[i].relation != Relation::Equal) slack_of[i] = static_cast<int>(cols++);
    }
    const std::size_t first_artificial = cols;

    std::vector<std::vector<Rational>> rows(m);
    std::vector<Rational> rhs(m);
    std::vector<bool> needs_artificial(m, false);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& con = lp.constraints[i];
      const Rational sign = con.relation == Relation::GreaterEqual ? -1 : 1;
      rows[i].assign(cols, Rational(0));
      Rational b = con.rhs * sign;
      for (const auto& [j, a] : con.terms) {
        if (j >= n_) fail(ErrorKind::InvalidInstance, "constraint references unknown variable");
        rows[i][j] += a * sign;
        b -= a * sign * lp.lower[j];
      }
      if (slack_of[i] >= 0) rows[i][slack_of[i]] = 1;
      if (b < 0) {
        for (auto& v : rows[i]) v = -v;
        b = -b;
        needs_artificial[i] = true;
      } else if (slack_of[i] < 0) {
        needs_artificial[i] = true;
      }
      rhs[i] = b;
    }
    std::size_t artificials = 0;
    for (std::size_t i = 0; i < m; ++i) artificials += needs_artificial[i] ? 1 : 0;
    total_ = first_artificial + artificials;
    first_artificial_ = first_artificial;

    upper_.assign(total_, std::nullopt);
    for (std::size_t j = 0; j < n_; ++j) {
      if (lp.upper[j]) {
        upper_[j] = *lp.upper[j] - lp.lower[j];
        if (*upper_[j] < 0) infeasible_bounds_ = true;
      }
    }
    at_upper_.assign(total_, false);
    banned_.assign(total_, false);
    basis_.assign(m, 0);
    tab_.assign(m, std::vector<Rational>(total_, Rational(0)));
    beta_ = rhs;
    std::size_t next_art = first_artificial;
    for (std::size_t i = 0; i < m; ++i) {
      std::copy(rows[i].begin(), rows[i].end(), tab_[i].begin());
      if (needs_artificial[i]) {
        tab_[i][next_art] = 1;
        basis_[i] = next_art++;
      } else {
        basis_[i] = static_cast<std::size_t>(slack_of[i]);
      }
    }
  }

  VertexSolution run(bool use_objective) {
    VertexSolution out;
    if (infeasible_bounds_) {
      out.status = LpStatus::Infeasible;
      return out;
    }
    // Phase 1.
    if (total_ > first_artificial_) {
      std::vector<Rational> c(total_, Rational(0));
      for (std::size_t j = first_artificial_; j < total_; ++j) c[j] = 1;
      set_costs(c);
      if (!iterate()) fail(ErrorKind::InvariantFailure, "phase 1 reported unbounded");
      Rational infeas = 0;
      for (std::size_t i = 0; i < basis_.size(); ++i) {
        if (basis_[i] >= first_artificial_) infeas += beta_[i];
      }
      if (infeas > 0) {
        out.status = LpStatus::Infeasible;
        out.pivots = pivots_;
        return out;
      }
      drive_out_artificials();
    }
    for (std::size_t j = first_artificial_; j < total_; ++j) banned_[j] = true;

    // Phase 2.
    std::vector<Rational> c(total_, Rational(0));
    if (use_objective && !lp_.cost.empty()) {
      for (std::size_t j = 0; j < n_; ++j) c[j] = lp_.cost[j];
    }
    set_costs(c);
    if (!iterate()) {
      out.status = LpStatus::Unbounded;
      out.pivots = pivots_;
      return out;
    }

    std::vector<Rational> shifted(total_, Rational(0));
    for (std::size_t j = 0; j < total_; ++j) {
      if (at_upper_[j]) shifted[j] = *upper_[j];
    }
    for (std::size_t i = 0; i < basis_.size(); ++i) shifted[basis_[i]] = beta_[i];
    out.values.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) out.values[j] = shifted[j] + lp_.lower[j];
    out.status = LpStatus::Optimal;
    out.objective = lp_.objective_value(out.values);
    out.pivots = pivots_;
    for (std::size_t i = 0; i < lp_.constraints.size(); ++i) {
      if (lp_.row_value(i, out.values) == lp_.constraints[i].rhs) out.tight_constraints.push_back(i);
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (out.values[j] == lp_.lower[j] || (lp_.upper[j] && out.values[j] == *lp_.upper[j])) {
        out.tight_bounds.push_back(j);
      }
    }
    return out;
  }

 private:
  Rational nonbasic_value(std::size_t j) const { return at_upper_[j] ? *upper_[j] : Rational(0); }

  void set_costs(const std::vector<Rational>& c) {
    reduced_ = c;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      const Rational& cb = c[basis_[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j < total_; ++j) {
        if (tab_[i][j] != 0) reduced_[j] -= cb * tab_[i][j];
      }
    }
  }

  void pivot(std::size_t r, std::size_t j) {
    ++pivots_;
    const Rational p = tab_[r][j];
    std::vector<std::size_t> nz;
    for (std::size_t k = 0; k < total_; ++k) {
      if (tab_[r][k] != 0) {
        tab_[r][k] /= p;
        nz.push_back(k);
      }
    }
    for (std::size_t i = 0; i < tab_.size(); ++i) {
      if (i == r) continue;
      const Rational f = tab_[i][j];
      if (f == 0) continue;
      for (std::size_t k : nz) tab_[i][k] -= f * tab_[r][k];
    }
    const Rational f = reduced_[j];
    if (f != 0) {
      for (std::size_t k : nz) reduced_[k] -= f * tab_[r][k];
    }
    basis_[r] = j;
  }

  std::vector<bool> basic_flags() const {
    std::vector<bool> basic(total_, false);
    for (std::size_t b : basis_) basic[b] = true;
    return basic;
  }

  // Returns false on unboundedness.
  bool iterate() {
    for (;;) {
      const auto basic = basic_flags();
      std::optional<std::size_t> entering;
      for (std::size_t j = 0; j < total_; ++j) {
        if (basic[j] || banned_[j]) continue;
        if (!at_upper_[j] && reduced_[j] < 0 && (!upper_[j] || *upper_[j] > 0)) {
          entering = j;
          break;
        }
        if (at_upper_[j] && reduced_[j] > 0) {
          entering = j;
          break;
        }
      }
      if (!entering) return true;
      const std::size_t j = *entering;
      const int dir = at_upper_[j] ? -1 : 1;

      // Ratio test; ties go to the smallest variable index.
      std::optional<Rational> best;
      std::size_t best_var = 0;
      std::optional<std::size_t> best_row;
      bool leave_at_upper = false;
      if (upper_[j]) {
        best = *upper_[j];
        best_var = j;
      }
      for (std::size_t i = 0; i < basis_.size(); ++i) {
        const Rational& a = tab_[i][j];
        if (a == 0) continue;
        // Basic value changes by -dir * a * theta.
        const bool decreasing = (dir > 0) == (a > 0);
        Rational limit;
        bool to_upper = false;
        if (decreasing) {
          limit = beta_[i] / (a > 0 ? a : Rational(-a));
        } else {
          const auto& ub = upper_[basis_[i]];
          if (!ub) continue;
          limit = (*ub - beta_[i]) / (a > 0 ? a : Rational(-a));
          to_upper = true;
        }
        if (!best || limit < *best || (limit == *best && basis_[i] < best_var)) {
          best = limit;
          best_var = basis_[i];
          best_row = i;
          leave_at_upper = to_upper;
        }
      }
      if (!best) return false;
      const Rational theta = *best;
      if (theta != 0) {
        for (std::size_t i = 0; i < basis_.size(); ++i) {
          if (tab_[i][j] != 0) beta_[i] -= tab_[i][j] * theta * dir;
        }
      }
      if (!best_row) {
        at_upper_[j] = !at_upper_[j];
        ++pivots_;
        continue;
      }
      const std::size_t r = *best_row;
      const std::size_t leaving = basis_[r];
      const Rational entering_value = nonbasic_value(j) + theta * dir;
      at_upper_[j] = false;
      pivot(r, j);
      beta_[r] = entering_value;
      at_upper_[leaving] = leave_at_upper;
    }
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < basis_.size();) {
      if (basis_[r] < first_artificial_) {
        ++r;
        continue;
      }
      const auto basic = basic_flags();
      std::optional<std::size_t> col;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        if (!basic[j] && tab_[r][j] != 0) {
          col = j;
          break;
        }
      }
      if (col) {
        const std::size_t leaving = basis_[r];
        const Rational value = nonbasic_value(*col);
        pivot(r, *col);
        beta_[r] = value;
        at_upper_[*col] = false;
        at_upper_[leaving] = false;
        banned_[leaving] = true;
        ++r;
      } else {
        // Row is a combination of the others.
        banned_[basis_[r]] = true;
        tab_.erase(tab_.begin() + static_cast<std::ptrdiff_t>(r));
        beta_.erase(beta_.begin() + static_cast<std::ptrdiff_t>(r));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
      }
    }
  }

  const LinearProgram& lp_;
  std::size_t n_ = 0;
  std::size_t total_ = 0;
  std::size_t first_artificial_ = 0;
  bool infeasible_bounds_ = false;
  std::vector<std::optional<Rational>> upper_;
  std::vector<bool> at_upper_;
  std::vector<bool> banned_;
  std::vector<std::size_t> basis_;
  std::vector<std::vector<Rational>> tab_;
  std::vector<Rational> beta_;
  std::vector<Rational> reduced_;
  std::size_t pivots_ = 0;
};

}  // namespace

VertexSolution solve_vertex(const LinearProgram& lp) { return Simplex(lp).run(true); }

VertexSolution feasible_vertex(const LinearProgram& lp) { return Simplex(lp).run(false); }

bool is_feasible_point(const LinearProgram& lp, const std::vector<Rational>& point) {
  if (point.size() != lp.num_variables()) return false;
  for (std::size_t j = 0; j < point.size(); ++j) {
    if (point[j] < lp.lower[j]) return false;
    if (lp.upper[j] && point[j] > *lp.upper[j]) return false;
  }
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    const Rational v = lp.row_value(i, point);
    const Rational& b = lp.constraints[i].rhs;
    switch (lp.constraints[i].relation) {
      case Relation::LessEqual:
        if (v > b) return false;
        break;
      case Relation::Equal:
        if (v != b) return false;
        break;
      case Relation::GreaterEqual:
        if (v < b) return false;
        break;
    }
  }
  return true;
}

std::size_t matrix_rank(std::vector<std::vector<Rational>> rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t p = rank;
    while (p < rows.size() && rows[p][c] == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[rank]);
    for (std::size_t i = rank + 1; i < rows.size(); ++i) {
      if (rows[i][c] == 0) continue;
      const Rational f = rows[i][c] / rows[rank][c];
      for (std::size_t k = c; k < cols; ++k) {
        if (rows[rank][k] != 0) rows[i][k] -= f * rows[rank][k];
      }
    }
    ++rank;
  }
  return rank;
}

std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> matrix,
                                                  std::vector<Rational> rhs) {
  const std::size_t n = matrix.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && matrix[p][c] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(matrix[p], matrix[c]);
    std::swap(rhs[p], rhs[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || matrix[i][c] == 0) continue;
      const Rational f = matrix[i][c] / matrix[c][c];
      for (std::size_t k = c; k < n; ++k) {
        if (matrix[c][k] != 0) matrix[i][k] -= f * matrix[c][k];
      }
      rhs[i] -= f * rhs[c];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / matrix[i][i];
  return x;
}

std::size_t tight_rank(const LinearProgram& lp, const std::vector<Rational>& point) {
  const std::size_t n = lp.num_variables();
  std::vector<std::vector<Rational>> rows;
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    if (lp.row_value(i, point) != lp.constraints[i].rhs) continue;
    std::vector<Rational> row(n, Rational(0));
    for (const auto& [j, a] : lp.constraints[i].terms) row[j] += a;
    rows.push_back(std::move(row));
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (point[j] == lp.lower[j] || (lp.upper[j] && point[j] == *lp.upper[j])) {
      std::vector<Rational> row(n, Rational(0));
      row[j] = 1;
      rows.push_back(std::move(row));
    }
  }
  return matrix_rank(std::move(rows));
}

bool is_vertex(const LinearProgram& lp, const std::vector<Rational>& point) {
  return is_feasible_point(lp, point) && tight_rank(lp, point) == lp.num_variables();
}

}  // namespace fairround
