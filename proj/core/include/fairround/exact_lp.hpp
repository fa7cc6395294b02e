#pragma once

#include "fairround/rational.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace fairround {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Constraint {
  std::vector<std::pair<std::size_t, Rational>> terms;  // (variable, coefficient)
  Relation relation = Relation::Equal;
  Rational rhs = 0;
};

/// Minimization LP with bounded variables. Lower bounds are finite; a missing
/// upper bound means +infinity.
struct LinearProgram {
  std::vector<Rational> lower;
  std::vector<std::optional<Rational>> upper;
  std::vector<Rational> cost;
  std::vector<Constraint> constraints;

  std::size_t num_variables() const { return lower.size(); }

  std::size_t add_variable(Rational lo = 0, std::optional<Rational> hi = Rational(1),
                           Rational objective = 0);
  std::size_t add_constraint(std::vector<std::pair<std::size_t, Rational>> terms, Relation rel,
                             Rational rhs);

  Rational row_value(std::size_t row, const std::vector<Rational>& point) const;
  Rational objective_value(const std::vector<Rational>& point) const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus status);

struct VertexSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<Rational> values;
  Rational objective = 0;
  std::vector<std::size_t> tight_constraints;
  std::vector<std::size_t> tight_bounds;  // variables sitting at a bound
  std::size_t pivots = 0;
};

/// Optimal basic feasible solution by the two-phase bounded-variable simplex
/// with Bland's rule. Redundant equality rows are dropped after phase 1.
VertexSolution solve_vertex(const LinearProgram& lp);

/// Any vertex of the feasible region (the objective is ignored).
VertexSolution feasible_vertex(const LinearProgram& lp);

bool is_feasible_point(const LinearProgram& lp, const std::vector<Rational>& point);

/// Rank of the rows tight at `point` (constraint rows holding with equality
/// plus unit rows of variables at a bound).
std::size_t tight_rank(const LinearProgram& lp, const std::vector<Rational>& point);

/// Feasible and the tight rows span the whole variable space.
bool is_vertex(const LinearProgram& lp, const std::vector<Rational>& point);

/// Exact rank of a dense rational matrix.
std::size_t matrix_rank(std::vector<std::vector<Rational>> rows);

/// Solves a square system exactly; nullopt if singular.
std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> matrix,
                                                  std::vector<Rational> rhs);

}  // namespace fairround
