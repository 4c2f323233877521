#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace dmo::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { Equal, LessEqual, GreaterEqual };

struct Variable {
    double lower = 0.0;
    double upper = kInf;
    double cost = 0.0;
    std::string name;
};

struct Term {
    std::size_t var = 0;
    double coef = 0.0;
};

struct Constraint {
    std::vector<Term> terms;
    Relation relation = Relation::Equal;
    double rhs = 0.0;
    std::string name;
};

/// Minimization LP with bounded variables:  min c'x  s.t.  rows, lower <= x <= upper.
class Problem {
public:
    std::size_t add_variable(double lower, double upper, double cost, std::string name = {});
    std::size_t add_constraint(std::vector<Term> terms, Relation relation, double rhs, std::string name = {});

    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<Constraint>& constraints() const { return rows_; }
    std::size_t num_variables() const { return vars_.size(); }
    std::size_t num_constraints() const { return rows_.size(); }

    /// Mutable access for perturbation studies.
    Variable& variable(std::size_t j) { return vars_.at(j); }
    Constraint& constraint(std::size_t i) { return rows_.at(i); }

    /// Throws std::invalid_argument on crossed bounds, non-finite data or bad indices.
    void validate() const;

    double objective_value(const std::vector<double>& x) const;
    double row_activity(std::size_t i, const std::vector<double>& x) const;

private:
    std::vector<Variable> vars_;
    std::vector<Constraint> rows_;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(Status status);

struct Solution {
    Status status = Status::IterationLimit;
    std::vector<double> primal;
    double objective = 0.0;
    /// Constraint duals, y_i = d(optimal objective) / d(rhs_i).
    std::vector<double> duals;
    /// c_j - sum_i y_i a_ij.
    std::vector<double> reduced_costs;
    std::size_t iterations = 0;
    /// Phase-1 optimum (total artificial infeasibility); positive when Infeasible.
    double infeasibility = 0.0;
};

struct SolverOptions {
    double tol_feas = 1e-9;
    double tol_opt = 1e-9;
    std::size_t max_iterations = 10'000;
    /// Consecutive degenerate pivots before switching to Bland's rule.
    std::size_t degenerate_streak = 50;
    /// Pivots between rebuilds of the basis inverse.
    std::size_t refactor_interval = 64;
    /// When set, the tableau at each phase end is written here.
    std::ostream* trace = nullptr;
};

/// Two-phase bounded-variable primal simplex. Deterministic for identical input.
Solution solve(const Problem& problem, const SolverOptions& options = {});

struct KktReport {
    double primal_violation = 0.0;
    double dual_violation = 0.0;
    double complementarity_violation = 0.0;
    double duality_gap = 0.0;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    bool passed = false;
};

/// Recomputes optimality conditions from the problem data and the solution's primal
/// values and row duals alone; reduced costs are derived, not read from the solution.
KktReport check_kkt(const Problem& problem, const Solution& solution, double tol = 1e-9);

}  // namespace dmo::lp
