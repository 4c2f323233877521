#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dmo/lp.hpp"

namespace dmo::lp {

KktReport check_kkt(const Problem& problem, const Solution& solution, double tol) {
    const auto& vars = problem.variables();
    const auto& rows = problem.constraints();
    const auto& x = solution.primal;
    const auto& y = solution.duals;
    if (x.size() != vars.size() || y.size() != rows.size()) {
        throw std::invalid_argument("check_kkt: solution does not match problem dimensions");
    }

    KktReport rep;
    double primal_scale = 1.0;
    double dual_scale = 1.0;

    std::vector<double> d(vars.size());
    for (std::size_t j = 0; j < vars.size(); ++j) {
        d[j] = vars[j].cost;
        dual_scale = std::max(dual_scale, std::abs(vars[j].cost));
    }

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const double act = problem.row_activity(i, x);
        const double slack = row.rhs - act;
        primal_scale = std::max(primal_scale, std::abs(row.rhs));
        double viol = 0.0;
        double sign_viol = 0.0;
        switch (row.relation) {
            case Relation::Equal: viol = std::abs(slack); break;
            case Relation::LessEqual:
                viol = std::max(0.0, -slack);
                sign_viol = std::max(0.0, y[i]);
                break;
            case Relation::GreaterEqual:
                viol = std::max(0.0, slack);
                sign_viol = std::max(0.0, -y[i]);
                break;
        }
        rep.primal_violation = std::max(rep.primal_violation, viol);
        rep.dual_violation = std::max(rep.dual_violation, sign_viol);
        if (row.relation != Relation::Equal) {
            rep.complementarity_violation = std::max(rep.complementarity_violation, std::abs(y[i] * slack));
        }
        rep.dual_objective += row.rhs * y[i];
        for (const auto& t : row.terms) d[t.var] -= y[i] * t.coef;
    }

    for (std::size_t j = 0; j < vars.size(); ++j) {
        const auto& v = vars[j];
        rep.primal_violation = std::max({rep.primal_violation, v.lower - x[j], x[j] - v.upper});
        if (d[j] > 0.0) {
            if (std::isfinite(v.lower)) {
                rep.complementarity_violation = std::max(rep.complementarity_violation, d[j] * std::abs(x[j] - v.lower));
                rep.dual_objective += d[j] * v.lower;
            } else {
                rep.dual_violation = std::max(rep.dual_violation, d[j]);
                rep.dual_objective += d[j] * x[j];
            }
        } else if (d[j] < 0.0) {
            if (std::isfinite(v.upper)) {
                rep.complementarity_violation = std::max(rep.complementarity_violation, -d[j] * std::abs(v.upper - x[j]));
                rep.dual_objective += d[j] * v.upper;
            } else {
                rep.dual_violation = std::max(rep.dual_violation, -d[j]);
                rep.dual_objective += d[j] * x[j];
            }
        }
    }

    rep.primal_objective = problem.objective_value(x);
    rep.duality_gap = std::abs(rep.primal_objective - rep.dual_objective);

    const double obj_scale = 1.0 + std::abs(rep.primal_objective);
    rep.passed = rep.primal_violation <= tol * primal_scale && rep.dual_violation <= tol * dual_scale &&
                 rep.complementarity_violation <= tol * obj_scale && rep.duality_gap <= tol * obj_scale;
    return rep;
}

}  // namespace dmo::lp
