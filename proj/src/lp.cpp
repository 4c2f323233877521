#include "dmo/lp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace dmo::lp {

std::string to_string(Status status) {
    switch (status) {
        case Status::Optimal: return "Optimal";
        case Status::Infeasible: return "Infeasible";
        case Status::Unbounded: return "Unbounded";
        case Status::IterationLimit: return "IterationLimit";
    }
    return "Unknown";
}

std::size_t Problem::add_variable(double lower, double upper, double cost, std::string name) {
    vars_.push_back({lower, upper, cost, std::move(name)});
    return vars_.size() - 1;
}

std::size_t Problem::add_constraint(std::vector<Term> terms, Relation relation, double rhs, std::string name) {
    rows_.push_back({std::move(terms), relation, rhs, std::move(name)});
    return rows_.size() - 1;
}

void Problem::validate() const {
    for (std::size_t j = 0; j < vars_.size(); ++j) {
        const auto& v = vars_[j];
        if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper || v.lower == kInf ||
            v.upper == -kInf) {
            throw std::invalid_argument("variable " + std::to_string(j) + ": invalid bounds");
        }
        if (!std::isfinite(v.cost)) throw std::invalid_argument("variable " + std::to_string(j) + ": cost not finite");
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        if (!std::isfinite(r.rhs)) throw std::invalid_argument("constraint " + std::to_string(i) + ": rhs not finite");
        for (const auto& t : r.terms) {
            if (t.var >= vars_.size()) {
                throw std::invalid_argument("constraint " + std::to_string(i) + ": unknown variable index");
            }
            if (!std::isfinite(t.coef)) {
                throw std::invalid_argument("constraint " + std::to_string(i) + ": coefficient not finite");
            }
        }
    }
}

double Problem::objective_value(const std::vector<double>& x) const {
    double obj = 0.0;
    for (std::size_t j = 0; j < vars_.size(); ++j) obj += vars_[j].cost * x.at(j);
    return obj;
}

double Problem::row_activity(std::size_t i, const std::vector<double>& x) const {
    double act = 0.0;
    for (const auto& t : rows_.at(i).terms) act += t.coef * x.at(t.var);
    return act;
}

namespace {

enum class VarState { Basic, AtLower, AtUpper, FreeZero };

constexpr double kPivotTol = 1e-9;
constexpr double kSingularTol = 1e-12;

using Matrix = std::vector<std::vector<double>>;

// Dense Gauss-Jordan inverse with partial pivoting. Returns false if singular.
bool invert(Matrix a, Matrix& inv) {
    const std::size_t n = a.size();
    inv.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        if (std::abs(a[piv][col]) < kSingularTol) return false;
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        const double p = a[col][col];
        for (std::size_t k = 0; k < n; ++k) {
            a[col][k] /= p;
            inv[col][k] /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0.0) continue;
            const double f = a[r][col];
            for (std::size_t k = 0; k < n; ++k) {
                a[r][k] -= f * a[col][k];
                inv[r][k] -= f * inv[col][k];
            }
        }
    }
    return true;
}

class Simplex {
public:
    Simplex(const Problem& problem, const SolverOptions& options) : problem_{problem}, opt_{options} {
        build();
    }

    Solution run();

private:
    enum class PhaseResult { Optimal, Unbounded, IterationLimit };

    void build();
    void refactor();
    void compute_duals();
    double reduced_cost(std::size_t j) const;
    double pricing_tol(std::size_t j, double d) const;
    PhaseResult iterate();
    void trace_state(const char* label) const;

    const Problem& problem_;
    SolverOptions opt_;

    std::size_t m_ = 0;          // rows
    std::size_t n_struct_ = 0;   // structural columns
    std::size_t n_total_ = 0;    // structural + slack + artificial
    std::size_t first_artificial_ = 0;
    std::vector<std::vector<double>> cols_;  // dense columns, length m_
    std::vector<double> rhs_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<double> cost_;  // active phase costs
    std::vector<double> x_;
    std::vector<VarState> state_;
    std::vector<std::size_t> basis_;
    Matrix binv_;
    std::vector<double> y_;

    std::size_t iterations_ = 0;
    std::size_t since_refactor_ = 0;
    std::size_t degenerate_run_ = 0;
    bool bland_ = false;
};

void Simplex::build() {
    const auto& vars = problem_.variables();
    const auto& rows = problem_.constraints();
    m_ = rows.size();
    n_struct_ = vars.size();

    for (const auto& v : vars) {
        std::vector<double> col(m_, 0.0);
        cols_.push_back(std::move(col));
        lower_.push_back(v.lower);
        upper_.push_back(v.upper);
    }
    for (std::size_t i = 0; i < m_; ++i) {
        for (const auto& t : rows[i].terms) cols_[t.var][i] += t.coef;
        rhs_.push_back(rows[i].rhs);
    }

    // Structurals start at a finite bound (lower preferred) or at zero when free.
    for (std::size_t j = 0; j < n_struct_; ++j) {
        if (std::isfinite(lower_[j])) {
            x_.push_back(lower_[j]);
            state_.push_back(VarState::AtLower);
        } else if (std::isfinite(upper_[j])) {
            x_.push_back(upper_[j]);
            state_.push_back(VarState::AtUpper);
        } else {
            x_.push_back(0.0);
            state_.push_back(VarState::FreeZero);
        }
    }

    std::vector<double> residual(rhs_);
    for (std::size_t j = 0; j < n_struct_; ++j) {
        if (x_[j] == 0.0) continue;
        for (std::size_t i = 0; i < m_; ++i) residual[i] -= cols_[j][i] * x_[j];
    }

    basis_.assign(m_, 0);
    std::vector<std::size_t> needs_artificial;
    for (std::size_t i = 0; i < m_; ++i) {
        const Relation rel = rows[i].relation;
        if (rel == Relation::Equal) {
            needs_artificial.push_back(i);
            continue;
        }
        const double sign = rel == Relation::LessEqual ? 1.0 : -1.0;
        std::vector<double> col(m_, 0.0);
        col[i] = sign;
        cols_.push_back(std::move(col));
        lower_.push_back(0.0);
        upper_.push_back(kInf);
        const double value = sign * residual[i];
        if (value >= 0.0) {
            x_.push_back(value);
            state_.push_back(VarState::Basic);
            basis_[i] = cols_.size() - 1;
        } else {
            x_.push_back(0.0);
            state_.push_back(VarState::AtLower);
            needs_artificial.push_back(i);
        }
    }
    first_artificial_ = cols_.size();
    for (std::size_t i : needs_artificial) {
        const double sign = residual[i] >= 0.0 ? 1.0 : -1.0;
        std::vector<double> col(m_, 0.0);
        col[i] = sign;
        cols_.push_back(std::move(col));
        lower_.push_back(0.0);
        upper_.push_back(kInf);
        x_.push_back(std::abs(residual[i]));
        state_.push_back(VarState::Basic);
        basis_[i] = cols_.size() - 1;
    }
    n_total_ = cols_.size();

    // Initial basis is a signed identity, so its inverse is itself.
    binv_.assign(m_, std::vector<double>(m_, 0.0));
    for (std::size_t i = 0; i < m_; ++i) binv_[i][i] = cols_[basis_[i]][i];
}

void Simplex::refactor() {
    Matrix b(m_, std::vector<double>(m_, 0.0));
    for (std::size_t k = 0; k < m_; ++k) {
        for (std::size_t i = 0; i < m_; ++i) b[i][k] = cols_[basis_[k]][i];
    }
    if (!invert(std::move(b), binv_)) throw std::runtime_error("simplex: basis became singular");

    // x_B = B^-1 (b - N x_N)
    std::vector<double> r(rhs_);
    for (std::size_t j = 0; j < n_total_; ++j) {
        if (state_[j] == VarState::Basic || x_[j] == 0.0) continue;
        for (std::size_t i = 0; i < m_; ++i) r[i] -= cols_[j][i] * x_[j];
    }
    for (std::size_t k = 0; k < m_; ++k) {
        double v = 0.0;
        for (std::size_t i = 0; i < m_; ++i) v += binv_[k][i] * r[i];
        x_[basis_[k]] = v;
    }
    since_refactor_ = 0;
}

void Simplex::compute_duals() {
    y_.assign(m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
        const double cb = cost_[basis_[k]];
        if (cb == 0.0) continue;
        for (std::size_t i = 0; i < m_; ++i) y_[i] += cb * binv_[k][i];
    }
}

double Simplex::reduced_cost(std::size_t j) const {
    double d = cost_[j];
    for (std::size_t i = 0; i < m_; ++i) d -= y_[i] * cols_[j][i];
    return d;
}

double Simplex::pricing_tol(std::size_t j, double) const {
    double scale = std::max(1.0, std::abs(cost_[j]));
    for (std::size_t i = 0; i < m_; ++i) scale = std::max(scale, std::abs(y_[i] * cols_[j][i]));
    return opt_.tol_opt * scale;
}

Simplex::PhaseResult Simplex::iterate() {
    for (;;) {
        if (iterations_ >= opt_.max_iterations) return PhaseResult::IterationLimit;
        compute_duals();

        // Pricing: Dantzig's largest reduced cost, or Bland's lowest index.
        std::size_t entering = n_total_;
        double best = 0.0;
        double entering_d = 0.0;
        for (std::size_t j = 0; j < n_total_; ++j) {
            const VarState s = state_[j];
            if (s == VarState::Basic || lower_[j] == upper_[j]) continue;
            const double d = reduced_cost(j);
            const double tol = pricing_tol(j, d);
            bool improving = false;
            if (s == VarState::AtLower) improving = d < -tol;
            else if (s == VarState::AtUpper) improving = d > tol;
            else improving = std::abs(d) > tol;
            if (!improving) continue;
            if (bland_) {
                entering = j;
                entering_d = d;
                break;
            }
            if (std::abs(d) > best) {
                best = std::abs(d);
                entering = j;
                entering_d = d;
            }
        }
        if (entering == n_total_) return PhaseResult::Optimal;

        const double dir = entering_d < 0.0 ? 1.0 : -1.0;
        std::vector<double> alpha(m_, 0.0);
        for (std::size_t k = 0; k < m_; ++k) {
            double v = 0.0;
            for (std::size_t i = 0; i < m_; ++i) v += binv_[k][i] * cols_[entering][i];
            alpha[k] = v;
        }

        // Ratio test. Basic k moves by -dir * alpha[k] per unit step.
        double theta = kInf;
        std::size_t leave_row = m_;
        bool leave_to_upper = false;
        if (std::isfinite(lower_[entering]) && std::isfinite(upper_[entering])) {
            theta = upper_[entering] - lower_[entering];
        }
        for (std::size_t k = 0; k < m_; ++k) {
            const double delta = -dir * alpha[k];
            if (std::abs(delta) <= kPivotTol) continue;
            const std::size_t bv = basis_[k];
            double ratio;
            bool to_upper;
            if (delta < 0.0) {
                if (!std::isfinite(lower_[bv])) continue;
                ratio = (x_[bv] - lower_[bv]) / -delta;
                to_upper = false;
            } else {
                if (!std::isfinite(upper_[bv])) continue;
                ratio = (upper_[bv] - x_[bv]) / delta;
                to_upper = true;
            }
            ratio = std::max(ratio, 0.0);
            bool take = false;
            if (leave_row == m_) {
                take = ratio < theta;
            } else if (ratio < theta - 1e-12 * (1.0 + theta)) {
                take = true;
            } else if (ratio <= theta + 1e-12 * (1.0 + theta)) {
                take = bland_ ? bv < basis_[leave_row] : std::abs(alpha[k]) > std::abs(alpha[leave_row]);
            }
            if (take) {
                theta = ratio;
                leave_row = k;
                leave_to_upper = to_upper;
            }
        }

        if (!std::isfinite(theta)) return PhaseResult::Unbounded;

        ++iterations_;
        const double step = dir * theta;
        x_[entering] += step;
        for (std::size_t k = 0; k < m_; ++k) x_[basis_[k]] -= step * alpha[k];

        if (theta <= opt_.tol_feas) {
            if (++degenerate_run_ >= opt_.degenerate_streak) bland_ = true;
        } else {
            degenerate_run_ = 0;
            bland_ = false;
        }

        if (leave_row == m_) {
            // Entering variable hits its opposite bound; basis unchanged.
            if (dir > 0.0) {
                x_[entering] = upper_[entering];
                state_[entering] = VarState::AtUpper;
            } else {
                x_[entering] = lower_[entering];
                state_[entering] = VarState::AtLower;
            }
            continue;
        }

        const std::size_t leaving = basis_[leave_row];
        x_[leaving] = leave_to_upper ? upper_[leaving] : lower_[leaving];
        state_[leaving] = leave_to_upper ? VarState::AtUpper : VarState::AtLower;
        state_[entering] = VarState::Basic;
        basis_[leave_row] = entering;

        const double piv = alpha[leave_row];
        for (std::size_t i = 0; i < m_; ++i) binv_[leave_row][i] /= piv;
        for (std::size_t k = 0; k < m_; ++k) {
            if (k == leave_row || alpha[k] == 0.0) continue;
            const double f = alpha[k];
            for (std::size_t i = 0; i < m_; ++i) binv_[k][i] -= f * binv_[leave_row][i];
        }
        if (++since_refactor_ >= opt_.refactor_interval) refactor();
    }
}

void Simplex::trace_state(const char* label) const {
    if (!opt_.trace) return;
    auto& os = *opt_.trace;
    os << "# " << label << " after " << iterations_ << " iterations\n";
    os << "# var state value lower upper cost\n";
    for (std::size_t j = 0; j < n_total_; ++j) {
        const char* s = state_[j] == VarState::Basic     ? "B"
                        : state_[j] == VarState::AtLower ? "L"
                        : state_[j] == VarState::AtUpper ? "U"
                                                          : "F";
        os << j << ' ' << s << ' ' << x_[j] << ' ' << lower_[j] << ' ' << upper_[j] << ' ' << cost_[j] << '\n';
    }
    os << "# row basic dual\n";
    for (std::size_t i = 0; i < m_; ++i) os << i << ' ' << basis_[i] << ' ' << (i < y_.size() ? y_[i] : 0.0) << '\n';
}

Solution Simplex::run() {
    Solution sol;

    double rhs_scale = 1.0;
    for (double b : rhs_) rhs_scale = std::max(rhs_scale, std::abs(b));

    // Phase 1: minimize the sum of artificials.
    cost_.assign(n_total_, 0.0);
    for (std::size_t j = first_artificial_; j < n_total_; ++j) cost_[j] = 1.0;
    if (first_artificial_ < n_total_) {
        const PhaseResult r = iterate();
        compute_duals();
        trace_state("phase 1");
        bool stop = r == PhaseResult::IterationLimit;
        if (stop) {
            sol.status = Status::IterationLimit;
        } else {
            double infeas = 0.0;
            for (std::size_t j = first_artificial_; j < n_total_; ++j) infeas += x_[j];
            sol.infeasibility = infeas;
            if (infeas > opt_.tol_feas * rhs_scale) {
                sol.status = Status::Infeasible;
                stop = true;
                sol.duals = y_;
                for (std::size_t j = 0; j < n_struct_; ++j) sol.reduced_costs.push_back(reduced_cost(j));
            }
        }
        if (stop) {
            sol.primal.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_struct_));
            sol.objective = problem_.objective_value(sol.primal);
            sol.iterations = iterations_;
            return sol;
        }
        // Artificials are pinned at zero for phase 2; basic ones stay on redundant rows.
        for (std::size_t j = first_artificial_; j < n_total_; ++j) {
            upper_[j] = 0.0;
            if (state_[j] != VarState::Basic) {
                x_[j] = 0.0;
                state_[j] = VarState::AtLower;
            }
        }
        refactor();
    }

    cost_.assign(n_total_, 0.0);
    for (std::size_t j = 0; j < n_struct_; ++j) cost_[j] = problem_.variables()[j].cost;
    degenerate_run_ = 0;
    bland_ = false;
    const PhaseResult r = iterate();
    if (m_ > 0) refactor();
    compute_duals();
    trace_state("phase 2");

    switch (r) {
        case PhaseResult::Optimal: sol.status = Status::Optimal; break;
        case PhaseResult::Unbounded: sol.status = Status::Unbounded; break;
        case PhaseResult::IterationLimit: sol.status = Status::IterationLimit; break;
    }
    sol.primal.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_struct_));
    for (std::size_t j = 0; j < n_struct_; ++j) {
        // Snap nonbasic values onto their bounds.
        if (state_[j] == VarState::AtLower) sol.primal[j] = lower_[j];
        if (state_[j] == VarState::AtUpper) sol.primal[j] = upper_[j];
    }
    sol.objective = problem_.objective_value(sol.primal);
    sol.duals = y_;
    sol.reduced_costs.reserve(n_struct_);
    for (std::size_t j = 0; j < n_struct_; ++j) sol.reduced_costs.push_back(reduced_cost(j));
    sol.iterations = iterations_;
    return sol;
}

}  // namespace

Solution solve(const Problem& problem, const SolverOptions& options) {
    if (!(options.tol_feas > 0.0) || !(options.tol_opt > 0.0)) {
        throw std::invalid_argument("solver tolerances must be positive");
    }
    problem.validate();
    Simplex simplex(problem, options);
    return simplex.run();
}

}  // namespace dmo::lp
