#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

namespace dmo::oracle {

namespace {

struct HalfSpace {
    std::vector<double> a;
    double b = 0.0;  // a.x <= b, or a.x == b for equalities
};

// Solves the square system in place; false when (numerically) singular.
bool solve_square(std::vector<std::vector<double>> m, std::vector<double> rhs, std::vector<double>& x) {
    const std::size_t n = rhs.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
        }
        if (std::abs(m[p][c]) < 1e-10) return false;
        std::swap(m[p], m[c]);
        std::swap(rhs[p], rhs[c]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = m[r][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
            rhs[r] -= f * rhs[c];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= m[i][k] * x[k];
        x[i] = s / m[i][i];
    }
    return true;
}

}  // namespace

std::optional<double> enumerate_vertices(const lp::Problem& problem, double feas_tol) {
    const std::size_t n = problem.num_variables();
    std::vector<HalfSpace> eqs;
    std::vector<HalfSpace> ineqs;
    for (const auto& row : problem.constraints()) {
        HalfSpace h{std::vector<double>(n, 0.0), row.rhs};
        for (const auto& t : row.terms) h.a[t.var] += t.coef;
        if (row.relation == lp::Relation::Equal) {
            eqs.push_back(h);
        } else {
            if (row.relation == lp::Relation::GreaterEqual) {
                for (double& v : h.a) v = -v;
                h.b = -h.b;
            }
            ineqs.push_back(h);
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        const auto& v = problem.variables()[j];
        if (!std::isfinite(v.lower) || !std::isfinite(v.upper)) {
            throw std::invalid_argument("enumerate_vertices needs finite bounds");
        }
        HalfSpace up{std::vector<double>(n, 0.0), v.upper};
        up.a[j] = 1.0;
        HalfSpace lo{std::vector<double>(n, 0.0), -v.lower};
        lo.a[j] = -1.0;
        ineqs.push_back(up);
        ineqs.push_back(lo);
    }
    if (eqs.size() > n) throw std::invalid_argument("enumerate_vertices: more equalities than variables");

    auto feasible = [&](const std::vector<double>& x) {
        for (const auto& h : eqs) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += h.a[j] * x[j];
            if (std::abs(s - h.b) > feas_tol * (1.0 + std::abs(h.b))) return false;
        }
        for (const auto& h : ineqs) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += h.a[j] * x[j];
            if (s - h.b > feas_tol * (1.0 + std::abs(h.b))) return false;
        }
        return true;
    };

    std::optional<double> best;
    const std::size_t pick = n - eqs.size();
    std::vector<std::size_t> chosen;
    std::function<void(std::size_t)> recurse = [&](std::size_t start) {
        if (chosen.size() == pick) {
            std::vector<std::vector<double>> m;
            std::vector<double> rhs;
            for (const auto& h : eqs) {
                m.push_back(h.a);
                rhs.push_back(h.b);
            }
            for (std::size_t k : chosen) {
                m.push_back(ineqs[k].a);
                rhs.push_back(ineqs[k].b);
            }
            std::vector<double> x;
            if (!solve_square(std::move(m), std::move(rhs), x) || !feasible(x)) return;
            const double obj = problem.objective_value(x);
            if (!best || obj < *best) best = obj;
            return;
        }
        for (std::size_t k = start; k < ineqs.size(); ++k) {
            chosen.push_back(k);
            recurse(k + 1);
            chosen.pop_back();
        }
    };
    recurse(0);
    return best;
}

std::optional<GridSearchResult> grid_search_welfare(const ClearingInput& input, std::size_t hour, double step) {
    const Network& net = input.network;
    const std::size_t nb = net.num_buses();
    if (net.num_lines() + 1 != nb) throw std::invalid_argument("grid_search_welfare needs a radial network");

    // Orient the tree from the interface bus; parent_line[m] is the line into m.
    const std::size_t root = *net.bus_index(net.interface_bus);
    std::vector<std::vector<std::size_t>> adj(nb);
    for (std::size_t l = 0; l < net.num_lines(); ++l) {
        adj[*net.bus_index(net.lines[l].from)].push_back(l);
        adj[*net.bus_index(net.lines[l].to)].push_back(l);
    }
    std::vector<std::size_t> parent(nb, nb), parent_line(nb, net.num_lines()), order;
    std::vector<bool> seen(nb, false);
    std::queue<std::size_t> q;
    q.push(root);
    seen[root] = true;
    while (!q.empty()) {
        const std::size_t u = q.front();
        q.pop();
        order.push_back(u);
        for (std::size_t l : adj[u]) {
            const std::size_t a = *net.bus_index(net.lines[l].from);
            const std::size_t b = *net.bus_index(net.lines[l].to);
            const std::size_t v = a == u ? b : a;
            if (seen[v]) continue;
            seen[v] = true;
            parent[v] = u;
            parent_line[v] = l;
            q.push(v);
        }
    }

    // Within one bus the best use of a given elastic total fills segments in benefit
    // order, so the search only enumerates per-bus totals on the grid.
    const double price = input.import_price(hour);
    std::vector<std::vector<BidSegment>> bus_segs(nb);
    for (const auto& bid : input.bids) {
        auto& v = bus_segs[*net.bus_index(bid.bus)];
        v.insert(v.end(), bid.segments.begin(), bid.segments.end());
    }
    double bound = 0.0;
    std::vector<std::vector<double>> levels(nb);
    for (std::size_t m = 0; m < nb; ++m) {
        auto& segs = bus_segs[m];
        std::stable_sort(segs.begin(), segs.end(),
                         [](const BidSegment& a, const BidSegment& b) { return a.benefit > b.benefit; });
        double cap = 0.0;
        double top = 0.0;
        for (const auto& s : segs) {
            cap += s.capacity;
            top = std::max(top, std::abs(s.benefit));
        }
        for (double v = 0.0; v < cap - 1e-12; v += step) levels[m].push_back(v);
        levels[m].push_back(cap);
        if (cap > 0.0) bound += step * (top + std::abs(price) + input.mu);
    }
    auto bus_benefit = [&](std::size_t m, double total) {
        double b = 0.0;
        for (const auto& s : bus_segs[m]) {
            const double take = std::min(total, s.capacity);
            b += s.benefit * take;
            total -= take;
        }
        return b;
    };

    std::vector<double> load(nb, 0.0);
    for (std::size_t m = 0; m < nb; ++m) load[m] = input.fixed.at(net.buses[m], hour);
    const double pd = input.assigned.power.at(hour);

    GridSearchResult res;
    res.discretization_bound = bound;
    bool found = false;
    double benefit_sum = 0.0;
    std::vector<double> subtree(nb);

    std::function<void(std::size_t)> recurse = [&](std::size_t k) {
        if (k == nb) {
            ++res.points;
            double total = 0.0;
            for (std::size_t m = 0; m < nb; ++m) {
                subtree[m] = load[m];
                total += load[m];
            }
            for (std::size_t i = order.size(); i-- > 1;) {
                const std::size_t v = order[i];
                if (std::abs(subtree[v]) > net.lines[parent_line[v]].capacity + 1e-9) return;
                subtree[parent[v]] += subtree[v];
            }
            const double welfare = benefit_sum - price * total - input.mu * std::abs(total - pd);
            if (!found || welfare > res.welfare) {
                res.welfare = welfare;
                found = true;
            }
            return;
        }
        for (double v : levels[k]) {
            const double b = bus_benefit(k, v);
            load[k] += v;
            benefit_sum += b;
            recurse(k + 1);
            load[k] -= v;
            benefit_sum -= b;
        }
    };
    recurse(0);
    if (!found) return std::nullopt;
    return res;
}

}  // namespace dmo::oracle
