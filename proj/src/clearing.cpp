#include "dmo/clearing.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace dmo {

double ClearingInput::import_price(std::size_t hour) const {
    return lambda_enabled ? tlmp_scale * tlmp.price.at(hour) : 0.0;
}

namespace {

void append(ValidationReport& into, const ValidationReport& from) {
    into.errors.insert(into.errors.end(), from.errors.begin(), from.errors.end());
    into.warnings.insert(into.warnings.end(), from.warnings.begin(), from.warnings.end());
}

std::string kind_label(ClearingError::Kind kind) {
    switch (kind) {
        case ClearingError::Kind::Infeasible: return "infeasible";
        case ClearingError::Kind::Unbounded: return "unbounded";
        case ClearingError::Kind::SolverFailure: return "solver failure";
    }
    return "error";
}

std::string error_message(ClearingError::Kind kind, std::size_t hour, const std::vector<std::string>& diags) {
    std::string msg = fmt::format("hour {}: clearing {}", hour, kind_label(kind));
    for (const auto& d : diags) msg += "; " + d;
    return msg;
}

// Names variables that sit on a bound and carry a nonzero phase-1 reduced cost.
std::vector<std::string> binding_candidates(const HourlyLp& hlp, const ClearingInput& input, const lp::Solution& sol) {
    std::vector<std::string> out;
    const auto& vars = hlp.problem.variables();
    if (sol.reduced_costs.size() != vars.size()) return out;
    for (std::size_t j = 0; j < vars.size(); ++j) {
        const double d = sol.reduced_costs[j];
        if (std::abs(d) <= 1e-9) continue;
        const bool at_upper = std::isfinite(vars[j].upper) && std::abs(sol.primal[j] - vars[j].upper) <= 1e-9;
        const bool at_lower = std::isfinite(vars[j].lower) && std::abs(sol.primal[j] - vars[j].lower) <= 1e-9;
        if (!at_upper && !at_lower) continue;
        const auto& layout = hlp.layout;
        if (j >= layout.flow_offset && j < layout.flow_offset + input.network.num_lines()) {
            const auto& line = input.network.lines[j - layout.flow_offset];
            out.push_back(fmt::format("line {} ({}->{}) at limit {} MW", line.id, line.from.value, line.to.value,
                                      at_upper ? vars[j].upper : vars[j].lower));
        } else {
            out.push_back(fmt::format("{} at {} bound {}", vars[j].name, at_upper ? "upper" : "lower",
                                      at_upper ? vars[j].upper : vars[j].lower));
        }
    }
    return out;
}

}  // namespace

ClearingError::ClearingError(Kind kind, std::size_t hour, std::vector<std::string> diagnostics)
    : std::runtime_error(error_message(kind, hour, diagnostics)),
      kind_{kind},
      hour_{hour},
      diagnostics_{std::move(diagnostics)} {}

ValidationReport validate_input(const ClearingInput& input) {
    ValidationReport report = validate_network(input.network);
    append(report, validate_bids(input.network, input.bids));
    append(report, validate_fixed_loads(input.network, input.fixed));
    const std::size_t horizon = input.horizon();
    if (horizon == 0) report.errors.push_back("empty horizon: T-LMP series has no entries");
    append(report, validate_tlmp(input.tlmp, horizon));
    append(report, validate_assigned(input.assigned, horizon, input.allow_negative_assigned));
    if (input.fixed.horizon() != horizon) {
        report.errors.push_back(fmt::format("fixed-load horizon {} does not match T-LMP horizon {}",
                                            input.fixed.horizon(), horizon));
    }
    if (!(input.mu >= 0.0) || !std::isfinite(input.mu)) report.errors.push_back("mu must be finite and >= 0");
    if (!(input.tlmp_scale >= 0.0) || !std::isfinite(input.tlmp_scale)) {
        report.errors.push_back("tlmp_scale must be finite and >= 0");
    }
    return report;
}

HourlyLp build_hourly_lp(const ClearingInput& input, std::size_t hour) {
    const Network& net = input.network;
    const Incidence inc(net);
    HourlyLp out;
    auto& lp = out.problem;
    auto& layout = out.layout;

    // Columns: DX per bid segment, PL per line, P^M, P^pos, P^neg.
    for (std::size_t c = 0; c < input.bids.size(); ++c) {
        const auto& bid = input.bids[c];
        layout.dx_offset.push_back(lp.num_variables());
        for (std::size_t g = 0; g < bid.segments.size(); ++g) {
            const auto& seg = bid.segments[g];
            lp.add_variable(0.0, seg.capacity, -seg.benefit, fmt::format("DX[bid {} seg {} bus {}]", c, g, bid.bus.value));
        }
    }
    layout.flow_offset = lp.num_variables();
    for (const auto& line : net.lines) {
        lp.add_variable(-line.capacity, line.capacity, 0.0, fmt::format("PL[line {}]", line.id));
    }
    layout.p_main = lp.add_variable(-lp::kInf, lp::kInf, input.import_price(hour), "PM");
    layout.p_pos = lp.add_variable(0.0, lp::kInf, input.mu, "Ppos");
    layout.p_neg = lp.add_variable(0.0, lp::kInf, input.mu, "Pneg");

    // Nodal balance: inflow over lines (+ import at the interface) - elastic load = fixed load.
    std::vector<std::vector<lp::Term>> rows(net.num_buses());
    for (std::size_t l = 0; l < net.num_lines(); ++l) {
        for (std::size_t m = 0; m < net.num_buses(); ++m) {
            const int a = inc.at(l, m);
            if (a != 0) rows[m].push_back({layout.flow_offset + l, static_cast<double>(a)});
        }
    }
    for (std::size_t c = 0; c < input.bids.size(); ++c) {
        const std::size_t m = *net.bus_index(input.bids[c].bus);
        for (std::size_t g = 0; g < input.bids[c].segments.size(); ++g) {
            rows[m].push_back({layout.dx_offset[c] + g, -1.0});
        }
    }
    const std::size_t interface_pos = *net.bus_index(net.interface_bus);
    rows[interface_pos].push_back({layout.p_main, 1.0});
    for (std::size_t m = 0; m < net.num_buses(); ++m) {
        layout.balance_row.push_back(lp.add_constraint(std::move(rows[m]), lp::Relation::Equal,
                                                       input.fixed.at(net.buses[m], hour),
                                                       fmt::format("balance[bus {}]", net.buses[m].value)));
    }

    // P^M - P^pos + P^neg = PD^M
    layout.deviation_row = lp.add_constraint({{layout.p_main, 1.0}, {layout.p_pos, -1.0}, {layout.p_neg, 1.0}},
                                             lp::Relation::Equal, input.assigned.power.at(hour), "deviation");
    return out;
}

std::vector<double> extract_dlmp(const lp::Solution& solution, const LpLayout& layout) {
    std::vector<double> prices;
    prices.reserve(layout.balance_row.size());
    for (std::size_t row : layout.balance_row) prices.push_back(solution.duals.at(row));
    return prices;
}

HourlyClearing read_hour(const ClearingInput& input, const HourlyLp& hlp, const lp::Solution& sol, std::size_t hour) {
    const auto& net = input.network;
    const auto& layout = hlp.layout;
    HourlyClearing h;
    h.hour = hour;
    h.p_main = sol.primal[layout.p_main];
    h.p_pos = sol.primal[layout.p_pos];
    h.p_neg = sol.primal[layout.p_neg];
    h.deviation = h.p_main - input.assigned.power[hour];
    h.load.assign(net.num_buses(), 0.0);
    for (std::size_t m = 0; m < net.num_buses(); ++m) h.load[m] = input.fixed.at(net.buses[m], hour);
    for (std::size_t c = 0; c < input.bids.size(); ++c) {
        const std::size_t m = *net.bus_index(input.bids[c].bus);
        std::vector<double> fills;
        for (std::size_t g = 0; g < input.bids[c].segments.size(); ++g) {
            fills.push_back(sol.primal[layout.dx_offset[c] + g]);
            h.load[m] += fills.back();
        }
        h.dx.push_back(std::move(fills));
    }
    for (std::size_t l = 0; l < net.num_lines(); ++l) h.flow.push_back(sol.primal[layout.flow_offset + l]);
    h.dlmp = extract_dlmp(sol, layout);
    h.welfare = -sol.objective;
    h.tlmp = input.tlmp.price[hour];
    h.iterations = sol.iterations;
    h.solution = sol;
    return h;
}

HourlyClearing clear_hour(const ClearingInput& input, std::size_t hour, const lp::SolverOptions& options) {
    const HourlyLp hlp = build_hourly_lp(input, hour);
    const lp::Solution sol = lp::solve(hlp.problem, options);
    switch (sol.status) {
        case lp::Status::Optimal: break;
        case lp::Status::Infeasible: {
            auto diags = binding_candidates(hlp, input, sol);
            diags.insert(diags.begin(), fmt::format("phase-1 infeasibility {:.6g} MW", sol.infeasibility));
            throw ClearingError(ClearingError::Kind::Infeasible, hour, std::move(diags));
        }
        case lp::Status::Unbounded:
            throw ClearingError(ClearingError::Kind::Unbounded, hour, {"objective unbounded; check capacities"});
        case lp::Status::IterationLimit:
            throw ClearingError(ClearingError::Kind::SolverFailure, hour,
                                {fmt::format("iteration limit reached after {} pivots", sol.iterations)});
    }
    return read_hour(input, hlp, sol, hour);
}

ClearingResult clear(const ClearingInput& input, const lp::SolverOptions& options) {
    const auto report = validate_input(input);
    if (!report.ok()) {
        std::string msg = "invalid clearing input";
        for (const auto& e : report.errors) msg += "; " + e;
        throw std::invalid_argument(msg);
    }
    ClearingResult result;
    result.mu = input.mu;
    result.tlmp_scale = input.tlmp_scale;
    result.lambda_enabled = input.lambda_enabled;
    result.warnings = report.warnings;
    for (std::size_t t = 0; t < input.horizon(); ++t) {
        result.hours.push_back(clear_hour(input, t, options));
        result.total_welfare += result.hours.back().welfare;
    }
    return result;
}

ClearingResult grid_following(const ClearingInput& input, const lp::SolverOptions& options) {
    ClearingInput in = input;
    in.mu = 0.0;
    return clear(in, options);
}

ClearingResult grid_independent(const ClearingInput& input, double large_mu, const lp::SolverOptions& options,
                                double tol) {
    ClearingInput in = input;
    in.mu = large_mu;
    ClearingResult result = clear(in, options);

    double max_benefit = 0.0;
    for (const auto& bid : in.bids) {
        for (const auto& seg : bid.segments) max_benefit = std::max(max_benefit, std::abs(seg.benefit));
    }
    if (large_mu <= max_benefit) {
        result.warnings.push_back(fmt::format(
            "penalty {} does not exceed the largest bid benefit {}; schedule may not be followed", large_mu,
            max_benefit));
    }
    for (const auto& h : result.hours) {
        if (std::abs(h.deviation) > tol) {
            result.unreachable_hours.push_back(h.hour);
            result.warnings.push_back(
                fmt::format("schedule unreachable at hour {}: deviation {:.6f} MW", h.hour, h.deviation));
        }
    }
    return result;
}

}  // namespace dmo
