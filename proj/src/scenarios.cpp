#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

#include "dmo/scenarios.hpp"

namespace dmo {

std::string to_string(SweepParameter p) { return p == SweepParameter::TlmpScale ? "tlmp_scale" : "mu"; }

AssignedPowerSeries baseline_assignment(const ClearingInput& input, const lp::SolverOptions& options) {
    ClearingInput ref = input;
    ref.mu = 0.0;
    ref.tlmp_scale = 1.0;
    ref.lambda_enabled = true;
    if (ref.assigned.power.size() != ref.horizon()) ref.assigned.power.assign(ref.horizon(), 0.0);
    const ClearingResult result = clear(ref, options);
    AssignedPowerSeries out;
    for (const auto& h : result.hours) out.power.push_back(h.p_main);
    return out;
}

std::vector<double> daily_average(const std::vector<std::vector<double>>& prices_by_hour) {
    if (prices_by_hour.empty()) return {};
    const std::size_t buses = prices_by_hour.front().size();
    std::vector<double> avg(buses, 0.0);
    for (const auto& hour : prices_by_hour) {
        if (hour.size() != buses) throw std::invalid_argument("daily_average: ragged price table");
        for (std::size_t m = 0; m < buses; ++m) avg[m] += hour[m];
    }
    for (double& v : avg) v /= static_cast<double>(prices_by_hour.size());
    return avg;
}

SweepRow evaluate_point(const ClearingInput& input, double value, const lp::SolverOptions& options) {
    const ClearingResult result = clear(input, options);

    TlmpSeries settle_prices = input.tlmp;
    if (input.lambda_enabled) {
        for (double& p : settle_prices.price) p *= input.tlmp_scale;
    }
    const SettlementReport rep = settle(result, settle_prices);

    SweepRow row;
    row.value = value;
    std::vector<std::vector<double>> prices;
    const std::size_t iface = *input.network.bus_index(input.network.interface_bus);
    for (const auto& h : result.hours) {
        prices.push_back(h.dlmp);
        row.total_abs_deviation += std::abs(h.deviation);
        row.total_import += h.p_main;
        row.max_interface_offset =
            std::max(row.max_interface_offset, std::abs(h.dlmp[iface] - input.import_price(h.hour)));
    }
    row.avg_dlmp = daily_average(prices);
    row.customer_total = rep.customer_total;
    row.utility_payment = rep.utility_payment;
    row.deficit = rep.surplus;
    for (double r : rep.conservation_residuals) row.max_conservation_residual = std::max(row.max_conservation_residual, r);
    return row;
}

SweepResult run_sweep(const SweepSpec& spec, bool parallel, const lp::SolverOptions& options) {
    if (spec.values.empty()) throw std::invalid_argument("sweep: no values");
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        if (!std::isfinite(spec.values[i])) throw std::invalid_argument("sweep: values must be finite");
        if (i > 0 && spec.values[i] < spec.values[i - 1]) throw std::invalid_argument("sweep: values must be ascending");
    }

    auto point_input = [&](double value) {
        ClearingInput in = spec.base;
        in.lambda_enabled = spec.lambda_enabled;
        if (spec.parameter == SweepParameter::TlmpScale) in.tlmp_scale = value;
        else in.mu = value;
        return in;
    };

    SweepResult out;
    out.parameter = spec.parameter;
    out.buses = spec.base.network.buses;
    if (parallel) {
        std::vector<std::future<SweepRow>> pending;
        for (double v : spec.values) {
            pending.push_back(std::async(std::launch::async, [&, v] { return evaluate_point(point_input(v), v, options); }));
        }
        for (auto& f : pending) out.rows.push_back(f.get());
    } else {
        for (double v : spec.values) out.rows.push_back(evaluate_point(point_input(v), v, options));
    }
    return out;
}

std::vector<double> default_case1_scales() {
    std::vector<double> v;
    for (int k = 1; k <= 20; ++k) v.push_back(k / 5.0);
    return v;
}

std::vector<double> default_case2_mus() { return {0.0, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 1e3, 1e4, 1e5, 1e6}; }

std::vector<double> default_case3_scales() {
    std::vector<double> v;
    for (int k = 1; k <= 9; ++k) v.push_back(k / 10.0);
    return v;
}

SweepResult case1_sweep(const ClearingInput& input, const std::vector<double>& scales) {
    SweepSpec spec{SweepParameter::TlmpScale, scales, input, true};
    spec.base.mu = 0.0;
    return run_sweep(spec);
}

SweepResult case2_sweep(const ClearingInput& input, const std::vector<double>& mus) {
    SweepSpec spec{SweepParameter::Mu, mus, input, false};
    return run_sweep(spec);
}

SweepResult case3_sweep(const ClearingInput& input, const std::vector<double>& scales, double mu) {
    SweepSpec spec{SweepParameter::TlmpScale, scales, input, true};
    spec.base.mu = mu;
    return run_sweep(spec);
}

}  // namespace dmo
