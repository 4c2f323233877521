#include "dmo/settlement.hpp"

#include <cmath>
#include <stdexcept>

namespace dmo {

CustomerPayments customer_payments(const ClearingResult& result) {
    CustomerPayments out;
    for (const auto& h : result.hours) {
        if (out.by_bus.empty()) out.by_bus.assign(h.load.size(), 0.0);
        std::vector<double> row(h.load.size());
        for (std::size_t m = 0; m < h.load.size(); ++m) {
            row[m] = h.dlmp[m] * h.load[m];
            out.by_bus[m] += row[m];
            out.total += row[m];
        }
        out.by_hour.push_back(std::move(row));
    }
    return out;
}

double utility_payment(const ClearingResult& result, const TlmpSeries& tlmp, PaymentBasis basis,
                       const AssignedPowerSeries* assigned) {
    if (basis == PaymentBasis::Assigned && assigned == nullptr) {
        throw std::invalid_argument("assigned basis requires the assigned-power series");
    }
    double total = 0.0;
    for (const auto& h : result.hours) {
        const double power = basis == PaymentBasis::Actual ? h.p_main : assigned->power.at(h.hour);
        total += tlmp.price.at(h.hour) * power;
    }
    return total;
}

SettlementReport settle(const ClearingResult& result, const TlmpSeries& tlmp, PaymentBasis basis,
                        const AssignedPowerSeries* assigned) {
    SettlementReport rep;
    rep.payments = customer_payments(result);
    rep.customer_total = rep.payments.total;
    rep.utility_payment = utility_payment(result, tlmp, basis, assigned);
    rep.surplus = rep.customer_total - rep.utility_payment;
    for (const auto& h : result.hours) {
        double total_load = 0.0;
        const double lambda = tlmp.price.at(h.hour);
        for (std::size_t m = 0; m < h.load.size(); ++m) {
            total_load += h.load[m];
            rep.surplus_by_price_gap += (h.dlmp[m] - lambda) * h.load[m];
        }
        rep.conservation_residuals.push_back(std::abs(total_load - h.p_main));
    }
    return rep;
}

}  // namespace dmo
