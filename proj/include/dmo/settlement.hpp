#pragma once

#include <vector>

#include "dmo/clearing.hpp"
#include "dmo/market_model.hpp"

namespace dmo {

/// Which power quantity the DMO pays the ISO for.
enum class PaymentBasis {
    Actual,    ///< T-LMP times the realized import P^M
    Assigned,  ///< T-LMP times the ISO-assigned power PD^M
};

struct CustomerPayments {
    std::vector<std::vector<double>> by_hour;  ///< [hour][bus position], $
    std::vector<double> by_bus;                ///< summed over the horizon, $
    double total = 0.0;                        ///< C_c
};

struct SettlementReport {
    CustomerPayments payments;
    double customer_total = 0.0;   ///< C_c
    double utility_payment = 0.0;  ///< C_u
    double surplus = 0.0;          ///< C_c - C_u
    /// Sum over hours and buses of (D-LMP - T-LMP) * load.
    double surplus_by_price_gap = 0.0;
    std::vector<double> conservation_residuals;  ///< per hour |sum D - P^M|
};

CustomerPayments customer_payments(const ClearingResult& result);

double utility_payment(const ClearingResult& result, const TlmpSeries& tlmp, PaymentBasis basis = PaymentBasis::Actual,
                       const AssignedPowerSeries* assigned = nullptr);

SettlementReport settle(const ClearingResult& result, const TlmpSeries& tlmp,
                        PaymentBasis basis = PaymentBasis::Actual, const AssignedPowerSeries* assigned = nullptr);

}  // namespace dmo
