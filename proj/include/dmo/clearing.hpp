#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmo/lp.hpp"
#include "dmo/market_model.hpp"

namespace dmo {

/// Default penalty ($/MWh) used for grid-independent clearing. It must exceed every
/// bid benefit for the schedule to dominate.
inline constexpr double kLargePenalty = 1e6;

struct ClearingInput {
    Network network;
    std::vector<CustomerBid> bids;
    FixedLoadSeries fixed;
    TlmpSeries tlmp;
    AssignedPowerSeries assigned;
    double mu = 0.0;           ///< deviation penalty, $/MWh
    double tlmp_scale = 1.0;   ///< multiplier applied to the T-LMP in the objective
    bool lambda_enabled = true;
    bool allow_negative_assigned = false;

    std::size_t horizon() const { return tlmp.price.size(); }
    /// Price of imported energy in the objective for `hour`.
    double import_price(std::size_t hour) const;
};

ValidationReport validate_input(const ClearingInput& input);

/// Variable and row positions of one hourly LP.
struct LpLayout {
    std::vector<std::size_t> dx_offset;  ///< first DX column of each bid
    std::size_t flow_offset = 0;         ///< first PL column
    std::size_t p_main = 0;
    std::size_t p_pos = 0;
    std::size_t p_neg = 0;
    std::vector<std::size_t> balance_row;  ///< per bus position
    std::size_t deviation_row = 0;
};

struct HourlyLp {
    lp::Problem problem;
    LpLayout layout;
};

HourlyLp build_hourly_lp(const ClearingInput& input, std::size_t hour);

/// Per-bus D-LMP ($/MWh): the balance-row duals, i.e. the change in minimized cost
/// per extra MW of fixed load at each bus.
std::vector<double> extract_dlmp(const lp::Solution& solution, const LpLayout& layout);

struct HourlyClearing {
    std::size_t hour = 0;
    double p_main = 0.0;
    double deviation = 0.0;
    double p_pos = 0.0;
    double p_neg = 0.0;
    std::vector<std::vector<double>> dx;  ///< [bid][segment], MW
    std::vector<double> load;             ///< per bus position, MW
    std::vector<double> flow;             ///< per line position, MW
    std::vector<double> dlmp;             ///< per bus position, $/MWh
    double welfare = 0.0;                 ///< hourly objective, maximization sign
    double tlmp = 0.0;                    ///< unscaled input T-LMP for this hour
    std::size_t iterations = 0;
    lp::Solution solution;                ///< raw LP solution, kept for re-verification
};

struct ClearingResult {
    std::vector<HourlyClearing> hours;
    double total_welfare = 0.0;
    double mu = 0.0;
    double tlmp_scale = 1.0;
    bool lambda_enabled = true;
    std::vector<std::size_t> unreachable_hours;  ///< set by grid_independent
    std::vector<std::string> warnings;
};

class ClearingError : public std::runtime_error {
public:
    enum class Kind { Infeasible, Unbounded, SolverFailure };

    ClearingError(Kind kind, std::size_t hour, std::vector<std::string> diagnostics);

    Kind kind() const { return kind_; }
    std::size_t hour() const { return hour_; }
    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

private:
    Kind kind_;
    std::size_t hour_;
    std::vector<std::string> diagnostics_;
};

/// Assembles one hour's record from an optimal LP solution.
HourlyClearing read_hour(const ClearingInput& input, const HourlyLp& lp, const lp::Solution& solution,
                         std::size_t hour);

/// Solves one hour; throws ClearingError unless the LP is optimal.
HourlyClearing clear_hour(const ClearingInput& input, std::size_t hour, const lp::SolverOptions& options = {});

/// Solves every hour independently. Throws std::invalid_argument on invalid input.
ClearingResult clear(const ClearingInput& input, const lp::SolverOptions& options = {});

/// Clears with mu = 0: imports are priced purely at the (scaled) T-LMP.
ClearingResult grid_following(const ClearingInput& input, const lp::SolverOptions& options = {});

/// Clears with a large penalty and records hours whose schedule could not be met.
ClearingResult grid_independent(const ClearingInput& input, double large_mu = kLargePenalty,
                                const lp::SolverOptions& options = {}, double tol = 1e-6);

}  // namespace dmo
