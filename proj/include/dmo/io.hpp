#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmo/clearing.hpp"
#include "dmo/scenarios.hpp"
#include "dmo/settlement.hpp"

namespace dmo::io {

namespace fs = std::filesystem;

/// Malformed or invalid input. The message names the file, line (when known) and field.
class InputError : public std::runtime_error {
public:
    InputError(const fs::path& file, std::size_t line, const std::string& field, const std::string& what);
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
    fs::path network;   ///< YAML, required
    fs::path bids;      ///< YAML, optional
    fs::path fixed;     ///< CSV hour,bus,load; optional
    fs::path tlmp;      ///< CSV hour,price; required
    fs::path assigned;  ///< CSV hour,power; optional (baseline assignment when absent)
    double mu = 0.0;
    double tlmp_scale = 1.0;
    bool lambda_enabled = true;
    bool allow_negative_assigned = false;
    PaymentBasis basis = PaymentBasis::Actual;
    std::size_t horizon = kDefaultHorizon;
    fs::path out_dir = ".";
    lp::SolverOptions solver;
};

Network read_network(const fs::path& path);
std::vector<CustomerBid> read_bids(const fs::path& path);
FixedLoadSeries read_fixed_loads(const fs::path& path, std::size_t horizon);
TlmpSeries read_tlmp(const fs::path& path, std::size_t horizon);
AssignedPowerSeries read_assigned(const fs::path& path, std::size_t horizon);

/// Parses and validates every referenced file into a clearing input.
ClearingInput load_inputs(const RunConfig& config);

void write_network(const fs::path& path, const Network& network);
void write_bids(const fs::path& path, const std::vector<CustomerBid>& bids);
void write_fixed_loads(const fs::path& path, const FixedLoadSeries& fixed);
void write_tlmp(const fs::path& path, const TlmpSeries& tlmp);
void write_assigned(const fs::path& path, const AssignedPowerSeries& assigned);

/// Writes network.yaml, bids.yaml, fixed_loads.csv, tlmp.csv and assigned.csv.
void write_input_set(const fs::path& dir, const ClearingInput& input);

/// Writes clearing.csv, flows.csv, settlement.csv and solution.json.
void emit_results(const ClearingInput& input, const ClearingResult& result, const SettlementReport& report,
                  const fs::path& out_dir);

/// Writes sweep.csv: one row per sweep value with per-bus average D-LMPs and totals.
void emit_sweep(const SweepResult& sweep, const fs::path& out_dir);

struct SavedHour {
    std::size_t hour = 0;
    lp::Solution solution;
};

struct SavedSolution {
    double mu = 0.0;
    double tlmp_scale = 1.0;
    bool lambda_enabled = true;
    std::vector<SavedHour> hours;
};

void write_solution(const fs::path& path, const ClearingResult& result);
SavedSolution read_solution(const fs::path& path);

}  // namespace dmo::io
