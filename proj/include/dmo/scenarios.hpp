#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dmo/clearing.hpp"
#include "dmo/settlement.hpp"

namespace dmo {

// ---------------------------------------------------------------------------
// IEEE 13-bus fixture
//
// Buses carry the feeder's 1..13 labels externally; internally label k is bus k-1,
// so the feeder head (label 1, node 650) is the interface bus 0.
//
//   label  node   label  node   label  node
//     1    650      6    684     11    692
//     2    645      7    652     12    675
//     3    632      8    671     13    646
//     4    633      9    611
//     5    634     10    680
//
// Lines (by label): 1-3, 3-2, 2-13, 3-4, 4-5, 3-8, 8-6, 6-7, 6-9, 8-10, 8-11, 11-12.
// Lines 3-8 and 4-5 get reduced capacities; every other line uses the unlimited
// sentinel. Benefits, fixed-load magnitudes, reduced caps and the T-LMP day
// profile are illustrative defaults, not measured data.
// ---------------------------------------------------------------------------

inline constexpr std::size_t kFixtureBuses = 13;
inline constexpr std::array<int, 9> kMicrogridLabels{2, 3, 5, 6, 7, 10, 11, 12, 13};

constexpr BusId bus_from_label(int label) { return BusId{static_cast<std::uint32_t>(label - 1)}; }
constexpr int label_of(BusId bus) { return static_cast<int>(bus.value) + 1; }

struct FixtureConfig {
    /// Total bid width per microgrid (MW), split evenly over the segments.
    double customer_capacity = 10.0;
    std::size_t segments_per_customer = 4;
    /// Benefit ladder per microgrid label ($/MWh), non-increasing, one entry per segment.
    std::map<int, std::vector<double>> benefits;
    /// Peak fixed load per bus label (MW).
    std::map<int, double> fixed_peak;
    /// Hourly multiplier applied to every fixed-load peak.
    std::vector<double> load_shape;
    /// Hourly T-LMP ($/MWh).
    std::vector<double> tlmp;
    /// Line capacities keyed by "from-to" labels; absent lines use the sentinel.
    std::map<std::string, double> line_caps;
};

FixtureConfig default_fixture_config();

/// Reads a YAML config; absent keys keep their defaults.
FixtureConfig load_fixture_config(const std::filesystem::path& path);

/// Builds the fixture with the assigned-power series set by baseline_assignment.
ClearingInput ieee13_fixture(const FixtureConfig& config = default_fixture_config());
ClearingInput ieee13_fixture(const std::filesystem::path& config_path);

/// Labels of the fixture lines in network order, e.g. {3, 8} for line 3-8.
std::vector<std::pair<int, int>> fixture_line_labels();

/// PD^M taken as the import profile of a mu = 0 clear at tlmp_scale = 1.
AssignedPowerSeries baseline_assignment(const ClearingInput& input, const lp::SolverOptions& options = {});

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

enum class SweepParameter { TlmpScale, Mu };

std::string to_string(SweepParameter p);

struct SweepSpec {
    SweepParameter parameter = SweepParameter::TlmpScale;
    std::vector<double> values;  ///< non-empty, finite, ascending
    ClearingInput base;
    bool lambda_enabled = true;
};

struct SweepRow {
    double value = 0.0;
    std::vector<double> avg_dlmp;  ///< per bus position, $/MWh
    double total_abs_deviation = 0.0;  ///< MWh over the horizon
    double total_import = 0.0;         ///< MWh over the horizon
    double customer_total = 0.0;       ///< C_c
    double utility_payment = 0.0;      ///< C_u
    double deficit = 0.0;              ///< C_c - C_u
    double max_conservation_residual = 0.0;
    /// Largest |interface D-LMP - import price| over the horizon.
    double max_interface_offset = 0.0;
};

struct SweepResult {
    SweepParameter parameter = SweepParameter::TlmpScale;
    std::vector<BusId> buses;
    std::vector<SweepRow> rows;
};

/// Arithmetic mean over hours, per bus. Every hour must carry the same bus count.
std::vector<double> daily_average(const std::vector<std::vector<double>>& prices_by_hour);

/// Clears and settles one sweep point. Settlement uses the scaled T-LMP when the
/// price term is active and the raw T-LMP otherwise.
SweepRow evaluate_point(const ClearingInput& input, double value, const lp::SolverOptions& options = {});

/// Evaluates every value (concurrently when `parallel`); rows come back in value order.
SweepResult run_sweep(const SweepSpec& spec, bool parallel = true, const lp::SolverOptions& options = {});

std::vector<double> default_case1_scales();
std::vector<double> default_case2_mus();
std::vector<double> default_case3_scales();

SweepResult case1_sweep(const ClearingInput& input, const std::vector<double>& scales = default_case1_scales());
SweepResult case2_sweep(const ClearingInput& input, const std::vector<double>& mus = default_case2_mus());
SweepResult case3_sweep(const ClearingInput& input, const std::vector<double>& scales = default_case3_scales(),
                        double mu = 1.0);

}  // namespace dmo
