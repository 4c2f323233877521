#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dmo {

/// Identifier of a distribution bus. Bus 0 is the transmission-distribution interface.
struct BusId {
    std::uint32_t value = 0;

    constexpr BusId() = default;
    constexpr explicit BusId(std::uint32_t v) : value{v} {}

    friend constexpr auto operator<=>(BusId, BusId) = default;
};

inline constexpr BusId kInterfaceBus{0};

/// Stand-in capacity for lines without a meaningful thermal limit (MW).
inline constexpr double kUnlimitedCapacity = 1e6;

/// Default number of hourly clearing intervals.
inline constexpr std::size_t kDefaultHorizon = 24;

struct Line {
    std::uint32_t id = 0;
    BusId from;
    BusId to;
    double capacity = kUnlimitedCapacity;  ///< MW, symmetric flow limit
};

struct Network {
    std::vector<BusId> buses;  ///< kept sorted by id
    std::vector<Line> lines;
    BusId interface_bus = kInterfaceBus;

    /// Dense position of `bus` within `buses`, or nullopt if undeclared.
    std::optional<std::size_t> bus_index(BusId bus) const;
    std::size_t num_buses() const { return buses.size(); }
    std::size_t num_lines() const { return lines.size(); }
};

struct BidSegment {
    double benefit = 0.0;   ///< $/MWh
    double capacity = 0.0;  ///< MW
};

/// One customer's staircase demand bid. Benefits must be non-increasing along `segments`.
struct CustomerBid {
    BusId bus;
    std::vector<BidSegment> segments;
};

/// Inelastic demand per bus per hour (MW). Buses without an entry carry no fixed load.
class FixedLoadSeries {
public:
    FixedLoadSeries() = default;
    explicit FixedLoadSeries(std::size_t horizon) : horizon_{horizon} {}

    std::size_t horizon() const { return horizon_; }

    /// Replaces the profile of `bus`; the profile length must equal the horizon.
    void set(BusId bus, std::vector<double> profile);
    double at(BusId bus, std::size_t hour) const;
    double total(std::size_t hour) const;
    const std::map<BusId, std::vector<double>>& profiles() const { return profiles_; }

    friend bool operator==(const FixedLoadSeries&, const FixedLoadSeries&) = default;

private:
    std::size_t horizon_ = kDefaultHorizon;
    std::map<BusId, std::vector<double>> profiles_;
};

/// Hourly T-LMP ($/MWh) at the interface.
struct TlmpSeries {
    std::vector<double> price;
};

/// Hourly power the ISO assigned to the distribution system (MW).
struct AssignedPowerSeries {
    std::vector<double> power;
};

struct AggregatedBid {
    std::size_t hour = 0;
    std::vector<BidSegment> steps;  ///< strictly decreasing benefit
    double inelastic_block = 0.0;   ///< MW

    double elastic_capacity() const;
};

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    bool ok() const { return errors.empty(); }
};

ValidationReport validate_network(const Network& network);

/// Checks bids against the network: declared bus, finite benefits, non-negative
/// capacities, and the non-increasing staircase shape.
ValidationReport validate_bids(const Network& network, const std::vector<CustomerBid>& bids);

/// Rejects negative or non-finite fixed loads and profiles on undeclared buses.
ValidationReport validate_fixed_loads(const Network& network, const FixedLoadSeries& fixed);

ValidationReport validate_tlmp(const TlmpSeries& tlmp, std::size_t horizon);

ValidationReport validate_assigned(const AssignedPowerSeries& assigned, std::size_t horizon,
                                   bool allow_negative = false);

bool is_tree(const Network& network);

/// Bus-line incidence a(l, m) with +1 at the line's to-bus and -1 at its from-bus, so
/// that sum over l of a(l, m) * flow(l) is the net inflow into bus m.
class Incidence {
public:
    explicit Incidence(const Network& network);

    int at(std::size_t line_pos, std::size_t bus_pos) const;
    std::size_t num_lines() const { return num_lines_; }
    std::size_t num_buses() const { return num_buses_; }

private:
    std::size_t num_lines_ = 0;
    std::size_t num_buses_ = 0;
    std::vector<std::size_t> from_;
    std::vector<std::size_t> to_;
};

Incidence incidence(const Network& network);

AggregatedBid aggregate_bid(const std::vector<CustomerBid>& bids, const FixedLoadSeries& fixed,
                            std::size_t hour);

std::string to_string(BusId bus);

}  // namespace dmo
