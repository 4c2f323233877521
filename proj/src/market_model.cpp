#include "dmo/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace dmo {

std::string to_string(BusId bus) { return std::to_string(bus.value); }

std::optional<std::size_t> Network::bus_index(BusId bus) const {
    auto it = std::lower_bound(buses.begin(), buses.end(), bus);
    if (it == buses.end() || *it != bus) return std::nullopt;
    return static_cast<std::size_t>(it - buses.begin());
}

void FixedLoadSeries::set(BusId bus, std::vector<double> profile) {
    if (profile.size() != horizon_) {
        throw std::invalid_argument("fixed-load profile for bus " + to_string(bus) + " has " +
                                    std::to_string(profile.size()) + " entries, expected " +
                                    std::to_string(horizon_));
    }
    profiles_[bus] = std::move(profile);
}

double FixedLoadSeries::at(BusId bus, std::size_t hour) const {
    auto it = profiles_.find(bus);
    if (it == profiles_.end()) return 0.0;
    return it->second.at(hour);
}

double FixedLoadSeries::total(std::size_t hour) const {
    double sum = 0.0;
    for (const auto& [bus, profile] : profiles_) sum += profile.at(hour);
    return sum;
}

double AggregatedBid::elastic_capacity() const {
    return std::accumulate(steps.begin(), steps.end(), 0.0,
                           [](double acc, const BidSegment& s) { return acc + s.capacity; });
}

namespace {

// Union-find over dense bus positions.
class Components {
public:
    explicit Components(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[b] = a;
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

ValidationReport validate_network(const Network& network) {
    ValidationReport report;
    if (!std::is_sorted(network.buses.begin(), network.buses.end())) {
        report.errors.push_back("bus list is not sorted by id");
        return report;
    }
    if (std::adjacent_find(network.buses.begin(), network.buses.end()) != network.buses.end()) {
        report.errors.push_back("duplicate bus id");
    }
    if (network.interface_bus != kInterfaceBus) {
        report.errors.push_back("interface bus must be bus 0, got " + to_string(network.interface_bus));
    }
    if (!network.bus_index(kInterfaceBus)) {
        report.errors.push_back("interface bus 0 missing");
    }

    std::set<std::uint32_t> line_ids;
    bool dangling = false;
    for (const auto& line : network.lines) {
        const std::string name = "line " + std::to_string(line.id);
        if (!line_ids.insert(line.id).second) report.errors.push_back("duplicate line id " + std::to_string(line.id));
        if (line.from == line.to) report.errors.push_back(name + ": from_bus equals to_bus");
        if (!(line.capacity > 0.0) || !std::isfinite(line.capacity)) {
            report.errors.push_back(name + ": capacity must be positive and finite");
        }
        for (BusId end : {line.from, line.to}) {
            if (!network.bus_index(end)) {
                report.errors.push_back(name + ": dangling endpoint bus " + to_string(end));
                dangling = true;
            }
        }
    }
    if (dangling || network.buses.empty()) return report;

    Components comps(network.num_buses());
    bool cycle = false;
    for (const auto& line : network.lines) {
        if (line.from == line.to) continue;
        if (!comps.unite(*network.bus_index(line.from), *network.bus_index(line.to))) cycle = true;
    }
    const std::size_t root = comps.find(0);
    for (std::size_t i = 1; i < network.num_buses(); ++i) {
        if (comps.find(i) != root) {
            report.errors.push_back("network is disconnected: bus " + to_string(network.buses[i]) +
                                    " is not reachable from bus " + to_string(network.buses[0]));
            break;
        }
    }
    if (cycle) report.warnings.push_back("network is not a tree (non-radial feeder)");
    return report;
}

bool is_tree(const Network& network) {
    const auto report = validate_network(network);
    return report.ok() && report.warnings.empty() && network.num_lines() + 1 == network.num_buses();
}

ValidationReport validate_bids(const Network& network, const std::vector<CustomerBid>& bids) {
    ValidationReport report;
    for (std::size_t c = 0; c < bids.size(); ++c) {
        const auto& bid = bids[c];
        const std::string who = "bid " + std::to_string(c) + " at bus " + to_string(bid.bus);
        if (!network.bus_index(bid.bus)) report.errors.push_back(who + ": bus not in network");
        for (std::size_t g = 0; g < bid.segments.size(); ++g) {
            const auto& seg = bid.segments[g];
            if (!std::isfinite(seg.benefit)) {
                report.errors.push_back(who + ": segment " + std::to_string(g) + " benefit not finite");
            }
            if (!(seg.capacity >= 0.0) || !std::isfinite(seg.capacity)) {
                report.errors.push_back(who + ": segment " + std::to_string(g) +
                                        " capacity must be finite and >= 0");
            }
            if (g > 0 && seg.benefit > bid.segments[g - 1].benefit) {
                report.errors.push_back(who + ": segments not non-increasing (segment " + std::to_string(g) +
                                        " benefit " + std::to_string(seg.benefit) + " > " +
                                        std::to_string(bid.segments[g - 1].benefit) + ")");
            }
        }
    }
    return report;
}

ValidationReport validate_fixed_loads(const Network& network, const FixedLoadSeries& fixed) {
    ValidationReport report;
    for (const auto& [bus, profile] : fixed.profiles()) {
        if (!network.bus_index(bus)) {
            report.errors.push_back("fixed load at undeclared bus " + to_string(bus));
        }
        for (std::size_t t = 0; t < profile.size(); ++t) {
            if (!(profile[t] >= 0.0) || !std::isfinite(profile[t])) {
                report.errors.push_back("fixed load at bus " + to_string(bus) + " hour " + std::to_string(t) +
                                        " must be finite and >= 0");
            }
        }
    }
    return report;
}

ValidationReport validate_tlmp(const TlmpSeries& tlmp, std::size_t horizon) {
    ValidationReport report;
    if (tlmp.price.size() != horizon) {
        report.errors.push_back("T-LMP series: expected " + std::to_string(horizon) + " hourly entries, got " +
                                std::to_string(tlmp.price.size()));
    }
    for (std::size_t t = 0; t < tlmp.price.size(); ++t) {
        if (!std::isfinite(tlmp.price[t])) report.errors.push_back("T-LMP hour " + std::to_string(t) + " not finite");
    }
    return report;
}

ValidationReport validate_assigned(const AssignedPowerSeries& assigned, std::size_t horizon, bool allow_negative) {
    ValidationReport report;
    if (assigned.power.size() != horizon) {
        report.errors.push_back("assigned-power series: expected " + std::to_string(horizon) +
                                " hourly entries, got " + std::to_string(assigned.power.size()));
    }
    for (std::size_t t = 0; t < assigned.power.size(); ++t) {
        const double p = assigned.power[t];
        if (!std::isfinite(p)) {
            report.errors.push_back("assigned power hour " + std::to_string(t) + " not finite");
        } else if (p < 0.0 && !allow_negative) {
            report.errors.push_back("assigned power hour " + std::to_string(t) + " is negative");
        }
    }
    return report;
}

Incidence::Incidence(const Network& network)
    : num_lines_{network.num_lines()}, num_buses_{network.num_buses()} {
    from_.reserve(num_lines_);
    to_.reserve(num_lines_);
    for (const auto& line : network.lines) {
        auto f = network.bus_index(line.from);
        auto t = network.bus_index(line.to);
        if (!f || !t) throw std::invalid_argument("line " + std::to_string(line.id) + " has an undeclared endpoint");
        from_.push_back(*f);
        to_.push_back(*t);
    }
}

int Incidence::at(std::size_t line_pos, std::size_t bus_pos) const {
    if (to_.at(line_pos) == bus_pos) return +1;
    if (from_[line_pos] == bus_pos) return -1;
    return 0;
}

Incidence incidence(const Network& network) { return Incidence(network); }

AggregatedBid aggregate_bid(const std::vector<CustomerBid>& bids, const FixedLoadSeries& fixed, std::size_t hour) {
    AggregatedBid agg;
    agg.hour = hour;
    agg.inelastic_block = fixed.total(hour);

    std::vector<BidSegment> all;
    for (const auto& bid : bids) all.insert(all.end(), bid.segments.begin(), bid.segments.end());
    std::stable_sort(all.begin(), all.end(),
                     [](const BidSegment& a, const BidSegment& b) { return a.benefit > b.benefit; });
    for (const auto& seg : all) {
        if (!agg.steps.empty() && agg.steps.back().benefit == seg.benefit) {
            agg.steps.back().capacity += seg.capacity;
        } else {
            agg.steps.push_back(seg);
        }
    }
    return agg;
}

}  // namespace dmo
