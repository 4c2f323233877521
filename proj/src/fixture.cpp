#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "dmo/scenarios.hpp"

namespace dmo {

namespace {

constexpr std::array<std::pair<int, int>, 12> kLines{{
    {1, 3}, {3, 2}, {2, 13}, {3, 4}, {4, 5}, {3, 8}, {8, 6}, {6, 7}, {6, 9}, {8, 10}, {8, 11}, {11, 12},
}};

std::string line_key(int from, int to) { return fmt::format("{}-{}", from, to); }

}  // namespace

std::vector<std::pair<int, int>> fixture_line_labels() { return {kLines.begin(), kLines.end()}; }

FixtureConfig default_fixture_config() {
    FixtureConfig cfg;
    cfg.benefits = {
        {2, {52, 44, 36, 28}},  {3, {50, 41, 33, 25}},  {5, {48, 40, 31, 23}},
        {6, {55, 46, 37, 27}},  {7, {53, 45, 35, 26}},  {10, {51, 42, 34, 24}},
        {11, {49, 43, 32, 22}}, {12, {54, 47, 38, 29}}, {13, {47, 39, 30, 21}},
    };
    // Spot loads of the standard feeder in MW; the 632-671 distributed load is lumped at 671.
    cfg.fixed_peak = {
        {2, 0.170}, {5, 0.400}, {7, 0.128}, {8, 1.355}, {9, 0.170}, {11, 0.170}, {12, 0.843}, {13, 0.230},
    };
    cfg.load_shape = {0.62, 0.58, 0.56, 0.55, 0.56, 0.61, 0.70, 0.79, 0.85, 0.88, 0.90, 0.92,
                      0.93, 0.94, 0.95, 0.97, 0.99, 1.00, 0.98, 0.93, 0.86, 0.78, 0.71, 0.66};
    // Hundredths digits are odd and never 5, so no sweep scale in 0.1 or 0.2 steps
    // lands a scaled price exactly on an integer benefit.
    cfg.tlmp = {24.13, 22.81, 21.97, 21.53, 22.07, 23.61, 27.43, 31.87, 34.21, 35.53, 36.39, 37.91,
                38.63, 39.41, 40.87, 42.33, 43.71, 44.97, 41.29, 37.57, 33.93, 30.61, 27.83, 25.77};
    cfg.line_caps = {{"3-8", 24.0}, {"4-5", 6.0}};
    return cfg;
}

FixtureConfig load_fixture_config(const std::filesystem::path& path) {
    FixtureConfig cfg = default_fixture_config();
    YAML::Node root;
    try {
        root = YAML::LoadFile(path.string());
    } catch (const YAML::Exception& e) {
        throw std::invalid_argument(fmt::format("{}: {}", path.string(), e.what()));
    }
    try {
        if (auto n = root["customer_capacity"]) cfg.customer_capacity = n.as<double>();
        if (auto n = root["segments_per_customer"]) cfg.segments_per_customer = n.as<std::size_t>();
        if (auto n = root["benefits"]) {
            for (const auto& kv : n) cfg.benefits[kv.first.as<int>()] = kv.second.as<std::vector<double>>();
        }
        if (auto n = root["fixed_peak"]) {
            for (const auto& kv : n) cfg.fixed_peak[kv.first.as<int>()] = kv.second.as<double>();
        }
        if (auto n = root["load_shape"]) cfg.load_shape = n.as<std::vector<double>>();
        if (auto n = root["tlmp"]) cfg.tlmp = n.as<std::vector<double>>();
        if (auto n = root["line_caps"]) {
            for (const auto& kv : n) cfg.line_caps[kv.first.as<std::string>()] = kv.second.as<double>();
        }
    } catch (const YAML::Exception& e) {
        throw std::invalid_argument(fmt::format("{}:{}: {}", path.string(), e.mark.line + 1, e.msg));
    }
    return cfg;
}

ClearingInput ieee13_fixture(const FixtureConfig& cfg) {
    const std::size_t horizon = cfg.tlmp.size();
    if (cfg.load_shape.size() != horizon) {
        throw std::invalid_argument(fmt::format("fixture: load_shape has {} entries, tlmp has {}",
                                                cfg.load_shape.size(), horizon));
    }
    if (cfg.segments_per_customer == 0) throw std::invalid_argument("fixture: segments_per_customer must be > 0");

    ClearingInput in;
    for (int label = 1; label <= static_cast<int>(kFixtureBuses); ++label) in.network.buses.push_back(bus_from_label(label));

    std::map<std::string, double> unused_caps = cfg.line_caps;
    std::uint32_t id = 0;
    for (const auto& [from, to] : kLines) {
        const std::string key = line_key(from, to);
        double cap = kUnlimitedCapacity;
        if (auto it = unused_caps.find(key); it != unused_caps.end()) {
            cap = it->second;
            unused_caps.erase(it);
        }
        in.network.lines.push_back({id++, bus_from_label(from), bus_from_label(to), cap});
    }
    if (!unused_caps.empty()) {
        throw std::invalid_argument("fixture: line_caps names unknown line " + unused_caps.begin()->first);
    }

    const double seg_cap = cfg.customer_capacity / static_cast<double>(cfg.segments_per_customer);
    for (int label : kMicrogridLabels) {
        auto it = cfg.benefits.find(label);
        if (it == cfg.benefits.end()) throw std::invalid_argument(fmt::format("fixture: no benefits for bus {}", label));
        if (it->second.size() != cfg.segments_per_customer) {
            throw std::invalid_argument(fmt::format("fixture: bus {} has {} benefits, expected {}", label,
                                                    it->second.size(), cfg.segments_per_customer));
        }
        CustomerBid bid{bus_from_label(label), {}};
        for (double b : it->second) bid.segments.push_back({b, seg_cap});
        in.bids.push_back(std::move(bid));
    }
    for (const auto& [label, _] : cfg.benefits) {
        if (std::find(kMicrogridLabels.begin(), kMicrogridLabels.end(), label) == kMicrogridLabels.end()) {
            throw std::invalid_argument(fmt::format("fixture: bus {} is not a microgrid bus", label));
        }
    }

    in.fixed = FixedLoadSeries(horizon);
    for (const auto& [label, peak] : cfg.fixed_peak) {
        if (label < 1 || label > static_cast<int>(kFixtureBuses)) {
            throw std::invalid_argument(fmt::format("fixture: fixed load at unknown bus {}", label));
        }
        std::vector<double> profile(horizon);
        for (std::size_t t = 0; t < horizon; ++t) profile[t] = peak * cfg.load_shape[t];
        in.fixed.set(bus_from_label(label), std::move(profile));
    }
    in.tlmp.price = cfg.tlmp;
    in.assigned.power.assign(horizon, 0.0);
    in.assigned = baseline_assignment(in);
    return in;
}

ClearingInput ieee13_fixture(const std::filesystem::path& config_path) {
    return ieee13_fixture(load_fixture_config(config_path));
}

}  // namespace dmo
