#include "dmo/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "json.hpp"

namespace dmo::io {

InputError::InputError(const fs::path& file, std::size_t line, const std::string& field, const std::string& what)
    : std::runtime_error(line > 0 ? fmt::format("{}:{}: {}: {}", file.string(), line, field, what)
                                  : fmt::format("{}: {}: {}", file.string(), field, what)) {}

namespace {

// ---- YAML helpers ---------------------------------------------------------

YAML::Node load_yaml(const fs::path& path) {
    if (!fs::exists(path)) throw InputError(path, 0, "file", "not found");
    try {
        return YAML::LoadFile(path.string());
    } catch (const YAML::Exception& e) {
        throw InputError(path, e.mark.line + 1, "syntax", e.msg);
    }
}

std::size_t line_of(const YAML::Node& node) { return node.Mark().line + 1; }

template <typename T>
T field(const fs::path& path, const YAML::Node& parent, const char* key) {
    const YAML::Node n = parent[key];
    if (!n) throw InputError(path, line_of(parent), key, "missing");
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        throw InputError(path, line_of(n), key, "malformed value '" + YAML::Dump(n) + "'");
    }
}

// ---- CSV helpers ----------------------------------------------------------

struct CsvRow {
    std::size_t line = 0;
    std::vector<std::string> cells;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<CsvRow> read_csv(const fs::path& path, const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw InputError(path, 0, "file", "not found or unreadable");
    std::vector<CsvRow> rows;
    std::string text;
    std::size_t lineno = 0;
    bool seen_header = false;
    while (std::getline(in, text)) {
        ++lineno;
        const std::string t = trim(text);
        if (t.empty() || t.front() == '#') continue;
        CsvRow row{lineno, {}};
        std::stringstream ss(t);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.cells.push_back(trim(cell));
        if (!seen_header) {
            seen_header = true;
            if (row.cells != header) {
                std::string expected;
                for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
                throw InputError(path, lineno, "header", "expected '" + expected + "'");
            }
            continue;
        }
        if (row.cells.size() != header.size()) {
            throw InputError(path, lineno, "row",
                             fmt::format("expected {} columns, got {}: '{}'", header.size(), row.cells.size(), t));
        }
        rows.push_back(std::move(row));
    }
    if (!seen_header) throw InputError(path, 0, "header", "file is empty");
    return rows;
}

double parse_number(const fs::path& path, const CsvRow& row, std::size_t col, const std::string& name) {
    const std::string& s = row.cells[col];
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
        throw InputError(path, row.line, name, "not a finite number '" + s + "'");
    }
    return v;
}

std::size_t parse_index(const fs::path& path, const CsvRow& row, std::size_t col, const std::string& name) {
    const double v = parse_number(path, row, col, name);
    if (v < 0.0 || v != std::floor(v)) throw InputError(path, row.line, name, "not a non-negative integer '" + row.cells[col] + "'");
    return static_cast<std::size_t>(v);
}

std::vector<double> read_hourly(const fs::path& path, std::size_t horizon, const std::string& value_name) {
    const auto rows = read_csv(path, {"hour", value_name});
    if (rows.size() != horizon) {
        throw InputError(path, 0, value_name,
                         fmt::format("expected {} hourly entries, got {}", horizon, rows.size()));
    }
    std::vector<double> values(horizon);
    std::vector<bool> seen(horizon, false);
    for (const auto& row : rows) {
        const std::size_t hour = parse_index(path, row, 0, "hour");
        if (hour >= horizon) throw InputError(path, row.line, "hour", fmt::format("hour {} outside 0..{}", hour, horizon - 1));
        if (seen[hour]) throw InputError(path, row.line, "hour", fmt::format("duplicate hour {}", hour));
        seen[hour] = true;
        values[hour] = parse_number(path, row, 1, value_name);
    }
    return values;
}

std::string num(double v) { return fmt::format("{}", v); }

std::string fixed6(double v) {
    if (std::abs(v) < 5e-7) v = 0.0;
    return fmt::format("{:.6f}", v);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(path, 0, "output", "cannot write file");
    return out;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw InputError(dir, 0, "output", "cannot create directory");
}

std::string join_errors(const ValidationReport& rep) {
    std::string s;
    for (const auto& e : rep.errors) s += (s.empty() ? "" : "; ") + e;
    return s;
}

}  // namespace

Network read_network(const fs::path& path) {
    const YAML::Node root = load_yaml(path);
    Network net;
    net.interface_bus = BusId{field<std::uint32_t>(path, root, "interface_bus")};
    for (auto b : field<std::vector<std::uint32_t>>(path, root, "buses")) net.buses.push_back(BusId{b});
    std::sort(net.buses.begin(), net.buses.end());
    const YAML::Node lines = root["lines"];
    if (!lines || !lines.IsSequence()) throw InputError(path, line_of(root), "lines", "missing or not a list");
    for (const auto& n : lines) {
        Line line;
        line.id = field<std::uint32_t>(path, n, "id");
        line.from = BusId{field<std::uint32_t>(path, n, "from")};
        line.to = BusId{field<std::uint32_t>(path, n, "to")};
        line.capacity = field<double>(path, n, "capacity");
        net.lines.push_back(line);
    }
    const auto rep = validate_network(net);
    if (!rep.ok()) throw InputError(path, 0, "network", join_errors(rep));
    return net;
}

std::vector<CustomerBid> read_bids(const fs::path& path) {
    const YAML::Node root = load_yaml(path);
    const YAML::Node customers = root["customers"];
    if (!customers || !customers.IsSequence()) throw InputError(path, line_of(root), "customers", "missing or not a list");
    std::vector<CustomerBid> bids;
    for (const auto& c : customers) {
        CustomerBid bid;
        bid.bus = BusId{field<std::uint32_t>(path, c, "bus")};
        const YAML::Node segs = c["segments"];
        if (!segs || !segs.IsSequence()) throw InputError(path, line_of(c), "segments", "missing or not a list");
        for (const auto& s : segs) {
            bid.segments.push_back({field<double>(path, s, "benefit"), field<double>(path, s, "capacity")});
        }
        // Shape checks only; bus membership is checked against the network in load_inputs.
        Network any;
        any.buses = {bid.bus};
        const auto rep = validate_bids(any, {bid});
        if (!rep.ok()) {
            std::string record;
            for (const auto& s : bid.segments) record += fmt::format("{}({}, {})", record.empty() ? "" : " ", s.benefit, s.capacity);
            throw InputError(path, line_of(c), "segments", join_errors(rep) + "; record: bus " + to_string(bid.bus) + " " + record);
        }
        bids.push_back(std::move(bid));
    }
    return bids;
}

FixedLoadSeries read_fixed_loads(const fs::path& path, std::size_t horizon) {
    const auto rows = read_csv(path, {"hour", "bus", "load"});
    std::map<BusId, std::vector<double>> profiles;
    std::set<std::pair<std::size_t, std::uint32_t>> seen;
    for (const auto& row : rows) {
        const std::size_t hour = parse_index(path, row, 0, "hour");
        const auto bus = static_cast<std::uint32_t>(parse_index(path, row, 1, "bus"));
        const double load = parse_number(path, row, 2, "load");
        if (hour >= horizon) throw InputError(path, row.line, "hour", fmt::format("hour {} outside 0..{}", hour, horizon - 1));
        if (load < 0.0) throw InputError(path, row.line, "load", "negative fixed load " + row.cells[2]);
        if (!seen.insert({hour, bus}).second) {
            throw InputError(path, row.line, "bus", fmt::format("duplicate entry for hour {} bus {}", hour, bus));
        }
        auto& profile = profiles[BusId{bus}];
        profile.resize(horizon, 0.0);
        profile[hour] = load;
    }
    FixedLoadSeries fixed(horizon);
    for (auto& [bus, profile] : profiles) fixed.set(bus, std::move(profile));
    return fixed;
}

TlmpSeries read_tlmp(const fs::path& path, std::size_t horizon) { return {read_hourly(path, horizon, "price")}; }

AssignedPowerSeries read_assigned(const fs::path& path, std::size_t horizon) {
    return {read_hourly(path, horizon, "power")};
}

ClearingInput load_inputs(const RunConfig& cfg) {
    if (cfg.network.empty()) throw InputError("missing --network file");
    if (cfg.tlmp.empty()) throw InputError("missing --tlmp file");
    if (cfg.horizon == 0) throw InputError("horizon must be positive");
    ClearingInput in;
    in.network = read_network(cfg.network);
    if (!cfg.bids.empty()) in.bids = read_bids(cfg.bids);
    in.fixed = cfg.fixed.empty() ? FixedLoadSeries(cfg.horizon) : read_fixed_loads(cfg.fixed, cfg.horizon);
    in.tlmp = read_tlmp(cfg.tlmp, cfg.horizon);
    in.mu = cfg.mu;
    in.tlmp_scale = cfg.tlmp_scale;
    in.lambda_enabled = cfg.lambda_enabled;
    in.allow_negative_assigned = cfg.allow_negative_assigned;

    const auto bid_rep = validate_bids(in.network, in.bids);
    if (!bid_rep.ok()) throw InputError(cfg.bids, 0, "bus", join_errors(bid_rep));
    const auto fixed_rep = validate_fixed_loads(in.network, in.fixed);
    if (!fixed_rep.ok()) throw InputError(cfg.fixed, 0, "bus", join_errors(fixed_rep));

    if (!cfg.assigned.empty()) {
        in.assigned = read_assigned(cfg.assigned, cfg.horizon);
        const auto rep = validate_assigned(in.assigned, cfg.horizon, cfg.allow_negative_assigned);
        if (!rep.ok()) throw InputError(cfg.assigned, 0, "power", join_errors(rep));
    } else {
        in.assigned.power.assign(cfg.horizon, 0.0);
        in.assigned = baseline_assignment(in, cfg.solver);
    }

    const auto rep = validate_input(in);
    if (!rep.ok()) throw InputError(join_errors(rep));
    return in;
}

void write_network(const fs::path& path, const Network& network) {
    auto out = open_out(path);
    out << "# Distribution network. Lines are directed from -> to; capacity is the\n"
        << "# symmetric flow limit in MW (" << num(kUnlimitedCapacity) << " = unlimited).\n";
    out << "interface_bus: " << network.interface_bus.value << "\n";
    out << "buses: [";
    for (std::size_t i = 0; i < network.buses.size(); ++i) out << (i ? ", " : "") << network.buses[i].value;
    out << "]\nlines:\n";
    for (const auto& l : network.lines) {
        out << fmt::format("  - {{id: {}, from: {}, to: {}, capacity: {}}}\n", l.id, l.from.value, l.to.value,
                           num(l.capacity));
    }
}

void write_bids(const fs::path& path, const std::vector<CustomerBid>& bids) {
    auto out = open_out(path);
    out << "# Customer demand bids. Segment benefits ($/MWh) must be non-increasing;\n"
        << "# capacities in MW.\n";
    out << "customers:" << (bids.empty() ? " []\n" : "\n");
    for (const auto& b : bids) {
        out << "  - bus: " << b.bus.value << "\n    segments:\n";
        for (const auto& s : b.segments) {
            out << fmt::format("      - {{benefit: {}, capacity: {}}}\n", num(s.benefit), num(s.capacity));
        }
    }
}

void write_fixed_loads(const fs::path& path, const FixedLoadSeries& fixed) {
    auto out = open_out(path);
    out << "hour,bus,load\n";
    for (std::size_t t = 0; t < fixed.horizon(); ++t) {
        for (const auto& [bus, profile] : fixed.profiles()) out << t << ',' << bus.value << ',' << num(profile[t]) << '\n';
    }
}

void write_tlmp(const fs::path& path, const TlmpSeries& tlmp) {
    auto out = open_out(path);
    out << "hour,price\n";
    for (std::size_t t = 0; t < tlmp.price.size(); ++t) out << t << ',' << num(tlmp.price[t]) << '\n';
}

void write_assigned(const fs::path& path, const AssignedPowerSeries& assigned) {
    auto out = open_out(path);
    out << "hour,power\n";
    for (std::size_t t = 0; t < assigned.power.size(); ++t) out << t << ',' << num(assigned.power[t]) << '\n';
}

void write_input_set(const fs::path& dir, const ClearingInput& input) {
    ensure_dir(dir);
    write_network(dir / "network.yaml", input.network);
    write_bids(dir / "bids.yaml", input.bids);
    write_fixed_loads(dir / "fixed_loads.csv", input.fixed);
    write_tlmp(dir / "tlmp.csv", input.tlmp);
    write_assigned(dir / "assigned.csv", input.assigned);
}

void emit_results(const ClearingInput& input, const ClearingResult& result, const SettlementReport& report,
                  const fs::path& out_dir) {
    ensure_dir(out_dir);
    const auto& net = input.network;
    {
        auto out = open_out(out_dir / "clearing.csv");
        out << "hour,bus,load,dlmp,p_main,deviation\n";
        for (const auto& h : result.hours) {
            for (std::size_t m = 0; m < net.num_buses(); ++m) {
                out << h.hour << ',' << net.buses[m].value << ',' << fixed6(h.load[m]) << ',' << fixed6(h.dlmp[m]) << ','
                    << fixed6(h.p_main) << ',' << fixed6(h.deviation) << '\n';
            }
        }
    }
    {
        auto out = open_out(out_dir / "flows.csv");
        out << "hour,line,flow\n";
        for (const auto& h : result.hours) {
            for (std::size_t l = 0; l < net.num_lines(); ++l) {
                out << h.hour << ',' << net.lines[l].id << ',' << fixed6(h.flow[l]) << '\n';
            }
        }
    }
    {
        auto out = open_out(out_dir / "settlement.csv");
        out << "bus,payment\n";
        for (std::size_t m = 0; m < net.num_buses(); ++m) {
            const double pay = m < report.payments.by_bus.size() ? report.payments.by_bus[m] : 0.0;
            out << net.buses[m].value << ',' << fixed6(pay) << '\n';
        }
        out << "customer_total," << fixed6(report.customer_total) << '\n';
        out << "utility_payment," << fixed6(report.utility_payment) << '\n';
        out << "surplus," << fixed6(report.surplus) << '\n';
    }
    write_solution(out_dir / "solution.json", result);
}

void emit_sweep(const SweepResult& sweep, const fs::path& out_dir) {
    ensure_dir(out_dir);
    auto out = open_out(out_dir / "sweep.csv");
    out << "sweep_value";
    for (const auto& b : sweep.buses) out << ",avg_dlmp_bus" << b.value;
    out << ",total_abs_deviation,total_import,customer_total,utility_payment,deficit\n";
    for (const auto& row : sweep.rows) {
        out << fixed6(row.value);
        for (double p : row.avg_dlmp) out << ',' << fixed6(p);
        out << ',' << fixed6(row.total_abs_deviation) << ',' << fixed6(row.total_import) << ','
            << fixed6(row.customer_total) << ',' << fixed6(row.utility_payment) << ',' << fixed6(row.deficit) << '\n';
    }
}

void write_solution(const fs::path& path, const ClearingResult& result) {
    nlohmann::json j;
    j["mu"] = result.mu;
    j["tlmp_scale"] = result.tlmp_scale;
    j["lambda_enabled"] = result.lambda_enabled;
    j["hours"] = nlohmann::json::array();
    for (const auto& h : result.hours) {
        j["hours"].push_back({{"hour", h.hour},
                              {"status", lp::to_string(h.solution.status)},
                              {"objective", h.solution.objective},
                              {"primal", h.solution.primal},
                              {"duals", h.solution.duals}});
    }
    auto out = open_out(path);
    out << j.dump(1) << '\n';
}

SavedSolution read_solution(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path, 0, "file", "not found or unreadable");
    SavedSolution saved;
    try {
        const auto j = nlohmann::json::parse(in);
        saved.mu = j.at("mu").get<double>();
        saved.tlmp_scale = j.at("tlmp_scale").get<double>();
        saved.lambda_enabled = j.at("lambda_enabled").get<bool>();
        for (const auto& h : j.at("hours")) {
            SavedHour sh;
            sh.hour = h.at("hour").get<std::size_t>();
            const auto status = h.at("status").get<std::string>();
            sh.solution.status = status == "Optimal" ? lp::Status::Optimal : lp::Status::IterationLimit;
            sh.solution.objective = h.at("objective").get<double>();
            sh.solution.primal = h.at("primal").get<std::vector<double>>();
            sh.solution.duals = h.at("duals").get<std::vector<double>>();
            saved.hours.push_back(std::move(sh));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path, 0, "json", e.what());
    }
    return saved;
}

}  // namespace dmo::io
