#include "dmo/cli.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "dmo/io.hpp"
#include "dmo/scenarios.hpp"
#include "dmo/settlement.hpp"

namespace dmo::cli {

namespace {

struct InputFlags {
    std::string network, bids, fixed, tlmp, assigned;
    double mu = 0.0;
    double scale = 1.0;
    bool no_lambda = false;
    bool allow_negative_assigned = false;
    std::size_t hours = kDefaultHorizon;
    std::size_t max_iterations = 10'000;
    double tol_feas = 1e-9;
    double tol_opt = 1e-9;
    std::string trace;

    void add_files(CLI::App* app, bool network_required) {
        auto* n = app->add_option("--network", network, "network YAML file");
        if (network_required) n->required();
        app->add_option("--bids", bids, "bids YAML file");
        app->add_option("--fixed", fixed, "fixed-load CSV (hour,bus,load)");
        app->add_option("--tlmp", tlmp, "T-LMP CSV (hour,price)");
        app->add_option("--assigned", assigned, "assigned-power CSV (hour,power); baseline when omitted");
        app->add_option("--hours", hours, "horizon length")->check(CLI::PositiveNumber);
        app->add_flag("--allow-negative-assigned", allow_negative_assigned, "accept negative assigned power");
    }

    void add_market(CLI::App* app) {
        app->add_option("--mu", mu, "deviation penalty ($/MWh)")->check(CLI::NonNegativeNumber);
        app->add_option("--scale", scale, "T-LMP scaling factor")->check(CLI::NonNegativeNumber);
        app->add_flag("--no-lambda", no_lambda, "drop the import-cost term from the objective");
    }

    void add_solver(CLI::App* app) {
        app->add_option("--max-iterations", max_iterations, "simplex iteration limit")->check(CLI::PositiveNumber);
        app->add_option("--tol-feas", tol_feas, "primal feasibility tolerance")->check(CLI::PositiveNumber);
        app->add_option("--tol-opt", tol_opt, "optimality tolerance")->check(CLI::PositiveNumber);
        app->add_option("--trace", trace, "append simplex tableau dumps to this file");
    }

    io::RunConfig config() const {
        io::RunConfig cfg;
        cfg.network = network;
        cfg.bids = bids;
        cfg.fixed = fixed;
        cfg.tlmp = tlmp;
        cfg.assigned = assigned;
        cfg.mu = mu;
        cfg.tlmp_scale = scale;
        cfg.lambda_enabled = !no_lambda;
        cfg.allow_negative_assigned = allow_negative_assigned;
        cfg.horizon = hours;
        cfg.solver.max_iterations = max_iterations;
        cfg.solver.tol_feas = tol_feas;
        cfg.solver.tol_opt = tol_opt;
        return cfg;
    }
};

void print_report(const ValidationReport& rep, std::ostream& out) {
    for (const auto& e : rep.errors) out << "error: " << e << '\n';
    for (const auto& w : rep.warnings) out << "warning: " << w << '\n';
}

int cmd_validate(const InputFlags& f, std::ostream& out) {
    const Network net = io::read_network(f.network);
    ValidationReport rep = validate_network(net);
    if (!f.bids.empty()) {
        const auto bids = io::read_bids(f.bids);
        const auto bid_rep = validate_bids(net, bids);
        rep.errors.insert(rep.errors.end(), bid_rep.errors.begin(), bid_rep.errors.end());
        out << fmt::format("{} customers, {} segments\n", bids.size(),
                           std::accumulate(bids.begin(), bids.end(), std::size_t{0},
                                           [](std::size_t a, const CustomerBid& b) { return a + b.segments.size(); }));
    }
    out << fmt::format("{} buses, {} lines, {}\n", net.num_buses(), net.num_lines(),
                       is_tree(net) ? "radial" : "meshed");
    print_report(rep, out);
    out << (rep.ok() ? "valid\n" : "invalid\n");
    return rep.ok() ? kOk : kInputError;
}

int cmd_solve(const InputFlags& f, const std::string& basis_name, const std::string& out_dir, std::ostream& out) {
    io::RunConfig cfg = f.config();
    std::ofstream trace_file;
    if (!f.trace.empty()) {
        trace_file.open(f.trace, std::ios::app);
        cfg.solver.trace = &trace_file;
    }
    cfg.basis = basis_name == "assigned" ? PaymentBasis::Assigned : PaymentBasis::Actual;
    const ClearingInput input = io::load_inputs(cfg);
    const ClearingResult result = clear(input, cfg.solver);
    const SettlementReport report = settle(result, input.tlmp, cfg.basis, &input.assigned);
    io::emit_results(input, result, report, out_dir);

    for (const auto& w : result.warnings) out << "warning: " << w << '\n';
    out << fmt::format("hours: {}\nwelfare: {:.6f}\ncustomer_total: {:.6f}\nutility_payment: {:.6f}\nsurplus: {:.6f}\n",
                       result.hours.size(), result.total_welfare, report.customer_total, report.utility_payment,
                       report.surplus);
    out << "results written to " << out_dir << '\n';
    return kOk;
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw io::InputError("--values: not a number '" + item + "'");
        }
    }
    if (values.empty()) throw io::InputError("--values: empty list");
    return values;
}

int cmd_sweep(const InputFlags& f, int case_id, const std::string& param, const std::string& values_text,
              const std::string& fixture_config, bool serial, const std::string& out_dir, std::ostream& out) {
    io::RunConfig cfg = f.config();
    ClearingInput base;
    if (!f.network.empty()) {
        base = io::load_inputs(cfg);
    } else {
        base = fixture_config.empty() ? ieee13_fixture() : ieee13_fixture(std::filesystem::path(fixture_config));
        base.mu = f.mu;
        base.tlmp_scale = f.scale;
    }

    SweepSpec spec;
    spec.base = base;
    spec.lambda_enabled = !f.no_lambda;
    if (case_id != 0) {
        switch (case_id) {
            case 1:
                spec.parameter = SweepParameter::TlmpScale;
                spec.values = default_case1_scales();
                spec.base.mu = 0.0;
                spec.lambda_enabled = true;
                break;
            case 2:
                spec.parameter = SweepParameter::Mu;
                spec.values = default_case2_mus();
                spec.lambda_enabled = false;
                break;
            case 3:
                spec.parameter = SweepParameter::TlmpScale;
                spec.values = default_case3_scales();
                spec.base.mu = 1.0;
                spec.lambda_enabled = true;
                break;
            default: throw io::InputError(fmt::format("--case must be 1, 2 or 3 (got {})", case_id));
        }
    } else {
        if (param == "scale") spec.parameter = SweepParameter::TlmpScale;
        else if (param == "mu") spec.parameter = SweepParameter::Mu;
        else throw io::InputError("sweep needs --case or --param {scale|mu}");
        if (values_text.empty()) throw io::InputError("--param requires --values");
    }
    if (!values_text.empty()) spec.values = parse_values(values_text);

    const SweepResult sweep = run_sweep(spec, !serial, cfg.solver);
    io::emit_sweep(sweep, out_dir);
    out << fmt::format("{} sweep over {} values written to {}\n", to_string(spec.parameter), sweep.rows.size(),
                       (std::filesystem::path(out_dir) / "sweep.csv").string());
    return kOk;
}

int cmd_fixture(const std::string& config, const std::string& out_dir, std::ostream& out) {
    const ClearingInput input = config.empty() ? ieee13_fixture() : ieee13_fixture(std::filesystem::path(config));
    io::write_input_set(out_dir, input);
    out << "IEEE 13-bus fixture written to " << out_dir << '\n';
    return kOk;
}

int cmd_kkt(const InputFlags& f, const std::string& solution_path, double tol, std::ostream& out) {
    const io::SavedSolution saved = io::read_solution(solution_path);
    io::RunConfig cfg = f.config();
    cfg.mu = saved.mu;
    cfg.tlmp_scale = saved.tlmp_scale;
    cfg.lambda_enabled = saved.lambda_enabled;
    const ClearingInput input = io::load_inputs(cfg);
    bool all_ok = true;
    for (const auto& sh : saved.hours) {
        if (sh.hour >= input.horizon()) throw io::InputError(solution_path + ": hour out of range");
        const HourlyLp hlp = build_hourly_lp(input, sh.hour);
        if (sh.solution.primal.size() != hlp.problem.num_variables() ||
            sh.solution.duals.size() != hlp.problem.num_constraints()) {
            throw io::InputError(fmt::format("{}: hour {} does not match the rebuilt LP dimensions", solution_path, sh.hour));
        }
        const lp::KktReport rep = lp::check_kkt(hlp.problem, sh.solution, tol);
        all_ok = all_ok && rep.passed && sh.solution.status == lp::Status::Optimal;
        out << fmt::format("hour {:2d}: {} primal={:.3e} dual={:.3e} compl={:.3e} gap={:.3e}\n", sh.hour,
                           rep.passed ? "PASS" : "FAIL", rep.primal_violation, rep.dual_violation,
                           rep.complementarity_violation, rep.duality_gap);
    }
    out << (all_ok ? "solution certified\n" : "solution NOT certified\n");
    return all_ok ? kOk : kSolverFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Distribution market clearing and settlement"};
    app.name("dmo");
    app.require_subcommand(1);

    InputFlags flags;
    std::string out_dir = ".";
    std::string basis = "actual";
    std::string solution_path;
    std::string fixture_config;
    std::string param;
    std::string values;
    int case_id = 0;
    bool serial = false;
    double kkt_tol = 1e-9;

    auto* validate = app.add_subcommand("validate", "check network and bids files");
    validate->add_option("--network", flags.network, "network YAML file")->required();
    validate->add_option("--bids", flags.bids, "bids YAML file");

    auto* solve = app.add_subcommand("solve", "clear all hours, settle, and write results");
    flags.add_files(solve, true);
    flags.add_market(solve);
    flags.add_solver(solve);
    solve->add_option("--basis", basis, "utility payment basis")->check(CLI::IsMember({"actual", "assigned"}));
    solve->add_option("--out", out_dir, "output directory");

    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep (IEEE 13-bus fixture unless --network is given)");
    flags.add_files(sweep, false);
    flags.add_market(sweep);
    flags.add_solver(sweep);
    auto* case_opt = sweep->add_option("--case", case_id, "reproduce case 1, 2 or 3")->check(CLI::Range(1, 3));
    sweep->add_option("--param", param, "swept parameter")->check(CLI::IsMember({"scale", "mu"}))->excludes(case_opt);
    sweep->add_option("--values", values, "comma-separated ascending values");
    sweep->add_option("--fixture-config", fixture_config, "fixture override YAML");
    sweep->add_flag("--serial", serial, "evaluate sweep points one at a time");
    sweep->add_option("--out", out_dir, "output directory");

    auto* fixture = app.add_subcommand("fixture", "write the IEEE 13-bus input files");
    fixture->add_option("--config", fixture_config, "fixture override YAML");
    fixture->add_option("--out", out_dir, "output directory");

    auto* kkt = app.add_subcommand("kkt", "re-verify a saved solution.json against its inputs");
    flags.add_files(kkt, true);
    kkt->add_option("--solution", solution_path, "solution.json written by solve")->required();
    kkt->add_option("--tol", kkt_tol, "KKT tolerance")->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kInputError;
    }

    try {
        if (*validate) return cmd_validate(flags, out);
        if (*solve) return cmd_solve(flags, basis, out_dir, out);
        if (*sweep) return cmd_sweep(flags, case_id, param, values, fixture_config, serial, out_dir, out);
        if (*fixture) return cmd_fixture(fixture_config, out_dir, out);
        if (*kkt) return cmd_kkt(flags, solution_path, kkt_tol, out);
    } catch (const ClearingError& e) {
        err << "error: " << e.what() << '\n';
        return e.kind() == ClearingError::Kind::Infeasible ? kInfeasible : kSolverFailure;
    } catch (const io::InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kSolverFailure;
    }
    return kInputError;
}

}  // namespace dmo::cli
