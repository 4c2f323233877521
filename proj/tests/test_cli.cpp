#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dmo/cli.hpp"
#include "dmo/io.hpp"
#include "instances.hpp"

using namespace dmo;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.code = cli::run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path fresh(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("dmo_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> input_flags(const fs::path& dir) {
    return {"--network", (dir / "network.yaml").string(), "--bids", (dir / "bids.yaml").string(),
            "--fixed", (dir / "fixed_loads.csv").string(), "--tlmp", (dir / "tlmp.csv").string()};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TEST_CASE("cli: fixture, validate, solve, kkt") {
    const fs::path in = fresh("inputs");
    REQUIRE(run({"fixture", "--out", in.string()}).code == cli::kOk);
    CHECK(fs::exists(in / "network.yaml"));

    const Run v = run({"validate", "--network", (in / "network.yaml").string(), "--bids", (in / "bids.yaml").string()});
    CHECK(v.code == cli::kOk);
    CHECK(v.out.find("13 buses, 12 lines, radial") != std::string::npos);
    CHECK(v.out.find("9 customers, 36 segments") != std::string::npos);

    const fs::path out = fresh("solve");
    const Run s = run(concat({"solve"}, concat(input_flags(in), {"--mu", "0", "--out", out.string()})));
    CHECK(s.code == cli::kOk);
    const std::string clearing = slurp(out / "clearing.csv");
    CHECK(std::count(clearing.begin(), clearing.end(), '\n') == 1 + 24 * 13);

    const Run k = run(concat({"kkt", "--solution", (out / "solution.json").string()}, input_flags(in)));
    CHECK(k.code == cli::kOk);
    CHECK(k.out.find("solution certified") != std::string::npos);
}

TEST_CASE("cli: sweep --case 3 writes nine rows") {
    const fs::path out = fresh("case3");
    const Run r = run({"sweep", "--case", "3", "--out", out.string()});
    CHECK(r.code == cli::kOk);
    const std::string text = slurp(out / "sweep.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 10);

    const fs::path again = fresh("case3_again");
    REQUIRE(run({"sweep", "--case", "3", "--serial", "--out", again.string()}).code == cli::kOk);
    CHECK(slurp(again / "sweep.csv") == text);
}

TEST_CASE("cli: sweep --param with explicit values") {
    const fs::path out = fresh("param");
    CHECK(run({"sweep", "--param", "mu", "--values", "0,1,10", "--no-lambda", "--out", out.string()}).code == cli::kOk);
    const std::string text = slurp(out / "sweep.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    CHECK(run({"sweep", "--param", "mu", "--values", "1,x", "--out", out.string()}).code == cli::kInputError);
    CHECK(run({"sweep", "--param", "mu", "--values", "3,1", "--out", out.string()}).code == cli::kInputError);
    CHECK(run({"sweep", "--out", out.string()}).code == cli::kInputError);
}

TEST_CASE("cli: infeasible fixed load exits 2 and names the line") {
    const fs::path in = fresh("infeasible");
    io::write_input_set(in, testing::two_bus(testing::ladder(), 20.0, 35.0, 0.0, 0.0, 12.0));
    const Run r = run(concat({"solve", "--hours", "1", "--assigned", (in / "assigned.csv").string()},
                             concat(input_flags(in), {"--out", fresh("infeasible_out").string()})));
    CHECK(r.code == cli::kInfeasible);
    CHECK(r.err.find("hour 0") != std::string::npos);
    CHECK(r.err.find("line 0") != std::string::npos);
}

TEST_CASE("cli: usage errors exit 1") {
    Run r = run({"solve", "--bogus"});
    CHECK(r.code == cli::kInputError);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(run({}).code == cli::kInputError);
    CHECK(run({"sweep", "--case", "4"}).code == cli::kInputError);
    CHECK(run({"validate", "--network", "/nonexistent/net.yaml"}).code == cli::kInputError);
    CHECK(run({"solve", "--network", "/nonexistent/net.yaml", "--tlmp", "/nonexistent/t.csv"}).code ==
          cli::kInputError);
}

TEST_CASE("cli: iteration limit is a solver failure") {
    const fs::path in = fresh("iterlimit");
    REQUIRE(run({"fixture", "--out", in.string()}).code == cli::kOk);
    const Run r = run(concat({"solve", "--max-iterations", "1", "--assigned", (in / "assigned.csv").string()},
                             concat(input_flags(in), {"--out", fresh("iterlimit_out").string()})));
    CHECK(r.code == cli::kSolverFailure);
}
