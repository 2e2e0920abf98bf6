#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "chernoff/errors.hpp"
#include "chernoff/experiments.hpp"

using namespace chernoff;
using json = nlohmann::json;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
    std::filesystem::path dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// strips the leading "# generated ..." line so runs can be compared
std::string without_timestamp(const std::string& csv) {
    size_t nl = csv.find('\n');
    return nl == std::string::npos ? csv : csv.substr(nl + 1);
}

}  // namespace

TEST_CASE("translation-law run produces the documented artifacts") {
    auto dir = fresh_dir("chernoff_exp_translation");
    std::string config = R"({
        "command": "translation-law",
        "params": {
            "f": {"kind": "ramp"},
            "v": {"name": "inv_x"},
            "T": 1.0,
            "n_values": [1, 2, 4, 8]
        }
    })";
    ExperimentOutcome out = run_experiment_json(config, dir.string());
    CHECK(out.all_passed());
    CHECK(out.exit_code() == 0);
    REQUIRE(out.checks.size() >= 2);
    CHECK(out.checks[0].name == "rate-function-shape");
    CHECK(out.checks[1].name == "law-discrepancy");

    std::string csv = read_file(dir / "report.csv");
    CHECK(csv.rfind("# generated ", 0) == 0);
    CHECK(csv.find("n,measured_error,predicted_error,abs_discrepancy\n")
          != std::string::npos);

    json summary = json::parse(read_file(dir / "summary.json"));
    CHECK(summary["command"] == "translation-law");
    CHECK(summary["all_checks_passed"] == true);
    CHECK(summary["versions"]["spec"] == "1");
    CHECK(summary["metrics"]["max_discrepancy"].get<double>() <= 1e-6);
}

TEST_CASE("same config gives identical bytes modulo the timestamp line") {
    auto dir1 = fresh_dir("chernoff_exp_det1");
    auto dir2 = fresh_dir("chernoff_exp_det2");
    std::string config = R"({
        "command": "matrix-identities",
        "seed": 7,
        "params": {
            "telescoping": {"draws": 25},
            "taylor": {"draws": 5},
            "semigroup": {"draws": 5}
        }
    })";
    ExperimentOutcome a = run_experiment_json(config, dir1.string());
    ExperimentOutcome b = run_experiment_json(config, dir2.string());
    CHECK(a.all_passed());
    CHECK(b.all_passed());
    CHECK(without_timestamp(read_file(dir1 / "report.csv"))
          == without_timestamp(read_file(dir2 / "report.csv")));
    CHECK(read_file(dir1 / "summary.json") == read_file(dir2 / "summary.json"));

    json summary = json::parse(read_file(dir1 / "summary.json"));
    CHECK(summary["metrics"]["rng"]["name"] == "mt19937_64");
    CHECK(summary["metrics"]["rng"]["seed"] == 7);
}

TEST_CASE("jobs count does not change translation-law bytes") {
    std::string config = R"({
        "command": "translation-law",
        "params": {
            "f": {"kind": "ramp"},
            "v": {"name": "inv_log"},
            "n_values": [1, 2, 4, 8, 16]
        }
    })";
    auto dir1 = fresh_dir("chernoff_exp_jobs1");
    auto dir2 = fresh_dir("chernoff_exp_jobs2");
    (void)run_experiment_json(config, dir1.string(), 1);
    (void)run_experiment_json(config, dir2.string(), 4);
    CHECK(without_timestamp(read_file(dir1 / "report.csv"))
          == without_timestamp(read_file(dir2 / "report.csv")));
    CHECK(read_file(dir1 / "summary.json") == read_file(dir2 / "summary.json"));
}

TEST_CASE("schema violations carry a JSON pointer") {
    auto dir = fresh_dir("chernoff_exp_usage");
    try {
        (void)run_experiment_json(R"({"command": "no-such-command"})", dir.string());
        FAIL("expected UsageError");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).rfind("/command", 0) == 0);
    }
    try {
        (void)run_experiment_json(
            R"({"command": "translation-law", "params": {"v": {"name": "inv_x"}}})",
            dir.string());
        FAIL("expected UsageError");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).rfind("/params/f", 0) == 0);
    }
    try {
        (void)run_experiment_json(
            R"({"command": "translation-law",
                "params": {"f": {"kind": "nope"}, "v": {"name": "inv_x"},
                           "n_values": [1]}})",
            dir.string());
        FAIL("expected UsageError");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).rfind("/params/f/kind", 0) == 0);
    }
    try {
        (void)run_experiment_json("not json at all", dir.string());
        FAIL("expected UsageError");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).rfind("/:", 0) == 0);
    }
}

TEST_CASE("failing checks map to exit codes 10 plus index") {
    auto dir = fresh_dir("chernoff_exp_exit");
    // an impossible fitted-order window makes the third check fail
    std::string config = R"({
        "command": "translation-law",
        "params": {
            "f": {"kind": "ramp"},
            "v": {"name": "inv_x"},
            "n_values": [1, 2, 4, 8, 16, 32],
            "order_range": [5.0, 6.0]
        }
    })";
    ExperimentOutcome out = run_experiment_json(config, dir.string());
    CHECK(!out.all_passed());
    REQUIRE(out.checks.size() == 3);
    CHECK(out.checks[0].passed);
    CHECK(out.checks[1].passed);
    CHECK(!out.checks[2].passed);
    CHECK(out.exit_code() == 12);

    json summary = json::parse(read_file(dir / "summary.json"));
    CHECK(summary["all_checks_passed"] == false);
}

TEST_CASE("counterexample command verifies the unit gap") {
    auto dir = fresh_dir("chernoff_exp_counter");
    std::string config = R"({
        "command": "translation-counterexample",
        "params": {"t": 1.0, "n_max": 16}
    })";
    ExperimentOutcome out = run_experiment_json(config, dir.string());
    CHECK(out.all_passed());
    std::string csv = read_file(dir / "report.csv");
    CHECK(csv.find("n,error,bound\n") != std::string::npos);
    json summary = json::parse(read_file(dir / "summary.json"));
    CHECK(summary["metrics"]["min_error"].get<double>() >= 1.0 - 1e-9);
    CHECK(summary["metrics"]["max_norm_deviation"].get<double>() <= 1e-12);
}

TEST_CASE("matrix-bound run with an explicit exact-exp system") {
    auto dir = fresh_dir("chernoff_exp_mbound");
    std::string config = R"({
        "command": "matrix-bound",
        "seed": 11,
        "params": {
            "system": {
                "L": [[-0.4, 0.2, 0.0], [0.1, -0.5, 0.1], [0.0, 0.2, -0.3]],
                "S": {"kind": "exact_exp"},
                "m": 1, "M1": 1.0, "w": 0.0, "T": 1.0
            },
            "ts": [0.5, 1.0],
            "ns": [1, 2, 4, 8],
            "f_count": 2
        }
    })";
    ExperimentOutcome out = run_experiment_json(config, dir.string());
    CHECK(out.all_passed());
    REQUIRE(out.checks.size() >= 2);
    CHECK(out.checks[0].name == "standing-hypotheses");
    CHECK(out.checks[1].name == "bound-slack");
    std::string csv = read_file(dir / "report.csv");
    CHECK(csv.find("t,n,f_index,lhs,rhs,slack\n") != std::string::npos);
    json summary = json::parse(read_file(dir / "summary.json"));
    CHECK(summary["metrics"]["min_slack"].get<double>() >= -1e-10);
}

TEST_CASE("matrix-bound preset runs end to end with rate visibility") {
    auto dir = fresh_dir("chernoff_exp_mpreset");
    std::string config = R"({
        "command": "matrix-bound",
        "seed": 7,
        "params": {"preset": "perturbed-taylor", "ns": [1, 2, 4, 8, 16, 32, 64]}
    })";
    ExperimentOutcome out = run_experiment_json(config, dir.string());
    CHECK(out.all_passed());
    bool saw_rate = false;
    for (const auto& c : out.checks) saw_rate = saw_rate || c.name == "rate-visibility";
    CHECK(saw_rate);
}

TEST_CASE("derivative-constants command checks its whole suite") {
    auto dir = fresh_dir("chernoff_exp_deriv");
    std::string config = R"({
        "command": "derivative-constants",
        "params": {
            "a": {"kind": "bounded_smooth_preset", "params": {"base": 1.0, "amp": 0.5}},
            "n_max": 4
        }
    })";
    ExperimentOutcome out = run_experiment_json(config, dir.string());
    for (const auto& c : out.checks) {
        INFO(c.name, ": ", c.detail);
        CHECK(c.passed);
    }
    std::string csv = read_file(dir / "report.csv");
    CHECK(csv.find("n,k,C\n") != std::string::npos);
    json summary = json::parse(read_file(dir / "summary.json"));
    CHECK(summary["metrics"]["C"].is_array());
}

TEST_CASE("modulus-axioms command classifies candidates as expected") {
    auto dir = fresh_dir("chernoff_exp_modulus");
    ExperimentOutcome out =
        run_experiment_json(R"({"command": "modulus-axioms"})", dir.string());
    for (const auto& c : out.checks) {
        INFO(c.name, ": ", c.detail);
        CHECK(c.passed);
    }
    std::string csv = read_file(dir / "report.csv");
    CHECK(csv.find("candidate,") != std::string::npos);
    CHECK(csv.find("quadratic,") != std::string::npos);
}

TEST_CASE("parabolic-rate command on the exact quadratic reports floor-level errors") {
    auto dir = fresh_dir("chernoff_exp_parab");
    std::string config = R"({
        "command": "parabolic-rate",
        "params": {
            "a": {"kind": "constant", "params": {"value": 1.0}},
            "f": {"kind": "polynomial", "params": {"coeffs": [0.0, 0.0, 1.0]}},
            "t": 0.25,
            "window": {"x_lo": -4.0, "x_hi": 4.0},
            "n_values": [1, 2, 4, 8],
            "quality": "fast",
            "target_accuracy": 1e-7
        }
    })";
    ExperimentOutcome out = run_experiment_json(config, dir.string());
    for (const auto& c : out.checks) {
        INFO(c.name, ": ", c.detail);
        CHECK(c.passed);
    }
    std::string csv = read_file(dir / "report.csv");
    CHECK(csv.find("n,h,error_vs_oracle,interpolation_budget,bound_rhs_if_available\n")
          != std::string::npos);
}

TEST_CASE("presets catalog lists the required entries") {
    json catalog = json::parse(presets_catalog_json());
    bool fast_exp = false, slow_log = false;
    for (const auto& entry : catalog["rate_functions"]) {
        if (entry["id"] == "fast:exp_decay") fast_exp = true;
        if (entry["id"] == "slow:inv_log") slow_log = true;
    }
    CHECK(fast_exp);
    CHECK(slow_log);
    CHECK(!catalog["matrix_systems"].empty());
    CHECK(!catalog["parabolic"].empty());
    CHECK(catalog["version"] == "1");
}
