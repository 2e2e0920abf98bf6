#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chernoff/errors.hpp"
#include "chernoff/rates.hpp"

using namespace chernoff;

namespace {

std::vector<ConvergenceRow> power_law_rows(double C, double p,
                                           const std::vector<double>& ns) {
    std::vector<ConvergenceRow> rows;
    for (double n : ns) rows.push_back({n, C * std::pow(n, -p), std::nullopt});
    return rows;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("log-log fit recovers exact power laws") {
    OrderFit fit = fit_order(power_law_rows(3.0, 1.5, {1, 2, 4, 8, 16, 32}));
    CHECK(fit.order == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.rows_used == 6);
    CHECK(fit.n_min == doctest::Approx(1.0));
    CHECK(fit.n_max == doctest::Approx(32.0));

    OrderFit slow = fit_order(power_law_rows(0.7, 0.25, {4, 16, 64, 256}));
    CHECK(slow.order == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("noise floor excludes contaminated rows from the fit") {
    std::vector<ConvergenceRow> rows = power_law_rows(1.0, 2.0, {1, 2, 4, 8, 16, 32});
    // rows at n = 16, 32 have errors 3.9e-3 and 9.8e-4; a floor of 1e-4
    // removes only the last one (10x rule), keeping five rows
    OrderFit fit = fit_order(rows, 1e-4);
    CHECK(fit.rows_used == 5);
    CHECK(fit.order == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("too few usable rows raises the dedicated error") {
    std::vector<ConvergenceRow> rows = power_law_rows(1.0, 1.0, {1, 2, 4});
    CHECK_THROWS_AS((void)fit_order(rows), InsufficientDataError);
    // enough rows, but the floor eats all of them
    std::vector<ConvergenceRow> floored =
        power_law_rows(1e-12, 1.0, {1, 2, 4, 8, 16});
    CHECK_THROWS_AS((void)fit_order(floored, 1e-9), InsufficientDataError);
}

TEST_CASE("bound tracking reports slack and violations") {
    std::vector<ConvergenceRow> rows;
    for (double n : {1.0, 2.0, 4.0, 8.0})
        rows.push_back({n, 1.0 / n, 2.0 / n});
    BoundTrack track = track_bound(rows);
    CHECK(track.violations.empty());
    CHECK(track.min_slack == doctest::Approx(2.0 / 8.0 - 1.0 / 8.0).epsilon(1e-12));
    CHECK(track.all_hold());

    rows.push_back({16.0, 0.5, 0.25});  // error above its bound
    BoundTrack bad = track_bound(rows);
    REQUIRE(bad.violations.size() == 1);
    CHECK(bad.violations[0] == 4);
    CHECK(bad.min_slack == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(!bad.all_hold());
}

TEST_CASE("convergence CSV round trip") {
    std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "chernoff_rates_test";
    std::filesystem::create_directories(dir);
    std::string path = (dir / "report.csv").string();

    ConvergenceReport rep;
    rep.scheme = "power-law-demo";
    rep.rows = {{1.0, 0.5, 1.0}, {2.0, 0.25, 0.5}, {4.0, 0.125, std::nullopt}};
    write_convergence_csv(path, rep);

    std::string text = read_file(path);
    CHECK(text.rfind("# generated ", 0) == 0);
    CHECK(text.find("n,error,bound\n") != std::string::npos);

    ConvergenceReport back = read_convergence_csv(path);
    REQUIRE(back.rows.size() == 3);
    CHECK(back.rows[0].n == 1.0);
    CHECK(back.rows[0].error == 0.5);
    REQUIRE(back.rows[1].bound.has_value());
    CHECK(*back.rows[1].bound == 0.5);
    CHECK(!back.rows[2].bound.has_value());

    // full double precision survives the round trip
    ConvergenceReport precise;
    precise.scheme = "precision";
    precise.rows = {{3.0, 0.1234567890123456789, std::nullopt},
                    {5.0, 1.0 / 3.0, 2.0 / 7.0},
                    {7.0, 1e-17, std::nullopt},
                    {11.0, 6.02214076e23, std::nullopt}};
    write_convergence_csv(path, precise);
    ConvergenceReport precise_back = read_convergence_csv(path);
    REQUIRE(precise_back.rows.size() == 4);
    for (size_t i = 0; i < 4; ++i) {
        CHECK(precise_back.rows[i].error == precise.rows[i].error);
        CHECK(precise_back.rows[i].n == precise.rows[i].n);
    }
    CHECK(*precise_back.rows[1].bound == 2.0 / 7.0);

    std::filesystem::remove_all(dir);
}

TEST_CASE("csv writes are atomic into fresh directories") {
    std::filesystem::path dir = std::filesystem::temp_directory_path()
                              / "chernoff_rates_test_nested" / "a" / "b";
    std::filesystem::remove_all(dir.parent_path().parent_path());
    std::string path = (dir / "r.csv").string();
    ConvergenceReport rep;
    rep.scheme = "x";
    rep.rows = {{1.0, 1.0, std::nullopt}};
    write_convergence_csv(path, rep);
    CHECK(std::filesystem::exists(path));
    // no stray temporary left behind
    size_t entries = 0;
    for (auto& e : std::filesystem::directory_iterator(dir)) {
        (void)e;
        ++entries;
    }
    CHECK(entries == 1);
    std::filesystem::remove_all(dir.parent_path().parent_path());
}
