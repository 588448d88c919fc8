#include <doctest.h>

#include <cmath>
#include <sstream>

#include "kdvd/errors.hpp"
#include "kdvd/harness.hpp"

using namespace kdvd;

namespace {

const char* base_text = R"(
[system]
alpha = 2
beta = 1

[delay]
tau0 = 1
M = 1
history = bump 1 100

[grid]
n = 20

[run]
dt = 0.01
horizon = 0.3
)";

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("fit of exact exponential data") {
    std::vector<std::pair<double, double>> s;
    for (int k = 0; k <= 1000; ++k) s.emplace_back(0.01 * k, 5 * std::exp(-0.7 * 0.01 * k));
    const auto f = fit_decay(s);
    CHECK(std::abs(f.lambda_obs - 0.7) < 1e-10);
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(f.t_start == doctest::Approx(5.0));
    CHECK_FALSE(f.truncated);

    for (auto& e : s) e.second = 2.0;
    CHECK(std::abs(fit_decay(s).lambda_obs) < 1e-12);
}

TEST_CASE("fit stops at underflow") {
    std::vector<std::pair<double, double>> s;
    for (int k = 0; k <= 100; ++k) s.emplace_back(0.1 * k, k < 60 ? std::exp(-0.1 * k) : 0.0);
    const auto f = fit_decay(s);
    CHECK(f.truncated);
    CHECK(f.t_end == doctest::Approx(5.9));
    CHECK(f.lambda_obs == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("bound check") {
    std::vector<EnergySample> s(3);
    for (int k = 0; k < 3; ++k) {
        s[k].t = k;
        s[k].E = std::exp(-1.0 * k);
    }
    CHECK(bound_check(s, 1.0, 1.0, 0.02).ok);
    CHECK(bound_check(s, 1.0, 1.0, 0.02).max_ratio == doctest::Approx(1.0));
    CHECK_FALSE(bound_check(s, 1.0, 1.2, 0.02).ok);
}

TEST_CASE("config round trip") {
    const Config a = parse_config(base_text);
    const Config b = parse_config(to_text(a));
    CHECK(to_text(a) == to_text(b));
    CHECK(b.system.alpha == 2.0);
    CHECK(b.delay.history.size() == a.delay.history.size());
    for (size_t i = 0; i < a.delay.history.size(); ++i) CHECK(a.delay.history[i] == b.delay.history[i]);
    CHECK(b.n == 20);
    CHECK(b.run.dt == 0.01);
}

TEST_CASE("malformed configs") {
    CHECK_THROWS_AS(parse_config("[system]\nalpha = two\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[nowhere]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[system]\nfoo = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("alpha = 1\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/file.ini"), ConfigError);
    try {
        parse_config("[system]\n\nalpha = x\n");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("time series header and rows") {
    Config c = parse_config(base_text);
    const auto r = simulate(c);
    std::ostringstream os;
    write_timeseries_csv(os, r.result.samples);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,E,V,V1,V2,trace_now,trace_delayed");
    size_t rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 31);
}

TEST_CASE("zero data gives a zero series") {
    Config c = parse_config(base_text);
    c.delay.history.clear();
    const auto r = simulate(c);
    for (const auto& e : r.result.samples) CHECK(e.E == 0.0);
    REQUIRE(r.bound);
    CHECK(r.bound->ok);
}

TEST_CASE("summary of an admissible run") {
    const auto r = simulate(parse_config(base_text));
    const auto s = summary_text(r);
    for (const char* key : {"lambda_theory", "lambda_obs", "zeta", "bound_max_ratio", "C_L", "status = completed"})
        CHECK(s.find(key) != std::string::npos);
}

TEST_CASE("L out of range still simulates, uncertified") {
    Config c = parse_config(base_text);
    c.system.L = 5.0;
    const auto r = simulate(c);
    CHECK(r.result.status == RunStatus::completed);
    CHECK(summary_text(r).find("uncertified") != std::string::npos);
}

TEST_CASE("sweeps") {
    const std::string spec = std::string(base_text) + "\n[sweep]\ntask = certify\nsystem.alpha = 0.5, 1, 2\nsystem.beta = 0.5, 1\n";
    SUBCASE("grid size and order") {
        const auto s = parse_sweep(spec);
        const auto rows = run_sweep(s, 3);
        REQUIRE(rows.size() == 6);
        CHECK(rows[0].point == std::vector<std::string>{"0.5", "0.5"});
        CHECK(rows[1].point == std::vector<std::string>{"0.5", "1"});
        CHECK(rows[5].point == std::vector<std::string>{"2", "1"});
    }
    SUBCASE("admissibility flips once along alpha") {
        std::string t = std::string(base_text) + "\n[sweep]\ntask = certify\nsystem.alpha = ";
        for (int k = 0; k <= 40; ++k) t += (k ? ", " : "") + std::to_string(0.05 * k);
        const auto s = parse_sweep(t);
        const auto rows = run_sweep(s);
        int flips = 0;
        for (size_t k = 1; k < rows.size(); ++k) flips += rows[k].admissible != rows[k - 1].admissible;
        CHECK(flips == 1);
        for (size_t k = 0; k < rows.size(); ++k) {
            SystemParams p = s.base.system;
            p.alpha = std::stod(rows[k].point[0]);
            CHECK(rows[k].admissible == check_gains(p, s.base.delay).admissible);
        }
    }
    SUBCASE("empty axis") {
        CHECK_THROWS_AS(parse_sweep(std::string(base_text) + "\n[sweep]\nsystem.alpha =\n"), ConfigError);
    }
    SUBCASE("deterministic tables with simulation") {
        const std::string t = std::string(base_text) + "\n[sweep]\ntask = both\nsystem.alpha = 1.5, 2\nrun.dt = 0.01, 0.02\n";
        const auto s = parse_sweep(t);
        const auto a = sweep_table(s, run_sweep(s, 4));
        const auto b = sweep_table(s, run_sweep(s, 1));
        CHECK(a == b);
        CHECK(a.find("lambda_obs") != std::string::npos);
    }
    SUBCASE("per-point failures stay in the row") {
        const auto s = parse_sweep(std::string(base_text) + "\n[sweep]\ntask = simulate\nrun.dt = 0.01, 2\n");
        const auto rows = run_sweep(s);
        CHECK(rows[0].status == "completed");
        CHECK(rows[1].status.rfind("error", 0) == 0);
    }
}

}

TEST_SUITE("harness") {

TEST_CASE("self-convergence of a small nonlinear run") {
    Config c;
    c.run.init = "poly";
    c.run.nonlinear = true;
    c.run.horizon = 0.2;
    c.run.amplitude = 1e-3;
    c.n = 16;
    c.run.dt = 4e-3;
    const auto sc = self_convergence(c, 3);
    REQUIRE(sc.completed);
    CHECK(sc.n == std::vector<int>{16, 33, 67});
    CHECK(sc.order >= 1.5);
    CHECK_THROWS_AS(self_convergence(c, 2), DomainError);
}

}
