#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "kdvd/certificate.hpp"
#include "kdvd/config.hpp"
#include "kdvd/errors.hpp"
#include "kdvd/harness.hpp"

namespace fs = std::filesystem;
using namespace kdvd;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed_run = 1;
constexpr int exit_inadmissible = 2;
constexpr int exit_config = 3;

struct Overrides {
    std::optional<double> dt, horizon;
    std::optional<int> n;
    bool nonlinear = false;
    std::optional<std::uint64_t> seed;

    void apply(Config& c) const {
        if (dt) c.run.dt = *dt;
        if (horizon) c.run.horizon = *horizon;
        if (n) c.n = *n;
        if (nonlinear) c.run.nonlinear = true;
        if (seed) c.run.seed = *seed;
    }
};

void add_overrides(CLI::App* app, Overrides& o) {
    app->add_option("--dt", o.dt, "time step");
    app->add_option("--n", o.n, "interior grid nodes");
    app->add_option("--horizon", o.horizon, "final time");
    app->add_flag("--nonlinear", o.nonlinear, "enable the nonlinear terms");
    app->add_option("--seed", o.seed, "seed for the random initial profile");
}

Config load(const std::string& path, const Overrides& o) {
    Config c = load_config(path);
    o.apply(c);
    return c;
}

fs::path prepare_out(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

int cmd_check(const std::string& path, const Overrides& o) {
    const Config c = load(path, o);
    const auto v = validate_params(c.system, c.delay, c.run.horizon);
    std::cout << v.to_text() << '\n';
    if (!v.simulatable()) return exit_config;
    const auto cert = certify(c.system, c.delay, c.run.mu1, c.run.mu2);
    std::cout << cert.to_text();
    if (!cert.admissible) {
        std::cerr << "inadmissible gains: alpha must exceed " << std::setprecision(17) << cert.threshold << '\n';
        return exit_inadmissible;
    }
    if (!cert.L_condition_ok || !v.certifiable()) {
        std::cerr << "gains admissible but the configuration cannot be certified\n";
        return exit_inadmissible;
    }
    return exit_ok;
}

int cmd_simulate(const std::string& path, const Overrides& o, const std::string& out) {
    const Config c = load(path, o);
    const RunReport r = simulate(c);
    const std::string summary = summary_text(r);
    if (out.empty()) {
        std::cout << summary;
    } else {
        const fs::path dir = prepare_out(out);
        std::ofstream ts(dir / "timeseries.csv");
        write_timeseries_csv(ts, r.result.samples);
        std::ofstream(dir / "summary.txt") << summary;
        std::cout << "wrote " << (dir / "timeseries.csv").string() << " and " << (dir / "summary.txt").string() << '\n';
    }
    if (r.result.status != RunStatus::completed) {
        std::cerr << "run ended early: " << to_string(r.result.status) << ": " << r.result.message << '\n';
        return exit_failed_run;
    }
    return exit_ok;
}

int cmd_sweep(const std::string& path, const std::string& out, unsigned threads) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sweep spec '" + path + "'");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const SweepSpec spec = parse_sweep(text);
    const std::string table = sweep_table(spec, run_sweep(spec, threads));
    if (out.empty()) {
        std::cout << table;
    } else {
        const fs::path dir = prepare_out(out);
        std::ofstream(dir / "sweep.csv") << table;
        std::cout << "wrote " << (dir / "sweep.csv").string() << '\n';
    }
    return exit_ok;
}

int cmd_convergence(const std::string& path, const Overrides& o, int levels, const std::string& out) {
    SystemParams p;
    if (!path.empty()) p = load(path, o).system;
    ConvergenceOptions opts;
    if (o.n) opts.n0 = *o.n;
    if (o.horizon) opts.horizon = *o.horizon;
    opts.levels = levels;
    const auto rows = manufactured_study(p, opts);
    std::ostringstream os;
    os << std::setprecision(10) << "n,h,dt,error,order\n";
    for (const auto& r : rows) os << r.n << ',' << r.h << ',' << r.dt << ',' << r.error << ',' << r.order << '\n';
    if (out.empty()) {
        std::cout << os.str();
    } else {
        const fs::path dir = prepare_out(out);
        std::ofstream(dir / "convergence.csv") << os.str();
        std::cout << "wrote " << (dir / "convergence.csv").string() << '\n';
    }
    return exit_ok;
}

int cmd_optimize(const std::string& path, const Overrides& o, int points) {
    const Config c = load(path, o);
    const auto gain = check_gains(c.system, c.delay);
    if (!gain.admissible) {
        std::cerr << "inadmissible gains: alpha must exceed " << gain.threshold << '\n';
        return exit_inadmissible;
    }
    const double end = mu1_interval_end(c.system, c.delay);
    std::cout << std::setprecision(12) << "mu1,f,g\n";
    for (int k = 0; k <= points; ++k) {
        const double mu1 = end * k / points;
        std::cout << mu1 << ',' << f_of_mu1(c.system, mu1) << ',';
        try {
            std::cout << g_of_mu1(c.system, c.delay, mu1);
        } catch (const std::exception&) {
            std::cout << "nan";
        }
        std::cout << '\n';
    }
    const auto opt = optimal_mu1(c.system, c.delay);
    std::cout << "\n[optimum]\nmu1_interval_end = " << end << "\nmu1_star = " << opt.mu1_star
              << "\nlambda_star = " << opt.lambda_star << "\niterations = " << opt.iterations << '\n';
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boundary-feedback simulation and certification tool"};
    app.require_subcommand(1);

    std::string config, out;
    Overrides ov;
    unsigned threads = 0;
    int levels = 4, points = 20;

    auto* check = app.add_subcommand("check", "validate a configuration and print its certificate");
    check->add_option("--config", config, "configuration file")->required();
    add_overrides(check, ov);

    auto* sim = app.add_subcommand("simulate", "run a simulation and write the time series and summary");
    sim->add_option("--config", config, "configuration file")->required();
    sim->add_option("--out", out, "output directory");
    add_overrides(sim, ov);

    auto* sweep = app.add_subcommand("sweep", "evaluate a parameter grid");
    sweep->add_option("--config", config, "sweep specification")->required();
    sweep->add_option("--out", out, "output directory");
    sweep->add_option("--threads", threads, "worker threads (0 = hardware)");

    auto* conv = app.add_subcommand("convergence", "manufactured-solution order study");
    conv->add_option("--config", config, "configuration file for the system coefficients");
    conv->add_option("--out", out, "output directory");
    conv->add_option("--levels", levels, "number of grids")->check(CLI::Range(2, 8));
    add_overrides(conv, ov);

    auto* opt = app.add_subcommand("optimize-rate", "tabulate f and g and locate mu1*");
    opt->add_option("--config", config, "configuration file")->required();
    opt->add_option("--points", points, "table rows minus one")->check(CLI::PositiveNumber);
    add_overrides(opt, ov);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    try {
        if (*check) return cmd_check(config, ov);
        if (*sim) return cmd_simulate(config, ov, out);
        if (*sweep) return cmd_sweep(config, out, threads);
        if (*conv) return cmd_convergence(config, ov, levels, out);
        if (*opt) return cmd_optimize(config, ov, points);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failed_run;
    }
    return exit_config;
}
