#include "kdvd/harness.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "kdvd/errors.hpp"

namespace kdvd {

DecayFit fit_decay(const std::vector<std::pair<double, double>>& series, double window, double floor) {
    DecayFit f;
    if (series.empty()) return f;
    const double cutoff = std::max(0.0, floor * series.front().second);
    size_t usable = 0;
    while (usable < series.size() && series[usable].second > cutoff && std::isfinite(std::log(series[usable].second)))
        ++usable;
    f.truncated = usable < series.size();
    if (usable == 0) return f;
    const double t0 = series.front().first, t1 = series[usable - 1].first;
    const double start = t1 - window * (t1 - t0);
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    size_t n = 0;
    f.t_start = t1;
    for (size_t k = 0; k < usable; ++k) {
        const auto [t, E] = series[k];
        if (t < start - 1e-12 * std::max(1.0, std::abs(t1))) continue;
        f.t_start = std::min(f.t_start, t);
        f.t_end = t;
        const double y = std::log(E);
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
        syy += y * y;
        ++n;
    }
    f.points = n;
    if (n < 2) return f;
    const double dn = static_cast<double>(n);
    const double vx = sxx - sx * sx / dn, vy = syy - sy * sy / dn, cxy = sxy - sx * sy / dn;
    if (vx <= 0) return f;
    const double slope = cxy / vx;
    f.lambda_obs = -slope;
    f.r2 = vy <= 1e-300 * dn ? 1.0 : (cxy * cxy) / (vx * vy);
    return f;
}

DecayFit fit_decay(const std::vector<EnergySample>& samples, double window, double floor) {
    std::vector<std::pair<double, double>> s;
    s.reserve(samples.size());
    for (const auto& e : samples) s.emplace_back(e.t, e.E);
    return fit_decay(s, window, floor);
}

BoundCheck bound_check(const std::vector<EnergySample>& samples, double zeta, double lambda, double slack) {
    BoundCheck b;
    if (samples.empty()) return b;
    const double E0 = samples.front().E;
    for (const auto& e : samples) {
        const double bound = zeta * E0 * std::exp(-lambda * e.t);
        const double ratio = bound > 0 ? e.E / bound : (e.E > 0 ? INFINITY : 0.0);
        b.max_ratio = std::max(b.max_ratio, ratio);
    }
    b.ok = b.max_ratio <= 1 + slack;
    return b;
}

SimState make_initial_state(const SpatialOperators& ops, const Config& c) {
    const double L = c.system.L, A = c.run.amplitude;
    std::function<double(double)> eta = [](double) { return 0.0; }, omega = eta;
    if (c.run.init == "poly") {
        eta = [=](double x) {
            const double s = x / L;
            return A * 64.0 * s * s * s * std::pow(1 - s, 3);
        };
        omega = [=](double x) {
            const double s = x / L;
            return A * (3125.0 / 108.0) * s * s * std::pow(1 - s, 3);
        };
    } else if (c.run.init == "random") {
        std::mt19937_64 rng(c.run.seed);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        std::vector<double> ce(4), co(4);
        for (auto& v : ce) v = U(rng);
        for (auto& v : co) v = U(rng);
        eta = [=](double x) {
            const double s = x / L;
            double acc = 0.0, pw = 1.0;
            for (double k : ce) {
                acc += k * pw;
                pw *= s;
            }
            return A * 64.0 * s * s * s * std::pow(1 - s, 3) * acc;
        };
        omega = [=](double x) {
            const double s = x / L;
            double acc = 0.0, pw = 1.0;
            for (double k : co) {
                acc += k * pw;
                pw *= s;
            }
            return A * (3125.0 / 108.0) * s * s * std::pow(1 - s, 3) * acc;
        };
    }
    return initial_state(ops, c.delay, eta, omega, c.run.dt, c.run.interp);
}

RunReport simulate(const Config& c) {
    RunReport rep;
    rep.config_echo = to_text(c);
    rep.validation = validate_params(c.system, c.delay, c.run.horizon);
    if (!rep.validation.simulatable()) throw ConfigError("configuration fails validation:\n" + rep.validation.to_text());

    double mu1 = 0.0, mu2 = 0.0;
    if (rep.validation.certifiable()) {
        auto cert = certify(c.system, c.delay, c.run.mu1, c.run.mu2);
        if (cert.certified) {
            mu1 = cert.mu1;
            mu2 = cert.mu2;
        }
        rep.certificate = std::move(cert);
    }

    const Grid g = make_grid(c.system.L, c.n);
    const SpatialOperators ops(c.system, g);
    StepConfig sc;
    sc.dt = c.run.dt;
    sc.theta = c.run.theta;
    sc.nonlinear = c.run.nonlinear;
    sc.picard_iters = c.run.picard_iters;
    sc.picard_tol = c.run.picard_tol;
    sc.startup_steps = c.run.startup_steps;
    RunMonitors mon;
    mon.m = c.run.m;
    mon.mu1 = mu1;
    mon.mu2 = mu2;
    rep.result = run(make_initial_state(ops, c), c.run.horizon, ops, sc, c.delay, mon);

    const auto& S = rep.result.samples;
    if (S.size() >= 3) rep.dissipation_residual = dissipation_residual(S);
    rep.kato = kato_identity_residual(rep.result.kato, c.system);
    rep.fit = fit_decay(S, c.run.fit_window);
    if (rep.certificate && rep.certificate->certified)
        rep.bound = bound_check(S, rep.certificate->zeta, rep.certificate->lambda, c.run.slack);
    return rep;
}

void write_timeseries_csv(std::ostream& os, const std::vector<EnergySample>& samples) {
    os << "t,E,V,V1,V2,trace_now,trace_delayed\n";
    os << std::setprecision(17);
    for (const auto& e : samples)
        os << e.t << ',' << e.E << ',' << e.V << ',' << e.V1 << ',' << e.V2 << ',' << e.trace_now << ','
           << e.trace_delayed << '\n';
}

std::string summary_text(const RunReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << r.config_echo << '\n';
    if (r.certificate) os << r.certificate->to_text() << '\n';
    const auto& S = r.result.samples;
    os << "[summary]\n";
    os << "status = " << to_string(r.result.status) << '\n';
    if (!r.result.message.empty()) os << "message = " << r.result.message << '\n';
    os << "certified = " << (r.certificate && r.certificate->certified ? "true" : "false") << '\n';
    if (!r.validation.certifiable()) os << "certification = uncertified\n";
    os << "rows = " << S.size() << '\n';
    if (!S.empty()) {
        os << "E0 = " << S.front().E << '\n';
        os << "E_final = " << S.back().E << '\n';
        os << "t_final = " << S.back().t << '\n';
    }
    if (r.dissipation_residual) os << "dissipation_residual = " << *r.dissipation_residual << '\n';
    os << "kato_residual = " << r.kato.residual << '\n';
    os << "kato_residual_alt_sign = " << r.kato.residual_alt_sign << '\n';
    os << "kato_scale = " << r.kato.scale << '\n';
    os << "C_L = " << r.kato.C_L << '\n';
    os << "lambda_obs = " << r.fit.lambda_obs << '\n';
    os << "fit_r2 = " << r.fit.r2 << '\n';
    os << "fit_window = " << r.fit.t_start << ", " << r.fit.t_end << '\n';
    if (r.fit.truncated) os << "fit_warning = window truncated where E reached the underflow floor\n";
    if (r.certificate && r.certificate->certified) {
        os << "lambda_theory = " << r.certificate->lambda << '\n';
        os << "zeta = " << r.certificate->zeta << '\n';
    }
    if (r.bound) {
        os << "bound_max_ratio = " << r.bound->max_ratio << '\n';
        os << "bound_ok = " << (r.bound->ok ? "true" : "false") << '\n';
    }
    os << "max_picard_iterations = " << r.result.max_picard << '\n';
    return os.str();
}

namespace {

/// Polynomial with coefficients c[k] of x^k.
struct Poly {
    std::vector<double> c;

    static Poly monomial_power(double L, int i, int j) {
        // x^i (L - x)^j
        Poly p;
        p.c.assign(i + j + 1, 0.0);
        double binom = 1.0;
        for (int k = 0; k <= j; ++k) {
            p.c[i + k] = binom * std::pow(L, j - k) * ((k % 2) ? -1.0 : 1.0);
            binom = binom * (j - k) / (k + 1);
        }
        return p;
    }
    Poly derivative(int times = 1) const {
        Poly p = *this;
        for (int t = 0; t < times; ++t) {
            if (p.c.size() <= 1) return Poly{{0.0}};
            std::vector<double> d(p.c.size() - 1);
            for (size_t k = 1; k < p.c.size(); ++k) d[k - 1] = k * p.c[k];
            p.c = std::move(d);
        }
        return p;
    }
    double operator()(double x) const {
        double s = 0.0;
        for (size_t k = c.size(); k-- > 0;) s = s * x + c[k];
        return s;
    }
};

}  // namespace

std::vector<ConvergenceRow> manufactured_study(const SystemParams& p, const ConvergenceOptions& o) {
    const double L = p.L, a = p.a, a1 = p.a1;
    const Poly Pe = Poly::monomial_power(L, 3, 2), Po = Poly::monomial_power(L, 2, 2);
    const Poly Pe1 = Pe.derivative(), Pe2 = Pe.derivative(2), Pe3 = Pe.derivative(3), Pe5 = Pe.derivative(5);
    const Poly Po1 = Po.derivative(), Po2 = Po.derivative(2), Po3 = Po.derivative(3), Po5 = Po.derivative(5);
    auto F1 = [&](double x) { return -Pe(x) + Po1(x) + a * Po3(x) + a1 * Po5(x); };
    auto F2 = [&](double x) { return -Po(x) + Pe1(x) + a * Pe3(x) + a1 * Pe5(x); };
    const double trL = Pe2(L), omL = Po2(L);

    DelaySpec dly;
    dly.tau0 = dly.M = dly.base = o.tau;
    dly.d = 0.0;
    dly.form = DelayForm::constant;

    std::vector<ConvergenceRow> rows;
    for (int level = 0; level < o.levels; ++level) {
        const int n = (o.n0 + 1) * (1 << level) - 1;
        const Grid g = make_grid(L, n);
        const SpatialOperators ops(p, g);
        const double dt = o.dt_coeff * g.h * g.h;
        const int K = std::max(2, static_cast<int>(std::lround(o.tau / dt)));
        dly.history.resize(K + 1);
        for (int j = 0; j <= K; ++j) dly.history[j] = std::exp(o.tau - o.tau * j / K) * trL;

        const auto le = ops.eta_load(F1), lo = ops.omega_load(F2);
        std::vector<double> load(ops.system_size());
        for (int i = 0; i < ops.field_size(); ++i) {
            load[2 * i] = le[i];
            load[2 * i + 1] = lo[i];
        }
        Forcing forcing;
        forcing.load = [load](double t) {
            std::vector<double> f = load;
            const double e = std::exp(-t);
            for (double& v : f) v *= e;
            return f;
        };
        forcing.boundary = [=, alpha = p.alpha, beta = p.beta, tau = o.tau](double t) {
            return std::exp(-t) * (omL - alpha * trL) - beta * std::exp(-(t - tau)) * trL;
        };

        StepConfig sc;
        sc.dt = dt;
        sc.startup_steps = 2;
        RunMonitors mon;
        mon.kato = false;
        mon.stride = std::numeric_limits<long>::max();
        SimState s = initial_state(ops, dly, [&](double x) { return Pe(x); }, [&](double x) { return Po(x); }, dt);
        const RunResult res = run(std::move(s), o.horizon, ops, sc, dly, mon, forcing);
        if (res.status != RunStatus::completed) throw NumericalError("manufactured run failed: " + res.message);

        const double T = res.final_state.t, e = std::exp(-T);
        const auto f = ops.fields_at_quad(res.final_state.u);
        double err = 0.0;
        for (size_t q = 0; q < ops.quad_x().size(); ++q) {
            const double x = ops.quad_x()[q];
            const double de = f.eta[0][q] - e * Pe(x), dw = f.omega[0][q] - e * Po(x);
            err += ops.quad_w()[q] * (de * de + dw * dw);
        }
        ConvergenceRow row;
        row.n = n;
        row.h = g.h;
        row.dt = dt;
        row.error = std::sqrt(err);
        if (!rows.empty()) row.order = std::log2(rows.back().error / row.error);
        rows.push_back(row);
    }
    return rows;
}

SelfConvergence self_convergence(const Config& base, int levels) {
    if (levels < 3) throw DomainError("self-convergence needs at least three levels");
    SelfConvergence sc;
    std::vector<SpatialOperators> ops;
    std::vector<std::vector<double>> u;
    for (int k = 0; k < levels; ++k) {
        Config c = base;
        c.n = (base.n + 1) * (1 << k) - 1;
        c.run.dt = base.run.dt / (1 << k);
        const RunReport r = simulate(c);
        sc.n.push_back(c.n);
        sc.dt.push_back(c.run.dt);
        sc.status.push_back(r.result.status);
        const auto& S = r.result.samples;
        sc.final_energy_ratio.push_back(S.front().E > 0 ? S.back().E / S.front().E : 0.0);
        if (r.result.status != RunStatus::completed) return sc;
        ops.emplace_back(c.system, make_grid(c.system.L, c.n));
        u.push_back(r.result.final_state.u);
    }
    // The finest Gauss rule integrates products of the nested splines exactly.
    const auto& fine = ops.back();
    for (int k = 0; k + 1 < levels; ++k) {
        double s = 0.0;
        for (size_t q = 0; q < fine.quad_x().size(); ++q) {
            const double x = fine.quad_x()[q];
            for (int field = 0; field < 2; ++field) {
                const double d = ops[k].evaluate(u[k], field, x) - ops[k + 1].evaluate(u[k + 1], field, x);
                s += fine.quad_w()[q] * d * d;
            }
        }
        sc.diffs.push_back(std::sqrt(s));
    }
    const size_t m = sc.diffs.size();
    sc.order = std::log2(sc.diffs[m - 2] / sc.diffs[m - 1]);
    sc.completed = true;
    return sc;
}

SweepSpec parse_sweep(const std::string& text) {
    SweepSpec spec;
    std::ostringstream base;
    std::istringstream is(text);
    std::string line;
    bool in_sweep = false;
    bool task_given = false;
    while (std::getline(is, line)) {
        std::string t = line;
        const auto hash = t.find_first_of("#;");
        if (hash != std::string::npos) t.erase(hash);
        const auto b = t.find_first_not_of(" \t\r");
        t = b == std::string::npos ? "" : t.substr(b, t.find_last_not_of(" \t\r") - b + 1);
        if (!t.empty() && t.front() == '[') {
            in_sweep = t == "[sweep]";
            if (in_sweep) continue;
        }
        if (!in_sweep) {
            base << line << '\n';
            continue;
        }
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("sweep: expected key = value");
        auto strip = [](std::string s) {
            const auto b2 = s.find_first_not_of(" \t");
            if (b2 == std::string::npos) return std::string{};
            return s.substr(b2, s.find_last_not_of(" \t") - b2 + 1);
        };
        const std::string key = strip(t.substr(0, eq)), value = strip(t.substr(eq + 1));
        if (key == "task") {
            if (value == "certify") spec.task = SweepTask::certify;
            else if (value == "simulate") spec.task = SweepTask::simulate;
            else if (value == "both") spec.task = SweepTask::both;
            else throw ConfigError("sweep: unknown task '" + value + "'");
            task_given = true;
            continue;
        }
        const auto dot = key.find('.');
        if (dot == std::string::npos) throw ConfigError("sweep axis must be section.field, got '" + key + "'");
        SweepAxis ax{key.substr(0, dot), key.substr(dot + 1), {}};
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = strip(item);
            if (!item.empty()) ax.values.push_back(item);
        }
        if (ax.values.empty()) throw ConfigError("sweep axis '" + key + "' is empty");
        spec.axes.push_back(std::move(ax));
    }
    (void)task_given;
    if (spec.axes.empty()) throw ConfigError("sweep spec has no axes");
    spec.base = parse_config(base.str());
    // Validate every axis value once up front so errors are spec errors.
    for (const auto& ax : spec.axes)
        for (const auto& v : ax.values) {
            Config probe = spec.base;
            set_config_value(probe, ax.section, ax.key, v);
        }
    return spec;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned threads) {
    size_t total = 1;
    for (const auto& ax : spec.axes) total *= ax.values.size();
    std::vector<SweepRow> rows(total);

    auto work = [&](size_t idx) {
        SweepRow row;
        Config c = spec.base;
        size_t rem = idx;
        row.point.resize(spec.axes.size());
        for (size_t k = spec.axes.size(); k-- > 0;) {
            const auto& ax = spec.axes[k];
            const size_t j = rem % ax.values.size();
            rem /= ax.values.size();
            row.point[k] = ax.values[j];
            set_config_value(c, ax.section, ax.key, ax.values[j]);
        }
        try {
            const auto v = validate_params(c.system, c.delay, c.run.horizon);
            if (!v.simulatable()) throw ConfigError("invalid parameters");
            const auto gain = check_gains(c.system, c.delay);
            row.admissible = gain.admissible;
            row.threshold = gain.threshold;
            if (spec.task != SweepTask::simulate && v.certifiable() && gain.admissible) {
                const auto cert = certify(c.system, c.delay, c.run.mu1, c.run.mu2);
                row.mu1_star = cert.mu1_star;
                row.lambda_star = cert.lambda_star;
                row.lambda = cert.lambda;
                row.zeta = cert.zeta;
            }
            row.status = "ok";
            if (spec.task != SweepTask::certify) {
                const RunReport r = simulate(c);
                row.lambda_obs = r.fit.lambda_obs;
                row.status = to_string(r.result.status);
            }
        } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
            for (char& ch : row.status)
                if (ch == ',' || ch == '\n') ch = ' ';
        }
        rows[idx] = std::move(row);
    };

    const unsigned nt = std::max(1u, threads ? threads : std::thread::hardware_concurrency());
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<size_t>(nt, total); ++w)
        pool.emplace_back([&] {
            for (size_t i = next++; i < total; i = next++) work(i);
        });
    for (auto& th : pool) th.join();
    return rows;
}

std::string sweep_table(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os.precision(12);
    os << "index";
    for (const auto& ax : spec.axes) os << ',' << ax.section << '.' << ax.key;
    os << ",admissible,threshold,mu1_star,lambda_star,lambda,zeta,lambda_obs,status\n";
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        os << i;
        for (const auto& v : r.point) os << ',' << v;
        os << ',' << (r.admissible ? "true" : "false") << ',' << r.threshold << ',' << r.mu1_star << ','
           << r.lambda_star << ',' << r.lambda << ',' << r.zeta << ',';
        if (r.lambda_obs) os << *r.lambda_obs;
        os << ',' << r.status << '\n';
    }
    return os.str();
}

}  // namespace kdvd
