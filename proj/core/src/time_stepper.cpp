#include "kdvd/time_stepper.hpp"

#include <cmath>

#include "kdvd/errors.hpp"

namespace kdvd {

namespace {

constexpr double stall_tol = 1e-8;

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

Stepper::Stepper(const SpatialOperators& ops, const StepConfig& cfg, const DelaySpec& dly, Forcing forcing)
    : ops_(ops), cfg_(cfg), dly_(dly), forcing_(std::move(forcing)) {
    if (!(cfg.dt > 0)) throw ConfigError("dt must be positive");
    if (!(cfg.theta >= 0.5 && cfg.theta <= 1.0)) throw ConfigError("theta must lie in [1/2, 1]");
    if (!(cfg.dt < dly.tau0)) throw ConfigError("dt must be smaller than tau0");
    lu_ = BandedLU(ops.system_matrix(1.0, -cfg.theta * cfg.dt));
    if (cfg.startup_steps > 0) be_lu_ = BandedLU(ops.system_matrix(1.0, -0.5 * cfg.dt));
}

// The theta step M (u1 - u0) = h A (theta u1 + (1 - theta) u0) + h f is solved
// for w = theta u1 + (1 - theta) u0 from (M - theta h A) w = M u0 + theta h f,
// which never applies the stiff operator explicitly.
void Stepper::substep(SimState& s, double h, double theta, const BandedLU& lu, double t_new) const {
    const double tt = s.t + theta * h;
    const double ystar = s.history.value_at(tt - tau_at(dly_, tt).first);
    const double th = theta * h;
    std::vector<double> b = ops_.apply_mass(s.u);
    const auto& src = ops_.closure().delayed_source;
    for (size_t i = 0; i < b.size(); ++i) b[i] += th * src[i] * ystar;
    if (forcing_.boundary) {
        const double bd = forcing_.boundary(tt);
        const auto& ub = ops_.closure().unit_boundary;
        for (size_t i = 0; i < b.size(); ++i) b[i] += th * ub[i] * bd;
    }
    if (forcing_.load) {
        const auto f = forcing_.load(tt);
        for (size_t i = 0; i < b.size(); ++i) b[i] += th * f[i];
    }

    std::vector<double> w;
    if (!cfg_.nonlinear) {
        w = lu.solve(b);
        picard_last_ = 0;
    } else {
        w = s.u;
        int it = 0;
        double prev_diff = INFINITY;
        for (;; ++it) {
            if (it >= cfg_.picard_iters)
                throw NonlinearDivergence("Picard iteration did not converge within " +
                                          std::to_string(cfg_.picard_iters) + " iterations at t = " +
                                          std::to_string(s.t));
            const auto nl = ops_.nonlinear_load(w);
            std::vector<double> bj = b;
            for (size_t i = 0; i < bj.size(); ++i) bj[i] += th * nl[i];
            lu.solve_in_place(bj);
            double diff = 0.0;
            for (size_t i = 0; i < bj.size(); ++i) diff += (bj[i] - w[i]) * (bj[i] - w[i]);
            diff = std::sqrt(diff);
            const double scale = norm2(bj);
            if (!std::isfinite(diff) || !std::isfinite(scale))
                throw NonlinearDivergence("Picard iterate became non-finite at t = " + std::to_string(s.t));
            w = std::move(bj);
            if (diff <= cfg_.picard_tol * std::max(scale, 1e-300) || scale == 0.0) break;
            // roundoff floor of the stiff solve: increments stopped shrinking but are already tiny
            if (diff >= prev_diff && diff <= stall_tol * scale) break;
            prev_diff = diff;
        }
        picard_last_ = it + 1;
    }
    if (theta == 1.0) {
        s.u = std::move(w);
    } else {
        const double a = 1.0 / theta, c = (1.0 - theta) / theta;
        for (size_t i = 0; i < s.u.size(); ++i) s.u[i] = a * w[i] - c * s.u[i];
    }
    s.t = t_new;
    s.history.push(s.t, ops_.trace(s.u));
}

void Stepper::step(SimState& s) const { substep(s, cfg_.dt, cfg_.theta, lu_, s.t + cfg_.dt); }

void Stepper::startup_step(SimState& s) const {
    if (!be_lu_.factored()) throw std::logic_error("startup factorization missing");
    const double h = 0.5 * cfg_.dt;
    const double t_end = s.t + cfg_.dt;
    substep(s, h, 1.0, be_lu_, s.t + h);
    substep(s, h, 1.0, be_lu_, t_end);
}

SimState step(const SimState& s, const SpatialOperators& ops, const StepConfig& cfg, const DelaySpec& dly) {
    StepConfig c = cfg;
    c.startup_steps = 0;
    Stepper st(ops, c, dly);
    SimState next = s;
    st.step(next);
    return next;
}

SimState initial_state(const SpatialOperators& ops, const DelaySpec& dly, const std::function<double(double)>& eta0,
                       const std::function<double(double)>& omega0, double dt, Interp interp) {
    SimState s;
    s.t = 0.0;
    s.u = ops.project(eta0, omega0);
    s.history = seed_history(dly, ops.trace(s.u), 3.0 * dt, interp);
    return s;
}

std::string to_string(RunStatus s) {
    switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::nonlinear_divergence: return "nonlinear_divergence";
    case RunStatus::numerical_error: return "numerical_error";
    case RunStatus::unstable: return "unstable";
    }
    return "unknown";
}

RunResult run(SimState s, double T, const SpatialOperators& ops, const StepConfig& cfg, const DelaySpec& dly,
              const RunMonitors& mon, Forcing forcing) {
    RunResult r;
    const Stepper stepper(ops, cfg, dly, forcing);
    const auto extra = [&](double t) { return forcing.boundary ? forcing.boundary(t) : 0.0; };
    auto record = [&] {
        const int m = effective_m(mon.m, tau_at(dly, s.t).first, cfg.dt);
        r.samples.push_back(sample_energy(ops, s, dly, mon.mu1, mon.mu2, m));
        if (mon.kato) r.kato.push_back(kato_row(ops, s, dly, extra(s.t)));
    };
    record();
    const double E0 = r.samples.front().E;
    const long steps = static_cast<long>(std::floor(T / cfg.dt + 1e-9));
    try {
        for (long k = 0; k < steps; ++k) {
            if (k < cfg.startup_steps) stepper.startup_step(s);
            else stepper.step(s);
            r.max_picard = std::max(r.max_picard, stepper.last_picard_iterations());
            if ((k + 1) % std::max(1L, mon.stride) != 0 && k + 1 != steps) continue;
            record();
            const double E = r.samples.back().E;
            if (!std::isfinite(E) || E > mon.blowup * std::max(E0, 1e-300)) {
                r.status = RunStatus::unstable;
                r.message = "energy left the bounded regime at t = " + std::to_string(s.t);
                break;
            }
        }
    } catch (const NonlinearDivergence& e) {
        r.status = RunStatus::nonlinear_divergence;
        r.message = e.what();
    } catch (const NumericalError& e) {
        r.status = RunStatus::numerical_error;
        r.message = e.what();
    }
    r.final_state = std::move(s);
    return r;
}

}  // namespace kdvd
