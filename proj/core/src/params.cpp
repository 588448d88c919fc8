#include "kdvd/params.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kdvd/errors.hpp"

namespace kdvd {

std::string to_string(DelayForm f) {
    switch (f) {
    case DelayForm::constant: return "constant";
    case DelayForm::affine: return "affine";
    case DelayForm::sinusoidal: return "sinusoidal";
    }
    throw ConfigError("unknown delay form");
}

DelayForm delay_form_from_string(const std::string& s) {
    if (s == "constant") return DelayForm::constant;
    if (s == "affine") return DelayForm::affine;
    if (s == "sinusoidal") return DelayForm::sinusoidal;
    throw ConfigError("unknown delay form '" + s + "'");
}

std::pair<double, double> tau_at(const DelaySpec& dly, double t) {
    switch (dly.form) {
    case DelayForm::constant:
        return {dly.base, 0.0};
    case DelayForm::affine: {
        const double tau = dly.base + dly.rate * t;
        if (tau >= dly.M && dly.rate > 0) return {dly.M, 0.0};
        if (tau <= dly.tau0 && dly.rate < 0) return {dly.tau0, 0.0};
        return {tau, dly.rate};
    }
    case DelayForm::sinusoidal:
        return {dly.base + dly.amp * std::sin(dly.freq * t),
                dly.amp * dly.freq * std::cos(dly.freq * t)};
    }
    throw ConfigError("unknown delay form");
}

double critical_length(const SystemParams& p) {
    return std::numbers::pi * std::sqrt(5.0 * p.a1 / (3.0 * p.a));
}

Grid make_grid(double L, int n) {
    if (n < 8) throw ConfigError("grid needs n >= 8, got " + std::to_string(n));
    if (!(L > 0)) throw ConfigError("domain length must be positive");
    Grid g;
    g.n = n;
    g.h = L / (n + 1);
    g.nodes.resize(n);
    for (int j = 0; j < n; ++j) g.nodes[j] = (j + 1) * g.h;
    return g;
}

bool ValidationReport::simulatable() const {
    return std::none_of(items.begin(), items.end(),
                        [](const auto& i) { return i.severity == Severity::error; });
}

bool ValidationReport::certifiable() const {
    return std::all_of(items.begin(), items.end(),
                       [](const auto& i) { return i.severity == Severity::ok; });
}

std::string ValidationReport::to_text() const {
    std::ostringstream os;
    for (const auto& i : items) {
        const char* tag = i.severity == Severity::ok ? "pass" : i.severity == Severity::warning ? "warn" : "FAIL";
        os << tag << "  " << i.name;
        if (i.severity != Severity::ok) os << "  (value " << i.value << ": " << i.message << ")";
        os << '\n';
    }
    return os.str();
}

ValidationReport validate_params(const SystemParams& p, const DelaySpec& dly, double horizon) {
    ValidationReport r;
    auto add = [&](std::string name, bool ok, double value, std::string msg, Severity bad = Severity::error) {
        r.items.push_back({std::move(name), ok ? Severity::ok : bad, value, ok ? std::string{} : std::move(msg)});
    };

    add("a > 0", p.a > 0, p.a, "third-derivative coefficient must be positive");
    add("a1 > 0", p.a1 > 0, p.a1, "fifth-derivative coefficient must be positive");
    add("L > 0", p.L > 0, p.L, "domain length must be positive");
    if (p.a > 0 && p.a1 > 0) {
        const double Lc = critical_length(p);
        add("L < pi*sqrt(5*a1/(3*a))", p.L < Lc, p.L,
            "exceeds " + std::to_string(Lc) + "; decay certification refused", Severity::warning);
    }

    add("tau0 > 0", dly.tau0 > 0, dly.tau0, "lower delay bound must be positive");
    add("M >= tau0", dly.M >= dly.tau0, dly.M, "upper delay bound below lower bound");
    add("0 <= d < 1", dly.d >= 0 && dly.d < 1, dly.d, "slope bound must lie in [0, 1)");

    const double T = std::max(horizon, dly.form == DelayForm::sinusoidal && dly.freq != 0
                                           ? 2.0 * std::numbers::pi / std::abs(dly.freq)
                                           : 0.0);
    constexpr int samples = 10000;
    double tau_min = INFINITY, tau_max = -INFINITY, slope_max = -INFINITY;
    for (int k = 0; k <= samples; ++k) {
        const auto [tau, tau_dot] = tau_at(dly, T * k / samples);
        tau_min = std::min(tau_min, tau);
        tau_max = std::max(tau_max, tau);
        slope_max = std::max(slope_max, tau_dot);
    }
    add("tau(t) >= tau0", tau_min >= dly.tau0 * (1 - 1e-12), tau_min, "delay dips below tau0");
    add("tau(t) <= M", tau_max <= dly.M * (1 + 1e-12), tau_max, "delay exceeds M");
    add("tau'(t) <= d", slope_max <= dly.d, slope_max, "delay slope exceeds d");

    const bool finite = std::all_of(dly.history.begin(), dly.history.end(),
                                    [](double v) { return std::isfinite(v); });
    add("history finite", finite, 0.0, "non-finite history sample");
    return r;
}

}  // namespace kdvd
