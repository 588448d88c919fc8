#include "kdvd/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kdvd/errors.hpp"

namespace kdvd {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    double x = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(x))
        throw ConfigError("field '" + key + "': expected a number, got '" + v + "'");
    return x;
}

long to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (x != std::floor(x)) throw ConfigError("field '" + key + "': expected an integer, got '" + v + "'");
    return static_cast<long>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError("field '" + key + "': expected true/false, got '" + v + "'");
}

// "bump A K" -> A*sin^4(pi*s/tau) on K+1 points; "constant c K"; or a comma list.
std::vector<double> parse_history(const std::string& v, double tau_start) {
    std::istringstream is(v);
    std::string head;
    is >> head;
    if (head == "bump" || head == "constant") {
        double A = 0.0;
        long K = 0;
        if (!(is >> A >> K) || K < 1) throw ConfigError("history generator needs: " + head + " <value> <intervals>");
        std::vector<double> z(K + 1);
        for (long j = 0; j <= K; ++j) {
            const double s = -tau_start + tau_start * static_cast<double>(j) / K;
            z[j] = head == "constant" ? A : A * std::pow(std::sin(std::numbers::pi * s / tau_start), 4);
        }
        return z;
    }
    std::vector<double> z;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty()) z.push_back(to_double("history", item));
    return z;
}

}  // namespace

void set_config_value(Config& c, const std::string& section, const std::string& key, const std::string& value) {
    auto& s = c.system;
    auto& d = c.delay;
    auto& r = c.run;
    const std::string k = section + "." + key;
    if (section == "system") {
        if (key == "a") s.a = to_double(k, value);
        else if (key == "a1") s.a1 = to_double(k, value);
        else if (key == "L") s.L = to_double(k, value);
        else if (key == "alpha") s.alpha = to_double(k, value);
        else if (key == "beta") s.beta = to_double(k, value);
        else if (key == "alpha_p") s.alpha_p = to_double(k, value);
        else if (key == "beta_p") s.beta_p = to_double(k, value);
        else if (key == "rho_nl") s.rho_nl = to_double(k, value);
        else if (key == "c_nl") s.c_nl = to_double(k, value);
        else throw ConfigError("unknown field '" + k + "'");
    } else if (section == "delay") {
        if (key == "tau0") d.tau0 = to_double(k, value);
        else if (key == "M") d.M = to_double(k, value);
        else if (key == "d") d.d = to_double(k, value);
        else if (key == "form") d.form = delay_form_from_string(trim(value));
        else if (key == "base") d.base = to_double(k, value);
        else if (key == "rate") d.rate = to_double(k, value);
        else if (key == "amp") d.amp = to_double(k, value);
        else if (key == "freq") d.freq = to_double(k, value);
        else if (key == "history") d.history = parse_history(value, tau_at(d, 0.0).first);
        else throw ConfigError("unknown field '" + k + "'");
    } else if (section == "grid") {
        if (key == "n") c.n = static_cast<int>(to_int(k, value));
        else throw ConfigError("unknown field '" + k + "'");
    } else if (section == "run") {
        if (key == "dt") r.dt = to_double(k, value);
        else if (key == "horizon") r.horizon = to_double(k, value);
        else if (key == "theta") r.theta = to_double(k, value);
        else if (key == "nonlinear") r.nonlinear = to_bool(k, value);
        else if (key == "picard_iters") r.picard_iters = static_cast<int>(to_int(k, value));
        else if (key == "picard_tol") r.picard_tol = to_double(k, value);
        else if (key == "startup_steps") r.startup_steps = static_cast<int>(to_int(k, value));
        else if (key == "m") r.m = static_cast<int>(to_int(k, value));
        else if (key == "interp") {
            const std::string t = trim(value);
            if (t == "cubic") r.interp = Interp::cubic;
            else if (t == "linear") r.interp = Interp::linear;
            else throw ConfigError("field '" + k + "': expected cubic or linear");
        } else if (key == "mu1") r.mu1 = to_double(k, value);
        else if (key == "mu2") r.mu2 = to_double(k, value);
        else if (key == "slack") r.slack = to_double(k, value);
        else if (key == "fit_window") r.fit_window = to_double(k, value);
        else if (key == "init") {
            const std::string t = trim(value);
            if (t != "zero" && t != "poly" && t != "random") throw ConfigError("field '" + k + "': unknown profile");
            r.init = t;
        } else if (key == "amplitude") r.amplitude = to_double(k, value);
        else if (key == "seed") r.seed = static_cast<std::uint64_t>(to_int(k, value));
        else throw ConfigError("unknown field '" + k + "'");
    } else {
        throw ConfigError("unknown section [" + section + "]");
    }
}

Config parse_config(const std::string& text) {
    Config c;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    bool base_given = false;
    // history depends on tau(0); apply it after the rest of [delay] is known.
    std::string history_value;
    int history_line = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "system" && section != "delay" && section != "grid" && section != "run")
                throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": field outside any section");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (section == "delay" && key == "history") {
            history_value = value;
            history_line = lineno;
            continue;
        }
        if (section == "delay" && key == "base") base_given = true;
        try {
            set_config_value(c, section, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!base_given) c.delay.base = c.delay.tau0;
    if (!history_value.empty()) {
        try {
            set_config_value(c, "delay", "history", history_value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(history_line) + ": " + e.what());
        }
    }
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_text(const Config& c) {
    std::ostringstream os;
    os.precision(17);
    const auto& s = c.system;
    const auto& d = c.delay;
    const auto& r = c.run;
    os << "[system]\n"
       << "a = " << s.a << "\na1 = " << s.a1 << "\nL = " << s.L << "\nalpha = " << s.alpha << "\nbeta = " << s.beta
       << "\nalpha_p = " << s.alpha_p << "\nbeta_p = " << s.beta_p << "\nrho_nl = " << s.rho_nl
       << "\nc_nl = " << s.c_nl << "\n\n";
    os << "[delay]\n"
       << "tau0 = " << d.tau0 << "\nM = " << d.M << "\nd = " << d.d << "\nform = " << to_string(d.form)
       << "\nbase = " << d.base << "\nrate = " << d.rate << "\namp = " << d.amp << "\nfreq = " << d.freq << '\n';
    if (!d.history.empty()) {
        os << "history = ";
        for (size_t i = 0; i < d.history.size(); ++i) os << (i ? ", " : "") << d.history[i];
        os << '\n';
    }
    os << "\n[grid]\nn = " << c.n << "\n\n";
    os << "[run]\n"
       << "dt = " << r.dt << "\nhorizon = " << r.horizon << "\ntheta = " << r.theta
       << "\nnonlinear = " << (r.nonlinear ? "true" : "false") << "\npicard_iters = " << r.picard_iters
       << "\npicard_tol = " << r.picard_tol << "\nstartup_steps = " << r.startup_steps << "\nm = " << r.m
       << "\ninterp = " << (r.interp == Interp::cubic ? "cubic" : "linear") << "\nmu1 = " << r.mu1
       << "\nmu2 = " << r.mu2 << "\nslack = " << r.slack << "\nfit_window = " << r.fit_window
       << "\ninit = " << r.init << "\namplitude = " << r.amplitude << "\nseed = " << r.seed << '\n';
    return os.str();
}

}  // namespace kdvd
