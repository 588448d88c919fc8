#pragma once

#include <cstdint>
#include <string>

#include "kdvd/delay_line.hpp"
#include "kdvd/params.hpp"

namespace kdvd {

struct RunSettings {
    double dt = 1e-3;
    double horizon = 5.0;
    double theta = 0.5;
    bool nonlinear = false;
    int picard_iters = 50;
    double picard_tol = 1e-12;
    int startup_steps = 2;
    int m = 64;
    Interp interp = Interp::cubic;
    double mu1 = 0.0; ///< 0 selects mu1*
    double mu2 = 0.0; ///< 0 selects choose_mu2
    double slack = 0.02;
    double fit_window = 0.5;
    std::string init = "zero"; ///< zero | poly | random
    double amplitude = 1.0;
    std::uint64_t seed = 1;
};

/// Sections [system], [delay], [grid], [run].
struct Config {
    SystemParams system;
    DelaySpec delay;
    int n = 200;
    RunSettings run;
};

/// Parses the structured text format; throws ConfigError with the line number.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);
/// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const Config& c);

/// Assigns one field from its text value (used by parsing and sweeps).
void set_config_value(Config& c, const std::string& section, const std::string& key, const std::string& value);

}  // namespace kdvd
