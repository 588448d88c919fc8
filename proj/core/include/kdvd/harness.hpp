#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "kdvd/certificate.hpp"
#include "kdvd/config.hpp"
#include "kdvd/energy.hpp"
#include "kdvd/time_stepper.hpp"

namespace kdvd {

struct DecayFit {
    double lambda_obs = 0.0;
    double r2 = 0.0;
    double t_start = 0.0, t_end = 0.0;
    size_t points = 0;
    bool truncated = false; ///< window cut short where E stopped being positive
};

/// Least-squares slope of log E over the final `window` fraction of the series.
/// Samples at or below floor * E(first sample) count as underflow and truncate the window.
DecayFit fit_decay(const std::vector<std::pair<double, double>>& series, double window = 0.5, double floor = 1e-12);
DecayFit fit_decay(const std::vector<EnergySample>& samples, double window = 0.5, double floor = 1e-12);

struct BoundCheck {
    double max_ratio = 0.0; ///< max_k E(t_k) / (zeta E(0) exp(-lambda t_k))
    bool ok = false;
};

BoundCheck bound_check(const std::vector<EnergySample>& samples, double zeta, double lambda, double slack);

struct RunReport {
    std::string config_echo;
    ValidationReport validation;
    std::optional<StabilityCertificate> certificate;
    RunResult result;
    std::optional<double> dissipation_residual;
    KatoResult kato;
    DecayFit fit;
    std::optional<BoundCheck> bound;
};

/// Initial fields for the [run] init profile (zero | poly | random).
SimState make_initial_state(const SpatialOperators& ops, const Config& c);

/// Validation, certification (when permitted), run and post-processing.
RunReport simulate(const Config& c);

/// Columns: t, E, V, V1, V2, trace_now, trace_delayed.
void write_timeseries_csv(std::ostream& os, const std::vector<EnergySample>& samples);
std::string summary_text(const RunReport& r);

/// Manufactured-solution study with eta* = e^{-t} x^3 (L-x)^2, omega* = e^{-t} x^2 (L-x)^2.
struct ConvergenceRow {
    int n = 0;
    double h = 0.0, dt = 0.0;
    double error = 0.0; ///< L2 error of (eta, omega) at the horizon
    double order = 0.0; ///< log2 of the error ratio to the previous row (0 for the first)
};

struct ConvergenceOptions {
    int n0 = 24;
    int levels = 4;         ///< number of grids (three refinements for 4)
    double horizon = 0.5;
    double dt_coeff = 1.0;  ///< dt = dt_coeff * h^2
    double tau = 0.5;
};

std::vector<ConvergenceRow> manufactured_study(const SystemParams& p, const ConvergenceOptions& o = {});

/// Dyadic self-convergence: level k uses n_k = (n + 1) 2^k - 1 and dt / 2^k.
struct SelfConvergence {
    std::vector<int> n;
    std::vector<double> dt;
    std::vector<RunStatus> status;
    std::vector<double> final_energy_ratio; ///< E(T) / E(0) per level
    std::vector<double> diffs;              ///< L2 distance of (eta, omega) at T between levels k and k+1
    double order = 0.0;                     ///< log2(diffs[last-1] / diffs[last])
    bool completed = false;
};

SelfConvergence self_convergence(const Config& base, int levels = 3);

struct SweepAxis {
    std::string section, key;
    std::vector<std::string> values;
};

enum class SweepTask { certify, simulate, both };

struct SweepSpec {
    Config base;
    std::vector<SweepAxis> axes;
    SweepTask task = SweepTask::certify;
};

/// A config file with an extra [sweep] section: task = certify|simulate|both and
/// one line per axis, e.g. "system.alpha = 0.5, 1, 2".
SweepSpec parse_sweep(const std::string& text);

struct SweepRow {
    std::vector<std::string> point;
    bool admissible = false;
    double threshold = 0.0, mu1_star = 0.0, lambda_star = 0.0, lambda = 0.0, zeta = 0.0;
    std::optional<double> lambda_obs;
    std::string status;
};

/// Points run concurrently; rows come back in grid order (last axis fastest).
std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned threads = 0);
std::string sweep_table(const SweepSpec& spec, const std::vector<SweepRow>& rows);

}  // namespace kdvd
