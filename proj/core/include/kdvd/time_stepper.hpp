#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kdvd/banded.hpp"
#include "kdvd/energy.hpp"
#include "kdvd/params.hpp"
#include "kdvd/spatial_operator.hpp"
#include "kdvd/state.hpp"

namespace kdvd {

/// Optional time-dependent inputs: an interleaved load added to the right-hand
/// side and an extra datum added to the feedback value omega_xx(L).
struct Forcing {
    std::function<std::vector<double>(double t)> load;
    std::function<double(double t)> boundary;
};

/// Theta-scheme integrator with the delayed boundary datum treated explicitly.
/// Factorizations are computed once at construction.
class Stepper {
public:
    Stepper(const SpatialOperators& ops, const StepConfig& cfg, const DelaySpec& dly, Forcing forcing = {});

    /// One theta step of size dt; pushes the new trace to the history.
    void step(SimState& s) const;
    /// Two backward-Euler half steps covering dt.
    void startup_step(SimState& s) const;

    const StepConfig& config() const { return cfg_; }
    int last_picard_iterations() const { return picard_last_; }

private:
    void substep(SimState& s, double h, double theta, const BandedLU& lu, double t_new) const;

    const SpatialOperators& ops_;
    StepConfig cfg_;
    DelaySpec dly_;
    Forcing forcing_;
    BandedLU lu_, be_lu_;
    mutable int picard_last_ = 0;
};

/// Functional single step (factorizes on every call; prefer Stepper in loops).
SimState step(const SimState& s, const SpatialOperators& ops, const StepConfig& cfg, const DelaySpec& dly);

/// Initial state: projected fields and a history seeded from z0 and the initial trace.
SimState initial_state(const SpatialOperators& ops, const DelaySpec& dly, const std::function<double(double)>& eta0,
                       const std::function<double(double)>& omega0, double dt, Interp interp = Interp::cubic);

struct RunMonitors {
    int m = 64;          ///< base rho-resolution
    double mu1 = 0.0;    ///< Lyapunov weights for V
    double mu2 = 0.0;
    bool kato = true;
    long stride = 1;     ///< record every stride-th step; the final step is always recorded
    double blowup = 1e8; ///< E > blowup * max(E(0), tiny) flags the run unstable
};

enum class RunStatus { completed, nonlinear_divergence, numerical_error, unstable };
std::string to_string(RunStatus s);

struct RunResult {
    std::vector<EnergySample> samples;
    std::vector<KatoRow> kato;
    RunStatus status = RunStatus::completed;
    std::string message;
    SimState final_state;
    int max_picard = 0;
};

/// Steps to T (floor(T/dt) steps) sampling the monitors after every step.
RunResult run(SimState s0, double T, const SpatialOperators& ops, const StepConfig& cfg, const DelaySpec& dly,
              const RunMonitors& monitors = {}, Forcing forcing = {});

}  // namespace kdvd
