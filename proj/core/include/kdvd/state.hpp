#pragma once

#include <vector>

#include "kdvd/delay_line.hpp"

namespace kdvd {

/// Interleaved spline coefficients (eta_k at 2k, omega_k at 2k+1), trace history and time.
struct SimState {
    double t = 0.0;
    std::vector<double> u;
    HistoryLine history;
};

struct StepConfig {
    double dt = 1e-3;
    double theta = 0.5;     ///< implicitness weight in [1/2, 1]
    bool nonlinear = false;
    int picard_iters = 50;
    double picard_tol = 1e-12;
    int startup_steps = 2;  ///< leading steps taken as two backward-Euler half steps
};

}  // namespace kdvd
