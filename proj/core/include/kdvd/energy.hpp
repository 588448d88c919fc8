#pragma once

#include <vector>

#include "kdvd/params.hpp"
#include "kdvd/spatial_operator.hpp"
#include "kdvd/state.hpp"

namespace kdvd {

struct EnergySample {
    double t = 0, E = 0, V1 = 0, V2 = 0, V = 0;
    double trace_now = 0, trace_delayed = 0;
    double dissipation_rhs = 0; ///< (1/2) q^T Phi(tau'(t)) q
};

/// rho-resolution actually used at time t: never coarser than the step dt.
int effective_m(int m, double tau, double dt);

/// E = (1/2) int (eta^2 + omega^2) + (|beta|/2) tau int_0^1 z^2 drho.
double energy(const SpatialOperators& ops, const SimState& s, const DelaySpec& dly, int m);

struct LyapunovParts {
    double E = 0, V1 = 0, V2 = 0, V = 0;
};

/// V = E - mu1 V1 + mu2 V2 with V1 = int x eta omega and V2 = (|beta|/2) tau int (1 - rho) z^2.
LyapunovParts lyapunov(const SpatialOperators& ops, const SimState& s, const DelaySpec& dly, double mu1,
                       double mu2, int m);

/// Full per-step sample (energy pieces, traces, dissipation right-hand side).
EnergySample sample_energy(const SpatialOperators& ops, const SimState& s, const DelaySpec& dly, double mu1,
                           double mu2, int m);

/// max over interior samples of |centered dE/dt - (1/2) q^T Phi q|.
double dissipation_residual(const std::vector<EnergySample>& series);

/// Per-step integrands of the multiplier identity.
struct KatoRow {
    double t = 0;
    double l2 = 0;    ///< int eta^2 + omega^2
    double h1 = 0;    ///< int eta_x^2 + omega_x^2
    double h2 = 0;    ///< int eta_xx^2 + omega_xx^2
    double bdry = 0;  ///< eta_xx(L)^2 + omega_xx(L)^2, omega_xx(L) from the feedback law
    double V1 = 0;
};

/// omega_xx(L) is the feedback value g = alpha*trace + beta*delayed (+ extra datum).
KatoRow kato_row(const SpatialOperators& ops, const SimState& s, const DelaySpec& dly, double extra_boundary = 0.0);

struct KatoResult {
    double residual = 0;            ///< with +[V1(T) - V1(0)] on the right-hand side
    double residual_alt_sign = 0;   ///< with the opposite sign on the moment term
    double scale = 0;               ///< sum of magnitudes of the terms
    double C_L = 0;
    bool C_L_positive = false;
};

/// C_L = (5 a1 pi^2 - 3 a L^2)/2.
double kato_constant_CL(const SystemParams& p);

KatoResult kato_identity_residual(const std::vector<KatoRow>& rows, const SystemParams& p);

}  // namespace kdvd
