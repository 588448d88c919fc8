#pragma once

#include <string>
#include <utility>

#include "kdvd/params.hpp"

namespace kdvd {

/// Symmetric 2x2 matrix [[a11, a12], [a12, a22]].
struct Sym2 {
    double a11 = 0, a12 = 0, a22 = 0;

    double det() const { return a11 * a22 - a12 * a12; }
    /// Eigenvalues in ascending order.
    std::pair<double, double> eigenvalues() const;
    bool negative_definite() const { return a11 < 0 && det() > 0; }
    double quad(double x, double y) const { return a11 * x * x + 2 * a12 * x * y + a22 * y * y; }
};

/// Phi = [[-2 a1 alpha + |beta|, -a1 beta], [-a1 beta, |beta|(s - 1)]] with slope s.
Sym2 phi_matrix(const SystemParams& p, double slope);
/// Psi = Phi + (a1 L mu1/2)[[alpha^2+1, alpha beta],[alpha beta, beta^2]] + (|beta| mu2/2)[[1,0],[0,0]].
Sym2 psi_matrix(const SystemParams& p, const DelaySpec& dly, double mu1, double mu2);

struct GainCheck {
    bool admissible = false;
    Sym2 phi;
    double threshold = 0.0;
};

/// alpha > (|beta|/(2 a1)) (a1^2 + 1 - d)/(1 - d); beta = 0 reduces to alpha > 0.
GainCheck check_gains(const SystemParams& p, const DelaySpec& dly);

struct DecayConstants {
    double lambda = 0.0;
    double zeta = 1.0;
    double bracket_field = 0.0;  ///< mu1 pi^2 (5 a1 pi^2 - 3 a L^2) / (L^4 (1 + mu1 L))
    double bracket_delay = 0.0;  ///< mu2 (1 - d) / (M (1 + mu2))
    double bracket_field_alt = 0.0; ///< same with L^4 (1 + mu1)
    double lambda_alt = 0.0;
    double mu1 = 0.0, mu2 = 0.0; ///< after any shrinking
    int shrinks = 0;             ///< halvings needed to make Psi negative definite
};

DecayConstants decay_constants(const SystemParams& p, const DelaySpec& dly, double mu1, double mu2);

/// Right endpoint of the admissible mu1 interval.
double mu1_interval_end(const SystemParams& p, const DelaySpec& dly);
double f_of_mu1(const SystemParams& p, double mu1);
double g_of_mu1(const SystemParams& p, const DelaySpec& dly, double mu1);

struct OptimalRate {
    double mu1_star = 0.0;
    double lambda_star = 0.0;
    int iterations = 0;
};

/// Bisection on f - g over [0, mu1_interval_end].
OptimalRate optimal_mu1(const SystemParams& p, const DelaySpec& dly, double tol = 1e-12);

/// Largest mu2 on the grid 0.999 * 0.95^k keeping Psi negative definite.
double choose_mu2(const SystemParams& p, const DelaySpec& dly, double mu1);

struct StabilityCertificate {
    bool admissible = false;
    bool L_condition_ok = false;
    bool certified = false;
    double threshold = 0.0;
    Sym2 phi, psi;
    double mu1 = 0.0, mu2 = 0.0;
    double lambda = 0.0, zeta = 1.0;
    double bracket_field = 0.0, bracket_delay = 0.0;
    double bracket_field_alt = 0.0, lambda_alt = 0.0;
    double mu1_interval_end = 0.0;
    double mu1_star = 0.0, lambda_star = 0.0;
    int shrinks = 0;
    std::string note;

    std::string to_text() const;
};

/// Full certification. mu1/mu2 <= 0 select mu1* and choose_mu2(mu1*).
StabilityCertificate certify(const SystemParams& p, const DelaySpec& dly, double mu1 = 0.0, double mu2 = 0.0);

}  // namespace kdvd
