#pragma once

#include <string>
#include <utility>
#include <vector>

namespace kdvd {

/// Physical coefficients, nonlinear coefficients and feedback gains.
struct SystemParams {
    double a = 1.0;       ///< third-derivative coefficient
    double a1 = 1.0;      ///< fifth-derivative coefficient
    double L = 1.0;       ///< domain length
    double alpha = 2.0;   ///< instantaneous gain
    double beta = 1.0;    ///< delayed gain
    double alpha_p = 1.0; ///< nonlinear coefficient of (eta*omega_xx)_x
    double beta_p = 1.0;  ///< nonlinear coefficient of omega_x*omega_xx
    double rho_nl = 1.0;  ///< nonlinear coefficient of omega*omega_xxx
    double c_nl = 1.0;    ///< nonlinear coefficient of (omega*omega_x)_xx
};

enum class DelayForm { constant, affine, sinusoidal };

std::string to_string(DelayForm f);
DelayForm delay_form_from_string(const std::string& s);

/// Delay law tau(t) with its standing bounds and the initial boundary-trace history.
///
/// tau0 and M are the lower and upper bounds on tau(t); d bounds tau'(t).
/// The law itself starts from `base`:
///   constant:   tau = base
///   affine:     tau = base + rate*t, saturated to [tau0, M]
///   sinusoidal: tau = base + amp*sin(freq*t)
struct DelaySpec {
    double tau0 = 1.0;
    double M = 1.0;
    double d = 0.0;
    DelayForm form = DelayForm::constant;
    double base = 1.0;
    double rate = 0.0;
    double amp = 0.0;
    double freq = 1.0;
    /// z0 sampled uniformly on [-tau(0), 0]; empty means zero history.
    std::vector<double> history;
};

struct Grid {
    int n = 0;
    double h = 0.0;
    std::vector<double> nodes; ///< interior nodes x_j = j*h, j = 1..n
};

/// Returns (tau(t), tau'(t)) for the closed-form delay laws.
std::pair<double, double> tau_at(const DelaySpec& dly, double t);

/// Upper end of the certifiable domain length, pi*sqrt(5*a1/(3*a)).
double critical_length(const SystemParams& p);

Grid make_grid(double L, int n);

enum class Severity { ok, warning, error };

struct ValidationItem {
    std::string name;
    Severity severity = Severity::ok;
    double value = 0.0;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationItem> items;

    /// No errors; warnings allowed (simulation permitted).
    bool simulatable() const;
    /// No errors and no warnings (certification permitted).
    bool certifiable() const;
    std::string to_text() const;
};

/// Checks every standing hypothesis; tau is sampled densely on [0, horizon].
ValidationReport validate_params(const SystemParams& p, const DelaySpec& dly, double horizon = 10.0);

}  // namespace kdvd
