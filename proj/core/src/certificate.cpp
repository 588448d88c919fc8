#include "kdvd/certificate.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kdvd/errors.hpp"

namespace kdvd {

namespace {

constexpr double pi = std::numbers::pi;

void require_slope(const DelaySpec& dly) {
    if (!(dly.d >= 0 && dly.d < 1)) throw ConfigError("slope bound d must lie in [0, 1)");
}

double kato_constant(const SystemParams& p) { return pi * pi * (5 * p.a1 * pi * pi - 3 * p.a * p.L * p.L); }

double delay_bracket(const DelaySpec& dly, double mu2) { return mu2 * (1 - dly.d) / (dly.M * (1 + mu2)); }

}  // namespace

std::pair<double, double> Sym2::eigenvalues() const {
    const double m = 0.5 * (a11 + a22);
    const double r = std::hypot(0.5 * (a11 - a22), a12);
    return {m - r, m + r};
}

Sym2 phi_matrix(const SystemParams& p, double slope) {
    const double ab = std::abs(p.beta);
    return {-2 * p.a1 * p.alpha + ab, -p.a1 * p.beta, ab * (slope - 1)};
}

Sym2 psi_matrix(const SystemParams& p, const DelaySpec& dly, double mu1, double mu2) {
    Sym2 s = phi_matrix(p, dly.d);
    const double c = 0.5 * p.a1 * p.L * mu1;
    s.a11 += c * (p.alpha * p.alpha + 1) + 0.5 * std::abs(p.beta) * mu2;
    s.a12 += c * p.alpha * p.beta;
    s.a22 += c * p.beta * p.beta;
    return s;
}

namespace {

// beta = 0 drops the delay channel: only the (1,1) entry carries the form.
bool psi_ok(const SystemParams& p, const DelaySpec& dly, double mu1, double mu2) {
    const Sym2 s = psi_matrix(p, dly, mu1, mu2);
    return p.beta == 0.0 ? s.a11 < 0 : s.negative_definite();
}

}  // namespace

GainCheck check_gains(const SystemParams& p, const DelaySpec& dly) {
    require_slope(dly);
    if (!(p.a1 > 0)) throw ConfigError("a1 must be positive");
    GainCheck g;
    g.phi = phi_matrix(p, dly.d);
    g.threshold = std::abs(p.beta) / (2 * p.a1) * (p.a1 * p.a1 + 1 - dly.d) / (1 - dly.d);
    g.admissible = p.beta == 0.0 ? p.alpha > 0 : (p.alpha > g.threshold && g.phi.negative_definite());
    return g;
}

DecayConstants decay_constants(const SystemParams& p, const DelaySpec& dly, double mu1, double mu2) {
    require_slope(dly);
    if (!(p.L < critical_length(p)))
        throw CertificationRefused("L = " + std::to_string(p.L) + " outside the certifiable range");
    if (mu1 < 0 || mu1 * p.L >= 1) throw ConfigError("mu1 must lie in [0, 1/L)");
    if (mu2 < 0 || mu2 >= 1) throw ConfigError("mu2 must lie in [0, 1)");
    DecayConstants c;
    while (!psi_ok(p, dly, mu1, mu2)) {
        if (++c.shrinks > 60) throw InadmissibleError("Psi is not negative definite for any shrunk (mu1, mu2)");
        mu1 *= 0.5;
        mu2 *= 0.5;
    }
    const double L4 = std::pow(p.L, 4);
    c.mu1 = mu1;
    c.mu2 = mu2;
    c.bracket_field = mu1 * kato_constant(p) / (L4 * (1 + mu1 * p.L));
    c.bracket_field_alt = mu1 * kato_constant(p) / (L4 * (1 + mu1));
    c.bracket_delay = delay_bracket(dly, mu2);
    c.lambda = std::min(c.bracket_field, c.bracket_delay);
    c.lambda_alt = std::min(c.bracket_field_alt, c.bracket_delay);
    const double m = std::max(mu1 * p.L, mu2);
    c.zeta = (1 + m) / (1 - m);
    return c;
}

double mu1_interval_end(const SystemParams& p, const DelaySpec& dly) {
    require_slope(dly);
    const double ab = std::abs(p.beta), d = dly.d, a1 = p.a1, al = p.alpha;
    return ((2 * a1 * al - ab) * (1 - d) - a1 * a1 * ab) / (p.L * (1 - d) * (a1 * a1 + al * al));
}

double f_of_mu1(const SystemParams& p, double mu1) {
    if (mu1 < 0) throw DomainError("mu1 must be non-negative");
    return mu1 * kato_constant(p) / (std::pow(p.L, 4) * (1 + mu1 * p.L));
}

double g_of_mu1(const SystemParams& p, const DelaySpec& dly, double mu1) {
    const double end = mu1_interval_end(p, dly);
    if (mu1 < 0 || mu1 > end * (1 + 1e-14))
        throw DomainError("mu1 = " + std::to_string(mu1) + " outside [0, " + std::to_string(end) + "]");
    const double ab = std::abs(p.beta), d = dly.d, a1 = p.a1, al = p.alpha;
    const double shift = p.L * (1 - d) * (a1 * a1 + al * al) * mu1;
    const double num = (2 * a1 * al - ab) * (1 - d) - a1 * a1 * ab - shift;
    const double den = dly.M * (2 * a1 * al * (1 - d) - a1 * a1 * ab - shift);
    if (!(den > 0)) throw InadmissibleError("g denominator is not positive; gains inadmissible");
    return (1 - d) * num / den;
}

OptimalRate optimal_mu1(const SystemParams& p, const DelaySpec& dly, double tol) {
    if (!check_gains(p, dly).admissible) throw InadmissibleError("gains are not admissible");
    if (!(p.L < critical_length(p))) throw CertificationRefused("L outside the certifiable range");
    const double end = mu1_interval_end(p, dly);
    if (!(end > 0)) throw InadmissibleError("empty mu1 interval");

    OptimalRate r;
    if (p.beta == 0.0) {
        // g is constant away from the degenerate endpoint; use the grid delay bracket.
        const double target = delay_bracket(dly, choose_mu2(p, dly, 0.0));
        if (f_of_mu1(p, end) <= target) {
            r.mu1_star = end;
            r.lambda_star = f_of_mu1(p, end);
            return r;
        }
        double lo = 0.0, hi = end;
        while (hi - lo > 1e-16 * end && r.iterations < 200) {
            const double mid = 0.5 * (lo + hi);
            const double F = f_of_mu1(p, mid) - target;
            ++r.iterations;
            if (std::abs(F) <= tol) {
                lo = hi = mid;
                break;
            }
            (F < 0 ? lo : hi) = mid;
        }
        r.mu1_star = 0.5 * (lo + hi);
        r.lambda_star = f_of_mu1(p, r.mu1_star);
        return r;
    }

    auto F = [&](double mu) { return f_of_mu1(p, mu) - g_of_mu1(p, dly, mu); };
    const double F0 = F(0.0), F1 = F(end);
    if (!(F0 < 0 && F1 > 0))
        throw InadmissibleError("bisection bracket invalid: F(0) = " + std::to_string(F0) +
                                ", F(end) = " + std::to_string(F1));
    double lo = 0.0, hi = end, mid = 0.5 * end;
    while (r.iterations < 200) {
        mid = 0.5 * (lo + hi);
        const double v = F(mid);
        ++r.iterations;
        if (std::abs(v) <= tol || hi - lo <= 1e-17 * end) break;
        (v < 0 ? lo : hi) = mid;
    }
    r.mu1_star = mid;
    r.lambda_star = f_of_mu1(p, mid);
    return r;
}

double choose_mu2(const SystemParams& p, const DelaySpec& dly, double mu1) {
    if (!check_gains(p, dly).admissible) throw InadmissibleError("gains are not admissible");
    if (mu1 < 0 || mu1 * p.L >= 1) throw InadmissibleError("mu1*L must lie in [0, 1)");
    for (double mu2 = 0.999; mu2 > 1e-12; mu2 *= 0.95)
        if (psi_ok(p, dly, mu1, mu2)) return mu2;
    throw InadmissibleError("no feasible mu2 for mu1 = " + std::to_string(mu1));
}

StabilityCertificate certify(const SystemParams& p, const DelaySpec& dly, double mu1, double mu2) {
    StabilityCertificate c;
    const GainCheck g = check_gains(p, dly);
    c.admissible = g.admissible;
    c.threshold = g.threshold;
    c.phi = g.phi;
    c.L_condition_ok = p.L > 0 && p.L < critical_length(p);
    if (!c.admissible) {
        c.note = "gains inadmissible: alpha must exceed " + std::to_string(g.threshold);
        return c;
    }
    if (!c.L_condition_ok) {
        c.note = "L outside (0, pi*sqrt(5*a1/(3*a))); decay certification refused";
        return c;
    }
    c.mu1_interval_end = mu1_interval_end(p, dly);
    const OptimalRate opt = optimal_mu1(p, dly);
    c.mu1_star = opt.mu1_star;
    c.lambda_star = opt.lambda_star;
    const double m1 = mu1 > 0 ? mu1 : opt.mu1_star;
    const double m2 = mu2 > 0 ? mu2 : choose_mu2(p, dly, m1);
    const DecayConstants dc = decay_constants(p, dly, m1, m2);
    c.mu1 = dc.mu1;
    c.mu2 = dc.mu2;
    c.shrinks = dc.shrinks;
    c.psi = psi_matrix(p, dly, dc.mu1, dc.mu2);
    c.lambda = dc.lambda;
    c.zeta = dc.zeta;
    c.bracket_field = dc.bracket_field;
    c.bracket_delay = dc.bracket_delay;
    c.bracket_field_alt = dc.bracket_field_alt;
    c.lambda_alt = dc.lambda_alt;
    c.certified = true;
    return c;
}

std::string StabilityCertificate::to_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "[certificate]\n";
    os << "admissible = " << (admissible ? "true" : "false") << '\n';
    os << "L_condition_ok = " << (L_condition_ok ? "true" : "false") << '\n';
    os << "certified = " << (certified ? "true" : "false") << '\n';
    os << "threshold = " << threshold << '\n';
    os << "phi = " << phi.a11 << ", " << phi.a12 << ", " << phi.a12 << ", " << phi.a22 << '\n';
    os << "phi_det = " << phi.det() << '\n';
    os << "psi = " << psi.a11 << ", " << psi.a12 << ", " << psi.a12 << ", " << psi.a22 << '\n';
    os << "mu1 = " << mu1 << '\n';
    os << "mu2 = " << mu2 << '\n';
    os << "lambda = " << lambda << '\n';
    os << "zeta = " << zeta << '\n';
    os << "bracket_field = " << bracket_field << '\n';
    os << "bracket_delay = " << bracket_delay << '\n';
    os << "bracket_field_alt = " << bracket_field_alt << '\n';
    os << "lambda_alt = " << lambda_alt << '\n';
    os << "mu1_interval = 0, " << mu1_interval_end << '\n';
    os << "mu1_star = " << mu1_star << '\n';
    os << "lambda_star = " << lambda_star << '\n';
    os << "shrinks = " << shrinks << '\n';
    if (!note.empty()) os << "note = " << note << '\n';
    return os.str();
}

}  // namespace kdvd
