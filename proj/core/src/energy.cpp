#include "kdvd/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kdvd/certificate.hpp"
#include "kdvd/errors.hpp"

namespace kdvd {

int effective_m(int m, double tau, double dt) {
    if (dt <= 0) return m;
    return std::max(m, static_cast<int>(std::ceil(tau / dt - 1e-9)));
}

namespace {

// Trapezoid sums of z^2 and (1 - rho) z^2 over [0, 1].
std::pair<double, double> profile_integrals(const HistoryLine& h, const DelaySpec& dly, double t, int m) {
    const ZProfile z = z_profile(h, dly, t, m);
    double s0 = 0.0, s1 = 0.0;
    for (int j = 0; j <= m; ++j) {
        const double w = (j == 0 || j == m) ? 0.5 / m : 1.0 / m;
        const double z2 = z.values[j] * z.values[j];
        s0 += w * z2;
        s1 += w * (1 - z.rho_nodes[j]) * z2;
    }
    return {s0, s1};
}

}  // namespace

double energy(const SpatialOperators& ops, const SimState& s, const DelaySpec& dly, int m) {
    const double field = 0.5 * ops.mass_norm2(s.u);
    const double ab = std::abs(ops.params().beta);
    if (ab == 0.0) return field;
    const double tau = tau_at(dly, s.t).first;
    return field + 0.5 * ab * tau * profile_integrals(s.history, dly, s.t, m).first;
}

LyapunovParts lyapunov(const SpatialOperators& ops, const SimState& s, const DelaySpec& dly, double mu1,
                       double mu2, int m) {
    const SystemParams& p = ops.params();
    if (mu1 < 0 || mu1 * p.L >= 1) throw ConfigError("mu1 must lie in [0, 1/L)");
    if (mu2 < 0 || mu2 >= 1) throw ConfigError("mu2 must lie in [0, 1)");
    LyapunovParts r;
    const double ab = std::abs(p.beta);
    r.E = 0.5 * ops.mass_norm2(s.u);
    if (ab != 0.0) {
        const double tau = tau_at(dly, s.t).first;
        const auto [i0, i1] = profile_integrals(s.history, dly, s.t, m);
        r.E += 0.5 * ab * tau * i0;
        r.V2 = 0.5 * ab * tau * i1;
    }
    r.V1 = ops.moment(s.u);
    r.V = r.E - mu1 * r.V1 + mu2 * r.V2;
    return r;
}

EnergySample sample_energy(const SpatialOperators& ops, const SimState& s, const DelaySpec& dly, double mu1,
                           double mu2, int m) {
    EnergySample e;
    const auto parts = lyapunov(ops, s, dly, mu1, mu2, m);
    e.t = s.t;
    e.E = parts.E;
    e.V1 = parts.V1;
    e.V2 = parts.V2;
    e.V = parts.V;
    e.trace_now = ops.trace(s.u);
    e.trace_delayed = delayed_trace(s.history, dly, s.t);
    const double slope = tau_at(dly, s.t).second;
    e.dissipation_rhs = 0.5 * phi_matrix(ops.params(), slope).quad(e.trace_now, e.trace_delayed);
    return e;
}

double dissipation_residual(const std::vector<EnergySample>& series) {
    if (series.size() < 3) throw DomainError("dissipation residual needs at least 3 samples");
    double worst = 0.0;
    for (size_t k = 1; k + 1 < series.size(); ++k) {
        const double rate = (series[k + 1].E - series[k - 1].E) / (series[k + 1].t - series[k - 1].t);
        worst = std::max(worst, std::abs(rate - series[k].dissipation_rhs));
    }
    return worst;
}

KatoRow kato_row(const SpatialOperators& ops, const SimState& s, const DelaySpec& dly, double extra_boundary) {
    const SystemParams& p = ops.params();
    const auto f = ops.fields_at_quad(s.u);
    const auto& w = ops.quad_w();
    const auto& x = ops.quad_x();
    KatoRow r;
    r.t = s.t;
    for (size_t q = 0; q < w.size(); ++q) {
        r.l2 += w[q] * (f.eta[0][q] * f.eta[0][q] + f.omega[0][q] * f.omega[0][q]);
        r.h1 += w[q] * (f.eta[1][q] * f.eta[1][q] + f.omega[1][q] * f.omega[1][q]);
        r.h2 += w[q] * (f.eta[2][q] * f.eta[2][q] + f.omega[2][q] * f.omega[2][q]);
        r.V1 += w[q] * x[q] * f.eta[0][q] * f.omega[0][q];
    }
    const double T = ops.trace(s.u);
    const double g = p.alpha * T + p.beta * delayed_trace(s.history, dly, s.t) + extra_boundary;
    r.bdry = T * T + g * g;
    return r;
}

double kato_constant_CL(const SystemParams& p) {
    constexpr double pi = std::numbers::pi;
    return 0.5 * (5 * p.a1 * pi * pi - 3 * p.a * p.L * p.L);
}

KatoResult kato_identity_residual(const std::vector<KatoRow>& rows, const SystemParams& p) {
    KatoResult r;
    r.C_L = kato_constant_CL(p);
    r.C_L_positive = r.C_L > 0;
    if (rows.size() < 2) return r;
    double il2 = 0, ih1 = 0, ih2 = 0, ib = 0;
    for (size_t k = 0; k + 1 < rows.size(); ++k) {
        const double h = 0.5 * (rows[k + 1].t - rows[k].t);
        il2 += h * (rows[k].l2 + rows[k + 1].l2);
        ih1 += h * (rows[k].h1 + rows[k + 1].h1);
        ih2 += h * (rows[k].h2 + rows[k + 1].h2);
        ib += h * (rows[k].bdry + rows[k + 1].bdry);
    }
    const double t1 = 0.5 * il2, t2 = -1.5 * p.a * ih1, t3 = 2.5 * p.a1 * ih2, t4 = -0.5 * p.a1 * p.L * ib;
    const double dV1 = rows.back().V1 - rows.front().V1;
    r.residual = t1 + t2 + t3 + t4 - dV1;
    r.residual_alt_sign = t1 + t2 + t3 + t4 + dV1;
    r.scale = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4) + std::abs(dV1);
    return r;
}

}  // namespace kdvd
