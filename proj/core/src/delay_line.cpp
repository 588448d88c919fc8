#include "kdvd/delay_line.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "kdvd/errors.hpp"

namespace kdvd {

HistoryLine::HistoryLine(double M, double slack, Interp interp) : M_(M), slack_(slack), interp_(interp) {}

void HistoryLine::push(double t, double v) {
    if (!t_.empty() && !(t > t_.back()))
        throw std::logic_error("history push at t=" + std::to_string(t) + " not after last sample " +
                               std::to_string(t_.back()));
    t_.push_back(t);
    v_.push_back(v);
    const double cutoff = t - M_ - slack_;
    while (t_.size() > 2 && t_[1] <= cutoff) {
        t_.pop_front();
        v_.pop_front();
    }
}

// Fritsch-Carlson monotone slopes; one-sided three-point rule at the ends.
double HistoryLine::slope(size_t i) const {
    const size_t n = t_.size();
    auto delta = [&](size_t k) { return (v_[k + 1] - v_[k]) / (t_[k + 1] - t_[k]); };
    auto width = [&](size_t k) { return t_[k + 1] - t_[k]; };
    if (n == 2) return delta(0);
    if (i == 0 || i == n - 1) {
        const size_t k0 = i == 0 ? 0 : n - 2, k1 = i == 0 ? 1 : n - 3;
        const double h0 = width(k0), h1 = width(k1), d0 = delta(k0), d1 = delta(k1);
        double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0) d = 0.0;
        else if (d0 * d1 < 0 && std::abs(d) > 3 * std::abs(d0)) d = 3 * d0;
        return d;
    }
    const double d0 = delta(i - 1), d1 = delta(i);
    if (d0 * d1 <= 0) return 0.0;
    const double h0 = width(i - 1), h1 = width(i);
    const double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
    return (w1 + w2) / (w1 / d0 + w2 / d1);
}

double HistoryLine::value_at(double s) const {
    if (t_.empty() || s < t_.front())
        throw HistoryUnderrun("history underrun: query at " + std::to_string(s) +
                              (t_.empty() ? std::string(" on empty history")
                                          : " before first sample " + std::to_string(t_.front())));
    if (s > t_.back())
        throw std::out_of_range("history query at " + std::to_string(s) + " after last sample");
    auto it = std::upper_bound(t_.begin(), t_.end(), s);
    size_t i = static_cast<size_t>(it - t_.begin());
    if (i > 0 && t_[i - 1] == s) return v_[i - 1];
    if (i == t_.size()) return v_.back();
    --i;
    const double h = t_[i + 1] - t_[i];
    const double x = (s - t_[i]) / h;
    if (interp_ == Interp::linear || t_.size() < 3) return v_[i] + x * (v_[i + 1] - v_[i]);
    const double x2 = x * x, x3 = x2 * x;
    return (2 * x3 - 3 * x2 + 1) * v_[i] + (x3 - 2 * x2 + x) * h * slope(i) + (-2 * x3 + 3 * x2) * v_[i + 1] +
           (x3 - x2) * h * slope(i + 1);
}

double HistoryLine::integral_sq(double s0, double s1) const {
    if (s1 <= s0) return 0.0;
    // Four Gauss points per piece integrate the squared cubic exactly.
    static const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
    static const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
    double total = 0.0;
    double a = s0;
    auto it = std::upper_bound(t_.begin(), t_.end(), s0);
    while (a < s1) {
        const double b = it == t_.end() ? s1 : std::min(s1, *it);
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int k = 0; k < 4; ++k) {
            const double v = value_at(mid + half * gx[k]);
            total += half * gw[k] * v * v;
        }
        a = b;
        if (it != t_.end()) ++it;
    }
    return total;
}

HistoryLine push_trace(HistoryLine h, double t, double v) {
    h.push(t, v);
    return h;
}

HistoryLine seed_history(const DelaySpec& dly, double trace0, double slack, Interp interp) {
    const double tau_start = tau_at(dly, 0.0).first;
    HistoryLine h(dly.M, slack, interp);
    const auto& z = dly.history;
    if (z.size() < 2) {
        const double c = z.empty() ? 0.0 : z.front();
        h.push(-tau_start, c);
    } else {
        const size_t K = z.size() - 1;
        for (size_t j = 0; j < K; ++j) h.push(-tau_start + tau_start * static_cast<double>(j) / K, z[j]);
    }
    h.push(0.0, trace0);
    return h;
}

double delayed_trace(const HistoryLine& h, const DelaySpec& dly, double t) {
    return h.value_at(t - tau_at(dly, t).first);
}

ZProfile z_profile(const HistoryLine& h, const DelaySpec& dly, double t, int m) {
    if (m < 1) throw DomainError("rho resolution must be positive");
    const double tau = tau_at(dly, t).first;
    ZProfile z;
    z.rho_nodes.resize(m + 1);
    z.values.resize(m + 1);
    for (int j = 0; j <= m; ++j) {
        const double rho = static_cast<double>(j) / m;
        z.rho_nodes[j] = rho;
        z.values[j] = h.value_at(t - tau * rho);
    }
    return z;
}

double transport_residual(const HistoryLine& h, const DelaySpec& dly, double t, int m, double dt) {
    if (m < 2) throw DomainError("transport residual needs m >= 2");
    const auto z0 = z_profile(h, dly, t, m);
    const auto z1 = z_profile(h, dly, t - dt, m);
    const auto z2 = z_profile(h, dly, t - 2 * dt, m);
    const auto [tau, tau_dot] = tau_at(dly, t);
    const double drho = 1.0 / m;
    double worst = 0.0;
    for (int j = 1; j < m; ++j) {
        const double zt = (3 * z0.values[j] - 4 * z1.values[j] + z2.values[j]) / (2 * dt);
        const double zr = (z0.values[j + 1] - z0.values[j - 1]) / (2 * drho);
        worst = std::max(worst, std::abs(tau * zt + (1 - tau_dot * z0.rho_nodes[j]) * zr));
    }
    return worst;
}

}  // namespace kdvd
