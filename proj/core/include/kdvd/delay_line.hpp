#pragma once

#include <deque>
#include <vector>

#include "kdvd/params.hpp"

namespace kdvd {

enum class Interp { cubic, linear };

/// Boundary-trace history: strictly increasing (time, value) samples spanning
/// at least [t - M, t]. Intermediate values by monotone piecewise-cubic
/// Hermite interpolation (Fritsch-Carlson slopes) or linear interpolation.
class HistoryLine {
public:
    HistoryLine() = default;
    /// Samples older than (last time - M - slack) are evicted on push.
    HistoryLine(double M, double slack, Interp interp = Interp::cubic);

    /// Appends (t, v); t must exceed the last stored time.
    void push(double t, double v);
    /// Interpolated trace at time s; throws HistoryUnderrun before the first sample.
    double value_at(double s) const;
    /// Exact integral of the squared interpolant over [s0, s1].
    double integral_sq(double s0, double s1) const;

    Interp interp() const { return interp_; }
    double max_delay() const { return M_; }
    double slack() const { return slack_; }
    size_t size() const { return t_.size(); }
    bool empty() const { return t_.empty(); }
    double front_time() const { return t_.front(); }
    double back_time() const { return t_.back(); }
    double back_value() const { return v_.back(); }
    double time(size_t i) const { return t_[i]; }
    double value(size_t i) const { return v_[i]; }

    bool operator==(const HistoryLine&) const = default;

private:
    double slope(size_t i) const;

    double M_ = 0.0, slack_ = 0.0;
    Interp interp_ = Interp::cubic;
    std::deque<double> t_, v_;
};

/// Functional form of the push operation.
HistoryLine push_trace(HistoryLine h, double t, double v);

/// Seeds a history from z0 samples on [-tau(0), 0) and the initial trace at t = 0.
HistoryLine seed_history(const DelaySpec& dly, double trace0, double slack, Interp interp = Interp::cubic);

/// Trace at t - tau(t).
double delayed_trace(const HistoryLine& h, const DelaySpec& dly, double t);

struct ZProfile {
    std::vector<double> rho_nodes;
    std::vector<double> values;
};

/// z(t, rho_j) = trace(t - tau(t)*rho_j) for rho_j = j/m, j = 0..m.
ZProfile z_profile(const HistoryLine& h, const DelaySpec& dly, double t, int m);

/// max over interior rho-nodes of |tau*z_t + (1 - tau'*rho)*z_rho|, with z_t by
/// the second-order backward difference of step dt and z_rho centered.
double transport_residual(const HistoryLine& h, const DelaySpec& dly, double t, int m, double dt);

}  // namespace kdvd
