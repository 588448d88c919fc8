#include <doctest.h>

#include <cmath>
#include <random>

#include "kdvd/spatial_operator.hpp"
#include "poly.hpp"

using namespace kdvd;
using testing_support::L_minus_x_pow;
using testing_support::Poly;

namespace {

DerivFn deriv_fn(const Poly& p) {
    return [p](double x, int k) { return p.d(k)(x); };
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_SUITE("spatial_operator") {

TEST_CASE("weak fifth derivative of x^2 (L-x)^2 vanishes") {
    for (double L : {1.0, 2.5}) {
        SystemParams p;
        p.L = L;
        const SpatialOperators ops(p, make_grid(L, 40));
        const Poly q = Poly::x_pow(2) * L_minus_x_pow(L, 2);
        const auto b = ops.eta_eq_load(5, deriv_fn(q));
        const double scale = max_abs(ops.closure().trace) * std::abs(q.d(2)(L));
        CHECK(max_abs(b) <= 1e-10 * scale);
    }
}

TEST_CASE("weak loads match the classical derivatives of compatible polynomials") {
    const double L = 1.3;
    SystemParams p;
    p.L = L;
    const SpatialOperators ops(p, make_grid(L, 30));
    // omega-type: f = f' = 0 at both ends; eta-type adds f'' = 0 at 0
    const Poly fw = Poly::x_pow(2) * L_minus_x_pow(L, 2) * Poly{{1.0, 2.0, 0.0, -1.0}};
    const Poly fe = Poly::x_pow(3) * L_minus_x_pow(L, 2) * Poly{{1.0, 1.0}};
    for (int k : {1, 3, 5}) {
        const Poly dw = fw.d(k), de = fe.d(k);
        const auto lhs_w = ops.eta_eq_load(k, deriv_fn(fw));
        const auto rhs_w = ops.eta_load([&](double x) { return dw(x); });
        const auto lhs_e = ops.omega_eq_load(k, deriv_fn(fe));
        const auto rhs_e = ops.omega_load([&](double x) { return de(x); });
        const double sw = max_abs(rhs_w) + 1.0, se = max_abs(rhs_e) + 1.0;
        for (size_t i = 0; i < lhs_w.size(); ++i) CHECK(std::abs(lhs_w[i] - rhs_w[i]) <= 1e-10 * sw);
        for (size_t i = 0; i < lhs_e.size(); ++i) CHECK(std::abs(lhs_e[i] - rhs_e[i]) <= 1e-10 * se);
    }
}

TEST_CASE("matrices reproduce the weak loads of spline functions") {
    SystemParams p;
    const SpatialOperators ops(p, make_grid(1.0, 20));
    const int m = ops.field_size();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<double> u(2 * m), ce(m), cw(m);
    for (int i = 0; i < m; ++i) {
        u[2 * i] = ce[i] = U(rng);
        u[2 * i + 1] = cw[i] = U(rng);
    }
    const DerivFn eta = [&](double x, int k) { return ops.evaluate(u, 0, x, k); };
    const DerivFn omega = [&](double x, int k) { return ops.evaluate(u, 1, x, k); };

    const auto& E = ops.eta_eq();
    const auto& W = ops.omega_eq();
    const std::pair<const BandedMatrix*, int> cases[] = {{&E.d1, 1}, {&E.d3, 3}, {&E.d5, 5}};
    for (auto [Mx, k] : cases) {
        auto lhs = Mx->apply(cw);
        if (k == 5)
            for (int i = 0; i < m; ++i) lhs[i] += ops.closure().trace[i] * omega(1.0, 2);
        const auto rhs = ops.eta_eq_load(k, omega);
        for (int i = 0; i < m; ++i) CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-9).scale(1e3));
    }
    const std::pair<const BandedMatrix*, int> cases2[] = {{&W.d1, 1}, {&W.d3, 3}, {&W.d5, 5}};
    for (auto [Mx, k] : cases2) {
        const auto lhs = Mx->apply(ce);
        const auto rhs = ops.omega_eq_load(k, eta);
        for (int i = 0; i < m; ++i) CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-9).scale(1e3));
    }
}

TEST_CASE("first derivative converges at second order") {
    const auto f = [](double x) { return std::sin(2 * M_PI * x) * x * x * (1 - x) * (1 - x); };
    const auto df = [](double x) {
        const double s = std::sin(2 * M_PI * x), c = std::cos(2 * M_PI * x);
        const double q = x * x * (1 - x) * (1 - x), dq = 2 * x * (1 - x) * (1 - 2 * x);
        return 2 * M_PI * c * q + s * dq;
    };
    double prev = 0.0;
    for (int n : {23, 47, 95, 191}) {
        const SpatialOperators ops(SystemParams{}, make_grid(1.0, n));
        const auto u = ops.project([](double) { return 0.0; }, f);
        std::vector<double> cw(ops.field_size());
        for (int i = 0; i < ops.field_size(); ++i) cw[i] = u[2 * i + 1];
        const auto de = ops.solve_mass_eta(ops.eta_eq().d1.apply(cw));
        std::vector<double> v(u.size(), 0.0);
        for (int i = 0; i < ops.field_size(); ++i) v[2 * i] = de[i];
        double err = 0.0;
        for (size_t q = 0; q < ops.quad_x().size(); ++q) {
            const double x = ops.quad_x()[q];
            const double e = ops.evaluate(v, 0, x) - df(x);
            err += ops.quad_w()[q] * e * e;
        }
        err = std::sqrt(err);
        if (prev > 0) CHECK(std::log2(prev / err) >= 1.9);
        prev = err;
    }
}

TEST_CASE("closure without feedback has no delayed source") {
    SystemParams p;
    p.alpha = p.beta = 0.0;
    const SpatialOperators ops(p, make_grid(1.0, 16));
    CHECK(max_abs(ops.closure().delayed_source) == 0.0);
}

TEST_CASE("discrete energy identity u^T A u = -a1 alpha trace^2") {
    SystemParams p;
    p.a = 0.7;
    p.a1 = 1.3;
    p.alpha = 2.5;
    const SpatialOperators ops(p, make_grid(1.0, 30));
    const BandedMatrix A = ops.system_matrix(0.0, 1.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> u(ops.system_size());
        for (double& v : u) v = U(rng);
        const auto Au = A.apply(u);
        double uAu = 0.0, scale = 0.0;
        for (size_t i = 0; i < u.size(); ++i) {
            uAu += u[i] * Au[i];
            scale += std::abs(u[i] * Au[i]);
        }
        const double T = ops.trace(u);
        CHECK(std::abs(uAu + p.a1 * p.alpha * T * T) <= 1e-12 * scale);
    }
}

TEST_CASE("trace of eta_xx at L") {
    const SpatialOperators z(SystemParams{}, make_grid(1.0, 20));
    CHECK(z.trace(std::vector<double>(z.system_size(), 0.0)) == 0.0);

    for (double L : {1.0, 2.0}) {
        SystemParams p;
        p.L = L;
        double prev1 = 0.0, prev2 = 0.0;
        for (int n : {33, 67, 135, 271}) {
            const SpatialOperators ops(p, make_grid(L, n));
            const auto u1 = ops.project([L](double x) { return x * x * (L - x) * (L - x); },
                                        [](double) { return 0.0; });
            const auto u2 = ops.project([L](double x) { return std::pow(std::sin(M_PI * (L - x)), 2); },
                                        [](double) { return 0.0; });
            const double e1 = std::abs(trace_eta_xx_L(ops, u1) - 2 * L * L);
            const double e2 = std::abs(trace_eta_xx_L(ops, u2) - 2 * M_PI * M_PI);
            if (prev1 > 0) {
                CHECK(std::log2(prev1 / e1) >= 1.9);
                CHECK(std::log2(prev2 / e2) >= 1.9);
            }
            prev1 = e1;
            prev2 = e2;
        }
    }
}

TEST_CASE("projection reproduces compatible splines and node values") {
    const SpatialOperators ops(SystemParams{}, make_grid(1.0, 15));
    const auto u = ops.project([](double x) { return x * x * x * (1 - x) * (1 - x); },
                               [](double x) { return x * x * (1 - x) * (1 - x); });
    const auto nv = ops.node_values(u, 0);
    REQUIRE(nv.size() == 15);
    for (int j = 0; j < 15; ++j) {
        const double x = ops.grid().nodes[j];
        CHECK(nv[j] == doctest::Approx(x * x * x * (1 - x) * (1 - x)).epsilon(1e-3).scale(1e-2));
    }
    CHECK(ops.bandwidth() == 7);
    CHECK(ops.system_matrix(1.0, 1.0).lower() <= 7);
}

}
