#include "kdvd/spatial_operator.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>

#include "kdvd/errors.hpp"

namespace kdvd {

namespace {

constexpr int pe = SpatialOperators::eta_degree;
constexpr int po = SpatialOperators::omega_degree;
constexpr int ne_loc = pe + 1;
constexpr int no_loc = po + 1;

void gauss_rule(std::vector<double>& x, std::vector<double>& w) {
    using Rule = boost::math::quadrature::gauss<double, SpatialOperators::quad_points>;
    const auto& a = Rule::abscissa();
    const auto& b = Rule::weights();
    x.clear();
    w.clear();
    for (size_t i = a.size(); i-- > 0;) {
        if (a[i] == 0.0) continue;
        x.push_back(-a[i]);
        w.push_back(b[i]);
    }
    for (size_t i = 0; i < a.size(); ++i) {
        x.push_back(a[i]);
        w.push_back(b[i]);
    }
}

}  // namespace

SpatialOperators::SpatialOperators(const SystemParams& p, const Grid& g) : p_(p), g_(g) {
    if (g.n < 8) throw ConfigError("grid needs n >= 8");
    ncell_ = g.n + 1;
    m_ = ncell_ - 2;
    eta_basis_ = BSplineBasis(pe, ncell_, p.L);
    omega_basis_ = BSplineBasis(po, ncell_, p.L);

    std::vector<double> gx, gw;
    gauss_rule(gx, gw);
    const double h = p.L / ncell_;
    for (int c = 0; c < ncell_; ++c) {
        for (size_t k = 0; k < gx.size(); ++k) {
            const double x = c * h + 0.5 * (gx[k] + 1.0) * h;
            xq_.push_back(x);
            wq_.push_back(0.5 * h * gw[k]);
            Table te, to;
            te.first = c - 3;
            to.first = c - 2;
            eta_basis_.eval(c, x, 3, te.vals);
            omega_basis_.eval(c, x, 2, to.vals);
            eta_tab_.push_back(std::move(te));
            omega_tab_.push_back(std::move(to));
        }
    }

    mass_eta_ = BandedMatrix(m_, 3, 3);
    mass_omega_ = BandedMatrix(m_, 2, 2);
    for (auto* op : {&eta_eq_, &omega_eq_})
        op->d1 = op->d3 = op->d5 = BandedMatrix(m_, 4, 4);

    auto valid = [this](int i) { return i >= 0 && i < m_; };
    for (size_t q = 0; q < xq_.size(); ++q) {
        const double w = wq_[q];
        const auto& E = eta_tab_[q];
        const auto& O = omega_tab_[q];
        auto e = [&](int k, int r) { return E.vals[k * ne_loc + r]; };
        auto o = [&](int k, int r) { return O.vals[k * no_loc + r]; };
        for (int r = 0; r < ne_loc; ++r) {
            const int i = E.first + r;
            if (!valid(i)) continue;
            for (int s = 0; s < ne_loc; ++s) {
                const int j = E.first + s;
                if (valid(j)) mass_eta_(i, j) += w * e(0, r) * e(0, s);
            }
            for (int s = 0; s < no_loc; ++s) {
                const int j = O.first + s;
                if (!valid(j)) continue;
                eta_eq_.d1(i, j) += w * o(1, s) * e(0, r);
                eta_eq_.d3(i, j) += w * o(1, s) * e(2, r);
                eta_eq_.d5(i, j) -= w * o(2, s) * e(3, r);
            }
        }
        for (int r = 0; r < no_loc; ++r) {
            const int i = O.first + r;
            if (!valid(i)) continue;
            for (int s = 0; s < no_loc; ++s) {
                const int j = O.first + s;
                if (valid(j)) mass_omega_(i, j) += w * o(0, r) * o(0, s);
            }
            for (int s = 0; s < ne_loc; ++s) {
                const int j = E.first + s;
                if (!valid(j)) continue;
                omega_eq_.d1(i, j) += w * e(1, s) * o(0, r);
                omega_eq_.d3(i, j) -= w * e(2, s) * o(1, r);
                omega_eq_.d5(i, j) += w * e(3, s) * o(2, r);
            }
        }
    }
    mass_eta_lu_ = BandedLU(mass_eta_);
    mass_omega_lu_ = BandedLU(mass_omega_);

    closure_.alpha = p.alpha;
    closure_.beta = p.beta;
    closure_.trace.assign(m_, 0.0);
    std::vector<double> vals;
    eta_basis_.eval(ncell_ - 1, p.L, 2, vals);
    for (int r = 0; r < ne_loc; ++r) {
        const int i = ncell_ - 1 - 3 + r;
        if (valid(i)) closure_.trace[i] = vals[2 * ne_loc + r];
    }
    closure_.delayed_source.assign(2 * m_, 0.0);
    closure_.unit_boundary.assign(2 * m_, 0.0);
    for (int i = 0; i < m_; ++i) {
        closure_.unit_boundary[2 * i] = -p.a1 * closure_.trace[i];
        closure_.delayed_source[2 * i] = -p.a1 * p.beta * closure_.trace[i];
    }
}

BandedMatrix SpatialOperators::system_matrix(double cm, double ca) const {
    BandedMatrix S(2 * m_, bandwidth(), bandwidth());
    const auto& t = closure_.trace;
    const double a = p_.a, a1 = p_.a1;
    for (int i = 0; i < m_; ++i) {
        for (int j = std::max(0, i - 4); j < std::min(m_, i + 5); ++j) {
            if (mass_eta_.in_band(i, j)) S(2 * i, 2 * j) += cm * mass_eta_(i, j);
            if (mass_omega_.in_band(i, j)) S(2 * i + 1, 2 * j + 1) += cm * mass_omega_(i, j);
            const double B = eta_eq_.d1(i, j) + a * eta_eq_.d3(i, j) + a1 * eta_eq_.d5(i, j);
            const double D = omega_eq_.d1(i, j) + a * omega_eq_.d3(i, j) + a1 * omega_eq_.d5(i, j);
            if (B != 0.0) S(2 * i, 2 * j + 1) -= ca * B;
            if (D != 0.0) S(2 * i + 1, 2 * j) -= ca * D;
            const double tt = t[i] * t[j];
            if (tt != 0.0) S(2 * i, 2 * j) -= ca * a1 * p_.alpha * tt;
        }
    }
    return S;
}

std::vector<double> SpatialOperators::apply_mass(const std::vector<double>& u) const {
    std::vector<double> ce(m_), co(m_), out(2 * m_);
    for (int i = 0; i < m_; ++i) {
        ce[i] = u[2 * i];
        co[i] = u[2 * i + 1];
    }
    const auto me = mass_eta_.apply(ce), mo = mass_omega_.apply(co);
    for (int i = 0; i < m_; ++i) {
        out[2 * i] = me[i];
        out[2 * i + 1] = mo[i];
    }
    return out;
}

double SpatialOperators::trace(const std::vector<double>& u) const {
    double s = 0.0;
    for (int i = m_ - 4; i < m_; ++i)
        if (i >= 0) s += closure_.trace[i] * u[2 * i];
    return s;
}

std::vector<double> SpatialOperators::eta_eq_load(int order, const DerivFn& f) const {
    std::vector<double> b(m_, 0.0);
    for (size_t q = 0; q < xq_.size(); ++q) {
        const auto& E = eta_tab_[q];
        const double x = xq_[q], w = wq_[q];
        for (int r = 0; r < ne_loc; ++r) {
            const int i = E.first + r;
            if (i < 0 || i >= m_) continue;
            auto e = [&](int k) { return E.vals[k * ne_loc + r]; };
            switch (order) {
            case 1: b[i] += w * f(x, 1) * e(0); break;
            case 3: b[i] += w * f(x, 1) * e(2); break;
            case 5: b[i] -= w * f(x, 2) * e(3); break;
            default: throw DomainError("weak derivative order must be 1, 3 or 5");
            }
        }
    }
    if (order == 5) {
        const double g = f(p_.L, 2);
        for (int i = 0; i < m_; ++i) b[i] += closure_.trace[i] * g;
    }
    return b;
}

std::vector<double> SpatialOperators::omega_eq_load(int order, const DerivFn& f) const {
    std::vector<double> b(m_, 0.0);
    for (size_t q = 0; q < xq_.size(); ++q) {
        const auto& O = omega_tab_[q];
        const double x = xq_[q], w = wq_[q];
        for (int r = 0; r < no_loc; ++r) {
            const int i = O.first + r;
            if (i < 0 || i >= m_) continue;
            auto o = [&](int k) { return O.vals[k * no_loc + r]; };
            switch (order) {
            case 1: b[i] += w * f(x, 1) * o(0); break;
            case 3: b[i] -= w * f(x, 2) * o(1); break;
            case 5: b[i] += w * f(x, 3) * o(2); break;
            default: throw DomainError("weak derivative order must be 1, 3 or 5");
            }
        }
    }
    return b;
}

std::vector<double> SpatialOperators::eta_load(const std::function<double(double)>& f) const {
    std::vector<double> b(m_, 0.0);
    for (size_t q = 0; q < xq_.size(); ++q) {
        const auto& E = eta_tab_[q];
        const double fw = wq_[q] * f(xq_[q]);
        for (int r = 0; r < ne_loc; ++r) {
            const int i = E.first + r;
            if (i >= 0 && i < m_) b[i] += fw * E.vals[r];
        }
    }
    return b;
}

std::vector<double> SpatialOperators::omega_load(const std::function<double(double)>& f) const {
    std::vector<double> b(m_, 0.0);
    for (size_t q = 0; q < xq_.size(); ++q) {
        const auto& O = omega_tab_[q];
        const double fw = wq_[q] * f(xq_[q]);
        for (int r = 0; r < no_loc; ++r) {
            const int i = O.first + r;
            if (i >= 0 && i < m_) b[i] += fw * O.vals[r];
        }
    }
    return b;
}

std::vector<double> SpatialOperators::solve_mass_eta(std::vector<double> b) const {
    mass_eta_lu_.solve_in_place(b);
    return b;
}

std::vector<double> SpatialOperators::solve_mass_omega(std::vector<double> b) const {
    mass_omega_lu_.solve_in_place(b);
    return b;
}

std::vector<double> SpatialOperators::project(const std::function<double(double)>& eta,
                                              const std::function<double(double)>& omega) const {
    const auto ce = solve_mass_eta(eta_load(eta));
    const auto co = solve_mass_omega(omega_load(omega));
    std::vector<double> u(2 * m_);
    for (int i = 0; i < m_; ++i) {
        u[2 * i] = ce[i];
        u[2 * i + 1] = co[i];
    }
    return u;
}

double SpatialOperators::evaluate(const std::vector<double>& u, int field, double x, int k) const {
    const auto& basis = field == 0 ? eta_basis_ : omega_basis_;
    const int p = basis.degree();
    if (k > p) return 0.0;
    const int c = basis.cell_of(x);
    std::vector<double> vals;
    basis.eval(c, x, k, vals);
    const int first = c - (field == 0 ? 3 : 2);
    double s = 0.0;
    for (int r = 0; r <= p; ++r) {
        const int i = first + r;
        if (i >= 0 && i < m_) s += u[2 * i + field] * vals[k * (p + 1) + r];
    }
    return s;
}

std::vector<double> SpatialOperators::node_values(const std::vector<double>& u, int field) const {
    std::vector<double> v(g_.n);
    for (int j = 0; j < g_.n; ++j) v[j] = evaluate(u, field, g_.nodes[j]);
    return v;
}

SpatialOperators::FieldAtQuad SpatialOperators::fields_at_quad(const std::vector<double>& u) const {
    FieldAtQuad f;
    const size_t nq = xq_.size();
    for (int k = 0; k < 3; ++k) {
        f.eta[k].assign(nq, 0.0);
        f.omega[k].assign(nq, 0.0);
    }
    for (size_t q = 0; q < nq; ++q) {
        const auto& E = eta_tab_[q];
        const auto& O = omega_tab_[q];
        for (int r = 0; r < ne_loc; ++r) {
            const int i = E.first + r;
            if (i < 0 || i >= m_) continue;
            for (int k = 0; k < 3; ++k) f.eta[k][q] += u[2 * i] * E.vals[k * ne_loc + r];
        }
        for (int r = 0; r < no_loc; ++r) {
            const int i = O.first + r;
            if (i < 0 || i >= m_) continue;
            for (int k = 0; k < 3; ++k) f.omega[k][q] += u[2 * i + 1] * O.vals[k * no_loc + r];
        }
    }
    return f;
}

std::vector<double> SpatialOperators::nonlinear_load(const std::vector<double>& u) const {
    const auto f = fields_at_quad(u);
    std::vector<double> b(2 * m_, 0.0);
    const double ap = p_.alpha_p, bp = p_.beta_p, rn = p_.rho_nl, cn = p_.c_nl;
    for (size_t q = 0; q < xq_.size(); ++q) {
        const double w = wq_[q];
        const double e0 = f.eta[0][q], e2 = f.eta[2][q];
        const double o0 = f.omega[0][q], o1 = f.omega[1][q], o2 = f.omega[2][q];
        // eta rows: int (eta*omega + alpha'*eta*omega_xx) phi'
        const double ce1 = w * (e0 * o0 + ap * e0 * o2);
        // omega rows: psi, psi', psi'' coefficients
        const double co0 = w * (-o0 * o1 + bp * o1 * o2 - rn * o2 * o1);
        const double co1 = w * (e0 * e2 - rn * o2 * o0);
        const double co2 = w * (-cn * o0 * o1);
        const auto& E = eta_tab_[q];
        const auto& O = omega_tab_[q];
        for (int r = 0; r < ne_loc; ++r) {
            const int i = E.first + r;
            if (i >= 0 && i < m_) b[2 * i] += ce1 * E.vals[ne_loc + r];
        }
        for (int r = 0; r < no_loc; ++r) {
            const int i = O.first + r;
            if (i < 0 || i >= m_) continue;
            b[2 * i + 1] += co0 * O.vals[r] + co1 * O.vals[no_loc + r] + co2 * O.vals[2 * no_loc + r];
        }
    }
    return b;
}

double SpatialOperators::mass_norm2(const std::vector<double>& u) const {
    const auto Mu = apply_mass(u);
    double s = 0.0;
    for (size_t i = 0; i < u.size(); ++i) s += u[i] * Mu[i];
    return s;
}

double SpatialOperators::moment(const std::vector<double>& u) const {
    const auto f = fields_at_quad(u);
    double s = 0.0;
    for (size_t q = 0; q < xq_.size(); ++q) s += wq_[q] * xq_[q] * f.eta[0][q] * f.omega[0][q];
    return s;
}

}  // namespace kdvd
