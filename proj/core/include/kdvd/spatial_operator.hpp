#pragma once

#include <functional>
#include <vector>

#include "kdvd/banded.hpp"
#include "kdvd/bspline.hpp"
#include "kdvd/params.hpp"

namespace kdvd {

/// A scalar function together with its derivatives: f(x, k) returns d^k f/dx^k.
using DerivFn = std::function<double(double x, int k)>;

/// Weak derivative operators of one equation of the system.
///
/// For the eta-equation the rows are tested against the eta space and the
/// columns are omega coefficients; for the omega-equation it is the reverse.
/// Each matrix holds (d^k u, test) for u in the trial space, after the
/// integrations by parts that the boundary conditions allow.
struct EquationOperators {
    BandedMatrix d1, d3, d5;
};

/// The feedback row of omega_xx(L): the eta-equation receives -a1*g*trace,
/// with g = alpha*eta_xx(L) + beta*delayed trace (+ any extra boundary datum).
struct BoundaryClosure {
    std::vector<double> trace; ///< eta coefficients -> eta_xx(L)
    double alpha = 0.0;
    double beta = 0.0;
    /// Interleaved load of a unit delayed datum: -a1*beta*trace in the eta rows.
    std::vector<double> delayed_source;
    /// Interleaved load of a unit extra boundary datum in g: -a1*trace.
    std::vector<double> unit_boundary;
};

/// Galerkin operators on cubic (eta) and quadratic (omega) B-splines.
///
/// eta drops the three coefficients that carry eta, eta_x, eta_xx at x = 0 and
/// the two carrying eta, eta_x at x = L; omega drops two at each end. The
/// condition on omega_xx(L) is natural and enters through the closure. Global
/// vectors interleave the fields: u[2k] = eta_k, u[2k+1] = omega_k.
class SpatialOperators {
public:
    static constexpr int eta_degree = 3;
    static constexpr int omega_degree = 2;
    static constexpr int quad_points = 5;

    SpatialOperators(const SystemParams& p, const Grid& g);

    const SystemParams& params() const { return p_; }
    const Grid& grid() const { return g_; }
    /// Unknowns per field (n - 1).
    int field_size() const { return m_; }
    /// Size of the interleaved system.
    int system_size() const { return 2 * m_; }
    int bandwidth() const { return 7; }

    const BandedMatrix& mass_eta() const { return mass_eta_; }
    const BandedMatrix& mass_omega() const { return mass_omega_; }
    const EquationOperators& eta_eq() const { return eta_eq_; }
    const EquationOperators& omega_eq() const { return omega_eq_; }
    const BoundaryClosure& closure() const { return closure_; }

    /// cm*M + ca*A on the interleaved unknowns, where M u' = A u + sources.
    BandedMatrix system_matrix(double cm, double ca) const;
    /// Interleaved block-diagonal mass matrix applied to u.
    std::vector<double> apply_mass(const std::vector<double>& u) const;

    /// eta_xx(L) of the interleaved state.
    double trace(const std::vector<double>& u) const;

    /// Weak loads (d^order f, test) for an arbitrary smooth f. For the
    /// eta-equation and order 5 the natural term test''(L)*f''(L) is included.
    std::vector<double> eta_eq_load(int order, const DerivFn& f) const;
    std::vector<double> omega_eq_load(int order, const DerivFn& f) const;
    /// (f, test) over each space.
    std::vector<double> eta_load(const std::function<double(double)>& f) const;
    std::vector<double> omega_load(const std::function<double(double)>& f) const;
    /// Solve with the eta or omega mass matrix.
    std::vector<double> solve_mass_eta(std::vector<double> b) const;
    std::vector<double> solve_mass_omega(std::vector<double> b) const;

    /// L2 projection of (eta, omega) onto the spaces, interleaved.
    std::vector<double> project(const std::function<double(double)>& eta,
                                const std::function<double(double)>& omega) const;

    /// Value of the k-th derivative of eta (field 0) or omega (field 1) at x.
    double evaluate(const std::vector<double>& u, int field, double x, int k = 0) const;
    /// Field values at the interior grid nodes.
    std::vector<double> node_values(const std::vector<double>& u, int field) const;

    /// Quadrature data: points, weights and field derivatives 0..2 at each point.
    const std::vector<double>& quad_x() const { return xq_; }
    const std::vector<double>& quad_w() const { return wq_; }
    struct FieldAtQuad {
        std::vector<double> eta[3];
        std::vector<double> omega[3];
    };
    FieldAtQuad fields_at_quad(const std::vector<double>& u) const;

    /// Weak nonlinear loads of the full system, interleaved.
    std::vector<double> nonlinear_load(const std::vector<double>& u) const;

    /// Integrals used by the energy and multiplier identities.
    double mass_norm2(const std::vector<double>& u) const; ///< int (eta^2 + omega^2)
    double moment(const std::vector<double>& u) const;     ///< int x*eta*omega

private:
    struct Table {
        int first = 0;              ///< reduced index of the first local function (may be negative)
        std::vector<double> vals;   ///< (nder+1)*(p+1)
    };
    const Table& eta_tab(int q) const { return eta_tab_[q]; }
    const Table& omega_tab(int q) const { return omega_tab_[q]; }

    SystemParams p_;
    Grid g_;
    int ncell_ = 0, m_ = 0;
    BSplineBasis eta_basis_, omega_basis_;
    std::vector<double> xq_, wq_;
    std::vector<Table> eta_tab_, omega_tab_;
    BandedMatrix mass_eta_, mass_omega_;
    BandedLU mass_eta_lu_, mass_omega_lu_;
    EquationOperators eta_eq_, omega_eq_;
    BoundaryClosure closure_;
};

/// Convenience constructor matching the module interface.
inline SpatialOperators build_operators(const SystemParams& p, const Grid& g) { return SpatialOperators(p, g); }

/// eta_xx(L) from the interleaved state.
inline double trace_eta_xx_L(const SpatialOperators& ops, const std::vector<double>& u) { return ops.trace(u); }

}  // namespace kdvd
