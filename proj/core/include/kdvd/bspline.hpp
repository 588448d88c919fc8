#pragma once

#include <vector>

namespace kdvd {

/// Uniform open-knot B-spline basis of degree p on [0, L] with `ncell` cells.
class BSplineBasis {
public:
    BSplineBasis() = default;
    BSplineBasis(int degree, int ncell, double L);

    int degree() const { return p_; }
    int size() const { return ncell_ + p_; }
    int cells() const { return ncell_; }
    double length() const { return L_; }

    /// Cell containing x (the last cell owns x = L).
    int cell_of(double x) const;

    /// Derivatives 0..nder of the p+1 basis functions that are nonzero on `cell`,
    /// evaluated at x. out[k*(p+1) + r] is the k-th derivative of function cell+r.
    void eval(int cell, double x, int nder, std::vector<double>& out) const;

private:
    int p_ = 0, ncell_ = 0;
    double L_ = 0.0;
    std::vector<double> knots_;
};

}  // namespace kdvd
