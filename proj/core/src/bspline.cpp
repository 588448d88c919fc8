#include "kdvd/bspline.hpp"

#include <algorithm>
#include <stdexcept>

namespace kdvd {

BSplineBasis::BSplineBasis(int degree, int ncell, double L) : p_(degree), ncell_(ncell), L_(L) {
    if (degree < 1 || ncell < 1) throw std::invalid_argument("bad B-spline basis");
    knots_.reserve(ncell + 2 * p_ + 1);
    for (int i = 0; i < p_; ++i) knots_.push_back(0.0);
    for (int c = 0; c <= ncell; ++c) knots_.push_back(L * c / ncell);
    for (int i = 0; i < p_; ++i) knots_.push_back(L);
}

int BSplineBasis::cell_of(double x) const {
    const int c = static_cast<int>(x / L_ * ncell_);
    return std::clamp(c, 0, ncell_ - 1);
}

// Derivatives of the nonzero basis functions on a knot span (de Boor / Piegl-Tiller).
void BSplineBasis::eval(int cell, double x, int nder, std::vector<double>& out) const {
    const int p = p_;
    const int span = cell + p;
    const int nd = std::min(nder, p);
    const auto& U = knots_;

    std::vector<double> ndu((p + 1) * (p + 1)), left(p + 1), right(p + 1);
    auto NDU = [&](int i, int j) -> double& { return ndu[i * (p + 1) + j]; };
    NDU(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - U[span + 1 - j];
        right[j] = U[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            NDU(j, r) = right[r + 1] + left[j - r];
            const double tmp = NDU(r, j - 1) / NDU(j, r);
            NDU(r, j) = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        NDU(j, j) = saved;
    }

    out.assign((nder + 1) * (p + 1), 0.0);
    for (int j = 0; j <= p; ++j) out[j] = NDU(j, p);

    std::vector<double> a(2 * (p + 1));
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        std::fill(a.begin(), a.end(), 0.0);
        auto A = [&](int s, int j) -> double& { return a[s * (p + 1) + j]; };
        A(0, 0) = 1.0;
        for (int k = 1; k <= nd; ++k) {
            double d = 0.0;
            const int rk = r - k, pk = p - k;
            if (r >= k) {
                A(s2, 0) = A(s1, 0) / NDU(pk + 1, rk);
                d = A(s2, 0) * NDU(rk, pk);
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                A(s2, j) = (A(s1, j) - A(s1, j - 1)) / NDU(pk + 1, rk + j);
                d += A(s2, j) * NDU(rk + j, pk);
            }
            if (r <= pk) {
                A(s2, k) = -A(s1, k - 1) / NDU(pk + 1, r);
                d += A(s2, k) * NDU(r, pk);
            }
            out[k * (p + 1) + r] = d;
            std::swap(s1, s2);
        }
    }
    int fac = p;
    for (int k = 1; k <= nd; ++k) {
        for (int j = 0; j <= p; ++j) out[k * (p + 1) + j] *= fac;
        fac *= p - k;
    }
}

}  // namespace kdvd
