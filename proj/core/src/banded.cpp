#include "kdvd/banded.hpp"

#include <lapacke.h>

#include <algorithm>
#include <stdexcept>
#include <string>

#include "kdvd/errors.hpp"

namespace kdvd {

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ab_(static_cast<size_t>(2 * kl + ku + 1) * n, 0.0) {}

double& BandedMatrix::operator()(int i, int j) {
    if (!in_band(i, j)) throw std::out_of_range("band index outside band");
    return ab_[static_cast<size_t>(j) * ldab() + kl_ + ku_ + i - j];
}

double BandedMatrix::operator()(int i, int j) const {
    if (!in_band(i, j)) return 0.0;
    return ab_[static_cast<size_t>(j) * ldab() + kl_ + ku_ + i - j];
}

std::vector<double> BandedMatrix::apply(const std::vector<double>& x) const {
    std::vector<double> y(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
        const double xj = x[j];
        if (xj == 0.0) continue;
        const int i0 = std::max(0, j - ku_), i1 = std::min(n_ - 1, j + kl_);
        const double* col = &ab_[static_cast<size_t>(j) * ldab() + kl_ + ku_ - j];
        for (int i = i0; i <= i1; ++i) y[i] += col[i] * xj;
    }
    return y;
}

void BandedMatrix::add(const BandedMatrix& B, double s) {
    for (int j = 0; j < n_; ++j) {
        const int i0 = std::max(0, j - B.ku_), i1 = std::min(n_ - 1, j + B.kl_);
        for (int i = i0; i <= i1; ++i) (*this)(i, j) += s * B(i, j);
    }
}

BandedLU::BandedLU(const BandedMatrix& A)
    : n_(A.size()), kl_(A.lower()), ku_(A.upper()), ab_(A.storage()), ipiv_(A.size()) {
    const lapack_int info =
        LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, ab_.data(), A.ldab(), ipiv_.data());
    if (info != 0) {
        n_ = 0;
        throw NumericalError("banded LU breakdown (dgbtrf info " + std::to_string(info) + ")");
    }
}

void BandedLU::solve_in_place(std::vector<double>& b) const {
    if (n_ == 0) throw NumericalError("solve with unfactored matrix");
    const lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, 1, ab_.data(),
                                           2 * kl_ + ku_ + 1, ipiv_.data(), b.data(), n_);
    if (info != 0) throw NumericalError("banded solve failed (dgbtrs info " + std::to_string(info) + ")");
}

}  // namespace kdvd
