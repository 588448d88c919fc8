#pragma once

#include <vector>

namespace kdvd {

/// Square band matrix in LAPACK general-band layout (column-major, with kl
/// extra rows reserved for the fill-in of a pivoted LU).
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(int n, int kl, int ku);

    int size() const { return n_; }
    int lower() const { return kl_; }
    int upper() const { return ku_; }

    bool in_band(int i, int j) const { return j - i <= ku_ && i - j <= kl_; }
    double& operator()(int i, int j);
    double operator()(int i, int j) const;

    /// y = A x
    std::vector<double> apply(const std::vector<double>& x) const;
    /// this += s * B (B's band must fit inside this band)
    void add(const BandedMatrix& B, double s);

    const std::vector<double>& storage() const { return ab_; }
    int ldab() const { return 2 * kl_ + ku_ + 1; }

private:
    int n_ = 0, kl_ = 0, ku_ = 0;
    std::vector<double> ab_;
};

/// Pivoted band LU (LAPACK dgbtrf/dgbtrs); factor once, solve many.
class BandedLU {
public:
    BandedLU() = default;
    explicit BandedLU(const BandedMatrix& A);

    void solve_in_place(std::vector<double>& b) const;
    std::vector<double> solve(std::vector<double> b) const {
        solve_in_place(b);
        return b;
    }
    bool factored() const { return n_ > 0; }

private:
    int n_ = 0, kl_ = 0, ku_ = 0;
    std::vector<double> ab_;
    std::vector<int> ipiv_;
};

}  // namespace kdvd
