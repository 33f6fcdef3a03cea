#pragma once

#include <span>
#include <vector>

namespace cbfem {

/// Square banded matrix with equal lower/upper bandwidth.
///
/// Row-major band storage: entry (i, j) with |i - j| <= bandwidth lives at
/// data[i * stride + (j - i + bandwidth)]. Entries outside the band are
/// identically zero and cannot be assigned.
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(int n, int bandwidth);

    static BandedMatrix identity(int n, int bandwidth);

    int size() const { return n_; }
    int bandwidth() const { return bw_; }

    double operator()(int i, int j) const;
    double& at(int i, int j);  // throws if (i, j) is outside the band

    /// y = A x
    std::vector<double> multiply(std::span<const double> x) const;

    /// this += scale * other (same size and bandwidth)
    void add_scaled(const BandedMatrix& other, double scale);

    /// Scales column j of the band by factor.
    void scale_column(int j, double factor);

    /// Adds scale * (column j of other) into column j of this.
    void add_scaled_column(const BandedMatrix& other, int j, double scale);

private:
    int n_ = 0;
    int bw_ = 0;
    int stride_ = 0;
    std::vector<double> data_;

    friend class BandedLU;
};

/// LU factorization of a banded matrix with partial pivoting.
///
/// Row swaps stay within the band window, so the factors need bandwidth
/// extra superdiagonals of fill; storage is allocated accordingly.
class BandedLU {
public:
    /// Factors A. Throws SolverError on a (near-)zero pivot.
    explicit BandedLU(const BandedMatrix& a);

    std::vector<double> solve(std::span<const double> b) const;

private:
    int n_ = 0;
    int bw_ = 0;
    int width_ = 0;  // stored columns per row: 3 * bw_ + 1
    std::vector<double> lu_;
    std::vector<int> pivot_;

    double& entry(int i, int j) { return lu_[i * width_ + (j - i + bw_)]; }
    double entry(int i, int j) const { return lu_[i * width_ + (j - i + bw_)]; }
};

/// Direct solve of A x = b; factorizes on every call.
std::vector<double> solve_banded(const BandedMatrix& a, std::span<const double> b);

}  // namespace cbfem
