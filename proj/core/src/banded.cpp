#include "cbfem/banded.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "cbfem/errors.hpp"

namespace cbfem {

BandedMatrix::BandedMatrix(int n, int bandwidth)
    : n_(n), bw_(bandwidth), stride_(2 * bandwidth + 1), data_(static_cast<size_t>(n) * stride_, 0.0) {
    if (n <= 0 || bandwidth < 0) {
        throw std::invalid_argument("BandedMatrix: size and bandwidth must be positive");
    }
}

BandedMatrix BandedMatrix::identity(int n, int bandwidth) {
    BandedMatrix a(n, bandwidth);
    for (int i = 0; i < n; ++i) {
        a.at(i, i) = 1.0;
    }
    return a;
}

double BandedMatrix::operator()(int i, int j) const {
    if (i < 0 || i >= n_ || j < 0 || j >= n_) {
        throw std::out_of_range("BandedMatrix: index out of range");
    }
    if (std::abs(i - j) > bw_) {
        return 0.0;
    }
    return data_[static_cast<size_t>(i) * stride_ + (j - i + bw_)];
}

double& BandedMatrix::at(int i, int j) {
    if (i < 0 || i >= n_ || j < 0 || j >= n_ || std::abs(i - j) > bw_) {
        throw std::out_of_range("BandedMatrix::at: entry outside the band");
    }
    return data_[static_cast<size_t>(i) * stride_ + (j - i + bw_)];
}

std::vector<double> BandedMatrix::multiply(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n_) {
        throw std::invalid_argument("BandedMatrix::multiply: size mismatch");
    }
    std::vector<double> y(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        const int lo = std::max(0, i - bw_);
        const int hi = std::min(n_ - 1, i + bw_);
        double s = 0.0;
        for (int j = lo; j <= hi; ++j) {
            s += data_[static_cast<size_t>(i) * stride_ + (j - i + bw_)] * x[j];
        }
        y[i] = s;
    }
    return y;
}

void BandedMatrix::add_scaled(const BandedMatrix& other, double scale) {
    if (other.n_ != n_ || other.bw_ != bw_) {
        throw std::invalid_argument("BandedMatrix::add_scaled: shape mismatch");
    }
    for (size_t k = 0; k < data_.size(); ++k) {
        data_[k] += scale * other.data_[k];
    }
}

void BandedMatrix::scale_column(int j, double factor) {
    const int lo = std::max(0, j - bw_);
    const int hi = std::min(n_ - 1, j + bw_);
    for (int i = lo; i <= hi; ++i) {
        data_[static_cast<size_t>(i) * stride_ + (j - i + bw_)] *= factor;
    }
}

void BandedMatrix::add_scaled_column(const BandedMatrix& other, int j, double scale) {
    const int lo = std::max(0, j - bw_);
    const int hi = std::min(n_ - 1, j + bw_);
    for (int i = lo; i <= hi; ++i) {
        const size_t k = static_cast<size_t>(i) * stride_ + (j - i + bw_);
        data_[k] += scale * other.data_[k];
    }
}

BandedLU::BandedLU(const BandedMatrix& a)
    : n_(a.size()), bw_(a.bandwidth()), width_(3 * a.bandwidth() + 1),
      lu_(static_cast<size_t>(a.size()) * (3 * a.bandwidth() + 1), 0.0), pivot_(a.size(), 0) {
    // Copy the band; the extra bw_ superdiagonals start as zero fill.
    for (int i = 0; i < n_; ++i) {
        const int lo = std::max(0, i - bw_);
        const int hi = std::min(n_ - 1, i + bw_);
        for (int j = lo; j <= hi; ++j) {
            entry(i, j) = a(i, j);
        }
    }

    for (int k = 0; k < n_; ++k) {
        const int last_row = std::min(n_ - 1, k + bw_);
        int p = k;
        double best = std::abs(entry(k, k));
        for (int i = k + 1; i <= last_row; ++i) {
            const double v = std::abs(entry(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        pivot_[k] = p;
        if (!(best > 0.0) || !std::isfinite(best)) {
            throw SolverError("banded LU: singular pivot at column " + std::to_string(k));
        }
        const int last_col = std::min(n_ - 1, k + 2 * bw_);
        if (p != k) {
            for (int j = k; j <= last_col; ++j) {
                std::swap(entry(k, j), entry(p, j));
            }
        }
        const double piv = entry(k, k);
        for (int i = k + 1; i <= last_row; ++i) {
            const double m = entry(i, k) / piv;
            entry(i, k) = m;
            if (m != 0.0) {
                for (int j = k + 1; j <= last_col; ++j) {
                    entry(i, j) -= m * entry(k, j);
                }
            }
        }
    }
}

std::vector<double> BandedLU::solve(std::span<const double> b) const {
    if (static_cast<int>(b.size()) != n_) {
        throw std::invalid_argument("BandedLU::solve: size mismatch");
    }
    std::vector<double> x(b.begin(), b.end());
    for (int k = 0; k < n_; ++k) {
        if (pivot_[k] != k) {
            std::swap(x[k], x[pivot_[k]]);
        }
        const int last_row = std::min(n_ - 1, k + bw_);
        for (int i = k + 1; i <= last_row; ++i) {
            x[i] -= entry(i, k) * x[k];
        }
    }
    for (int i = n_ - 1; i >= 0; --i) {
        const int last_col = std::min(n_ - 1, i + 2 * bw_);
        double s = x[i];
        for (int j = i + 1; j <= last_col; ++j) {
            s -= entry(i, j) * x[j];
        }
        x[i] = s / entry(i, i);
    }
    return x;
}

std::vector<double> solve_banded(const BandedMatrix& a, std::span<const double> b) {
    return BandedLU(a).solve(b);
}

}  // namespace cbfem
