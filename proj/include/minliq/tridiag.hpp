#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace minliq {

// Thomas algorithm for a tridiagonal system; `lower[0]` and `upper[n-1]` are
// ignored. The matrices assembled here are diagonally dominant M-matrices, so
// no pivoting is needed.
class TridiagonalSolver {
public:
    void solve(std::span<const double> lower, std::span<const double> diag,
               std::span<const double> upper, std::span<double> rhs_inout) {
        const std::size_t n = diag.size();
        c_.resize(n);
        double denom = diag[0];
        c_[0] = n > 1 ? upper[0] / denom : 0.0;
        rhs_inout[0] /= denom;
        for (std::size_t i = 1; i < n; ++i) {
            denom = diag[i] - lower[i] * c_[i - 1];
            c_[i] = i + 1 < n ? upper[i] / denom : 0.0;
            rhs_inout[i] = (rhs_inout[i] - lower[i] * rhs_inout[i - 1]) / denom;
        }
        for (std::size_t i = n - 1; i-- > 0;) rhs_inout[i] -= c_[i] * rhs_inout[i + 1];
    }

private:
    std::vector<double> c_;
};

}  // namespace minliq
