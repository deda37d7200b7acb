// Test-only dense linear algebra, kept independent of the Thomas/matrix-free
// paths it cross-checks.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

// Row-major dense matrix.
struct Dense {
    std::size_t n = 0;
    std::vector<double> a;

    explicit Dense(std::size_t size) : n(size), a(size * size, 0.0) {}
    double& at(std::size_t r, std::size_t c) { return a[r * n + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * n + c]; }

    static Dense identity(std::size_t size) {
        Dense m(size);
        for (std::size_t i = 0; i < size; ++i) m.at(i, i) = 1.0;
        return m;
    }
};

inline Dense matmul(const Dense& A, const Dense& B) {
    Dense C(A.n);
    for (std::size_t i = 0; i < A.n; ++i)
        for (std::size_t k = 0; k < A.n; ++k) {
            const double aik = A.at(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < A.n; ++j) C.at(i, j) += aik * B.at(k, j);
        }
    return C;
}

inline std::vector<double> matvec(const Dense& A, const std::vector<double>& x) {
    std::vector<double> y(A.n, 0.0);
    for (std::size_t i = 0; i < A.n; ++i)
        for (std::size_t j = 0; j < A.n; ++j) y[i] += A.at(i, j) * x[j];
    return y;
}

// Gaussian elimination with partial pivoting.
inline std::vector<double> lu_solve(Dense A, std::vector<double> b) {
    const std::size_t n = A.n;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A.at(r, col)) > std::abs(A.at(piv, col))) piv = r;
        if (A.at(piv, col) == 0.0) throw std::runtime_error("lu_solve: singular matrix");
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(A.at(piv, c), A.at(col, c));
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = A.at(r, col) / A.at(col, col);
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) A.at(r, c) -= f * A.at(col, c);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= A.at(i, j) * x[j];
        x[i] = s / A.at(i, i);
    }
    return x;
}

inline Dense inverse(const Dense& A) {
    Dense inv(A.n);
    std::vector<double> e(A.n, 0.0);
    for (std::size_t c = 0; c < A.n; ++c) {
        e.assign(A.n, 0.0);
        e[c] = 1.0;
        const auto col = lu_solve(A, e);
        for (std::size_t r = 0; r < A.n; ++r) inv.at(r, c) = col[r];
    }
    return inv;
}

// I + dt (-Lap_h + diag(a)), the one-step implicit matrix scaled by dt.
inline Dense heat_step_matrix(double h, double dt, const std::vector<double>& a_slice) {
    const std::size_t n = a_slice.size();
    Dense A(n);
    const double r = dt / (h * h);
    for (std::size_t i = 0; i < n; ++i) {
        A.at(i, i) = 1.0 + 2.0 * r + dt * a_slice[i];
        if (i > 0) A.at(i, i - 1) = -r;
        if (i + 1 < n) A.at(i, i + 1) = -r;
    }
    return A;
}

} // namespace oracle
