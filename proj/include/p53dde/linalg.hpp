#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

namespace p53dde {

// Dense complex matrix, row-major, n x n with n <= 8 in practice.
struct CMat {
    std::size_t n = 0;
    std::vector<std::complex<double>> a;

    explicit CMat(std::size_t dim) : n(dim), a(dim * dim, 0.0) {}
    std::complex<double>& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
    const std::complex<double>& at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

inline std::vector<std::complex<double>> cmat_apply(const CMat& m,
                                                    const std::vector<std::complex<double>>& x) {
    std::vector<std::complex<double>> y(m.n, 0.0);
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j) y[i] += m.at(i, j) * x[j];
    return y;
}

// Gaussian elimination with partial pivoting. Returns nullopt when a pivot
// collapses relative to the matrix scale (singular / resonant case).
inline std::optional<std::vector<std::complex<double>>> cmat_solve(
    CMat m, std::vector<std::complex<double>> b) {
    const std::size_t n = m.n;
    double scale = 0.0;
    for (const auto& v : m.a) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return std::nullopt;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < n; ++i)
            if (std::abs(m.at(i, col)) > std::abs(m.at(piv, col))) piv = i;
        if (std::abs(m.at(piv, col)) < 1e-13 * scale) return std::nullopt;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m.at(piv, j), m.at(col, j));
            std::swap(b[piv], b[col]);
        }
        for (std::size_t i = col + 1; i < n; ++i) {
            const std::complex<double> f = m.at(i, col) / m.at(col, col);
            m.at(i, col) = 0.0;
            for (std::size_t j = col + 1; j < n; ++j) m.at(i, j) -= f * m.at(col, j);
            b[i] -= f * b[col];
        }
    }
    std::vector<std::complex<double>> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        std::complex<double> s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= m.at(i, j) * x[j];
        x[i] = s / m.at(i, i);
    }
    return x;
}

inline std::complex<double> cmat_det(CMat m) {
    const std::size_t n = m.n;
    std::complex<double> det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < n; ++i)
            if (std::abs(m.at(i, col)) > std::abs(m.at(piv, col))) piv = i;
        if (m.at(piv, col) == std::complex<double>(0.0)) return 0.0;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m.at(piv, j), m.at(col, j));
            det = -det;
        }
        det *= m.at(col, col);
        for (std::size_t i = col + 1; i < n; ++i) {
            const std::complex<double> f = m.at(i, col) / m.at(col, col);
            for (std::size_t j = col; j < n; ++j) m.at(i, j) -= f * m.at(col, j);
        }
    }
    return det;
}

} // namespace p53dde
