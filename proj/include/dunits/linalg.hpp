#pragma once

// Dense exact linear algebra over one FieldCtx: just enough Gaussian
// elimination for the regular-representation inverter and the decomposition
// rank/kernel checks.

#include <optional>
#include <stdexcept>
#include <vector>

#include "dunits/field.hpp"

namespace dunits::ff {

using Matrix = std::vector<std::vector<FieldElem>>;

// Solves A x = b for square A; nullopt iff A is singular.
inline std::optional<std::vector<FieldElem>> solve_square(Matrix a, std::vector<FieldElem> b) {
    const std::size_t n = a.size();
    if (n == 0 || b.size() != n) throw std::invalid_argument("solve_square: shape mismatch");
    const FieldCtx* ctx = b[0].ctx();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col].is_zero()) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        FieldElem inv = a[col][col].inverse();
        for (std::size_t j = col; j < n; ++j) a[col][j] *= inv;
        b[col] *= inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col].is_zero()) continue;
            FieldElem f = a[r][col];
            for (std::size_t j = col; j < n; ++j) a[r][j] += f * a[col][j];
            b[r] += f * b[col];
        }
    }
    (void)ctx;
    return b;
}

struct RankKernel {
    unsigned rank = 0;
    std::vector<std::vector<FieldElem>> kernel_basis;  // basis of {x : A x = 0}
};

// Row-reduces an N x M matrix and reads off the kernel.
inline RankKernel rank_and_kernel(Matrix a, const FieldCtx* ctx) {
    const std::size_t rows = a.size();
    if (rows == 0) throw std::invalid_argument("rank_and_kernel: empty matrix");
    const std::size_t cols = a[0].size();

    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && a[piv][c].is_zero()) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[r]);
        FieldElem inv = a[r][c].inverse();
        for (std::size_t j = c; j < cols; ++j) a[r][j] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c].is_zero()) continue;
            FieldElem f = a[i][c];
            for (std::size_t j = c; j < cols; ++j) a[i][j] += f * a[r][j];
        }
        pivot_col.push_back(c);
        ++r;
    }

    RankKernel out;
    out.rank = static_cast<unsigned>(r);
    std::vector<bool> is_pivot(cols, false);
    for (std::size_t c : pivot_col) is_pivot[c] = true;
    for (std::size_t free_c = 0; free_c < cols; ++free_c) {
        if (is_pivot[free_c]) continue;
        std::vector<FieldElem> v(cols, ctx->zero());
        v[free_c] = ctx->one();
        for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = a[i][free_c];  // char 2: -x = x
        out.kernel_basis.push_back(std::move(v));
    }
    return out;
}

}  // namespace dunits::ff
