#include "saak/eigensolver.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "internal_math.hpp"

namespace saak {
namespace {

using detail::dot4;

constexpr int kMaxQlIterations = 50;

// Householder reduction W -> tridiagonal(diag, sub), full symmetric updates.
// On exit row i of W keeps the Householder vector of step i on [0, i) and
// hcoef[i] its h (0 if the step was skipped); sub[i] = T(i, i-1), sub[0] = 0.
void tridiagonalize(std::vector<double>& w, int n, std::vector<double>& diag,
                    std::vector<double>& sub, std::vector<double>& hcoef) {
    std::vector<double> p(n), q(n);
    for (int i = n - 1; i >= 1; --i) {
        const int l = i;
        double* ui = w.data() + static_cast<std::size_t>(i) * n;
        double scale = 0.0;
        if (l > 1)
            for (int k = 0; k < l; ++k) scale += std::fabs(ui[k]);
        if (l == 1 || scale == 0.0) {
            sub[i] = ui[l - 1];
            hcoef[i] = 0.0;
            continue;
        }
        double h = 0.0;
        for (int k = 0; k < l; ++k) {
            ui[k] /= scale;
            h += ui[k] * ui[k];
        }
        const double f = ui[l - 1];
        const double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        sub[i] = scale * g;
        h -= f * g;
        ui[l - 1] = f - g;

        // q = (A u - K u) / h with K = u'Au / (2h*h); block update A -= uq' + qu'
        for (int j = 0; j < l; ++j) {
            const double* wj = w.data() + static_cast<std::size_t>(j) * n;
            p[j] = dot4(wj, ui, l) / h;
        }
        double K = 0.0;
        for (int j = 0; j < l; ++j) K += ui[j] * p[j];
        K /= 2.0 * h;
        for (int j = 0; j < l; ++j) q[j] = p[j] - K * ui[j];
        for (int j = 0; j < l; ++j) {
            double* wj = w.data() + static_cast<std::size_t>(j) * n;
            const double uj = ui[j];
            const double qj = q[j];
            for (int k = 0; k < l; ++k) wj[k] -= uj * q[k] + qj * ui[k];
        }
        hcoef[i] = h;
    }
    for (int i = 0; i < n; ++i) diag[i] = w[static_cast<std::size_t>(i) * n + i];
    sub[0] = 0.0;
}

// Implicit-shift QL on (diag, e) accumulating rotations into the rows of v.
// e is superdiagonal-indexed: e[j] couples diag[j] and diag[j+1].
void ql_implicit_shift(std::vector<double>& diag, std::vector<double>& e, int n,
                       std::vector<double>& v, double split_tol) {
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        while (true) {
            int m = l;
            for (; m < n - 1; ++m) {
                const double dd = std::fabs(diag[m]) + std::fabs(diag[m + 1]);
                if (std::fabs(e[m]) <= split_tol * dd) break;
            }
            if (m == l) break;
            if (iter++ == kMaxQlIterations)
                throw std::runtime_error(
                    "eigensolver: QL failed to converge after " +
                    std::to_string(kMaxQlIterations) +
                    " iterations (off-diagonal residual " + std::to_string(e[l]) + ")");
            double g = (diag[l + 1] - diag[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = diag[m] - diag[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            int i = m - 1;
            for (; i >= l; --i) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    diag[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;

                double* vi = v.data() + static_cast<std::size_t>(i) * n;
                double* vi1 = v.data() + static_cast<std::size_t>(i + 1) * n;
                for (int k = 0; k < n; ++k) {
                    f = vi1[k];
                    vi1[k] = s * vi[k] + c * f;
                    vi[k] = c * vi[k] - s * f;
                }
            }
            if (r == 0.0 && i >= l) continue;
            diag[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

}  // namespace

SymmetricEigen symmetric_eigendecomposition(std::span<const double> matrix, int dim,
                                            double tol) {
    if (dim < 1) throw std::invalid_argument("eigensolver: dimension must be >= 1");
    const std::size_t n2 = static_cast<std::size_t>(dim) * dim;
    if (matrix.size() != n2)
        throw std::invalid_argument("eigensolver: matrix size does not match dimension");
    if (!(tol > 0.0)) throw std::invalid_argument("eigensolver: tol must be positive");

    double max_abs = 0.0;
    for (double x : matrix) max_abs = std::max(max_abs, std::fabs(x));
    double max_asym = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
            max_asym =
                std::max(max_asym, std::fabs(matrix[static_cast<std::size_t>(i) * dim + j] -
                                             matrix[static_cast<std::size_t>(j) * dim + i]));
    if (max_asym > 1e-9 * std::max(1.0, max_abs))
        throw std::invalid_argument("eigensolver: input not symmetric (max |A - A'| = " +
                                    std::to_string(max_asym) + ")");

    SymmetricEigen out;
    out.dim = dim;
    if (dim == 1) {
        out.values = {matrix[0]};
        out.vectors = {1.0};
        return out;
    }

    std::vector<double> w(n2);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            w[static_cast<std::size_t>(i) * dim + j] =
                0.5 * (matrix[static_cast<std::size_t>(i) * dim + j] +
                       matrix[static_cast<std::size_t>(j) * dim + i]);

    std::vector<double> diag(dim), sub(dim), hcoef(dim, 0.0);
    tridiagonalize(w, dim, diag, sub, hcoef);

    std::vector<double> e(dim, 0.0);
    for (int j = 0; j + 1 < dim; ++j) e[j] = sub[j + 1];

    std::vector<double> v(n2, 0.0);
    for (int i = 0; i < dim; ++i) v[static_cast<std::size_t>(i) * dim + i] = 1.0;

    ql_implicit_shift(diag, e, dim, v, std::max(DBL_EPSILON, tol));

    // Fold the Householder transforms back in: V <- V P_2 P_3 ... P_{n-1}.
    // Two rows per pass so the u vector is reloaded half as often.
    for (int i = 2; i < dim; ++i) {
        if (hcoef[i] == 0.0) continue;
        const double* ui = w.data() + static_cast<std::size_t>(i) * dim;
        const double inv_h = 1.0 / hcoef[i];
        int r = 0;
        for (; r + 2 <= dim; r += 2) {
            double* va = v.data() + static_cast<std::size_t>(r) * dim;
            double* vb = va + dim;
            const double ga = dot4(va, ui, i) * inv_h;
            const double gb = dot4(vb, ui, i) * inv_h;
            for (int k = 0; k < i; ++k) {
                va[k] -= ga * ui[k];
                vb[k] -= gb * ui[k];
            }
        }
        if (r < dim) {
            double* va = v.data() + static_cast<std::size_t>(r) * dim;
            const double ga = dot4(va, ui, i) * inv_h;
            for (int k = 0; k < i; ++k) va[k] -= ga * ui[k];
        }
    }

    std::vector<int> order(dim);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return diag[a] > diag[b]; });

    out.values.resize(dim);
    out.vectors.resize(n2);
    for (int i = 0; i < dim; ++i) {
        out.values[i] = diag[order[i]];
        const double* src = v.data() + static_cast<std::size_t>(order[i]) * dim;
        double* dst = out.vectors.data() + static_cast<std::size_t>(i) * dim;
        std::copy(src, src + dim, dst);
        for (int k = 0; k < dim; ++k) {
            if (std::fabs(dst[k]) > 1e-12) {
                if (dst[k] < 0.0)
                    for (int j = 0; j < dim; ++j) dst[j] = -dst[j];
                break;
            }
        }
    }
    return out;
}

}  // namespace saak
