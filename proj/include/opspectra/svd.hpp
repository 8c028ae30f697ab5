#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "opspectra/complex_matrix.hpp"
#include "opspectra/errors.hpp"

namespace opspectra {

/// A = U diag(sigma) V^H with sigma descending. U has orthonormal columns
/// (m x min-shape thin form, completed on the numerical null space), V unitary.
struct SvdResult {
    ComplexMatrix u;
    std::vector<double> sigma;  // descending
    ComplexMatrix v;
};

namespace detail {

/// One-sided Jacobi (Hestenes): orthogonalize the columns of A by right
/// plane rotations. High relative accuracy on small singular values, which
/// the polar normalization N(W) = N(T) depends on.
inline SvdResult svd_tall(const ComplexMatrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<std::vector<cplx>> g(n, std::vector<cplx>(m));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) g[j][i] = a(i, j);

    ComplexMatrix v = ComplexMatrix::identity(n);
    const double eps = 2.2204460492503131e-16;
    // Columns with correlation below this are treated as orthogonal. The
    // dimension factor stops eps-level churn between equal-norm columns,
    // where tau = 0 would otherwise fire full 45-degree rotations forever.
    const double conv = eps * 4.0 * std::sqrt(static_cast<double>(m));
    double dmax = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (const cplx& x : g[j]) s += std::norm(x);
        dmax = std::max(dmax, s);
    }
    // Rotation residue: a column cancelled against a parallel partner keeps
    // eps-level noise that stays fully correlated with live columns. Freeze
    // such columns; they are resolved by the null-space completion below.
    const double freeze = dmax * 1e-24;
    const int max_sweeps = 60;
    int sweep = 0;
    for (; sweep < max_sweeps && n > 1; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double dp = 0.0, dq = 0.0;
                cplx gpq = 0.0;
                const cplx* cp = g[p].data();
                const cplx* cq = g[q].data();
                for (std::size_t i = 0; i < m; ++i) {
                    dp += std::norm(cp[i]);
                    dq += std::norm(cq[i]);
                    gpq += std::conj(cp[i]) * cq[i];
                }
                if (dp <= freeze || dq <= freeze) continue;
                const double abs_g = std::abs(gpq);
                if (abs_g <= conv * std::sqrt(dp) * std::sqrt(dq) || abs_g == 0.0) continue;

                const cplx phase = gpq / abs_g;
                const double tau = (dq - dp) / (2.0 * abs_g);
                const double t =
                    (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx u00 = phase * c, u01 = phase * s;
                const cplx u10 = -s, u11 = c;

                cplx* wp = g[p].data();
                cplx* wq = g[q].data();
                for (std::size_t i = 0; i < m; ++i) {
                    const cplx xp = wp[i], xq = wq[i];
                    wp[i] = xp * u00 + xq * u10;
                    wq[i] = xp * u01 + xq * u11;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const cplx vp = v(i, p), vq = v(i, q);
                    v(i, p) = vp * u00 + vq * u10;
                    v(i, q) = vp * u01 + vq * u11;
                }
                rotated = true;
            }
        }
        if (!rotated) break;
    }
    if (sweep == max_sweeps)
        throw NoConvergence("svd: one-sided Jacobi sweep cap exceeded");

    std::vector<double> sig(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s2 = 0.0;
        for (const cplx& x : g[j]) s2 += std::norm(x);
        sig[j] = std::sqrt(s2);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });

    SvdResult out;
    out.sigma.resize(n);
    out.u = ComplexMatrix(m, n);
    out.v = ComplexMatrix(n, n);
    const double smax = (n ? sig[order[0]] : 0.0);
    // Must sit above the freeze floor so frozen noise columns are completed
    // deterministically rather than normalized into U.
    const double null_cut =
        smax * std::max(1e-14 * static_cast<double>(std::max<std::size_t>(m, 1)), 2.5e-12);
    std::vector<bool> u_set(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.sigma[j] = sig[src];
        for (std::size_t i = 0; i < n; ++i) out.v(i, j) = v(i, src);
        if (sig[src] > null_cut && sig[src] > 0.0) {
            const double inv = 1.0 / sig[src];
            for (std::size_t i = 0; i < m; ++i) out.u(i, j) = g[src][i] * inv;
            u_set[j] = true;
        }
    }
    // Deterministic completion of U on the numerical null space: take the
    // basis vector with the largest residual after orthogonalization against
    // the set columns (the first-above-a-threshold rule can reject every
    // candidate once the null direction spreads over many coordinates).
    for (std::size_t j = 0; j < n; ++j) {
        if (u_set[j]) continue;
        std::vector<cplx> best;
        double best_norm = -1.0;
        for (std::size_t cand = 0; cand < m; ++cand) {
            std::vector<cplx> e(m, cplx(0.0, 0.0));
            e[cand] = 1.0;
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t k = 0; k < n; ++k) {
                    if (!u_set[k]) continue;
                    cplx proj = 0.0;
                    for (std::size_t i = 0; i < m; ++i) proj += std::conj(out.u(i, k)) * e[i];
                    for (std::size_t i = 0; i < m; ++i) e[i] -= proj * out.u(i, k);
                }
            const double nrm = vec_norm(e);
            if (nrm > best_norm + 1e-12) {
                best_norm = nrm;
                best = std::move(e);
            }
            if (best_norm > 0.7) break;  // good enough, keep it deterministic
        }
        if (best_norm > 0.0) {
            for (std::size_t i = 0; i < m; ++i) out.u(i, j) = best[i] / best_norm;
            u_set[j] = true;
        }
    }
    return out;
}

} // namespace detail

/// Singular value decomposition of a general (possibly rectangular) matrix.
inline SvdResult svd(const ComplexMatrix& a) {
    if (!a.all_finite()) throw Error("svd: non-finite entries");
    if (a.rows() >= a.cols()) return detail::svd_tall(a);
    SvdResult t = detail::svd_tall(a.adjoint());
    SvdResult out;
    out.u = std::move(t.v);
    out.v = std::move(t.u);
    out.sigma = std::move(t.sigma);
    return out;
}

inline std::vector<double> singular_values(const ComplexMatrix& a) { return svd(a).sigma; }

/// Largest singular value.
inline double operator_norm(const ComplexMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    return svd(a).sigma.front();
}

/// Certified upper bound on the largest singular value in O(n^2):
/// min(||A||_F, sqrt(||A||_1 ||A||_inf)).
inline double spectral_norm_upper(const ComplexMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    double fro2 = 0.0;
    std::vector<double> col_sum(a.cols(), 0.0), row_sum(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double v = std::abs(a(i, j));
            fro2 += v * v;
            row_sum[i] += v;
            col_sum[j] += v;
        }
    const double n1 = *std::max_element(col_sum.begin(), col_sum.end());
    const double ninf = *std::max_element(row_sum.begin(), row_sum.end());
    return std::min(std::sqrt(fro2), std::sqrt(n1 * ninf));
}

/// Norm for defect/residual matrices: exact up to a size cap, the certified
/// upper bound beyond it. Conservative: never understates a defect, so a
/// "defect <= tol" decision made with it is sound.
inline double defect_norm(const ComplexMatrix& a) {
    if (std::max(a.rows(), a.cols()) <= 160) return operator_norm(a);
    return spectral_norm_upper(a);
}

/// Smallest singular value over the domain; zero when rank-deficient by shape.
inline double min_modulus(const ComplexMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    if (a.rows() < a.cols()) return 0.0;  // nontrivial kernel by dimension count
    return svd(a).sigma.back();
}

} // namespace opspectra
