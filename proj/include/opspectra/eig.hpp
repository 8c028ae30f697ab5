#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "opspectra/complex_matrix.hpp"
#include "opspectra/errors.hpp"
#include "opspectra/tolerance.hpp"

namespace opspectra {

/// Hermitian eigendecomposition A = V diag(values) V^H, values ascending.
struct EigDecomposition {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // unitary, columns are eigenvectors
};

namespace detail {

/// Off-diagonal Frobenius mass of a square matrix.
inline double offdiag_norm_sq(const ComplexMatrix& a) {
    double s = 0.0;
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) s += std::norm(a(i, j));
    return s;
}

/// One complex Jacobi rotation zeroing a(p,q), applied two-sided to `a`
/// and accumulated into the columns of `v`.
inline void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
    const std::size_t n = a.rows();
    const cplx apq = a(p, q);
    const double abs_apq = std::abs(apq);
    if (abs_apq == 0.0) return;

    const double app = a(p, p).real();
    const double aqq = a(q, q).real();
    const cplx phase = apq / abs_apq;  // a(p,q) = |a(p,q)| * phase

    // Real Jacobi angle on the phase-aligned 2x2 block.
    const double tau = (aqq - app) / (2.0 * abs_apq);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    // Plane rotation U on coordinates (p,q):
    //   U = [ phase*c   phase*s ]
    //       [   -s         c    ]
    const cplx u00 = phase * c, u01 = phase * s;
    const cplx u10 = -s, u11 = c;

    // A <- U^H A U : first columns (A U), then rows (U^H A).
    for (std::size_t i = 0; i < n; ++i) {
        const cplx aip = a(i, p), aiq = a(i, q);
        a(i, p) = aip * u00 + aiq * u10;
        a(i, q) = aip * u01 + aiq * u11;
    }
    for (std::size_t j = 0; j < n; ++j) {
        const cplx apj = a(p, j), aqj = a(q, j);
        a(p, j) = std::conj(u00) * apj + std::conj(u10) * aqj;
        a(q, j) = std::conj(u01) * apj + std::conj(u11) * aqj;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = cplx(a(p, p).real(), 0.0);
    a(q, q) = cplx(a(q, q).real(), 0.0);

    // V <- V U
    for (std::size_t i = 0; i < n; ++i) {
        const cplx vip = v(i, p), viq = v(i, q);
        v(i, p) = vip * u00 + viq * u10;
        v(i, q) = vip * u01 + viq * u11;
    }
}

/// Deterministic phase normalization: the largest-magnitude entry of each
/// column is made real positive. Stabilizes serialized output.
inline void normalize_column_phases(ComplexMatrix& v) {
    const std::size_t n = v.rows();
    for (std::size_t j = 0; j < v.cols(); ++j) {
        std::size_t imax = 0;
        double amax = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double a = std::abs(v(i, j));
            if (a > amax + 1e-15) { amax = a; imax = i; }
        }
        if (amax <= 0.0) continue;
        const cplx piv = v(imax, j);
        if (std::abs(piv) == 0.0) continue;
        const cplx ph = std::conj(piv) / std::abs(piv);
        if (ph != cplx(1.0, 0.0))
            for (std::size_t i = 0; i < n; ++i) v(i, j) *= ph;
    }
}

} // namespace detail

/// Cyclic Jacobi with threshold skipping. Input must be Hermitian within
/// 1e-12 * scale; it is symmetrized before iteration.
inline EigDecomposition hermitian_eig(ComplexMatrix a, const ToleranceConfig& tol = {}) {
    if (!a.square()) throw NotHermitian("hermitian_eig: matrix not square");
    const std::size_t n = a.rows();
    const double scale = std::max(a.max_abs(), 1e-300);
    if (a.hermitian_defect() > 1e-12 * scale)
        throw NotHermitian("hermitian_eig: Hermitian defect exceeds 1e-12 * scale");
    a.symmetrize();

    ComplexMatrix v = ComplexMatrix::identity(n);
    if (n > 1) {
        const double fro = a.frobenius_norm();
        const double stop = (fro > 0.0 ? fro : 1.0) * 1e-15 * static_cast<double>(n);
        const int max_sweeps = 60;
        int sweep = 0;
        for (; sweep < max_sweeps; ++sweep) {
            double off = std::sqrt(detail::offdiag_norm_sq(a));
            if (off <= stop) break;
            // Threshold: rotations smaller than this do not pay this sweep.
            const double thresh = off / (static_cast<double>(n));
            bool rotated = false;
            for (std::size_t p = 0; p + 1 < n; ++p) {
                for (std::size_t q = p + 1; q < n; ++q) {
                    const double apq = std::abs(a(p, q));
                    if (apq == 0.0) continue;
                    if (apq < thresh * 1e-2 && apq < stop) continue;
                    detail::jacobi_rotate(a, v, p, q);
                    rotated = true;
                }
            }
            if (!rotated) break;
        }
        if (sweep == max_sweeps && std::sqrt(detail::offdiag_norm_sq(a)) > stop * 1e3)
            throw NoConvergence("hermitian_eig: Jacobi sweep cap exceeded");
    }

    EigDecomposition out;
    out.values.resize(n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return diag[x] < diag[y]; });
    out.vectors = ComplexMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = diag[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    detail::normalize_column_phases(out.vectors);
    out.vectors.hermitian_hint = false;
    (void)tol;
    return out;
}

/// Reconstruct V diag(f(values)) V^H.
inline ComplexMatrix eig_reassemble(const EigDecomposition& e, const std::vector<double>& values) {
    const std::size_t n = e.vectors.rows();
    ComplexMatrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) d(i, i) = values[i];
    ComplexMatrix r = e.vectors * d * e.vectors.adjoint();
    r.symmetrize();
    r.hermitian_hint = true;
    return r;
}

} // namespace opspectra
