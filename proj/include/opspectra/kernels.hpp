#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "opspectra/complex_matrix.hpp"
#include "opspectra/eig.hpp"
#include "opspectra/errors.hpp"
#include "opspectra/svd.hpp"
#include "opspectra/tolerance.hpp"

namespace opspectra {

/// Polar decomposition T = W |T| with N(W) = N(T).
struct PolarForm {
    ComplexMatrix w;        // partial isometry
    ComplexMatrix modulus;  // |T| = (T^*T)^{1/2}, PSD
    int null_dim = 0;       // dim of the numerical null space of T
};

struct PsdCheck {
    bool psd = false;
    double min_eigenvalue = 0.0;
};

/// true iff min eigenvalue >= -psd_tol * ||A||; the witness value is returned.
inline PsdCheck psd_check(const ComplexMatrix& a, const ToleranceConfig& tol = {}) {
    EigDecomposition e = hermitian_eig(a, tol);
    PsdCheck r;
    r.min_eigenvalue = e.values.empty() ? 0.0 : e.values.front();
    const double norm = e.values.empty()
                            ? 0.0
                            : std::max(std::abs(e.values.front()), std::abs(e.values.back()));
    r.psd = r.min_eigenvalue >= -tol.psd_tol * norm;
    return r;
}

/// Positive square root of a PSD matrix via its eigendecomposition.
inline ComplexMatrix sqrt_psd(const ComplexMatrix& a, const ToleranceConfig& tol = {}) {
    EigDecomposition e = hermitian_eig(a, tol);
    const double norm = e.values.empty()
                            ? 0.0
                            : std::max(std::abs(e.values.front()), std::abs(e.values.back()));
    if (!e.values.empty() && e.values.front() < -tol.psd_tol * norm)
        throw NotPSD("sqrt_psd: min eigenvalue " + std::to_string(e.values.front()));
    std::vector<double> roots(e.values.size());
    for (std::size_t i = 0; i < e.values.size(); ++i)
        roots[i] = std::sqrt(std::max(e.values[i], 0.0));
    return eig_reassemble(e, roots);
}

/// T = W |T|. Singular values sigma_i <= rank_tol * sigma_max are treated as
/// null; the tie at the threshold goes to the null space, keeping N(W) = N(T).
inline PolarForm polar_decompose(const ComplexMatrix& t, const ToleranceConfig& tol = {}) {
    if (!t.square()) throw DimensionMismatch("polar_decompose: matrix not square");
    const std::size_t n = t.rows();
    SvdResult s = svd(t);
    const double smax = s.sigma.empty() ? 0.0 : s.sigma.front();
    const double cut = tol.rank_tol * smax;

    PolarForm out;
    out.w = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        if (s.sigma[k] <= cut) { out.null_dim++; continue; }
        // W += u_k v_k^H
        for (std::size_t i = 0; i < n; ++i) {
            const cplx uik = s.u(i, k);
            if (uik == cplx(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < n; ++j)
                out.w(i, j) += uik * std::conj(s.v(j, k));
        }
    }
    // |T| = V Sigma V^H
    ComplexMatrix d(n, n);
    for (std::size_t k = 0; k < n; ++k) d(k, k) = s.sigma[k];
    out.modulus = s.v * d * s.v.adjoint();
    out.modulus.symmetrize();
    out.modulus.hermitian_hint = true;
    return out;
}

/// Numerical rank at rank_tol, from singular values.
inline int numerical_rank(const std::vector<double>& sigma, double rank_tol) {
    if (sigma.empty()) return 0;
    const double cut = rank_tol * sigma.front();
    int r = 0;
    for (double s : sigma)
        if (s > cut) ++r;
    return r;
}

/// Orthonormal basis (columns) of the numerical null space of T.
inline ComplexMatrix null_space_basis(const ComplexMatrix& t, const ToleranceConfig& tol = {}) {
    SvdResult s = svd(t);
    const double smax = s.sigma.empty() ? 0.0 : s.sigma.front();
    const double cut = tol.rank_tol * smax;
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < s.sigma.size(); ++k)
        if (s.sigma[k] <= cut) idx.push_back(k);
    return s.v.select_columns(idx);
}

/// trace(T^*T - T T^*); exactly zero in exact arithmetic for any square T.
inline double commutator_trace(const ComplexMatrix& t) {
    const ComplexMatrix th = t.adjoint();
    return ((th * t).trace() - (t * th).trace()).real();
}

} // namespace opspectra
