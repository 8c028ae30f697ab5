#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opspectra/classification.hpp"
#include "opspectra/complex_matrix.hpp"
#include "opspectra/eig.hpp"
#include "opspectra/errors.hpp"
#include "opspectra/kernels.hpp"
#include "opspectra/spectral_profile.hpp"
#include "opspectra/structured_operator.hpp"
#include "opspectra/svd.hpp"
#include "opspectra/tolerance.hpp"

namespace opspectra {

// ============================================================ positive form

/// T = alpha I - K1 + K2 with K1, K2 PSD, K1 K2 = 0 and K1 <= alpha I.
struct PositiveCanonicalForm {
    double alpha = 0.0;
    ComplexMatrix k1;
    ComplexMatrix k2;

    ComplexMatrix reassemble() const {
        const std::size_t n = k1.rows();
        ComplexMatrix t = ComplexMatrix::identity(n);
        t *= alpha;
        t -= k1;
        t += k2;
        t.symmetrize();
        return t;
    }
};

/// Essential point: declared profile wins; the estimator is the fallback.
/// A declared profile and an estimate that disagree beyond cluster_gap is a
/// hard Inconsistent error raised by the estimator itself.
inline double resolve_essential_point(const StructuredOperator& op,
                                      const std::vector<std::int64_t>& dims,
                                      const ToleranceConfig& tol = {}) {
    if (op.profile() && op.profile()->has_single_essential_point())
        return op.profile()->essential_point();
    if (dims.size() >= 3) {
        EssentialEstimate est = estimate_essential_spectrum(op, dims, tol);
        if (est.clusters.size() == 1) return est.clusters.front().center;
    }
    throw NoEssentialPoint("resolve_essential_point: no declared profile and the "
                           "estimator was inconclusive");
}

/// Split a positive matrix against its essential point: K2 is the positive
/// part of (T - alpha I), K1 the positive part of (alpha I - T). Both live on
/// orthogonal spectral subspaces, so K1 K2 = 0 by construction.
inline PositiveCanonicalForm positive_canonical_form(const ComplexMatrix& t, double alpha,
                                                     const ToleranceConfig& tol = {}) {
    PsdCheck pc = psd_check(t, tol);
    if (!pc.psd)
        throw NotPositive("positive_canonical_form: min eigenvalue " +
                          std::to_string(pc.min_eigenvalue));
    if (alpha < 0.0) throw NoEssentialPoint("positive_canonical_form: alpha < 0");
    EigDecomposition e = hermitian_eig(t, tol);
    const std::size_t n = t.rows();
    std::vector<double> up(n, 0.0), down(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = e.values[i] - alpha;
        if (d > 0.0) up[i] = d;
        else down[i] = -d;
    }
    PositiveCanonicalForm f;
    f.alpha = alpha;
    f.k2 = eig_reassemble(e, up);
    f.k1 = eig_reassemble(e, down);
    return f;
}

struct PositiveFormVerification {
    double reassembly_defect = 0.0;   // || alpha I - K1 + K2 - T || / ||T||
    double k1k2_product_norm = 0.0;   // || K1 K2 || / (||K1|| ||K2||), 0 when degenerate
    double k1_bound_defect = 0.0;     // largest eigenvalue of K1 - alpha I, clamped at 0
    bool k1_psd = false, k2_psd = false;
    double alpha_agreement = 0.0;     // uniqueness: re-decomposition drift
    double k1_agreement = 0.0;
    double k2_agreement = 0.0;
    bool ok = false;
};

inline PositiveFormVerification verify_positive_form(const PositiveCanonicalForm& f,
                                                     const ComplexMatrix& t,
                                                     const ToleranceConfig& tol = {}) {
    PositiveFormVerification v;
    const double tnorm = std::max(operator_norm(t), 1e-300);
    v.reassembly_defect = defect_norm(f.reassemble() - t) / tnorm;
    const double n1 = operator_norm(f.k1), n2 = operator_norm(f.k2);
    v.k1k2_product_norm = (n1 > 0 && n2 > 0) ? defect_norm(f.k1 * f.k2) / (n1 * n2) : 0.0;
    v.k1_psd = psd_check(f.k1, tol).psd;
    v.k2_psd = psd_check(f.k2, tol).psd;
    EigDecomposition e1 = hermitian_eig(f.k1, tol);
    v.k1_bound_defect = std::max(0.0, e1.values.back() - f.alpha);
    PositiveCanonicalForm again = positive_canonical_form(f.reassemble(), f.alpha, tol);
    v.alpha_agreement = std::abs(again.alpha - f.alpha);
    v.k1_agreement = defect_norm(again.k1 - f.k1) / tnorm;
    v.k2_agreement = defect_norm(again.k2 - f.k2) / tnorm;
    v.ok = v.reassembly_defect <= tol.eq_tol && v.k1k2_product_norm <= tol.eq_tol &&
           v.k1_psd && v.k2_psd && v.k1_bound_defect <= tol.psd_tol * std::max(f.alpha, 1.0) &&
           v.alpha_agreement <= tol.eq_tol && v.k1_agreement <= tol.eq_tol &&
           v.k2_agreement <= tol.eq_tol;
    return v;
}

/// Kernel-side observations on a canonical form: N(T) sits inside N(K2),
/// K1 acts as alpha on it, and T is non-injective exactly when ||K1|| = alpha.
struct PositiveFormAnalysis {
    std::int64_t kernel_dim = 0;
    double max_k2_on_kernel = 0.0;        // max ||K2 v|| over unit kernel vectors
    double max_k1_eigen_defect = 0.0;     // max ||K1 v - alpha v||
    double k1_norm = 0.0;
    bool non_injective = false;
    bool k1_norm_attains_alpha = false;
    bool iff_consistent = false;
    FredholmData fredholm;
};

inline PositiveFormAnalysis analyze_positive_form(const PositiveCanonicalForm& f,
                                                  const ToleranceConfig& tol = {}) {
    PositiveFormAnalysis a;
    const ComplexMatrix t = f.reassemble();
    const double tnorm = std::max(operator_norm(t), 1e-300);
    EigDecomposition e = hermitian_eig(t, tol);
    const std::size_t n = t.rows();
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(e.values[i]) > tol.rank_tol * tnorm) continue;
        ++a.kernel_dim;
        auto v = e.vectors.column(i);
        a.max_k2_on_kernel = std::max(a.max_k2_on_kernel, vec_norm(matvec(f.k2, v)));
        auto k1v = matvec(f.k1, v);
        for (std::size_t j = 0; j < n; ++j) k1v[j] -= f.alpha * v[j];
        a.max_k1_eigen_defect = std::max(a.max_k1_eigen_defect, vec_norm(k1v));
    }
    a.k1_norm = operator_norm(f.k1);
    a.non_injective = a.kernel_dim > 0;
    a.k1_norm_attains_alpha =
        std::abs(a.k1_norm - f.alpha) <= tol.eq_tol * std::max(f.alpha, 1e-300);
    a.iff_consistent = (a.non_injective == a.k1_norm_attains_alpha);
    SpectralProfile p;
    p.essential_points = {f.alpha};
    p.kernel_dim = ExtDim::finite(a.kernel_dim);
    p.cokernel_dim = ExtDim::finite(a.kernel_dim);  // T = T^*
    a.fredholm = fredholm_data(p, f.alpha);
    return a;
}

/// 2x2 reduction of T = alpha I - K1 + K2 over N(K1) (+) N(K1)^perp: the
/// kernel block is alpha I + K2~, the complement block alpha I - K1~.
struct PositiveBlockReduction {
    ComplexMatrix kernel_basis;       // N(K1)
    ComplexMatrix complement_basis;   // closure R(K1)
    ComplexMatrix block_kernel;       // compression of T to N(K1)
    ComplexMatrix block_complement;   // compression of T to N(K1)^perp
    double offdiag_norm = 0.0;
    double kernel_block_defect = 0.0;      // vs alpha I + K2~
    double complement_block_defect = 0.0;  // vs alpha I - K1~
};

inline PositiveBlockReduction block_reduce_positive(const PositiveCanonicalForm& f,
                                                    const ToleranceConfig& tol = {}) {
    EigDecomposition e = hermitian_eig(f.k1, tol);
    const std::size_t n = f.k1.rows();
    const double k1norm = e.values.empty() ? 0.0 : std::max(std::abs(e.values.back()), 0.0);
    const double cut = tol.rank_tol * k1norm;
    for (double lam : e.values)
        if (lam > cut / 16.0 && lam < cut * 16.0)
            throw RankAmbiguity("block_reduce_positive: K1 eigenvalue " + std::to_string(lam) +
                                " straddles the rank threshold " + std::to_string(cut));
    std::vector<std::size_t> ker, rng;
    for (std::size_t i = 0; i < n; ++i)
        (e.values[i] <= cut ? ker : rng).push_back(i);

    PositiveBlockReduction r;
    r.kernel_basis = e.vectors.select_columns(ker);
    r.complement_basis = e.vectors.select_columns(rng);
    const ComplexMatrix t = f.reassemble();
    const ComplexMatrix q0 = r.kernel_basis, q1 = r.complement_basis;
    r.block_kernel = q0.adjoint() * t * q0;
    r.block_complement = q1.adjoint() * t * q1;
    if (!ker.empty() && !rng.empty())
        r.offdiag_norm = std::max(defect_norm(q0.adjoint() * t * q1),
                                  defect_norm(q1.adjoint() * t * q0));
    ComplexMatrix want_k = ComplexMatrix::identity(ker.size());
    want_k *= f.alpha;
    want_k += q0.adjoint() * f.k2 * q0;
    r.kernel_block_defect = ker.empty() ? 0.0 : defect_norm(r.block_kernel - want_k);
    ComplexMatrix want_c = ComplexMatrix::identity(rng.size());
    want_c *= f.alpha;
    want_c -= q1.adjoint() * f.k1 * q1;
    r.complement_block_defect = rng.empty() ? 0.0 : defect_norm(r.block_complement - want_c);
    return r;
}

// ====================================================== quasinormal blocks

struct QuasinormalBlock {
    double scalar = 0.0;          // cluster center of |T| eigenvalues
    ComplexMatrix basis;          // eigenspace basis, columns
    ComplexMatrix block;          // W restricted to the eigenspace
    double unitary_defect = 0.0;  // max(||U^*U - I||, ||UU^* - I||)
    bool kernel_identity_flag = false;  // the beta_j0 = 0 block, V = I on N(T)
};

struct EssentialQuasinormalBlock {
    double scalar = 0.0;
    ComplexMatrix basis;
    ComplexMatrix block;
    double isometry_defect = 0.0;     // ||V^*V - I||
    double co_isometry_defect = 0.0;  // ||VV^* - I||, reported separately
    std::string kind = "absent";      // unitary | proper_isometry | zero | absent
};

struct QuasinormalDecomposition {
    std::vector<QuasinormalBlock> upper_blocks;  // descending alpha_i > alpha
    EssentialQuasinormalBlock essential;
    std::vector<QuasinormalBlock> lower_blocks;  // descending beta_j < alpha
    double reassembly_defect = 0.0;
    double alpha = 0.0;
    std::int64_t dim = 0;
};

namespace detail {

/// Cluster a descending value list into [first, last) ranges whose internal
/// gaps stay below cluster_gap.
inline std::vector<std::pair<std::size_t, std::size_t>> cluster_descending(
    const std::vector<double>& v, std::size_t first, std::size_t last, double gap) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t i = first;
    while (i < last) {
        std::size_t j = i + 1;
        while (j < last && v[j - 1] - v[j] < gap) ++j;
        out.push_back({i, j});
        i = j;
    }
    return out;
}

inline double cluster_center(const std::vector<double>& v, std::size_t first, std::size_t last) {
    double s = 0.0;
    for (std::size_t i = first; i < last; ++i) s += v[i];
    return s / static_cast<double>(last - first);
}

/// Window data for spectral-block extraction. For a band operator the square
/// truncation cuts the image of its last `band` columns, polluting |T| with
/// spurious small singular values; the (n + band) x n compression has
/// complete columns, so its singular data is exactly that of T P_n.
struct SpectralWindow {
    ComplexMatrix m_sq;  // n x n window of the operator
    SvdResult s;         // of the tall (n + band) x n compression
    std::int64_t band = 0;  // 0 when the truncation is exact
    std::int64_t n = 0;
};

inline SpectralWindow prepare_window(const StructuredOperator& op, std::int64_t n) {
    SpectralWindow w;
    w.n = n;
    const bool exact = op.dimension() && *op.dimension() <= n;
    w.band = exact ? 0 : op.bandwidth();
    ComplexMatrix big = op.render(n + w.band);
    w.m_sq = (w.band == 0) ? big : big.top_left(static_cast<std::size_t>(n));
    ComplexMatrix tall = (w.band == 0)
                             ? w.m_sq
                             : big.submatrix(0, 0, static_cast<std::size_t>(n + w.band),
                                             static_cast<std::size_t>(n));
    w.s = svd(tall);
    return w;
}

/// Basis columns whose coordinate support avoids the last `band` window
/// coordinates; the operator maps them without loss of mass, so block
/// identities are exact on them.
inline std::vector<std::size_t> interior_basis_cols(const ComplexMatrix& basis, std::int64_t n,
                                                    std::int64_t band) {
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < basis.cols(); ++j) {
        double tail = 0.0;
        for (std::int64_t i = n - band; i < n; ++i)
            tail += std::norm(basis(static_cast<std::size_t>(i), j));
        if (tail <= 1e-24) keep.push_back(j);
    }
    return keep;
}

} // namespace detail

/// Spectral-block decomposition of a quasinormal operator: restrict the polar
/// factor W to the eigenspaces of |T|, grouped against the essential point.
/// Eigenvalues within cluster_gap of alpha belong to the essential block only
/// when the profile declares alpha as an eigenvalue; otherwise their side is
/// ambiguous and the decomposition refuses to guess.
inline QuasinormalDecomposition quasinormal_decompose(const StructuredOperator& op,
                                                      std::int64_t n,
                                                      const ToleranceConfig& tol = {}) {
    if (!op.profile() || !op.profile()->has_single_essential_point())
        throw NoEssentialPoint("quasinormal_decompose: profile with a single essential "
                               "point required");
    const SpectralProfile& prof = *op.profile();
    const double alpha = prof.essential_point();

    detail::SpectralWindow w = detail::prepare_window(op, n);
    const ComplexMatrix& m = w.m_sq;
    if (!op.declares_class("quasinormal")) {
        PredicateResult q = is_quasinormal(m, tol);
        if (!q.holds)
            throw NotQuasinormal("quasinormal_decompose: commutation defect " +
                                 std::to_string(q.defect));
    }

    const SvdResult& s = w.s;
    const std::size_t un = static_cast<std::size_t>(n);
    const double mnorm = s.sigma.empty() ? 0.0 : s.sigma.front();

    // grouping against the declared essential point
    std::size_t upper_end = 0;
    while (upper_end < un && s.sigma[upper_end] > alpha + tol.cluster_gap) ++upper_end;
    std::size_t ess_end = upper_end;
    while (ess_end < un && s.sigma[ess_end] >= alpha - tol.cluster_gap) ++ess_end;
    if (ess_end > upper_end && !(prof.alpha_in_point_spectrum || alpha == 0.0))
        throw EssentialAmbiguity("quasinormal_decompose: eigenvalues within cluster_gap of "
                                 "alpha but alpha is not declared an eigenvalue");

    QuasinormalDecomposition out;
    out.alpha = alpha;
    out.dim = n;

    auto make_block = [&](std::size_t first, std::size_t last, bool lower) {
        QuasinormalBlock b;
        b.scalar = detail::cluster_center(s.sigma, first, last);
        std::vector<std::size_t> idx;
        for (std::size_t i = first; i < last; ++i) idx.push_back(i);
        b.basis = s.v.select_columns(idx);
        const std::size_t d = idx.size();
        if (lower && b.scalar <= tol.rank_tol * std::max(mnorm, 1e-300)) {
            // beta_j0 = 0: T vanishes on N(T) and W restricts to 0 there; the
            // block is the identity on N(T) by convention.
            b.scalar = 0.0;
            b.block = ComplexMatrix::identity(d);
            b.kernel_identity_flag = true;
            b.unitary_defect = 0.0;
            return b;
        }
        ComplexMatrix restricted = b.basis.adjoint() * m * b.basis;
        restricted *= cplx(1.0 / b.scalar, 0.0);
        b.block = std::move(restricted);
        const ComplexMatrix id = ComplexMatrix::identity(d);
        const auto keep = detail::interior_basis_cols(b.basis, n, w.band);
        ComplexMatrix gram_defect = b.block.adjoint() * b.block - id;
        ComplexMatrix cogram_defect = b.block * b.block.adjoint() - id;
        if (keep.size() == d) {
            b.unitary_defect =
                std::max(defect_norm(gram_defect), defect_norm(cogram_defect));
        } else {
            b.unitary_defect = std::max(defect_norm(gram_defect.principal(keep)),
                                        defect_norm(cogram_defect.principal(keep)));
        }
        return b;
    };

    for (auto [f, l] : detail::cluster_descending(s.sigma, 0, upper_end, tol.cluster_gap))
        out.upper_blocks.push_back(make_block(f, l, false));
    for (auto [f, l] : detail::cluster_descending(s.sigma, ess_end, un, tol.cluster_gap))
        out.lower_blocks.push_back(make_block(f, l, true));

    if (ess_end > upper_end) {
        EssentialQuasinormalBlock e;
        e.scalar = alpha;
        std::vector<std::size_t> idx;
        for (std::size_t i = upper_end; i < ess_end; ++i) idx.push_back(i);
        e.basis = s.v.select_columns(idx);
        const std::size_t d = idx.size();
        if (alpha <= tol.rank_tol * std::max(mnorm, 1e-300)) {
            e.kind = "zero";
            e.block = ComplexMatrix(d, d);
        } else {
            ComplexMatrix v = e.basis.adjoint() * m * e.basis;
            v *= cplx(1.0 / alpha, 0.0);
            e.block = std::move(v);
            const ComplexMatrix id = ComplexMatrix::identity(d);
            auto keep = detail::interior_basis_cols(e.basis, n, w.band);
            if (keep.empty() && d > 0)
                for (std::size_t c = 0; c < d; ++c) keep.push_back(c);
            // V^*V - I is checked on interior columns: the boundary column of
            // a truncated isometry loses its mass to the window edge.
            e.isometry_defect =
                defect_norm((e.block.adjoint() * e.block - id).principal(keep));
            e.co_isometry_defect =
                defect_norm((e.block * e.block.adjoint() - id).principal(keep));
            e.kind = (e.co_isometry_defect <= tol.eq_tol) ? "unitary" : "proper_isometry";
        }
        out.essential = std::move(e);
    }

    // reassembly, compared on interior window columns
    ComplexMatrix rebuilt(un, un);
    auto add_block = [&](const ComplexMatrix& basis, const ComplexMatrix& block, double scalar) {
        if (basis.cols() == 0) return;
        ComplexMatrix scaled = block;
        scaled *= cplx(scalar, 0.0);
        rebuilt += basis * scaled * basis.adjoint();
    };
    for (const auto& b : out.upper_blocks) add_block(b.basis, b.block, b.scalar);
    for (const auto& b : out.lower_blocks)
        add_block(b.basis, b.block, b.kernel_identity_flag ? 0.0 : b.scalar);
    if (out.essential.kind != "absent" && out.essential.kind != "zero")
        add_block(out.essential.basis, out.essential.block, out.essential.scalar);
    const std::size_t keep_cols = static_cast<std::size_t>(n - w.band);
    out.reassembly_defect =
        defect_norm((rebuilt - m).submatrix(0, 0, un, keep_cols)) / std::max(mnorm, 1e-300);
    return out;
}

// ======================================================= hyponormal blocks

/// 3x3 lower-triangular-free form of a hyponormal operator over
/// H0 (+) H1 (+) H2: V0 normal on the upper eigenspaces, alpha V1 an isometry
/// on the alpha-eigenspace, A into H1, B on H2.
struct HyponormalBlockForm {
    ComplexMatrix h0_basis, h1_basis, h2_basis;
    ComplexMatrix v0;  // on H0
    ComplexMatrix v1;  // isometry on H1 (already divided by alpha), or 0x0
    ComplexMatrix a;   // H2 -> H1
    ComplexMatrix b;   // on H2
    std::vector<PointGroup> beta_targets;  // descending beta_j with multiplicities
    ComplexMatrix beta_sq_diag;            // (+) beta_j^2 I in H2 coordinates

    double v1_a_product_norm = 0.0;    // ||V1^* A||
    double gram_identity_defect = 0.0; // ||A^*A + B^*B - (+) beta_j^2 I||
    double bb_bound_defect = 0.0;      // negative part of (+) beta_j^2 I - BB^*
    double bb_bound_margin = 0.0;      // min eigenvalue of (+) beta_j^2 I - BB^*
    double bb_equality_gap = 0.0;      // ||BB^* - (+) beta_j^2 I||, reported only
    double v0_normal_defect = 0.0;
    double block_leak = 0.0;           // largest off-pattern block norm
    double reassembly_defect = 0.0;
    double alpha = 0.0;
    std::int64_t dim = 0;
    bool degenerate_single_isometry = false;  // T = ||T|| V1
};

inline HyponormalBlockForm hyponormal_block_form(const StructuredOperator& op, std::int64_t n,
                                                 const ToleranceConfig& tol = {}) {
    if (!op.profile() || !op.profile()->has_single_essential_point())
        throw NoEssentialPoint("hyponormal_block_form: profile with a single essential "
                               "point required");
    const SpectralProfile& prof = *op.profile();
    const double alpha = prof.essential_point();

    if (!op.declares_class("hyponormal")) {
        PredicateResult h = is_hyponormal_interior(op, n, tol);
        if (!h.holds)
            throw NotHyponormal("hyponormal_block_form: interior defect " +
                                std::to_string(h.defect));
    }

    detail::SpectralWindow w = detail::prepare_window(op, n);
    const ComplexMatrix& m = w.m_sq;
    const SvdResult& s = w.s;
    const std::size_t un = static_cast<std::size_t>(n);
    const double mnorm = s.sigma.empty() ? 0.0 : s.sigma.front();

    std::size_t upper_end = 0;
    while (upper_end < un && s.sigma[upper_end] > alpha + tol.cluster_gap) ++upper_end;
    std::size_t ess_end = upper_end;
    while (ess_end < un && s.sigma[ess_end] >= alpha - tol.cluster_gap) ++ess_end;
    if (ess_end > upper_end && !(prof.alpha_in_point_spectrum || alpha == 0.0))
        throw EssentialAmbiguity("hyponormal_block_form: eigenvalues within cluster_gap of "
                                 "alpha but alpha is not declared an eigenvalue");

    HyponormalBlockForm f;
    f.alpha = alpha;
    f.dim = n;

    std::vector<std::size_t> i0, i1, i2;
    for (std::size_t i = 0; i < upper_end; ++i) i0.push_back(i);
    for (std::size_t i = upper_end; i < ess_end; ++i) i1.push_back(i);
    for (std::size_t i = ess_end; i < un; ++i) i2.push_back(i);
    f.h0_basis = s.v.select_columns(i0);
    f.h1_basis = s.v.select_columns(i1);
    f.h2_basis = s.v.select_columns(i2);

    f.v0 = f.h0_basis.adjoint() * m * f.h0_basis;
    if (!i1.empty() && alpha > tol.rank_tol * std::max(mnorm, 1e-300)) {
        f.v1 = f.h1_basis.adjoint() * m * f.h1_basis;
        f.v1 *= cplx(1.0 / alpha, 0.0);
    } else {
        f.v1 = ComplexMatrix(i1.size(), i1.size());  // zero by convention
    }
    f.a = f.h1_basis.adjoint() * m * f.h2_basis;
    f.b = f.h2_basis.adjoint() * m * f.h2_basis;

    for (auto [first, last] : detail::cluster_descending(s.sigma, ess_end, un, tol.cluster_gap))
        f.beta_targets.push_back({detail::cluster_center(s.sigma, first, last),
                                  static_cast<std::int64_t>(last - first)});
    f.beta_sq_diag = ComplexMatrix(i2.size(), i2.size());
    {
        std::size_t pos = 0;
        for (const auto& g : f.beta_targets)
            for (std::int64_t r = 0; r < g.multiplicity; ++r, ++pos)
                f.beta_sq_diag(pos, pos) = g.value * g.value;
    }

    const auto keep2 = detail::interior_basis_cols(f.h2_basis, n, w.band);

    // off-pattern blocks must vanish: everything below the diagonal pattern
    // plus the H0 couplings (H0 reduces T).
    double leak = 0.0;
    auto max_leak = [&](const ComplexMatrix& q_left, const ComplexMatrix& q_right) {
        if (q_left.cols() == 0 || q_right.cols() == 0) return;
        leak = std::max(leak, defect_norm(q_left.adjoint() * m * q_right));
    };
    max_leak(f.h2_basis, f.h1_basis);  // below V1
    max_leak(f.h1_basis, f.h0_basis);
    max_leak(f.h2_basis, f.h0_basis);
    max_leak(f.h0_basis, f.h1_basis);
    max_leak(f.h0_basis, f.h2_basis);
    f.block_leak = leak;
    if (leak > tol.eq_tol * std::max(mnorm, 1e-300) * 10.0)
        throw BlockLeak("hyponormal_block_form: off-pattern block norm " + std::to_string(leak));

    // Gram-side identities hold exactly on interior columns; the boundary
    // columns of an infinite band operator lose their image past the window.
    if (!i1.empty() && !i2.empty() && !keep2.empty())
        f.v1_a_product_norm = defect_norm((f.v1.adjoint() * f.a).select_columns(keep2));
    if (!i2.empty()) {
        ComplexMatrix gram = f.a.adjoint() * f.a + f.b.adjoint() * f.b;
        ComplexMatrix defect = gram - f.beta_sq_diag;
        f.gram_identity_defect = keep2.empty() ? 0.0 : defect_norm(defect.principal(keep2));
        ComplexMatrix slack = f.beta_sq_diag - f.b * f.b.adjoint();
        slack.symmetrize();
        PsdCheck pc = psd_check(slack, tol);
        f.bb_bound_defect = std::max(0.0, -pc.min_eigenvalue);
        f.bb_bound_margin = pc.min_eigenvalue;
        f.bb_equality_gap = defect_norm(f.b * f.b.adjoint() - f.beta_sq_diag);
    }
    if (!i0.empty()) f.v0_normal_defect = is_normal(f.v0, tol).defect;

    ComplexMatrix rebuilt(un, un);
    auto add = [&](const ComplexMatrix& qr, const ComplexMatrix& blk, const ComplexMatrix& qc,
                   double scalar) {
        if (qr.cols() == 0 || qc.cols() == 0 || blk.rows() == 0) return;
        ComplexMatrix scaled = blk;
        scaled *= cplx(scalar, 0.0);
        rebuilt += qr * scaled * qc.adjoint();
    };
    add(f.h0_basis, f.v0, f.h0_basis, 1.0);
    add(f.h1_basis, f.v1, f.h1_basis, alpha);
    add(f.h1_basis, f.a, f.h2_basis, 1.0);
    add(f.h2_basis, f.b, f.h2_basis, 1.0);
    const std::size_t keep_cols = static_cast<std::size_t>(n - w.band);
    f.reassembly_defect =
        defect_norm((rebuilt - m).submatrix(0, 0, un, keep_cols)) / std::max(mnorm, 1e-300);

    f.degenerate_single_isometry = i0.empty() && i2.empty() && !i1.empty();
    return f;
}

/// T normal iff V1 is unitary (or absent) and B is normal.
inline bool normality_from_blocks(const HyponormalBlockForm& f, const ToleranceConfig& tol = {}) {
    bool v1_ok = true;
    if (f.v1.rows() > 0 && f.v1.max_abs() > 0.0) {
        const ComplexMatrix id = ComplexMatrix::identity(f.v1.rows());
        v1_ok = defect_norm(f.v1 * f.v1.adjoint() - id) <= tol.eq_tol;
    }
    bool b_ok = true;
    if (f.b.rows() > 0) b_ok = is_normal(f.b, tol).holds;
    return v1_ok && b_ok;
}

// ===================================================== adjoint block form

/// Lower-triangular counterpart for operators whose adjoint is hyponormal:
/// S1 a co-isometry, S1 A1^* = 0, A1 A1^* + B1 B1^* = (+) beta_j^2 I and
/// B1^* B1 bounded by it.
struct AdjointBlockForm {
    ComplexMatrix h0_basis, h1_basis, h2_basis;  // subspaces for T^*
    ComplexMatrix s0, s1, a1, b1;
    std::vector<PointGroup> beta_targets;
    double s1_co_isometry_defect = 0.0;  // ||S1 S1^* - I||
    double s1_a1_product_norm = 0.0;     // ||S1 A1^*||
    double gram_identity_defect = 0.0;   // ||A1 A1^* + B1 B1^* - (+) beta_j^2 I||
    double b1_bound_defect = 0.0;        // negative part of (+) beta_j^2 I - B1^* B1
    double reassembly_defect = 0.0;
    double alpha = 0.0;
    std::int64_t dim = 0;
};

/// Profile of |T^*| derived from the profile of |T|: same spectral diagram
/// away from zero, kernel and cokernel swapped.
inline SpectralProfile adjoint_profile(const SpectralProfile& p) {
    SpectralProfile q = p;
    std::swap(q.kernel_dim, q.cokernel_dim);
    if (q.kernel_dim.is_infinite() || (q.kernel_dim.is_finite() && q.kernel_dim.value() > 0)) {
        bool has_zero = false;
        for (auto& g : q.lower_points)
            if (g.value == 0.0) {
                has_zero = true;
                if (q.kernel_dim.is_finite()) g.multiplicity = q.kernel_dim.value();
            }
        if (!has_zero && q.kernel_dim.is_finite())
            q.lower_points.insert(q.lower_points.begin(), {0.0, q.kernel_dim.value()});
        q.min_modulus = 0.0;
    }
    return q;
}

inline AdjointBlockForm adjoint_block_form(const StructuredOperator& op, std::int64_t n,
                                           const ToleranceConfig& tol = {}) {
    if (!op.profile())
        throw NoEssentialPoint("adjoint_block_form: profile required");
    StructuredOperator star =
        StructuredOperator::adjoint(op).with_profile(adjoint_profile(*op.profile()));
    if (op.declares_class("adjoint_hyponormal") || op.declares_class("normal"))
        star = star.with_classes({"hyponormal"});
    HyponormalBlockForm f = hyponormal_block_form(star, n, tol);

    AdjointBlockForm out;
    out.h0_basis = f.h0_basis;
    out.h1_basis = f.h1_basis;
    out.h2_basis = f.h2_basis;
    out.s0 = f.v0.adjoint();
    out.s1 = f.v1.adjoint();
    out.a1 = f.a.adjoint();
    out.b1 = f.b.adjoint();
    out.beta_targets = f.beta_targets;
    if (out.s1.rows() > 0) {
        // S1 S1^* = V1^* V1; interior columns only, as the windowed isometry
        // loses its last column to the truncation edge.
        const std::int64_t band =
            (star.dimension() && *star.dimension() <= n) ? 0 : star.bandwidth();
        auto keep = detail::interior_basis_cols(f.h1_basis, n, band);
        if (keep.empty())
            for (std::size_t c = 0; c < f.h1_basis.cols(); ++c) keep.push_back(c);
        out.s1_co_isometry_defect = defect_norm(
            (out.s1 * out.s1.adjoint() - ComplexMatrix::identity(out.s1.rows()))
                .principal(keep));
    }
    out.s1_a1_product_norm = f.v1_a_product_norm;      // ||S1 A1^*|| = ||V1^* A||
    out.gram_identity_defect = f.gram_identity_defect; // A1 A1^* + B1 B1^* = A^*A + B^*B
    out.b1_bound_defect = f.bb_bound_defect;           // B1^* B1 = B B^*
    out.reassembly_defect = f.reassembly_defect;
    out.alpha = f.alpha;
    out.dim = n;
    return out;
}

// ========================================================= inverse theorem

/// Inverse data for an invertible T whose modulus has the canonical form
/// alpha I - K1 + K2: the compact correction K3 and T^{-1} = |T|^{-1} W^*.
struct InverseResult {
    ComplexMatrix t_inverse;
    ComplexMatrix k3;
    double modulus_inverse_defect = 0.0;  // |T|^{-1} vs alpha^{-1} I + K3, relative
    double inverse_defect = 0.0;          // || T T^{-1} - I ||
    std::vector<double> k3_singular_values;  // decay evidence for compactness
};

inline InverseResult invert_closure_an(const ComplexMatrix& t,
                                       const PositiveCanonicalForm& modulus_form,
                                       const ToleranceConfig& tol = {}) {
    const double tnorm = operator_norm(t);
    if (min_modulus(t) <= tol.rank_tol * std::max(tnorm, 1e-300))
        throw NotInvertible("invert_closure_an: min modulus at or below rank threshold");
    if (modulus_form.alpha <= 0.0)
        throw AlphaZero("invert_closure_an: essential point must be positive");

    const double inv_alpha = 1.0 / modulus_form.alpha;
    const ComplexMatrix r = modulus_form.reassemble();
    EigDecomposition er = hermitian_eig(r, tol);
    std::vector<double> inv_vals(er.values.size());
    for (std::size_t i = 0; i < er.values.size(); ++i) {
        if (er.values[i] <= 0.0)
            throw NotInvertible("invert_closure_an: canonical form is not positive definite");
        inv_vals[i] = 1.0 / er.values[i];
    }
    const ComplexMatrix r_inv = eig_reassemble(er, inv_vals);

    InverseResult out;
    ComplexMatrix diff = modulus_form.k1 - modulus_form.k2;
    diff *= cplx(inv_alpha, 0.0);
    out.k3 = diff * r_inv;

    // Independent modulus via the polar decomposition of T itself.
    PolarForm p = polar_decompose(t, tol);
    EigDecomposition em = hermitian_eig(p.modulus, tol);
    std::vector<double> minv(em.values.size());
    for (std::size_t i = 0; i < em.values.size(); ++i) {
        if (em.values[i] <= 0.0)
            throw NotInvertible("invert_closure_an: |T| is singular");
        minv[i] = 1.0 / em.values[i];
    }
    const ComplexMatrix mod_inv = eig_reassemble(em, minv);

    ComplexMatrix claim = ComplexMatrix::identity(t.rows());
    claim *= inv_alpha;
    claim += out.k3;
    const double scale = std::max(operator_norm(mod_inv), 1e-300);
    out.modulus_inverse_defect = defect_norm(mod_inv - claim) / scale;

    out.t_inverse = mod_inv * p.w.adjoint();
    out.inverse_defect = defect_norm(t * out.t_inverse - ComplexMatrix::identity(t.rows()));
    out.k3_singular_values = singular_values(out.k3);
    return out;
}

} // namespace opspectra
