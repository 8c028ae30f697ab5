#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "opspectra/classification.hpp"
#include "opspectra/complex_matrix.hpp"
#include "opspectra/errors.hpp"
#include "opspectra/kernels.hpp"
#include "opspectra/spectrum_description.hpp"
#include "opspectra/structured_operator.hpp"
#include "opspectra/svd.hpp"
#include "opspectra/tolerance.hpp"

namespace opspectra {

enum class NormalityCriterion {
    Invertible,
    EqualKernels,
    WeylEqualsEssential,
    CompactHyponormal,
};

inline const char* criterion_name(NormalityCriterion c) {
    switch (c) {
        case NormalityCriterion::Invertible: return "invertible";
        case NormalityCriterion::EqualKernels: return "equal_kernels";
        case NormalityCriterion::WeylEqualsEssential: return "weyl_equals_essential";
        case NormalityCriterion::CompactHyponormal: return "compact_hyponormal";
    }
    return "?";
}

/// One normality implication, verified on a truncation family. Premises are
/// established symbolically from declared data (plus numeric corroboration);
/// the conclusion is the measured interior commutator defect. A failed
/// premise never yields a normality claim.
struct NormalityVerdict {
    NormalityCriterion criterion = NormalityCriterion::Invertible;
    bool premise_holds = false;
    double commutator_defect = 0.0;  // at the largest dim
    bool conclusion_normal = false;
    std::vector<std::int64_t> dims;
    std::vector<double> defects;  // interior defect per dim
    std::string premise_note;     // reason when the premise fails
};

/// Area(spec)/pi, computed from region primitives without a pi round-trip.
inline double putnam_bound(const SpectrumDescription& spec) { return spec.area_over_pi(); }

namespace detail {

struct PremiseBase {
    bool ok = true;
    std::string note;
    void fail(const std::string& why) {
        if (ok) note = why;
        ok = false;
    }
};

inline void measure_defects(const StructuredOperator& op,
                            const std::vector<std::int64_t>& dims, const ToleranceConfig& tol,
                            NormalityVerdict& v) {
    v.dims = dims;
    for (std::int64_t n : dims) v.defects.push_back(interior_commutator_defect(op, n, tol));
    v.commutator_defect = v.defects.empty() ? 0.0 : v.defects.back();
}

inline PremiseBase hyponormal_closure_premise(const StructuredOperator& op, std::int64_t n,
                                              const ToleranceConfig& tol) {
    PremiseBase p;
    if (!op.profile()) {
        p.fail("no declared profile");
        return p;
    }
    if (!closure_an_membership(*op.profile())) p.fail("essential spectrum not a singleton");
    if (op.declares_class("hyponormal")) return p;
    try {
        if (!is_hyponormal_interior(op, n, tol).holds) p.fail("interior hyponormality fails");
    } catch (const InteriorEmpty&) {
        p.fail("truncation too small for the interior hyponormality test");
    }
    return p;
}

} // namespace detail

/// Invertible + hyponormal + closure membership => normal. Invertibility is
/// declared (kernel and cokernel trivial, positive minimum modulus) and
/// corroborated by the interior minimum modulus of the largest truncation.
inline NormalityVerdict check_invertible_normal(const StructuredOperator& op,
                                                const std::vector<std::int64_t>& dims,
                                                const ToleranceConfig& tol = {}) {
    if (dims.empty()) throw Error("check_invertible_normal: dims must be nonempty");
    NormalityVerdict v;
    v.criterion = NormalityCriterion::Invertible;
    const std::int64_t top = dims.back();

    detail::PremiseBase p = detail::hyponormal_closure_premise(op, top, tol);
    if (op.profile()) {
        const SpectralProfile& prof = *op.profile();
        if (!prof.kernel_dim.is_zero()) p.fail("kernel is not trivial");
        if (!prof.cokernel_dim.is_zero()) p.fail("cokernel is not trivial");
        if (prof.min_modulus <= 0.0) p.fail("declared minimum modulus is zero");
        if (p.ok) {
            const double measured = interior_min_modulus(op, top, tol);
            const double scale = std::max(operator_norm(op.render(top)), 1e-300);
            if (measured <= tol.rank_tol * scale)
                p.fail("measured interior minimum modulus collapsed");
        }
    }
    v.premise_holds = p.ok;
    v.premise_note = p.note;
    detail::measure_defects(op, dims, tol, v);
    if (v.premise_holds) {
        const double norm = operator_norm(op.render(top));
        v.conclusion_normal = v.commutator_defect <= tol.eq_tol * std::max(norm * norm, 1e-300);
    }
    return v;
}

/// N(T) = N(T^*) + hyponormal + closure membership => normal. The kernel is
/// split off (it reduces T) and the complement block is tested.
inline NormalityVerdict check_equal_kernels_normal(const StructuredOperator& op,
                                                   const std::vector<std::int64_t>& dims,
                                                   const ToleranceConfig& tol = {}) {
    if (dims.empty()) throw Error("check_equal_kernels_normal: dims must be nonempty");
    NormalityVerdict v;
    v.criterion = NormalityCriterion::EqualKernels;
    const std::int64_t top = dims.back();

    detail::PremiseBase p = detail::hyponormal_closure_premise(op, top, tol);
    if (op.profile()) {
        const SpectralProfile& prof = *op.profile();
        if (!(prof.kernel_dim == prof.cokernel_dim)) p.fail("declared kernels differ");
    }
    ComplexMatrix m = op.render(top);
    ComplexMatrix ker_t = null_space_basis(m, tol);
    ComplexMatrix ker_tstar = null_space_basis(m.adjoint(), tol);
    if (p.ok && ker_t.cols() != ker_tstar.cols()) p.fail("numerical kernels have different dims");
    if (p.ok && ker_t.cols() > 0) {
        // principal angles: equal subspaces iff the projections coincide
        ComplexMatrix proj_diff =
            ker_t * ker_t.adjoint() - ker_tstar * ker_tstar.adjoint();
        if (defect_norm(proj_diff) > 1e3 * tol.eq_tol) p.fail("kernel subspaces differ");
    }
    v.premise_holds = p.ok;
    v.premise_note = p.note;

    v.dims = dims;
    for (std::int64_t n : dims) {
        ComplexMatrix mn = op.render(n);
        // split off the kernel: measure the defect of the complement block
        SvdResult s = svd(mn);
        const double cut = tol.rank_tol * (s.sigma.empty() ? 0.0 : s.sigma.front());
        std::vector<std::size_t> keep;
        for (std::size_t k = 0; k < s.sigma.size(); ++k)
            if (s.sigma[k] > cut) keep.push_back(k);
        ComplexMatrix q = s.v.select_columns(keep);
        ComplexMatrix block = q.adjoint() * mn * q;
        v.defects.push_back(full_commutator_defect(block, tol));
    }
    v.commutator_defect = v.defects.empty() ? 0.0 : v.defects.back();
    if (v.premise_holds) {
        const double norm = operator_norm(m);
        v.conclusion_normal = v.commutator_defect <= tol.eq_tol * std::max(norm * norm, 1e-300);
    }
    return v;
}

namespace detail {

inline bool regions_match(const std::vector<SpectrumRegion>& a,
                          const std::vector<SpectrumRegion>& b, double tol_abs) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].kind != b[i].kind) return false;
        if (std::abs(a[i].r1 - b[i].r1) > tol_abs) return false;
        if (std::abs(a[i].r2 - b[i].r2) > tol_abs) return false;
    }
    return true;
}

inline bool points_match(const std::vector<SpectrumPoint>& a, const std::vector<SpectrumPoint>& b,
                         double tol_abs) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i].value - b[i].value) > tol_abs) return false;
    return true;
}

} // namespace detail

/// sigma_ess(T) = omega(T) + hyponormal + closure membership => normal, via
/// the Putnam bound: the shared set lies on a circle plus countably many
/// points, so the spectral area vanishes and with it the commutator.
/// Symbolic-premise only: the spectra must be declared.
inline NormalityVerdict check_weyl_condition_normal(const StructuredOperator& op,
                                                    const std::vector<std::int64_t>& dims,
                                                    const ToleranceConfig& tol = {}) {
    if (dims.empty()) throw Error("check_weyl_condition_normal: dims must be nonempty");
    if (!op.spectrum())
        throw SpectrumUndeclared("check_weyl_condition_normal: sigma_ess and omega must be "
                                 "declared; they are never inferred from truncations");
    NormalityVerdict v;
    v.criterion = NormalityCriterion::WeylEqualsEssential;
    const std::int64_t top = dims.back();

    detail::PremiseBase p = detail::hyponormal_closure_premise(op, top, tol);
    const DeclaredSpectrum& d = *op.spectrum();
    if (!detail::regions_match(d.sigma_ess.regions, d.weyl.regions, tol.cluster_gap) ||
        !detail::points_match(d.sigma_ess.discrete_points, d.weyl.discrete_points,
                              tol.cluster_gap))
        p.fail("declared Weyl spectrum differs from the declared essential spectrum");
    v.premise_holds = p.ok;
    v.premise_note = p.note;
    detail::measure_defects(op, dims, tol, v);
    if (v.premise_holds) {
        // area(omega union pi00) = area(omega): pi00 is countable, hence null
        const double bound = putnam_bound(d.weyl);
        const double norm = operator_norm(op.render(top));
        const double slack = tol.eq_tol * std::max(norm * norm, 1e-300);
        v.conclusion_normal = v.commutator_defect <= bound + slack && bound <= slack;
    }
    return v;
}

/// Per-dim full and interior commutator defects, plot-ready.
struct DecayStudy {
    struct Row {
        std::int64_t n = 0;
        double full_defect = 0.0;
        double interior_defect = 0.0;
    };
    std::vector<Row> rows;
    bool interior_nonincreasing = true;
};

inline DecayStudy commutator_decay_study(const StructuredOperator& op,
                                         const std::vector<std::int64_t>& dims,
                                         const ToleranceConfig& tol = {}) {
    DecayStudy s;
    for (std::int64_t n : dims) {
        DecayStudy::Row r;
        r.n = n;
        r.full_defect = full_commutator_defect(op.render(n), tol);
        r.interior_defect = interior_commutator_defect(op, n, tol);
        s.rows.push_back(r);
    }
    for (std::size_t i = 1; i < s.rows.size(); ++i)
        if (s.rows[i].interior_defect > s.rows[i - 1].interior_defect * (1.0 + 1e-9) + 1e-14)
            s.interior_nonincreasing = false;
    return s;
}

} // namespace opspectra
