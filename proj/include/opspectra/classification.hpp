#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "opspectra/complex_matrix.hpp"
#include "opspectra/eig.hpp"
#include "opspectra/errors.hpp"
#include "opspectra/kernels.hpp"
#include "opspectra/spectral_profile.hpp"
#include "opspectra/spectrum_description.hpp"
#include "opspectra/structured_operator.hpp"
#include "opspectra/svd.hpp"
#include "opspectra/tolerance.hpp"

namespace opspectra {

/// Outcome of one class predicate. `mode` states how the answer was
/// obtained; symbolic answers come from declared structure, numeric ones
/// from a rendered truncation and are only as good as the truncation.
struct PredicateResult {
    bool holds = false;
    double defect = 0.0;
    std::string mode = "full";  // full | interior | symbolic | sampled
    std::int64_t dim = 0;       // truncation dimension (0 for symbolic)
};

/// Operator norm of a Hermitian matrix via its extreme eigenvalues.
inline double hermitian_operator_norm(const ComplexMatrix& a, const ToleranceConfig& tol = {}) {
    if (a.rows() == 0) return 0.0;
    EigDecomposition e = hermitian_eig(a, tol);
    return std::max(std::abs(e.values.front()), std::abs(e.values.back()));
}

// ---- matrix-level predicates ----

inline PredicateResult is_normal(const ComplexMatrix& t, const ToleranceConfig& tol = {}) {
    ComplexMatrix d = t.adjoint() * t - t * t.adjoint();
    d.symmetrize();
    PredicateResult r;
    r.defect = hermitian_operator_norm(d, tol);
    const double norm = operator_norm(t);
    r.holds = r.defect <= tol.eq_tol * std::max(norm * norm, 1e-300);
    r.dim = static_cast<std::int64_t>(t.rows());
    return r;
}

inline PredicateResult is_selfadjoint(const ComplexMatrix& t, const ToleranceConfig& tol = {}) {
    PredicateResult r;
    r.defect = operator_norm(t - t.adjoint());
    r.holds = r.defect <= tol.eq_tol * std::max(operator_norm(t), 1e-300);
    r.dim = static_cast<std::int64_t>(t.rows());
    return r;
}

inline PredicateResult is_positive(const ComplexMatrix& t, const ToleranceConfig& tol = {}) {
    PredicateResult r;
    r.dim = static_cast<std::int64_t>(t.rows());
    if (t.hermitian_defect() > 1e-12 * std::max(t.max_abs(), 1e-300)) {
        r.holds = false;
        r.defect = t.hermitian_defect();
        return r;
    }
    PsdCheck c = psd_check(t, tol);
    r.holds = c.psd;
    r.defect = -c.min_eigenvalue;
    return r;
}

/// Quasinormality defect || T (T^*T) - (T^*T) T || against tol * ||T||^3.
inline PredicateResult is_quasinormal(const ComplexMatrix& t, const ToleranceConfig& tol = {}) {
    ComplexMatrix g = t.adjoint() * t;
    PredicateResult r;
    r.defect = operator_norm(t * g - g * t);
    const double norm = operator_norm(t);
    r.holds = r.defect <= tol.eq_tol * std::max(norm * norm * norm, 1e-300);
    r.dim = static_cast<std::int64_t>(t.rows());
    return r;
}

inline PredicateResult is_hyponormal_full(const ComplexMatrix& t, const ToleranceConfig& tol = {}) {
    ComplexMatrix d = t.adjoint() * t - t * t.adjoint();
    d.symmetrize();
    PsdCheck c = psd_check(d, tol);
    PredicateResult r;
    r.holds = c.psd;
    r.defect = c.min_eigenvalue;
    r.dim = static_cast<std::int64_t>(t.rows());
    return r;
}

// ---- interior variants for rendered truncations ----

/// Interior compression margin. Finite-support operators that fit in the
/// truncation are rendered exactly, so they get margin zero; genuinely
/// infinite ones lose interior_margin_factor * bandwidth coordinates to the
/// boundary of T^*T and TT^*.
inline std::int64_t interior_margin(const StructuredOperator& op, std::int64_t n,
                                    const ToleranceConfig& tol = {}) {
    if (op.dimension() && *op.dimension() <= n) return 0;
    return tol.interior_margin_factor * op.bandwidth();
}

inline PredicateResult is_hyponormal_interior(const StructuredOperator& op, std::int64_t n,
                                              const ToleranceConfig& tol = {}) {
    const std::int64_t margin = interior_margin(op, n, tol);
    if (n - margin < 1)
        throw InteriorEmpty("is_hyponormal_interior: n <= interior margin " +
                            std::to_string(margin));
    ComplexMatrix t = op.render(n);
    ComplexMatrix d = t.adjoint() * t - t * t.adjoint();
    d.symmetrize();
    ComplexMatrix inner = d.top_left(static_cast<std::size_t>(n - margin));
    PsdCheck c = psd_check(inner, tol);
    PredicateResult r;
    r.holds = c.psd;
    r.defect = c.min_eigenvalue;
    r.mode = "interior";
    r.dim = n;
    return r;
}

/// || P (T^*T - TT^*) P || on the interior compression.
inline double interior_commutator_defect(const StructuredOperator& op, std::int64_t n,
                                         const ToleranceConfig& tol = {}) {
    const std::int64_t margin = interior_margin(op, n, tol);
    if (n - margin < 1) throw InteriorEmpty("interior_commutator_defect: interior empty");
    ComplexMatrix t = op.render(n);
    ComplexMatrix d = t.adjoint() * t - t * t.adjoint();
    d.symmetrize();
    return hermitian_operator_norm(d.top_left(static_cast<std::size_t>(n - margin)), tol);
}

inline double full_commutator_defect(const ComplexMatrix& t, const ToleranceConfig& tol = {}) {
    ComplexMatrix d = t.adjoint() * t - t * t.adjoint();
    d.symmetrize();
    return hermitian_operator_norm(d, tol);
}

/// Smallest singular value of T restricted to interior coordinates (all rows,
/// first n - margin columns); boundary columns of a band operator lose their
/// mass to the truncation and would report a spurious zero.
inline double interior_min_modulus(const StructuredOperator& op, std::int64_t n,
                                   const ToleranceConfig& tol = {}) {
    const std::int64_t margin = interior_margin(op, n, tol);
    if (n - margin < 1) throw InteriorEmpty("interior_min_modulus: interior empty");
    ComplexMatrix t = op.render(n);
    ComplexMatrix rect = t.submatrix(0, 0, static_cast<std::size_t>(n),
                                     static_cast<std::size_t>(n - margin));
    auto sv = singular_values(rect);
    return sv.empty() ? 0.0 : sv.back();
}

// ---- sampled paranormality (refutation only) ----

struct SampledResult {
    bool holds = false;
    double worst_ratio = 0.0;
    std::string mode = "sampled";
};

namespace detail {

inline SampledResult paranormal_sampled_impl(const ComplexMatrix& t, int samples,
                                             std::uint64_t seed, bool star,
                                             const ToleranceConfig& tol) {
    const std::size_t n = t.rows();
    const ComplexMatrix t2 = t * t;
    const ComplexMatrix lhs_op = star ? t.adjoint() : t;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);

    double worst = 0.0;
    auto probe = [&](const std::vector<cplx>& x) {
        const double nx = vec_norm(x);
        if (nx == 0.0) return;
        const double lhs = vec_norm(matvec(lhs_op, x));
        const double rhs = vec_norm(matvec(t2, x)) * nx;
        const double lhs2 = lhs * lhs;
        double ratio;
        if (rhs > 0.0) ratio = lhs2 / rhs;
        else ratio = (lhs2 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        worst = std::max(worst, ratio);
    };

    for (std::size_t k = 0; k < n; ++k) {
        std::vector<cplx> e(n, cplx(0.0, 0.0));
        e[k] = 1.0;
        probe(e);
    }
    for (int s = 0; s < samples; ++s) {
        std::vector<cplx> x(n);
        for (auto& v : x) v = cplx(g(rng), g(rng));
        const double nx = vec_norm(x);
        if (nx > 0.0)
            for (auto& v : x) v /= nx;
        probe(x);
    }
    SampledResult r;
    r.worst_ratio = worst;
    r.holds = worst <= 1.0 + tol.eq_tol;
    return r;
}

} // namespace detail

inline SampledResult is_paranormal_sampled(const ComplexMatrix& t, int samples,
                                           std::uint64_t seed, const ToleranceConfig& tol = {}) {
    return detail::paranormal_sampled_impl(t, samples, seed, /*star=*/false, tol);
}

inline SampledResult is_star_paranormal_sampled(const ComplexMatrix& t, int samples,
                                                std::uint64_t seed,
                                                const ToleranceConfig& tol = {}) {
    return detail::paranormal_sampled_impl(t, samples, seed, /*star=*/true, tol);
}

// ---- essential spectrum estimation across a truncation family ----

struct EssentialCluster {
    double center = 0.0;
    std::string kind;                   // growing_multiplicity | accumulation
    std::vector<std::int64_t> counts;   // per dim, in ascending dim order
    double stability = 0.0;             // center drift / extrapolation residual
};

struct EssentialEstimate {
    std::vector<std::int64_t> dims;
    std::vector<EssentialCluster> clusters;
    bool checked_against_profile = false;
};

namespace detail {

inline std::vector<double> spectrum_of_truncation(const StructuredOperator& op, std::int64_t n,
                                                  const ToleranceConfig& tol) {
    ComplexMatrix m = op.render(n);
    if (m.hermitian_defect() <= 1e-12 * std::max(m.max_abs(), 1e-300))
        return hermitian_eig(m, tol).values;
    std::vector<double> sv = singular_values(m);  // spectrum of |T|
    std::sort(sv.begin(), sv.end());
    return sv;
}

inline std::int64_t count_in_window(const std::vector<double>& sorted, double lo, double hi) {
    auto a = std::lower_bound(sorted.begin(), sorted.end(), lo);
    auto b = std::upper_bound(sorted.begin(), sorted.end(), hi);
    return static_cast<std::int64_t>(b - a);
}

} // namespace detail

/// Estimate sigma_ess of a self-adjoint operator (of |T| otherwise) from a
/// family of truncations. Two detectors:
///   - fixed spectral values whose multiplicity grows unboundedly with n,
///   - boundary eigenvalue trajectories converging monotonically, with the
///     limit extrapolated by Aitken's delta-squared from the last three dims;
/// a candidate survives only if the eigenvalue count near it grows strictly
/// across the whole dim ladder.
inline EssentialEstimate estimate_essential_spectrum(const StructuredOperator& op,
                                                     std::vector<std::int64_t> dims,
                                                     const ToleranceConfig& tol = {}) {
    if (dims.size() < 3)
        throw Error("estimate_essential_spectrum: at least three dims required");
    if (!std::is_sorted(dims.begin(), dims.end()))
        throw Error("estimate_essential_spectrum: dims must be ascending");

    std::vector<std::vector<double>> vals;
    vals.reserve(dims.size());
    for (std::int64_t n : dims) vals.push_back(detail::spectrum_of_truncation(op, n, tol));

    EssentialEstimate est;
    est.dims = dims;
    const double gap = tol.cluster_gap;
    const std::vector<double>& top = vals.back();

    auto counts_grow = [&](double lo, double hi, std::vector<std::int64_t>& counts) {
        counts.clear();
        for (const auto& v : vals) counts.push_back(detail::count_in_window(v, lo, hi));
        for (std::size_t d = 1; d < counts.size(); ++d)
            if (counts[d] <= counts[d - 1]) return false;
        return true;
    };

    // growing-multiplicity clusters at the largest dim
    std::size_t i = 0;
    while (i < top.size()) {
        std::size_t j = i;
        while (j + 1 < top.size() && top[j + 1] - top[j] < gap) ++j;
        const double lo = top[i] - gap, hi = top[j] + gap;
        std::vector<std::int64_t> counts;
        if (counts_grow(lo, hi, counts) && counts.back() >= 3) {
            EssentialCluster c;
            double sum = 0.0;
            for (std::size_t k = i; k <= j; ++k) sum += top[k];
            c.center = sum / static_cast<double>(j - i + 1);
            c.kind = "growing_multiplicity";
            c.counts = counts;
            c.stability = top[j] - top[i];
            est.clusters.push_back(std::move(c));
        }
        i = j + 1;
    }

    // boundary-trajectory accumulation points
    const std::size_t d3 = vals.size() - 1, d2 = d3 - 1, d1 = d3 - 2;
    for (int edge = 0; edge < 2; ++edge) {
        auto pick = [&](std::size_t d) { return edge == 0 ? vals[d].front() : vals[d].back(); };
        const double t1 = pick(d1), t2 = pick(d2), t3 = pick(d3);
        const double delta1 = t2 - t1, delta2 = t3 - t2;
        if (delta2 == 0.0 || std::abs(delta2) >= std::abs(delta1)) continue;
        if (delta1 * delta2 < 0.0) continue;  // not monotone
        const double denom = delta2 - delta1;
        if (denom == 0.0) continue;
        const double limit = t3 - delta2 * delta2 / denom;
        const double window = std::max(gap, 4.0 * std::abs(t3 - limit));
        std::vector<std::int64_t> counts;
        if (!counts_grow(limit - window, limit + window, counts)) continue;
        EssentialCluster c;
        c.center = limit;
        c.kind = "accumulation";
        c.counts = counts;
        c.stability = std::abs(t3 - limit);
        est.clusters.push_back(std::move(c));
    }

    // dedupe within the cluster gap, preferring growing-multiplicity evidence
    std::sort(est.clusters.begin(), est.clusters.end(),
              [](const EssentialCluster& a, const EssentialCluster& b) {
                  return a.center < b.center;
              });
    std::vector<EssentialCluster> merged;
    for (auto& c : est.clusters) {
        if (!merged.empty() && std::abs(c.center - merged.back().center) <= gap) {
            if (merged.back().kind == "accumulation" && c.kind == "growing_multiplicity")
                merged.back() = c;
            continue;
        }
        merged.push_back(c);
    }
    est.clusters = std::move(merged);

    // corroborate against the declared profile, never overwrite it
    if (op.profile()) {
        est.checked_against_profile = true;
        for (double declared : op.profile()->essential_points) {
            bool matched = false;
            for (const auto& c : est.clusters)
                if (std::abs(c.center - declared) <= gap) matched = true;
            if (!matched)
                throw Inconsistent("estimate_essential_spectrum: declared essential point " +
                                   std::to_string(declared) +
                                   " not found by the truncation family");
        }
        for (const auto& c : est.clusters) {
            bool matched = false;
            for (double declared : op.profile()->essential_points)
                if (std::abs(c.center - declared) <= gap) matched = true;
            if (!matched)
                throw Inconsistent("estimate_essential_spectrum: estimated point " +
                                   std::to_string(c.center) + " contradicts the declared profile");
        }
    }
    return est;
}

// ---- membership tests on profiles ----

/// sigma_ess(|T|) singleton and only finitely many spectral points below it.
inline bool an_membership(const SpectralProfile& p) {
    return p.has_single_essential_point() && p.lower_finite();
}

/// sigma_ess(|T|) singleton and only finitely many spectral points above it.
inline bool am_membership(const SpectralProfile& p) {
    return p.has_single_essential_point() && p.upper_finite();
}

/// sigma_ess(|T|) singleton.
inline bool closure_an_membership(const SpectralProfile& p) {
    return p.has_single_essential_point();
}

/// Profile of S + i*lambda*I for a self-adjoint S whose modulus has the
/// given profile: every spectral value v of |S| moves to sqrt(v^2 + lambda^2),
/// monotonically, so the shape of the spectral diagram is preserved. A
/// nonzero shift makes the operator injective with dense range.
inline SpectralProfile imaginary_shift_profile(const SpectralProfile& p, double lambda) {
    const double l2 = lambda * lambda;
    auto lift = [&](double v) { return std::sqrt(v * v + l2); };
    auto lift_tail = [&](const PointTail& t) {
        return PointTail{
            SequenceRule::sqrt(SequenceRule::affine(1.0, l2, SequenceRule::square(t.values))),
            t.multiplicity};
    };
    SpectralProfile out = p;
    for (double& e : out.essential_points) e = lift(e);
    for (auto& g : out.upper_points) g.value = lift(g.value);
    for (auto& g : out.lower_points) g.value = lift(g.value);
    if (out.upper_tail) out.upper_tail = lift_tail(*out.upper_tail);
    if (out.lower_tail) out.lower_tail = lift_tail(*out.lower_tail);
    out.min_modulus = lift(out.min_modulus);
    if (lambda != 0.0) {
        out.kernel_dim = ExtDim::finite(0);
        out.cokernel_dim = ExtDim::finite(0);
        // a previously declared zero eigenvalue is now the point |lambda|
    }
    return out;
}

// ---- Fredholm data ----

struct FredholmData {
    ExtDim kernel_dim = ExtDim::finite(0);
    ExtDim cokernel_dim = ExtDim::finite(0);
    std::optional<std::int64_t> index;  // kernel - cokernel when both finite
    bool is_fredholm = false;
    double essential_min = 0.0;  // m_e(T)
};

/// Fredholm facts of a positive operator with essential point alpha, from
/// declared kernel data. alpha = 0 puts 0 in the essential spectrum and
/// obstructs Fredholmness outright.
inline FredholmData fredholm_data(const SpectralProfile& p, double alpha) {
    FredholmData f;
    f.kernel_dim = p.kernel_dim;
    f.cokernel_dim = p.cokernel_dim;
    if (p.kernel_dim.is_finite() && p.cokernel_dim.is_finite())
        f.index = p.kernel_dim.value() - p.cokernel_dim.value();
    f.is_fredholm = alpha > 0.0 && p.kernel_dim.is_finite() && p.cokernel_dim.is_finite();
    f.essential_min = alpha;
    return f;
}

// ---- symbolic Weyl spectrum ----

/// For profiles of self-adjoint (positive) operators every isolated
/// finite-multiplicity eigenvalue has index zero, so the Weyl spectrum
/// collapses to the essential points. An empty essential set is the
/// finite-dimensional convention: all spectrum discrete, index 0, omega
/// empty. Operators with genuinely complex spectra carry a DeclaredSpectrum
/// instead.
inline SpectrumDescription weyl_spectrum_symbolic(const SpectralProfile& p) {
    SpectrumDescription w;
    for (double e : p.essential_points) w.discrete_points.push_back({cplx(e, 0.0), 1});
    return w;
}

// ---- classification battery ----

struct ClassificationReport {
    std::map<std::string, PredicateResult> flags;
    std::optional<SpectralProfile> profile_used;
    std::vector<std::int64_t> dims_tested;
};

/// Run the full predicate battery: declared classes in symbolic mode,
/// numeric predicates on the largest truncation, membership tests on the
/// declared profile when present.
inline ClassificationReport classify(const StructuredOperator& op,
                                     const std::vector<std::int64_t>& dims,
                                     const ToleranceConfig& tol = {}, std::uint64_t seed = 1,
                                     int paranormal_samples = 64) {
    if (dims.empty()) throw Error("classify: dims must be nonempty");
    ClassificationReport rep;
    rep.dims_tested = dims;
    const std::int64_t n = dims.back();
    ComplexMatrix t = op.render(n);

    rep.flags["normal"] = is_normal(t, tol);
    rep.flags["selfadjoint"] = is_selfadjoint(t, tol);
    rep.flags["positive"] = is_positive(t, tol);
    rep.flags["quasinormal"] = is_quasinormal(t, tol);
    rep.flags["hyponormal_full"] = is_hyponormal_full(t, tol);
    try {
        rep.flags["hyponormal_interior"] = is_hyponormal_interior(op, n, tol);
    } catch (const InteriorEmpty&) {
        // too small a truncation for this bandwidth; leave the flag out
    }
    {
        SampledResult s = is_paranormal_sampled(t, paranormal_samples, seed, tol);
        rep.flags["paranormal"] = PredicateResult{s.holds, s.worst_ratio, "sampled", n};
        s = is_star_paranormal_sampled(t, paranormal_samples, seed + 1, tol);
        rep.flags["star_paranormal"] = PredicateResult{s.holds, s.worst_ratio, "sampled", n};
    }

    for (const std::string& c : op.declared_classes())
        rep.flags["declared_" + c] = PredicateResult{true, 0.0, "symbolic", 0};

    if (op.profile()) {
        rep.profile_used = op.profile();
        const SpectralProfile& p = *op.profile();
        rep.flags["an_membership"] = PredicateResult{an_membership(p), 0.0, "symbolic", 0};
        rep.flags["am_membership"] = PredicateResult{am_membership(p), 0.0, "symbolic", 0};
        rep.flags["closure_an_membership"] =
            PredicateResult{closure_an_membership(p), 0.0, "symbolic", 0};
    }
    return rep;
}

} // namespace opspectra
