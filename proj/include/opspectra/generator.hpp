#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "opspectra/classification.hpp"
#include "opspectra/errors.hpp"
#include "opspectra/rng.hpp"
#include "opspectra/samples.hpp"
#include "opspectra/spectral_profile.hpp"
#include "opspectra/structured_operator.hpp"

namespace opspectra {

/// Recipe for one randomized operator of a named class. Every generated
/// operator carries the profile and class declarations matching its own
/// construction, so the class predicate certifies it symbolically before it
/// leaves the generator.
struct GeneratorRecipe {
    std::string klass = "normal";  // positive-closureAN | quasinormal-AN | quasinormal-AM |
                                   // quasinormal-closure | hyponormal-closure | normal |
                                   // finite-random
    std::int64_t dim = 32;         // target size of the finite stand-in
    std::int64_t upper_count = 2;  // discrete points above the essential value
    std::int64_t lower_count = 2;  // discrete points below it
    double alpha_min = 0.5;
    double alpha_max = 2.0;
    double spread = 0.5;           // relative distance range of discrete scalars
    bool force_kernel = false;     // include a zero eigenvalue below alpha
    bool lower_infinite = false;   // request a countable lower family
    bool essential_isometry = false;  // proper isometry on the essential block
    bool alpha_eigenvalue = true;     // alpha in the point spectrum of |T|
    bool finite_alpha_eigenspace = false;  // declare dim N(|T| - alpha I) finite
    std::uint64_t seed = 1;
};

namespace detail {

struct ScalarLadder {
    double alpha = 1.0;
    std::vector<PointGroup> upper;  // descending
    std::vector<PointGroup> lower;  // ascending
};

inline ScalarLadder draw_ladder(const GeneratorRecipe& r, SplitRng& rng) {
    ScalarLadder l;
    l.alpha = rng.uniform(r.alpha_min, r.alpha_max);
    const double up_span = l.alpha * r.spread;
    for (std::int64_t i = 0; i < r.upper_count; ++i) {
        const double frac =
            (static_cast<double>(r.upper_count - i) - 0.2 - 0.5 * rng.uniform()) /
            static_cast<double>(r.upper_count);
        l.upper.push_back({l.alpha + up_span * std::max(frac, 0.05),
                           rng.uniform_int(1, 3)});
    }
    const double lo_floor = l.alpha * 0.25;
    for (std::int64_t j = 0; j < r.lower_count; ++j) {
        const double frac =
            (static_cast<double>(j + 1) - 0.2 - 0.5 * rng.uniform()) /
            (static_cast<double>(r.lower_count) + 1.0);
        l.lower.push_back({lo_floor + (l.alpha - lo_floor) * std::min(std::max(frac, 0.05), 0.92),
                           rng.uniform_int(1, 3)});
    }
    if (r.force_kernel)
        l.lower.insert(l.lower.begin(), {0.0, rng.uniform_int(1, 2)});
    std::sort(l.upper.begin(), l.upper.end(),
              [](const PointGroup& a, const PointGroup& b) { return a.value > b.value; });
    std::sort(l.lower.begin(), l.lower.end(),
              [](const PointGroup& a, const PointGroup& b) { return a.value < b.value; });
    return l;
}

inline SpectralProfile ladder_profile(const ScalarLadder& l, std::int64_t alpha_mult) {
    SpectralProfile p;
    p.essential_points = {l.alpha};
    p.upper_points = l.upper;
    p.lower_points = l.lower;
    p.alpha_in_point_spectrum = alpha_mult > 0;
    p.alpha_eigenspace_dim = alpha_mult > 0 ? ExtDim::infinite() : ExtDim::finite(0);
    std::int64_t kernel = 0;
    for (const auto& g : l.lower)
        if (g.value == 0.0) kernel = g.multiplicity;
    p.kernel_dim = ExtDim::finite(kernel);
    p.cokernel_dim = ExtDim::finite(kernel);
    p.min_modulus = p.smallest_declared_value();
    return p;
}

/// Real diagonal carrying the ladder, the alpha cluster sized to fill `dim`.
inline std::vector<double> ladder_diagonal(const ScalarLadder& l, std::int64_t dim,
                                           std::int64_t& alpha_mult) {
    std::vector<double> d;
    for (const auto& g : l.upper)
        for (std::int64_t m = 0; m < g.multiplicity; ++m) d.push_back(g.value);
    for (const auto& g : l.lower)
        for (std::int64_t m = 0; m < g.multiplicity; ++m) d.push_back(g.value);
    alpha_mult = std::max<std::int64_t>(dim - static_cast<std::int64_t>(d.size()), 2);
    for (std::int64_t m = 0; m < alpha_mult; ++m) d.push_back(l.alpha);
    return d;
}

inline DeclaredSpectrum circle_spectrum(const ScalarLadder& l) {
    DeclaredSpectrum ds;
    ds.sigma.regions = {SpectrumRegion::circle(l.alpha)};
    ds.sigma_ess.regions = {SpectrumRegion::circle(l.alpha)};
    ds.weyl.regions = {SpectrumRegion::circle(l.alpha)};
    for (const auto& g : l.upper) {
        ds.sigma.discrete_points.push_back({cplx(g.value, 0.0), g.multiplicity});
        ds.pi00.push_back({cplx(g.value, 0.0), g.multiplicity});
    }
    for (const auto& g : l.lower) {
        ds.sigma.discrete_points.push_back({cplx(g.value, 0.0), g.multiplicity});
        ds.pi00.push_back({cplx(g.value, 0.0), g.multiplicity});
    }
    return ds;
}

} // namespace detail

/// Build one operator from a recipe. The declared profile matches the
/// construction exactly and the class predicate is checked symbolically
/// before the operator is returned.
inline StructuredOperator generate(const GeneratorRecipe& r) {
    SplitRng rng(r.seed ^ 0x5eed5eed5eed5eedull);
    using SO = StructuredOperator;

    StructuredOperator op = SO::zero();
    std::set<std::string> classes;
    SpectralProfile profile;

    if (r.klass == "positive-closureAN") {
        detail::ScalarLadder l = detail::draw_ladder(r, rng);
        std::int64_t alpha_mult = 0;
        std::vector<double> d = detail::ladder_diagonal(l, r.dim, alpha_mult);
        ComplexMatrix q = rng.unitary(d.size());
        ComplexMatrix t = q * ComplexMatrix::diagonal(d) * q.adjoint();
        t.symmetrize();
        op = SO::finite_matrix(std::move(t));
        profile = detail::ladder_profile(l, alpha_mult);
        classes = {"positive", "selfadjoint", "normal", "quasinormal", "hyponormal",
                   "closure_an", "an", "am"};
        op = op.with_spectrum(detail::circle_spectrum(l));
    } else if (r.klass == "normal") {
        detail::ScalarLadder l = detail::draw_ladder(r, rng);
        std::int64_t alpha_mult = 0;
        std::vector<double> moduli = detail::ladder_diagonal(l, r.dim, alpha_mult);
        std::vector<cplx> d(moduli.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double theta = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
            d[i] = moduli[i] * cplx(std::cos(theta), std::sin(theta));
        }
        ComplexMatrix q = rng.unitary(d.size());
        ComplexMatrix t = q * ComplexMatrix::diagonal(d) * q.adjoint();
        op = SO::finite_matrix(std::move(t));
        profile = detail::ladder_profile(l, alpha_mult);
        classes = {"normal", "quasinormal", "hyponormal", "closure_an", "an", "am"};
        op = op.with_spectrum(detail::circle_spectrum(l));
    } else if (r.klass == "quasinormal-closure") {
        // countable families on both sides of the essential point
        SplitRng local = rng.split(3);
        const double alpha = local.uniform(r.alpha_min, r.alpha_max);
        const double c_up = alpha * 0.4, c_lo = alpha * 0.35;
        SequenceRule up_tail = SequenceRule::affine(c_up, alpha, SequenceRule::harmonic());
        SequenceRule lo_tail = SequenceRule::affine(-c_lo, alpha, SequenceRule::harmonic());
        std::vector<StructuredOperator> parts;
        parts.push_back(SO::diagonal_with_limit(up_tail, alpha));
        const std::int64_t alpha_mult = std::max<std::int64_t>(r.dim / 3, 2);
        if (r.essential_isometry) {
            parts.push_back(SO::scale(alpha, SO::weighted_shift(SequenceRule::constant(1.0))));
        } else {
            ComplexMatrix v = local.unitary(static_cast<std::size_t>(alpha_mult));
            parts.push_back(SO::scale(alpha, SO::finite_matrix(std::move(v))));
        }
        parts.push_back(SO::diagonal_with_limit(lo_tail, alpha));
        op = SO::direct_sum(std::move(parts));
        profile.essential_points = {alpha};
        profile.upper_tail = PointTail{up_tail, 1};
        profile.lower_tail = PointTail{lo_tail, 1};
        profile.alpha_in_point_spectrum = true;
        profile.alpha_eigenspace_dim = ExtDim::infinite();
        profile.min_modulus = alpha - c_lo;
        classes = {"quasinormal", "hyponormal", "closure_an"};
    } else if (r.klass == "quasinormal-AN" || r.klass == "quasinormal-AM") {
        const bool want_an = r.klass == "quasinormal-AN";
        if (want_an && r.lower_infinite)
            throw RecipeInfeasible("quasinormal-AN: a countable lower family contradicts "
                                   "absolute norm attainment");
        detail::ScalarLadder l = detail::draw_ladder(r, rng);
        std::vector<StructuredOperator> parts;
        for (const auto& g : l.upper) {
            ComplexMatrix u = rng.unitary(static_cast<std::size_t>(g.multiplicity));
            parts.push_back(SO::scale(g.value, SO::finite_matrix(std::move(u))));
        }
        std::int64_t alpha_mult = r.alpha_eigenvalue ? std::max<std::int64_t>(r.dim / 2, 2) : 0;
        if (alpha_mult > 0) {
            if (r.essential_isometry) {
                parts.push_back(
                    SO::scale(l.alpha, SO::weighted_shift(SequenceRule::constant(1.0))));
            } else {
                ComplexMatrix v = rng.unitary(static_cast<std::size_t>(alpha_mult));
                parts.push_back(SO::scale(l.alpha, SO::finite_matrix(std::move(v))));
            }
        }
        profile = detail::ladder_profile(l, alpha_mult);
        if (r.finite_alpha_eigenspace && alpha_mult > 0)
            profile.alpha_eigenspace_dim = ExtDim::finite(alpha_mult);
        const bool infinite_lower = r.lower_infinite && !want_an;
        if (infinite_lower) {
            // ascending tail alpha - c / k below the essential point
            const double c = l.alpha * 0.4;
            SequenceRule tail = SequenceRule::affine(-c, l.alpha, SequenceRule::harmonic());
            parts.push_back(SO::diagonal_with_limit(tail, l.alpha));
            profile.lower_points.clear();
            profile.lower_tail = PointTail{tail, 1};
            profile.kernel_dim = ExtDim::finite(0);
            profile.cokernel_dim = ExtDim::finite(0);
            profile.min_modulus = l.alpha - c;
        } else {
            for (const auto& g : l.lower) {
                if (g.value == 0.0) {
                    parts.push_back(SO::finite_matrix(
                        ComplexMatrix(static_cast<std::size_t>(g.multiplicity),
                                      static_cast<std::size_t>(g.multiplicity))));
                } else {
                    ComplexMatrix v = rng.unitary(static_cast<std::size_t>(g.multiplicity));
                    parts.push_back(SO::scale(g.value, SO::finite_matrix(std::move(v))));
                }
            }
        }
        if (parts.empty())
            throw RecipeInfeasible(r.klass + ": recipe produced no spectral parts");
        op = SO::direct_sum(std::move(parts));
        if (op.dimension()) {
            // finite stand-in: hide the block structure behind a global
            // unitary so decompositions recover it from spectral data alone
            const std::size_t d = static_cast<std::size_t>(*op.dimension());
            ComplexMatrix q = rng.unitary(d);
            op = SO::finite_matrix(q * op.render(*op.dimension()) * q.adjoint());
        }
        classes = {"quasinormal", "hyponormal", "closure_an"};
        if (!profile.lower_tail) classes.insert("an");
        if (profile.upper_finite()) classes.insert("am");
        if (!r.essential_isometry && !infinite_lower) classes.insert("normal");
    } else if (r.klass == "hyponormal-closure") {
        // The two-chain family: V1 = alpha * shift on the odd chain, a rank-one
        // coupling into it, B = weighted shift on the even chain with weights
        // alpha * sqrt(1 - 1/(rho k)), all below and increasing to alpha.
        detail::ScalarLadder l = detail::draw_ladder(r, rng);
        const double rho = rng.uniform(1.8, 3.2);
        SequenceRule ratio = SequenceRule::rational(-1.0, rho, 0.0, rho);  // 1 - 1/(rho k)
        SequenceRule beta_rule =
            SequenceRule::affine(l.alpha, 0.0, SequenceRule::sqrt(ratio));
        SO v1 = SO::weighted_shift(SequenceRule::constant(l.alpha));
        ComplexMatrix a(1, 1);
        a(0, 0) = beta_rule(1);
        SO b = SO::weighted_shift(SequenceRule::prefix(
            {0.0}, SequenceRule::affine(l.alpha, 0.0, SequenceRule::sqrt(ratio))));
        SO chain = SO::block2x2(v1, SO::finite_matrix(std::move(a)), SO::zero(), b);
        std::vector<StructuredOperator> parts;
        for (const auto& g : l.upper) {
            ComplexMatrix u = rng.unitary(static_cast<std::size_t>(g.multiplicity));
            parts.push_back(SO::scale(g.value, SO::finite_matrix(std::move(u))));
        }
        parts.push_back(std::move(chain));
        op = parts.size() == 1 ? parts.front() : SO::direct_sum(std::move(parts));
        profile.essential_points = {l.alpha};
        profile.upper_points = l.upper;
        profile.lower_tail = PointTail{beta_rule, 1};
        profile.alpha_in_point_spectrum = true;
        profile.alpha_eigenspace_dim = ExtDim::infinite();
        profile.kernel_dim = ExtDim::finite(0);
        profile.cokernel_dim = ExtDim::finite(2);
        profile.min_modulus = beta_rule(1);
        classes = {"hyponormal", "am", "closure_an"};
    } else if (r.klass == "finite-random") {
        ComplexMatrix t(static_cast<std::size_t>(r.dim), static_cast<std::size_t>(r.dim));
        for (std::size_t i = 0; i < t.rows(); ++i)
            for (std::size_t j = 0; j < t.cols(); ++j) t(i, j) = rng.complex_gaussian();
        return SO::finite_matrix(std::move(t));  // no profile, no claims
    } else {
        throw RecipeInfeasible("unknown generator class \"" + r.klass + "\"");
    }

    profile.validate();
    op = op.with_profile(profile).with_classes(classes);

    // symbolic self-certification against the recipe's own class
    if (r.klass == "quasinormal-AN" && !an_membership(profile))
        throw RecipeInfeasible("quasinormal-AN: generated profile fails AN membership");
    if (r.klass == "quasinormal-AM" && !am_membership(profile))
        throw RecipeInfeasible("quasinormal-AM: generated profile fails AM membership");
    if ((r.klass == "quasinormal-closure" || r.klass == "hyponormal-closure" ||
         r.klass == "positive-closureAN") &&
        !closure_an_membership(profile))
        throw RecipeInfeasible(r.klass + ": generated profile fails closure membership");
    return op;
}

} // namespace opspectra
