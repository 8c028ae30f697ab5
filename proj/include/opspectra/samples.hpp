#pragma once

#include <cmath>

#include "opspectra/structured_operator.hpp"

namespace opspectra {

/// Weighted two-phase shift on l2(N), hyponormal but not quasinormal.
///
/// In the odd/even block reading H = H_odd (+) H_even it is
///   [ V1  A ]
///   [ 0   B ],
/// V1 the unilateral shift on the odd chain, A the rank-one map sending the
/// first even coordinate to the first odd one with weight sqrt(1/2), and B
/// the weighted shift on the even chain with weights 0, sqrt(1 - 1/(2k)).
/// Its Gram matrix T^*T is diagonal with entries 1 at odd and 1 - 1/(2k) at
/// even positions, so |T| has the single essential point 1 approached from
/// below by simple eigenvalues sqrt(1 - 1/(2k)).
inline StructuredOperator example_hyponormal_operator() {
    using SO = StructuredOperator;
    SO v1 = SO::weighted_shift(SequenceRule::constant(1.0));
    ComplexMatrix a(1, 1);
    a(0, 0) = std::sqrt(0.5);
    SO b = SO::weighted_shift(SequenceRule::prefix(
        {0.0}, SequenceRule::sqrt(SequenceRule::rational(-1.0, 2.0, 0.0, 2.0))));
    SO t = SO::block2x2(v1, SO::finite_matrix(std::move(a)), SO::zero(), b);

    SpectralProfile p;
    p.essential_points = {1.0};
    p.lower_tail = PointTail{
        SequenceRule::sqrt(SequenceRule::rational(-1.0, 2.0, 0.0, 2.0)), 1};
    p.alpha_in_point_spectrum = true;
    p.alpha_eigenspace_dim = ExtDim::infinite();
    p.kernel_dim = ExtDim::finite(0);
    p.cokernel_dim = ExtDim::finite(2);
    p.min_modulus = std::sqrt(0.5);
    return t.with_profile(p).with_classes({"hyponormal", "am", "closure_an"});
}

/// The compact diagonal K with K e_{2k} = e_{2k} / (2k) and K e_{2k-1} = 0.
inline StructuredOperator example_compact_diagonal() {
    SequenceRule rule = SequenceRule::interleave(
        {SequenceRule::constant(0.0), SequenceRule::rational(1.0, 0.0, 0.0, 2.0)});
    return StructuredOperator::diagonal_with_limit(rule, 0.0);
}

/// Unilateral shift S e_k = e_{k+1} with its standard declared data:
/// |S| = I, sigma(S) the closed unit disk, sigma_ess(S) the unit circle,
/// and Weyl spectrum the full disk (index -1 inside).
inline StructuredOperator unilateral_shift() {
    StructuredOperator s = StructuredOperator::weighted_shift(SequenceRule::constant(1.0));
    SpectralProfile p;
    p.essential_points = {1.0};
    p.alpha_in_point_spectrum = true;
    p.alpha_eigenspace_dim = ExtDim::infinite();
    p.kernel_dim = ExtDim::finite(0);
    p.cokernel_dim = ExtDim::finite(1);
    p.min_modulus = 1.0;
    DeclaredSpectrum d;
    d.sigma.regions = {SpectrumRegion::disk(1.0)};
    d.sigma_ess.regions = {SpectrumRegion::circle(1.0)};
    d.weyl.regions = {SpectrumRegion::disk(1.0)};
    return s.with_profile(p).with_spectrum(d).with_classes(
        {"quasinormal", "hyponormal", "an", "am", "closure_an"});
}

inline StructuredOperator identity_operator() {
    StructuredOperator id = StructuredOperator::scaled_identity(1.0);
    SpectralProfile p;
    p.essential_points = {1.0};
    p.alpha_in_point_spectrum = true;
    p.alpha_eigenspace_dim = ExtDim::infinite();
    p.kernel_dim = ExtDim::finite(0);
    p.cokernel_dim = ExtDim::finite(0);
    p.min_modulus = 1.0;
    DeclaredSpectrum d;
    d.sigma.discrete_points = {{cplx(1.0, 0.0), 1}};
    d.sigma_ess.discrete_points = {{cplx(1.0, 0.0), 1}};
    d.weyl.discrete_points = {{cplx(1.0, 0.0), 1}};
    return id.with_profile(p).with_spectrum(d).with_classes(
        {"normal", "selfadjoint", "positive", "quasinormal", "hyponormal", "an", "am",
         "closure_an"});
}

} // namespace opspectra
