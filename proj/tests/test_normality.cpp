#include "doctest.h"

#include <cmath>
#include <random>

#include "opspectra/normality.hpp"
#include "opspectra/samples.hpp"
#include "test_helpers.hpp"

using namespace opspectra;
using namespace opspectra::testing;
using SO = StructuredOperator;

namespace {

SO scaled_unitary_sample(std::size_t d, double scale, std::mt19937_64& rng) {
    ComplexMatrix u = random_unitary(d, rng);
    SpectralProfile p;
    p.essential_points = {scale};
    p.alpha_in_point_spectrum = true;
    p.alpha_eigenspace_dim = ExtDim::infinite();
    p.min_modulus = scale;
    DeclaredSpectrum ds;
    ds.sigma.regions = {SpectrumRegion::circle(scale)};
    ds.sigma_ess.regions = {SpectrumRegion::circle(scale)};
    ds.weyl.regions = {SpectrumRegion::circle(scale)};
    return SO::scale(scale, SO::finite_matrix(u))
        .with_profile(p)
        .with_spectrum(ds)
        .with_classes({"hyponormal", "quasinormal", "closure_an"});
}

} // namespace

TEST_CASE("putnam_bound arithmetic is exact") {
    SpectrumDescription points;
    points.discrete_points = {{cplx(1.0, 0.0), 1}, {cplx(0.0, 2.0), 3}};
    CHECK(putnam_bound(points) == 0.0);

    SpectrumDescription circle;
    circle.regions = {SpectrumRegion::circle(1.0)};
    CHECK(putnam_bound(circle) == 0.0);

    SpectrumDescription disk;
    disk.regions = {SpectrumRegion::disk(1.0)};
    CHECK(putnam_bound(disk) == 1.0);

    SpectrumDescription annulus;
    annulus.regions = {SpectrumRegion::annulus(0.5, 1.0)};
    CHECK(putnam_bound(annulus) == 0.75);
}

TEST_CASE("check_invertible_normal") {
    ToleranceConfig tol;
    SUBCASE("2U for a unitary U: defect zero, normal") {
        std::mt19937_64 rng(5);
        SO op = scaled_unitary_sample(6, 2.0, rng);
        auto v = check_invertible_normal(op, {6}, tol);
        CHECK(v.premise_holds);
        CHECK(v.conclusion_normal);
        CHECK(v.commutator_defect <= 1e-10 * 4.0);
    }
    SUBCASE("I + diag(1/k): positive and invertible") {
        SO op = SO::diagonal_with_limit(
            SequenceRule::affine(1.0, 1.0, SequenceRule::harmonic()), 1.0);
        SpectralProfile p;
        p.essential_points = {1.0};
        p.upper_tail = PointTail{SequenceRule::affine(1.0, 1.0, SequenceRule::harmonic()), 1};
        p.min_modulus = 1.0;
        op = op.with_profile(p);
        auto v = check_invertible_normal(op, {16, 32, 64}, tol);
        CHECK(v.premise_holds);
        CHECK(v.conclusion_normal);
        CHECK(v.commutator_defect <= 1e-12);
    }
    SUBCASE("the worked example is not invertible: premise fails, no claim") {
        auto v = check_invertible_normal(example_hyponormal_operator(), {32, 64}, tol);
        CHECK_FALSE(v.premise_holds);
        CHECK_FALSE(v.conclusion_normal);
        CHECK(!v.premise_note.empty());
    }
    SUBCASE("the shift is bounded below but not invertible: premise fails") {
        auto v = check_invertible_normal(unilateral_shift(), {16, 32}, tol);
        CHECK_FALSE(v.premise_holds);
        CHECK_FALSE(v.conclusion_normal);
        // and the commutator genuinely persists
        CHECK(v.commutator_defect == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("check_equal_kernels_normal") {
    ToleranceConfig tol;
    SUBCASE("0 (+) 2U: kernels coincide, complement is normal") {
        std::mt19937_64 rng(9);
        ComplexMatrix u = random_unitary(2, rng);
        ComplexMatrix t(4, 4);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) t(2 + i, 2 + j) = 2.0 * u(i, j);
        SpectralProfile p;
        p.essential_points = {2.0};
        p.alpha_in_point_spectrum = true;
        p.alpha_eigenspace_dim = ExtDim::infinite();
        p.kernel_dim = ExtDim::finite(2);
        p.cokernel_dim = ExtDim::finite(2);
        p.lower_points = {{0.0, 2}};
        p.min_modulus = 0.0;
        SO op = SO::finite_matrix(t).with_profile(p).with_classes({"hyponormal"});
        auto v = check_equal_kernels_normal(op, {4}, tol);
        CHECK(v.premise_holds);
        CHECK(v.conclusion_normal);
    }
    SUBCASE("unilateral shift: N(S) = 0 but N(S^*) = span(e1)") {
        auto v = check_equal_kernels_normal(unilateral_shift(), {16}, tol);
        CHECK_FALSE(v.premise_holds);
        CHECK_FALSE(v.conclusion_normal);
    }
    SUBCASE("diag(0, 1 + 1/k, ...): self-adjoint with one kernel direction") {
        SO op = SO::diagonal_with_limit(
            SequenceRule::prefix({0.0}, SequenceRule::affine(1.0, 1.0, SequenceRule::harmonic())),
            1.0);
        SpectralProfile p;
        p.essential_points = {1.0};
        p.upper_tail = PointTail{SequenceRule::affine(1.0, 1.0, SequenceRule::harmonic()), 1};
        p.kernel_dim = ExtDim::finite(1);
        p.cokernel_dim = ExtDim::finite(1);
        p.lower_points = {{0.0, 1}};
        p.min_modulus = 0.0;
        op = op.with_profile(p);
        auto v = check_equal_kernels_normal(op, {16, 32}, tol);
        CHECK(v.premise_holds);
        CHECK(v.conclusion_normal);
        CHECK(v.commutator_defect <= 1e-12);
    }
}

TEST_CASE("check_weyl_condition_normal") {
    ToleranceConfig tol;
    SUBCASE("2U (+) I: declared omega equals the essential set") {
        std::mt19937_64 rng(13);
        ComplexMatrix u = random_unitary(2, rng);
        SO op = SO::direct_sum({SO::scale(2.0, SO::finite_matrix(u)), SO::scaled_identity(1.0)});
        SpectralProfile p;
        p.essential_points = {1.0};
        p.alpha_in_point_spectrum = true;
        p.alpha_eigenspace_dim = ExtDim::infinite();
        p.upper_points = {{2.0, 2}};
        p.min_modulus = 1.0;
        DeclaredSpectrum d;
        d.sigma.discrete_points = {{cplx(1.0, 0.0), 1}};  // plus the 2U eigenvalues in pi00
        d.sigma_ess.discrete_points = {{cplx(1.0, 0.0), 1}};
        d.weyl.discrete_points = {{cplx(1.0, 0.0), 1}};
        op = op.with_profile(p).with_spectrum(d).with_classes({"hyponormal"});
        auto v = check_weyl_condition_normal(op, {12, 24}, tol);
        CHECK(v.premise_holds);
        CHECK(v.conclusion_normal);
        CHECK(v.commutator_defect <= 1e-10);
    }
    SUBCASE("unilateral shift: omega = disk vs sigma_ess = circle, defect persists") {
        auto v = check_weyl_condition_normal(unilateral_shift(), {16, 32}, tol);
        CHECK_FALSE(v.premise_holds);
        CHECK_FALSE(v.conclusion_normal);
        CHECK(std::abs(v.commutator_defect - 1.0) <= 1e-12);
    }
    SUBCASE("2U (+) S: omega strictly contains the essential circle") {
        std::mt19937_64 rng(17);
        ComplexMatrix u = random_unitary(2, rng);
        SO op = SO::direct_sum({SO::scale(2.0, SO::finite_matrix(u)), unilateral_shift()});
        SpectralProfile p;
        p.essential_points = {1.0};
        p.alpha_in_point_spectrum = true;
        p.alpha_eigenspace_dim = ExtDim::infinite();
        p.upper_points = {{2.0, 2}};
        p.min_modulus = 1.0;
        DeclaredSpectrum d;
        d.sigma.regions = {SpectrumRegion::disk(1.0)};
        d.sigma.discrete_points = {{cplx(2.0, 0.0), 2}};
        d.sigma_ess.regions = {SpectrumRegion::circle(1.0)};
        d.weyl.regions = {SpectrumRegion::disk(1.0)};
        op = op.with_profile(p).with_spectrum(d).with_classes({"hyponormal", "quasinormal"});
        auto v = check_weyl_condition_normal(op, {16, 32}, tol);
        CHECK_FALSE(v.premise_holds);
        CHECK_FALSE(v.conclusion_normal);
    }
    SUBCASE("undeclared spectrum is an error, never inferred") {
        SO bare = SO::weighted_shift(SequenceRule::constant(1.0));
        CHECK_THROWS_AS(check_weyl_condition_normal(bare, {8}, tol), SpectrumUndeclared);
    }
}

TEST_CASE("putnam consistency on declared hyponormal samples") {
    ToleranceConfig tol;
    std::mt19937_64 rng(23);
    // the shift saturates the bound: defect 1 against disk area / pi = 1
    {
        SO s = unilateral_shift();
        const double bound = putnam_bound(s.spectrum()->sigma);
        const double defect = interior_commutator_defect(s, 32, tol);
        const double norm = operator_norm(s.render(32));
        CHECK(defect <= bound + tol.eq_tol * norm * norm);
        CHECK(defect == doctest::Approx(bound).epsilon(1e-12));
    }
    // normal samples have point spectra: bound 0, defect ~0
    for (int trial = 0; trial < 5; ++trial) {
        SO op = scaled_unitary_sample(5, 1.5, rng);
        const double bound = putnam_bound(op.spectrum()->sigma);
        const double defect = interior_commutator_defect(op, 5, tol);
        const double norm = operator_norm(op.render(5));
        CHECK(bound == 0.0);
        CHECK(defect <= bound + tol.eq_tol * norm * norm);
    }
}

TEST_CASE("commutator_decay_study") {
    ToleranceConfig tol;
    SUBCASE("normal diagonal: all columns zero") {
        SO d = SO::diagonal_with_limit(SequenceRule::harmonic(), 0.0);
        auto s = commutator_decay_study(d, {8, 16, 32}, tol);
        for (const auto& r : s.rows) {
            CHECK(r.full_defect <= 1e-14);
            CHECK(r.interior_defect <= 1e-14);
        }
        CHECK(s.interior_nonincreasing);
    }
    SUBCASE("shift: defect 1 at every dim, interior included") {
        auto s = commutator_decay_study(unilateral_shift(), {8, 16, 32}, tol);
        for (const auto& r : s.rows) {
            CHECK(r.full_defect == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(r.interior_defect == doctest::Approx(1.0).epsilon(1e-13));
        }
    }
    SUBCASE("unitarily conjugated compact perturbation of I stays numerically normal") {
        std::mt19937_64 rng(29);
        const std::size_t n = 24;
        ComplexMatrix q = random_unitary(n, rng);
        std::vector<double> d(n);
        for (std::size_t k = 0; k < n; ++k) d[k] = 1.0 + 0.5 / static_cast<double>(k + 1);
        ComplexMatrix t = q * ComplexMatrix::diagonal(d) * q.adjoint();
        SO op = SO::finite_matrix(t);
        auto s = commutator_decay_study(op, {static_cast<std::int64_t>(n)}, tol);
        CHECK(s.rows[0].full_defect <= 1e-12);
        CHECK(s.rows[0].interior_defect <= 1e-12);
    }
}

TEST_CASE("verdict soundness: premise failures never claim normality") {
    ToleranceConfig tol;
    std::vector<NormalityVerdict> verdicts;
    verdicts.push_back(check_invertible_normal(unilateral_shift(), {16}, tol));
    verdicts.push_back(check_equal_kernels_normal(unilateral_shift(), {16}, tol));
    verdicts.push_back(check_weyl_condition_normal(unilateral_shift(), {16}, tol));
    verdicts.push_back(check_invertible_normal(example_hyponormal_operator(), {32}, tol));
    for (const auto& v : verdicts) {
        CHECK_FALSE(v.premise_holds);
        CHECK_FALSE(v.conclusion_normal);
    }
}
