#include "doctest.h"

#include <cmath>
#include <random>

#include "opspectra/classification.hpp"
#include "opspectra/samples.hpp"
#include "test_helpers.hpp"

using namespace opspectra;
using namespace opspectra::testing;
using SO = StructuredOperator;

TEST_CASE("is_normal / is_selfadjoint / is_positive") {
    ComplexMatrix flip{{0.0, 1.0}, {1.0, 0.0}};
    auto r = is_normal(flip);
    CHECK(r.holds);
    CHECK(r.defect <= 1e-14);

    ComplexMatrix nil{{0.0, 1.0}, {0.0, 0.0}};
    r = is_normal(nil);
    CHECK_FALSE(r.holds);
    CHECK(r.defect == doctest::Approx(1.0).epsilon(1e-13));  // commutator diag(-1, 1)

    CHECK(is_positive(ComplexMatrix::diagonal(std::vector<double>{1, 0.5})).holds);
    CHECK_FALSE(is_positive(ComplexMatrix::diagonal(std::vector<double>{1, -0.5})).holds);
    CHECK(is_selfadjoint(flip).holds);
    CHECK_FALSE(is_selfadjoint(nil).holds);
}

TEST_CASE("is_quasinormal") {
    SUBCASE("normal matrices are quasinormal") {
        std::mt19937_64 rng(3);
        ComplexMatrix u = random_unitary(5, rng);
        ComplexMatrix d = ComplexMatrix::diagonal(std::vector<cplx>{
            cplx(1, 0), cplx(0, 2), cplx(-1, 1), cplx(3, 0), cplx(0.5, 0.5)});
        ComplexMatrix t = u * d * u.adjoint();
        CHECK(is_quasinormal(t).holds);
    }
    SUBCASE("truncated shift fails numerically with defect 1") {
        auto r = is_quasinormal(truncated_shift(4));
        CHECK_FALSE(r.holds);
        CHECK(r.defect == doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("the infinite shift is quasinormal in symbolic mode") {
        CHECK(unilateral_shift().declares_class("quasinormal"));
        SO two_u_plus_shift = SO::direct_sum({SO::scale(2.0, unilateral_shift()), unilateral_shift()});
        // symbolic quasinormality of a structured direct sum is carried by
        // declaration; the classify battery surfaces it
        auto rep = classify(two_u_plus_shift.with_classes({"quasinormal"}), {16});
        CHECK(rep.flags.at("declared_quasinormal").holds);
        CHECK(rep.flags.at("declared_quasinormal").mode == "symbolic");
    }
}

TEST_CASE("is_hyponormal_interior vs full") {
    ToleranceConfig tol;
    SUBCASE("worked example at n = 64") {
        auto r = is_hyponormal_interior(example_hyponormal_operator(), 64, tol);
        CHECK(r.holds);
        CHECK(r.defect >= -1e-12);
        CHECK(r.mode == "interior");
    }
    SUBCASE("truncated shift: interior passes, full fails") {
        SO s = unilateral_shift();
        auto interior = is_hyponormal_interior(s, 16, tol);
        CHECK(interior.holds);
        auto full = is_hyponormal_full(s.render(16), tol);
        CHECK_FALSE(full.holds);
        CHECK(full.defect == doctest::Approx(-1.0).epsilon(1e-13));
    }
    SUBCASE("self-adjoint diagonal: trivially hyponormal, defect 0") {
        SO d = SO::diagonal_with_limit(SequenceRule::harmonic(), 0.0);
        auto r = is_hyponormal_interior(d, 12, tol);
        CHECK(r.holds);
        CHECK(std::abs(r.defect) <= 1e-15);
    }
    SUBCASE("InteriorEmpty when the margin swallows the truncation") {
        CHECK_THROWS_AS(is_hyponormal_interior(unilateral_shift(), 2, tol), InteriorEmpty);
    }
    SUBCASE("finite-support operators are exact: margin 0, interior = full") {
        ComplexMatrix nil{{0.0, 1.0}, {0.0, 0.0}};
        SO f = SO::finite_matrix(nil);
        CHECK(interior_margin(f, 2, tol) == 0);
        CHECK_FALSE(is_hyponormal_interior(f, 2, tol).holds);
    }
}

TEST_CASE("interior_min_modulus sees through the boundary") {
    SO t = example_hyponormal_operator();
    const double v = interior_min_modulus(t, 64);
    CHECK(v == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    // the full truncation has two boundary-killed columns
    CHECK(min_modulus(t.render(64)) <= 1e-14);
    CHECK(operator_norm(t.render(64)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("paranormal sampling refutes and accepts") {
    CHECK(is_paranormal_sampled(ComplexMatrix::diagonal(std::vector<double>{1, 2}), 32, 5).holds);
    ComplexMatrix nil{{0.0, 1.0}, {0.0, 0.0}};
    // x = e2: ||T x||^2 = 1 > ||T^2 x|| ||x|| = 0
    auto r = is_paranormal_sampled(nil, 32, 5);
    CHECK_FALSE(r.holds);
    CHECK(std::isinf(r.worst_ratio));
    CHECK(is_paranormal_sampled(ComplexMatrix(3, 3), 8, 5).holds);
    CHECK(is_star_paranormal_sampled(ComplexMatrix(3, 3), 8, 5).holds);
    // the adjoint of the nilpotent fails the starred inequality at e1
    CHECK_FALSE(is_star_paranormal_sampled(nil.adjoint(), 32, 5).holds);
}

TEST_CASE("estimate_essential_spectrum") {
    ToleranceConfig tol;
    SUBCASE("diagonal 1/k accumulates at 0") {
        SO d = SO::diagonal_with_limit(SequenceRule::harmonic(), 0.0);
        auto est = estimate_essential_spectrum(d, {64, 128, 256}, tol);
        REQUIRE(est.clusters.size() == 1);
        CHECK(std::abs(est.clusters[0].center) <= tol.cluster_gap);
        CHECK(est.clusters[0].kind == "accumulation");
    }
    SUBCASE("worked example: |T| essential spectrum is {1}") {
        auto est = estimate_essential_spectrum(example_hyponormal_operator(), {64, 128, 256}, tol);
        REQUIRE(est.clusters.size() == 1);
        CHECK(est.clusters[0].center == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(est.checked_against_profile);
    }
    SUBCASE("alternating diag(2, 1 + 1/k) has essential set {1, 2}") {
        SO d = SO::diagonal_with_limit(
            SequenceRule::interleave(
                {SequenceRule::constant(2.0), SequenceRule::rational(1, 1, 0, 1)}),
            1.0);
        auto est = estimate_essential_spectrum(d, {64, 128, 256}, tol);
        REQUIRE(est.clusters.size() == 2);
        CHECK(est.clusters[0].center == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(est.clusters[1].center == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("declared profile disagreement raises Inconsistent") {
        SpectralProfile wrong;
        wrong.essential_points = {0.5};
        SO d = SO::diagonal_with_limit(SequenceRule::harmonic(), 0.0).with_profile(wrong);
        CHECK_THROWS_AS(estimate_essential_spectrum(d, {64, 128, 256}, tol), Inconsistent);
    }
    SUBCASE("needs at least three dims") {
        SO d = SO::diagonal_with_limit(SequenceRule::harmonic(), 0.0);
        CHECK_THROWS_AS(estimate_essential_spectrum(d, {64, 128}, tol), Error);
    }
}

TEST_CASE("estimator soundness on declared diagonal limits") {
    ToleranceConfig tol;
    struct Case { SequenceRule rule; double limit; };
    std::vector<Case> cases = {
        {SequenceRule::affine(1.0, 0.0, SequenceRule::harmonic()), 0.0},          // 1/k
        {SequenceRule::affine(1.0, 1.0, SequenceRule::harmonic()), 1.0},          // 1 + 1/k
        {SequenceRule::affine(-0.5, 2.5, SequenceRule::harmonic()), 2.5},         // 2.5 - 0.5/k
        {SequenceRule::constant(3.0), 3.0},
    };
    for (const auto& c : cases) {
        SO d = SO::diagonal_with_limit(c.rule, c.limit);
        auto est = estimate_essential_spectrum(d, {128, 256, 512}, tol);
        REQUIRE(est.clusters.size() == 1);
        CHECK(std::abs(est.clusters[0].center - c.limit) <= tol.cluster_gap);
    }
}

TEST_CASE("membership predicates on profiles") {
    SUBCASE("finite on both sides: AN, AM and closure all hold") {
        SpectralProfile p;
        p.essential_points = {1.0};
        p.upper_points = {{2.0, 1}};
        p.lower_points = {{0.5, 1}};
        CHECK(an_membership(p));
        CHECK(am_membership(p));
        CHECK(closure_an_membership(p));
    }
    SUBCASE("infinite lower family: AM side only") {
        const SpectralProfile p = *example_hyponormal_operator().profile();
        CHECK_FALSE(an_membership(p));
        CHECK(am_membership(p));
        CHECK(closure_an_membership(p));
    }
    SUBCASE("two essential points fail the singleton test") {
        SpectralProfile p;
        p.essential_points = {0.0, 1.0};
        CHECK_FALSE(an_membership(p));
        CHECK_FALSE(am_membership(p));
        CHECK_FALSE(closure_an_membership(p));
    }
}

TEST_CASE("membership monotonicity: AN or AM implies closure membership") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        SpectralProfile p;
        const int n_ess = 1 + static_cast<int>(rng() % 2);
        for (int e = 0; e < n_ess; ++e) p.essential_points.push_back(u(rng) + 3.0 * e);
        const double alpha = p.essential_points.front();
        if (rng() % 2) p.upper_points.push_back({alpha + u(rng), 1 + static_cast<int>(rng() % 3)});
        if (rng() % 2) p.lower_points.push_back({alpha * 0.5, 1});
        if (rng() % 3 == 0)
            p.upper_tail = PointTail{
                SequenceRule::affine(alpha * 0.25, alpha, SequenceRule::harmonic()), 1};
        if (rng() % 3 == 0)
            p.lower_tail = PointTail{
                SequenceRule::affine(-alpha * 0.25, alpha, SequenceRule::harmonic()), 1};
        if (an_membership(p)) CHECK(closure_an_membership(p));
        if (am_membership(p)) CHECK(closure_an_membership(p));
    }
}

TEST_CASE("imaginary shift preserves closure membership") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        SpectralProfile p;
        p.essential_points = {u(rng) + 0.25};  // modulus profiles carry values >= 0
        const double alpha = p.essential_points.front();
        if (rng() % 2) p.upper_points.push_back({alpha + 0.5 + u(rng), 1});
        if (rng() % 2)
            p.lower_tail = PointTail{
                SequenceRule::affine(-alpha * 0.3, alpha, SequenceRule::harmonic()), 1};
        if (!p.lower_tail) p.lower_points.push_back({alpha / 2, 2});
        p.min_modulus = p.smallest_declared_value();
        REQUIRE(closure_an_membership(p));
        const double lambda = u(rng) + 0.1;
        SpectralProfile q = imaginary_shift_profile(p, lambda);
        CHECK(closure_an_membership(q));
        CHECK_NOTHROW(q.validate());
        CHECK(q.essential_point() ==
              doctest::Approx(std::hypot(alpha, lambda)).epsilon(1e-13));
    }
}

TEST_CASE("trace-identity guard: strictly PSD commutator forces normality") {
    std::mt19937_64 rng(41);
    ToleranceConfig strict;
    strict.psd_tol = 1e-15;
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng() % 12);
        ComplexMatrix t = (trial % 2 == 0) ? random_matrix(n, rng) : [&] {
            ComplexMatrix u = random_unitary(n, rng);
            ComplexMatrix d(n, n);
            std::normal_distribution<double> g(0.0, 1.0);
            for (std::size_t i = 0; i < n; ++i) d(i, i) = cplx(g(rng), g(rng));
            return u * d * u.adjoint();
        }();
        if (is_hyponormal_full(t, strict).holds) {
            const double norm = operator_norm(t);
            ToleranceConfig loose;
            loose.eq_tol = 1e-12 * static_cast<double>(n);
            CHECK(is_normal(t, loose).holds);
            CHECK(full_commutator_defect(t) <=
                  static_cast<double>(n) * 1e-12 * norm * norm);
        }
    }
}

TEST_CASE("fredholm_data") {
    SUBCASE("positive operator with forced kernel: index 0") {
        SpectralProfile p;
        p.essential_points = {1.0};
        p.kernel_dim = ExtDim::finite(2);
        p.cokernel_dim = ExtDim::finite(2);
        auto f = fredholm_data(p, 1.0);
        CHECK(f.is_fredholm);
        REQUIRE(f.index.has_value());
        CHECK(*f.index == 0);
        CHECK(f.essential_min == 1.0);
    }
    SUBCASE("unilateral shift: kernel 0, cokernel 1, index -1") {
        const SpectralProfile p = *unilateral_shift().profile();
        auto f = fredholm_data(p, 1.0);
        CHECK(f.is_fredholm);
        CHECK(*f.index == -1);
    }
    SUBCASE("compact positive operator (alpha = 0) is not Fredholm") {
        SpectralProfile p;
        p.essential_points = {0.0};
        auto f = fredholm_data(p, 0.0);
        CHECK_FALSE(f.is_fredholm);
    }
}

TEST_CASE("weyl_spectrum_symbolic") {
    SUBCASE("self-adjoint profile: omega = essential points only") {
        SpectralProfile p;
        p.essential_points = {1.0};
        p.upper_points = {{2.0, 1}};
        p.lower_points = {{0.5, 1}};
        auto w = weyl_spectrum_symbolic(p);
        REQUIRE(w.discrete_points.size() == 1);
        CHECK(w.discrete_points[0].value == cplx(1.0, 0.0));
        CHECK(w.regions.empty());
    }
    SUBCASE("finite-dimensional profile: omega empty") {
        SpectralProfile p;  // no essential points
        auto w = weyl_spectrum_symbolic(p);
        CHECK(w.discrete_points.empty());
        CHECK(w.regions.empty());
    }
    SUBCASE("shift carries its declared disk") {
        const DeclaredSpectrum d = *unilateral_shift().spectrum();
        CHECK(d.weyl.regions == std::vector<SpectrumRegion>{SpectrumRegion::disk(1.0)});
        CHECK(d.sigma_ess.regions == std::vector<SpectrumRegion>{SpectrumRegion::circle(1.0)});
        CHECK(d.weyl.area_over_pi() == 1.0);
        CHECK(d.sigma_ess.area_over_pi() == 0.0);
    }
}

TEST_CASE("classify battery on the worked example") {
    auto rep = classify(example_hyponormal_operator(), {64});
    CHECK(rep.flags.at("hyponormal_interior").holds);
    CHECK_FALSE(rep.flags.at("quasinormal").holds);
    CHECK_FALSE(rep.flags.at("normal").holds);
    CHECK(rep.flags.at("closure_an_membership").holds);
    CHECK(rep.flags.at("am_membership").holds);
    CHECK_FALSE(rep.flags.at("an_membership").holds);
    CHECK(rep.flags.at("declared_hyponormal").holds);
    CHECK(rep.profile_used.has_value());

    // determinism: re-running reproduces every defect bit for bit
    auto rep2 = classify(example_hyponormal_operator(), {64});
    for (const auto& [name, flag] : rep.flags) {
        CHECK(rep2.flags.at(name).holds == flag.holds);
        CHECK(rep2.flags.at(name).defect == flag.defect);
    }
}
