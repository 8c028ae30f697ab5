#include "doctest.h"

#include <cmath>

#include "opspectra/decomposition.hpp"
#include "opspectra/generator.hpp"
#include "opspectra/json_io.hpp"
#include "test_helpers.hpp"

using namespace opspectra;
using SO = StructuredOperator;

TEST_CASE("generator: every class emits a self-certified operator") {
    ToleranceConfig tol;
    for (const char* klass :
         {"positive-closureAN", "quasinormal-AN", "quasinormal-AM", "quasinormal-closure",
          "hyponormal-closure", "normal"}) {
        GeneratorRecipe r;
        r.klass = klass;
        r.dim = 20;
        r.seed = 17;
        if (r.klass == "quasinormal-AM") r.lower_infinite = true;
        SO op = generate(r);
        REQUIRE(op.profile().has_value());
        CHECK_NOTHROW(op.profile()->validate());
        CHECK_FALSE(op.declared_classes().empty());
        CHECK(closure_an_membership(*op.profile()));
        if (r.klass == "quasinormal-AN") CHECK(an_membership(*op.profile()));
        if (r.klass == "quasinormal-AM") {
            CHECK(am_membership(*op.profile()));
            CHECK_FALSE(an_membership(*op.profile()));
        }
        if (r.klass == "quasinormal-closure") {
            CHECK_FALSE(an_membership(*op.profile()));
            CHECK_FALSE(am_membership(*op.profile()));
        }
    }
}

TEST_CASE("generator: determinism under a fixed seed") {
    GeneratorRecipe r;
    r.klass = "positive-closureAN";
    r.dim = 16;
    r.seed = 99;
    const std::string first = serialize_operator(generate(r));
    CHECK(serialize_operator(generate(r)) == first);
    GeneratorRecipe other = r;
    other.seed = 100;
    CHECK(serialize_operator(generate(other)) != first);
}

TEST_CASE("generator: numeric corroboration of each class") {
    ToleranceConfig tol;
    SUBCASE("positive samples are positive and split cleanly") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            GeneratorRecipe r;
            r.klass = "positive-closureAN";
            r.dim = 18;
            r.seed = seed;
            if (seed % 2 == 0) r.force_kernel = true;
            SO op = generate(r);
            ComplexMatrix t = op.render(*op.dimension());
            CHECK(is_positive(t, tol).holds);
            auto f = positive_canonical_form(t, op.profile()->essential_point(), tol);
            CHECK(verify_positive_form(f, t, tol).ok);
        }
    }
    SUBCASE("normal samples are normal at their own dimension") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            GeneratorRecipe r;
            r.klass = "normal";
            r.dim = 14;
            r.seed = seed;
            SO op = generate(r);
            CHECK(is_normal(op.render(*op.dimension()), tol).holds);
        }
    }
    SUBCASE("quasinormal samples decompose with matching scalars") {
        for (std::uint64_t seed = 1; seed <= 4; ++seed) {
            GeneratorRecipe r;
            r.klass = "quasinormal-AN";
            r.dim = 16;
            r.seed = seed;
            r.essential_isometry = (seed % 2 == 0);
            SO op = generate(r);
            const std::int64_t n = op.dimension() ? *op.dimension() : 48;
            auto d = quasinormal_decompose(op, n, tol);
            REQUIRE(d.upper_blocks.size() == op.profile()->upper_points.size());
            for (std::size_t i = 0; i < d.upper_blocks.size(); ++i) {
                CHECK(d.upper_blocks[i].scalar ==
                      doctest::Approx(op.profile()->upper_points[i].value).epsilon(1e-10));
                CHECK(d.upper_blocks[i].unitary_defect <= 1e-10);
            }
            CHECK(d.essential.isometry_defect <= 1e-10);
            CHECK(d.reassembly_defect <= 1e-10);
            if (r.essential_isometry) CHECK(d.essential.kind == "proper_isometry");
            else CHECK(d.essential.kind == "unitary");
        }
    }
    SUBCASE("hyponormal-closure samples pass the interior test and block form") {
        for (std::uint64_t seed = 1; seed <= 4; ++seed) {
            GeneratorRecipe r;
            r.klass = "hyponormal-closure";
            r.upper_count = (seed % 2 == 0) ? 2 : 0;
            r.seed = seed;
            SO op = generate(r);
            const std::int64_t n = 72;
            CHECK(is_hyponormal_interior(op, n, tol).holds);
            auto f = hyponormal_block_form(op, n, tol);
            CHECK(f.v1_a_product_norm <= 1e-10);
            CHECK(f.gram_identity_defect <= 1e-10);
            CHECK(f.bb_bound_defect <= 1e-10);
            CHECK(f.reassembly_defect <= 1e-10);
            CHECK_FALSE(normality_from_blocks(f, tol));
        }
    }
}

TEST_CASE("generator: infeasible recipes are rejected") {
    GeneratorRecipe r;
    r.klass = "quasinormal-AN";
    r.lower_infinite = true;
    CHECK_THROWS_AS(generate(r), RecipeInfeasible);
    r.klass = "no-such-class";
    r.lower_infinite = false;
    CHECK_THROWS_AS(generate(r), RecipeInfeasible);
}

TEST_CASE("generator: finite-random carries no claims") {
    GeneratorRecipe r;
    r.klass = "finite-random";
    r.dim = 6;
    SO op = generate(r);
    CHECK_FALSE(op.profile().has_value());
    CHECK(op.declared_classes().empty());
}

TEST_CASE("generator soundness: symbolic always, numeric corroboration at n <= 128") {
    ToleranceConfig tol;
    const char* classes[] = {"positive-closureAN", "normal", "quasinormal-AN",
                             "quasinormal-AM", "quasinormal-closure", "hyponormal-closure"};
    int numeric_failures = 0;
    int total = 0;
    for (int i = 0; i < 48; ++i) {
        GeneratorRecipe r;
        r.klass = classes[i % 6];
        r.dim = 10 + (i * 3) % 22;
        r.seed = 9000 + static_cast<std::uint64_t>(i);
        if (r.klass == std::string("quasinormal-AM")) r.lower_infinite = true;
        if (i % 12 == 2) r.essential_isometry = true;
        SO op = generate(r);
        ++total;

        // symbolic: the declared profile satisfies the class's own predicate
        CHECK(closure_an_membership(*op.profile()));

        // numeric corroboration on a truncation of at most 128
        const std::int64_t n = op.dimension() ? *op.dimension() : 96;
        REQUIRE(n <= 128);
        bool ok = true;
        try {
            if (r.klass == std::string("positive-closureAN")) {
                ComplexMatrix t = op.render(n);
                ok = is_positive(t, tol).holds &&
                     verify_positive_form(
                         positive_canonical_form(t, op.profile()->essential_point(), tol), t, tol)
                         .ok;
            } else if (r.klass == std::string("normal")) {
                ok = is_normal(op.render(n), tol).holds;
            } else if (r.klass == std::string("hyponormal-closure")) {
                auto f = hyponormal_block_form(op, n, tol);
                ok = f.gram_identity_defect <= 1e-10 && f.bb_bound_defect <= 1e-10 &&
                     f.reassembly_defect <= 1e-10;
            } else {
                auto d = quasinormal_decompose(op, n, tol);
                ok = d.reassembly_defect <= 1e-10;
            }
        } catch (const RankAmbiguity&) {
            // reported, never silent; does not count against soundness
        } catch (const EssentialAmbiguity&) {
        }
        if (!ok) ++numeric_failures;
    }
    CHECK(numeric_failures == 0);  // well above the 99% bar
    CHECK(total == 48);
}
