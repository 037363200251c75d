#include "doctest.h"
#include "helpers.hpp"
#include "uot/elliptic.hpp"

using namespace uot;
using namespace uot::test;

TEST_SUITE("elliptic")
{
    TEST_CASE("zero weights leave the identity part")
    {
        const GridSpec g = GridSpec::node_2d(4, 4, 1.0, 1.0);
        std::mt19937_64 rng(5);
        const ScalarField u = random_field(g, rng);
        const WeightedOperator op(ScalarField(g), 2.0);
        const ScalarField out = op.apply(u);
        for (std::size_t k = 0; k < u.size(); ++k)
            CHECK(out[k] == doctest::Approx(2.0 * u[k]));
    }

    TEST_CASE("constants map to alpha times the constant")
    {
        const GridSpec g = GridSpec::node_2d(5, 4, 1.0, 1.0);
        std::mt19937_64 rng(6);
        const ScalarField w = random_field(g, rng, 0.0, 3.0);
        for (auto variant : {OperatorVariant::SpatiallyDependent, OperatorVariant::SpatiallyIndependent}) {
            const ScalarField out = WeightedOperator(w, 0.7, variant).apply(ScalarField(g, 3.0));
            for (double v : out.values())
                CHECK(std::abs(v - 2.1) <= 1e-12);
        }
    }

    TEST_CASE("three-node matrix from the stencil")
    {
        // dx = 0.5, mu = 1: coefficient (1+1)/(2*0.25) = 4. alpha -> 0 limit checked
        // by removing the identity part explicitly.
        const GridSpec g = GridSpec::node_1d(3, 1.0);
        const double alpha = 1e-3;
        const WeightedOperator op(ScalarField(g, 1.0), alpha);
        const double expected[3][3] = {{4, -4, 0}, {-4, 8, -4}, {0, -4, 4}};
        for (int c = 0; c < 3; ++c) {
            ScalarField e(g);
            e[c] = 1.0;
            const ScalarField col = op.apply(e);
            for (int r = 0; r < 3; ++r)
                CHECK(col[r] - (r == c ? alpha : 0.0) == doctest::Approx(expected[r][c]));
        }
    }

    TEST_CASE("operator is symmetric and positive definite")
    {
        std::mt19937_64 rng(7);
        for (const GridSpec& g : {GridSpec::node_1d(17, 1.0), GridSpec::node_2d(9, 7, 1.0, 2.0)}) {
            const ScalarField w = random_field(g, rng, 0.0, 2.0);
            for (auto variant : {OperatorVariant::SpatiallyDependent, OperatorVariant::SpatiallyIndependent}) {
                const WeightedOperator op(w, 0.5, variant);
                const ScalarField u = random_field(g, rng), v = random_field(g, rng);
                const double a = inner_product(op.apply(u).values(), v.values());
                const double b = inner_product(u.values(), op.apply(v).values());
                CHECK(rel_diff(a, b) <= 1e-12);
                const double quad = inner_product(u.values(), op.apply(u).values());
                if (variant == OperatorVariant::SpatiallyDependent)
                    CHECK(quad >= 0.5 * inner_product(u.values(), u.values()) * (1.0 - 1e-12));
                else
                    CHECK(quad > 0.0);
            }
        }
    }

    TEST_CASE("zero right-hand side returns zero without iterating")
    {
        const GridSpec g = GridSpec::node_1d(9, 1.0);
        const SolveResult r = solve(WeightedOperator(ScalarField(g, 1.0), 1.0), ScalarField(g), CgConfig{});
        CHECK(r.iterations == 0);
        CHECK(r.solution.max() == 0.0);
    }

    TEST_CASE("diagonal system is solved exactly")
    {
        const GridSpec g = GridSpec::node_1d(9, 1.0);
        std::mt19937_64 rng(8);
        const ScalarField rhs = random_field(g, rng);
        const SolveResult r = solve(WeightedOperator(ScalarField(g), 2.0), rhs, CgConfig{});
        for (std::size_t k = 0; k < rhs.size(); ++k)
            CHECK(r.solution[k] == doctest::Approx(rhs[k] / 2.0).epsilon(1e-12));
    }

    TEST_CASE("solve after apply recovers the input, with and without Jacobi")
    {
        std::mt19937_64 rng(9);
        const GridSpec g = GridSpec::node_2d(16, 16, 1.0, 1.0);
        const ScalarField w = random_field(g, rng, 0.0, 2.0);
        const ScalarField u = random_field(g, rng);
        for (auto pc : {Preconditioner::None, Preconditioner::Jacobi}) {
            CgConfig cfg;
            cfg.preconditioner = pc;
            const WeightedOperator op(w, 1.0);
            const SolveResult r = solve(op, op.apply(u), cfg);
            CHECK(rel_l2(r.solution.data(), u.data()) <= 1e-9);
            const ScalarField back = op.apply(r.solution);
            CHECK(rel_l2(back.data(), op.apply(u).data()) <= cfg.rel_tolerance * 1.0001);
        }
    }

    TEST_CASE("Jacobi diagonal matches the assembled diagonal")
    {
        std::mt19937_64 rng(10);
        const GridSpec g = GridSpec::node_2d(5, 4, 1.0, 1.0);
        const ScalarField w = random_field(g, rng, 0.0, 2.0);
        for (auto variant : {OperatorVariant::SpatiallyDependent, OperatorVariant::SpatiallyIndependent}) {
            const WeightedOperator op(w, 0.3, variant);
            const std::vector<double> d = op.diagonal();
            for (std::size_t k = 0; k < g.cells(); ++k) {
                ScalarField e(g);
                e[k] = 1.0;
                CHECK(d[k] == doctest::Approx(op.apply(e)[k]).epsilon(1e-13));
            }
        }
    }

    TEST_CASE("budget exhaustion raises a convergence error carrying the residual")
    {
        std::mt19937_64 rng(11);
        const GridSpec g = GridSpec::node_2d(16, 16, 1.0, 1.0);
        const ScalarField w = random_field(g, rng, 0.0, 2.0);
        CgConfig cfg;
        cfg.max_iterations = 2;
        try {
            solve(WeightedOperator(w, 1e-3), random_field(g, rng), cfg);
            FAIL("expected ConvergenceError");
        } catch (const ConvergenceError& e) {
            CHECK(e.iterations() == 2);
            CHECK(e.residual() > cfg.rel_tolerance);
        }
    }

    TEST_CASE("invalid configuration and inputs are rejected")
    {
        const GridSpec g = GridSpec::node_1d(5, 1.0);
        CHECK_THROWS_AS(WeightedOperator(ScalarField(g, 1.0), 0.0), StructuralError);
        CHECK_THROWS_AS(WeightedOperator(ScalarField(g, -1.0), 1.0), StructuralError);
        CgConfig bad;
        bad.rel_tolerance = 1.5;
        CHECK_THROWS_AS(bad.validate(), StructuralError);
        const WeightedOperator op(ScalarField(g, 1.0), 1.0);
        CHECK_THROWS_AS(op.apply(ScalarField(GridSpec::node_1d(6, 1.0))), StructuralError);
    }

    TEST_CASE("warm start changes iteration counts only")
    {
        std::mt19937_64 rng(12);
        const GridSpec g = GridSpec::node_2d(12, 12, 1.0, 1.0);
        const WeightedOperator op(random_field(g, rng, 0.1, 2.0), 1.0);
        const ScalarField rhs = random_field(g, rng);
        const SolveResult cold = solve(op, rhs, CgConfig{});
        const SolveResult warm = solve(op, rhs, CgConfig{}, &cold.solution);
        CHECK(warm.iterations <= cold.iterations);
        CHECK(rel_l2(warm.solution.data(), cold.solution.data()) <= 1e-8);
    }
}
