#include "doctest.h"
#include "helpers.hpp"
#include "uot/densities.hpp"
#include "uot/reference.hpp"
#include "uot/uw2.hpp"

using namespace uot;
using namespace uot::test;

namespace {

uw2::Problem bumps_1d(int nx, int nt, double alpha, double sigma = 0.08)
{
    const GridSpec g = GridSpec::node_1d(nx, 1.0, nt);
    uw2::Problem p;
    p.mu0 = gaussian_density(g, {0.3, 0.5, sigma, sigma, 1.0}).density;
    p.mu1 = gaussian_density(g, {0.7, 0.5, sigma, sigma, 1.4}).density;
    p.alpha = alpha;
    return p;
}

DensityPath random_path(const GridSpec& g, std::mt19937_64& rng)
{
    DensityPath path;
    for (int n = 0; n <= g.nt; ++n)
        path.slices.push_back(random_field(g, rng, 0.2, 1.5));
    return path;
}

uw2::SolverConfig backtracking()
{
    uw2::SolverConfig cfg;
    cfg.step_control = uw2::StepControl::Backtracking;
    cfg.tau = 0.1;
    cfg.max_outer = 400;
    cfg.cg.preconditioner = Preconditioner::Jacobi;
    return cfg;
}

}  // namespace

TEST_SUITE("uw2")
{
    TEST_CASE("Nesterov schedule values")
    {
        CHECK(uw2::NesterovSchedule::lambda(0) == 0.0);
        CHECK(uw2::NesterovSchedule::lambda(1) == 1.0);
        CHECK(uw2::NesterovSchedule::lambda(2) == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0));
        CHECK(uw2::NesterovSchedule::gamma(0) == 1.0);
        CHECK(uw2::NesterovSchedule::gamma(1) == 0.0);
        for (std::size_t k = 1; k < 50; ++k)
            CHECK(uw2::NesterovSchedule::gamma(k) <= 0.0);
    }

    TEST_CASE("linear path interpolates and pins the endpoints")
    {
        const uw2::Problem p = bumps_1d(21, 4, 1.0);
        const DensityPath path = uw2::linear_path(p);
        REQUIRE(path.slices.size() == 5);
        CHECK(path.slices.front().data() == p.mu0.field().data());
        CHECK(path.slices.back().data() == p.mu1.field().data());
        for (std::size_t k = 0; k < p.mu0.size(); ++k)
            CHECK(path.slices[2][k] == doctest::Approx(0.5 * (p.mu0[k] + p.mu1[k])));
    }

    TEST_CASE("equal endpoints have zero energy and a trivial solve")
    {
        const GridSpec g = GridSpec::node_1d(11, 1.0, 3);
        uw2::Problem p;
        p.mu0 = gaussian_density(g, {0.5, 0.5, 0.1, 0.1, 1.0}).density;
        p.mu1 = p.mu0;
        p.alpha = 2.0;
        CHECK(uw2::energy(p, uw2::linear_path(p)) == 0.0);
        const uw2::Solution s = uw2::solve(p);
        CHECK(s.energy == 0.0);
        CHECK(s.report.termination == Termination::TrivialInput);
    }

    TEST_CASE("energy is positive on distinct paths and zero on constant ones")
    {
        std::mt19937_64 rng(21);
        const GridSpec g = GridSpec::node_2d(5, 4, 1.0, 1.0, 3);
        for (int trial = 0; trial < 5; ++trial) {
            const DensityPath path = random_path(g, rng);
            const uw2::Problem p{DensityField(path.slices.front()), DensityField(path.slices.back()), 0.8};
            CHECK(uw2::energy(p, path) > 0.0);
            DensityPath flat{std::vector<ScalarField>(4, path.slices.front())};
            const uw2::Problem q{p.mu0, p.mu0, 0.8};
            CHECK(uw2::energy(q, flat) == 0.0);
        }
    }

    TEST_CASE("single interval energy against the dense solve")
    {
        std::mt19937_64 rng(22);
        for (auto variant : {OperatorVariant::SpatiallyDependent, OperatorVariant::SpatiallyIndependent}) {
            const GridSpec g = GridSpec::node_1d(9, 1.0, 1);
            const DensityPath path = random_path(g, rng);
            uw2::Problem p{DensityField(path.slices[0]), DensityField(path.slices[1]), 3.0, variant};
            CHECK(rel_diff(uw2::energy(p, path), reference::dense_energy(p, path)) <= 1e-8);
        }
    }

    TEST_CASE("gradient direction matches finite differences")
    {
        std::mt19937_64 rng(23);
        const GridSpec g = GridSpec::node_1d(7, 1.0, 3);
        const DensityPath path = random_path(g, rng);
        uw2::Problem p{DensityField(path.slices.front()), DensityField(path.slices.back()), 1.5};
        const uw2::Potentials pot = uw2::compute_potentials(p, path, CgConfig{1e-13});
        const auto dirs = uw2::gradient_step_direction(p, path, pot.phi);

        DensityPath eta{std::vector<ScalarField>(path.slices.size(), ScalarField(g))};
        for (std::size_t n = 1; n + 1 < path.slices.size(); ++n)
            eta.slices[n] = random_field(g, rng);
        double analytic = 0.0;
        const double vol = g.cell_volume(), dt = g.dt();
        for (std::size_t n = 1; n + 1 < path.slices.size(); ++n)
            analytic += -2.0 * vol * dt * inner_product(dirs[n - 1].values(), eta.slices[n].values());

        const auto e = [&](const DensityPath& q) { return reference::dense_energy(p, q); };
        const reference::FdEstimate fd = reference::fd_directional_derivative(e, path, eta, {1e-3, 1e-4});
        CHECK(rel_diff(fd.richardson, analytic) <= 1e-7);
    }

    TEST_CASE("solutions keep the endpoints and stay nonnegative")
    {
        const uw2::Problem p = bumps_1d(21, 6, 10.0);
        for (auto control : {uw2::StepControl::Fixed, uw2::StepControl::Backtracking}) {
            uw2::SolverConfig cfg = backtracking();
            cfg.step_control = control;
            cfg.tau = control == uw2::StepControl::Fixed ? 0.002 : 0.1;
            cfg.max_outer = 200;
            const uw2::Solution s = uw2::solve(p, cfg);
            CHECK(s.path.slices.front().data() == p.mu0.field().data());
            CHECK(s.path.slices.back().data() == p.mu1.field().data());
            for (const auto& slice : s.path.slices)
                CHECK(slice.min() >= 0.0);
            const double e0 = uw2::energy(p, uw2::linear_path(p));
            CHECK(s.energy <= e0);
            for (const auto& rec : s.report.history)
                CHECK(s.energy <= rec.objective * (1.0 + 1e-12));
        }
    }

    TEST_CASE("backtracking descends and reduces the HJ residual")
    {
        const uw2::Problem p = bumps_1d(21, 6, 10.0);
        uw2::SolverConfig cfg = backtracking();
        cfg.max_outer = 2000;
        cfg.rel_energy_drop = 1e-10;
        const uw2::Solution s = uw2::solve(p, cfg);
        REQUIRE_FALSE(s.report.history.empty());
        CHECK(s.energy < s.report.history.front().objective);
        CHECK(s.hj_residual < 0.1 * s.report.history.front().residual);
        CHECK(uw2::distance(p, cfg) == doctest::Approx(std::sqrt(s.energy)).epsilon(1e-12));
    }

    TEST_CASE("fixed steps that blow up raise StepSizeError")
    {
        const uw2::Problem p = bumps_1d(21, 6, 10.0, 0.03);
        uw2::SolverConfig cfg;
        cfg.tau = 1e3;
        cfg.max_outer = 50;
        CHECK_THROWS_AS(uw2::solve(p, cfg), StepSizeError);
    }

    TEST_CASE("invalid configurations are rejected")
    {
        uw2::SolverConfig cfg;
        cfg.tau = 0.0;
        CHECK_THROWS_AS(cfg.validate(), StructuralError);
        cfg = {};
        cfg.step_growth = 0.5;
        CHECK_THROWS_AS(cfg.validate(), StructuralError);
        uw2::Problem p = bumps_1d(11, 2, 1.0);
        p.alpha = -1.0;
        CHECK_THROWS_AS(p.validate(), StructuralError);
        const GridSpec cell = GridSpec::cell_1d(11, 1.0);
        p = uw2::Problem{DensityField(ScalarField(cell, 1.0)), DensityField(ScalarField(cell, 1.0)), 1.0};
        CHECK_THROWS_AS(p.validate(), StructuralError);
    }
}
