#include "uot/cli/selfcheck.hpp"

#include "uot/cli/output.hpp"

#include <cmath>
#include <random>
#include <string>

#include "uot/densities.hpp"
#include "uot/elliptic.hpp"
#include "uot/uw1.hpp"
#include "uot/uw2.hpp"

#ifdef UOT_WITH_REFERENCE
#include "uot/reference.hpp"
#endif

namespace uot::cli {

#ifdef UOT_WITH_REFERENCE

namespace {

bool report(std::ostream& out, const std::string& name, bool ok, double measured, double limit)
{
    out << (ok ? "PASS " : "FAIL ") << name << " measured=" << measured << " limit=" << limit << '\n';
    return ok;
}

double elliptic_check(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 2.0);
    double worst = 0.0;
    for (int trial = 0; trial < 6; ++trial) {
        const GridSpec g = trial % 2 ? GridSpec::node_2d(9, 7, 1.0, 1.0) : GridSpec::node_1d(33, 1.0);
        ScalarField w(g), rhs(g);
        for (std::size_t k = 0; k < w.size(); ++k) {
            w[k] = u(rng);
            rhs[k] = u(rng) - 1.0;
        }
        const double alpha = trial % 3 == 0 ? 0.5 : 100.0;
        const auto variant = trial % 4 == 3 ? OperatorVariant::SpatiallyIndependent : OperatorVariant::SpatiallyDependent;
        const SolveResult cg = solve(WeightedOperator(w, alpha, variant), rhs, CgConfig{});
        const std::vector<double> dense = reference::dense_solve(reference::assemble(w, alpha, variant, rhs));
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < dense.size(); ++k) {
            num += (cg.solution[k] - dense[k]) * (cg.solution[k] - dense[k]);
            den += dense[k] * dense[k];
        }
        worst = std::max(worst, std::sqrt(num / den));
    }
    return worst;
}

double gradient_check(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.5, 1.5);
    const GridSpec g = GridSpec::node_1d(7, 1.0, 3);
    std::vector<double> a(g.cells()), b(g.cells());
    for (std::size_t k = 0; k < a.size(); ++k) {
        a[k] = u(rng);
        b[k] = u(rng);
    }
    uw2::Problem p{DensityField(g, a), DensityField(g, b), 2.0};
    DensityPath path = uw2::linear_path(p);
    DensityPath eta = path;
    for (std::size_t n = 0; n < eta.slices.size(); ++n)
        for (std::size_t k = 0; k < eta.slices[n].size(); ++k) {
            path.slices[n][k] += (n == 0 || n + 1 == eta.slices.size()) ? 0.0 : 0.2 * (u(rng) - 1.0);
            eta.slices[n][k] = (n == 0 || n + 1 == eta.slices.size()) ? 0.0 : u(rng) - 1.0;
        }
    const auto pot = uw2::compute_potentials(p, path, CgConfig{1e-13});
    const auto dirs = uw2::gradient_step_direction(p, path, pot.phi);
    double analytic = 0.0;
    for (std::size_t n = 1; n + 1 < path.slices.size(); ++n)
        for (std::size_t k = 0; k < eta.slices[n].size(); ++k)
            analytic += -2.0 * g.cell_volume() * g.dt() * dirs[n - 1][k] * eta.slices[n][k];
    const auto fd = reference::fd_directional_derivative(
        [&](const DensityPath& q) { return reference::dense_energy(p, q); }, path, eta, {1e-3, 5e-4});
    return std::abs(fd.richardson - analytic) / std::abs(analytic);
}

double two_bump_check(double alpha)
{
    const GridSpec g = GridSpec::cell_1d(101, 1.0);
    const auto a = gaussian_density(g, {0.2, 0.5, 0.02, 0.02, 1.0}).density;
    const auto b = gaussian_density(g, {0.8, 0.5, 0.02, 0.02, 1.0}).density;
    uw1::Problem p{a, b, alpha};
    uw1::PdhgConfig cfg = uw1::PdhgConfig::balanced(g);
    cfg.max_iters = 2000000;
    const uw1::Solution s = uw1::solve(p, cfg);
    const double exact = reference::two_bump_uw1_analytic(1.0, 0.6, alpha);
    return std::abs(s.primal - exact) / exact;
}

}  // namespace

int selfcheck(std::ostream& out)
{
    std::mt19937_64 rng(20240607);
    bool ok = true;
    const double ell = elliptic_check(rng);
    ok &= report(out, "elliptic solve matches dense factorization", ell <= 1e-8, ell, 1e-8);
    const double grad = gradient_check(rng);
    ok &= report(out, "energy gradient matches finite differences", grad <= 1e-4, grad, 1e-4);
    for (double alpha : {1.0, 10.0}) {
        const double err = two_bump_check(alpha);
        ok &= report(out, "two-bump L1 value, alpha=" + format_double(alpha), err <= 0.02, err, 0.02);
    }
    return ok ? 0 : 2;
}

#else

int selfcheck(std::ostream& out)
{
    out << "selfcheck unavailable: built without the reference oracles\n";
    return 2;
}

#endif

}  // namespace uot::cli
