#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "uot/cli/output.hpp"
#include "uot/cli/presets.hpp"
#include "uot/cli/run.hpp"
#include "uot/densities.hpp"
#include "uot/elliptic.hpp"
#include "uot/reference.hpp"
#include "uot/uw1.hpp"
#include "uot/uw2.hpp"

using namespace uot;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double rel(double a, double b)
{
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

ScalarField random_field(const GridSpec& g, std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    ScalarField f(g);
    for (std::size_t k = 0; k < f.size(); ++k)
        f[k] = u(rng);
    return f;
}

struct Instance {
    ScalarField weights;
    double alpha = 1.0;
    OperatorVariant variant = OperatorVariant::SpatiallyDependent;
};

std::vector<Instance> elliptic_instances()
{
    std::mt19937_64 rng(1001);
    std::uniform_int_distribution<int> n1(3, 64), n2(3, 32);
    const double alphas[] = {0.5, 1.0, 100.0};
    std::vector<Instance> out;
    for (int k = 0; k < 50; ++k) {
        const GridSpec g = k % 2 ? GridSpec::node_2d(n2(rng), n2(rng), 1.0, 1.0) : GridSpec::node_1d(n1(rng), 1.0);
        out.push_back({random_field(g, rng, 0.0, 2.0), alphas[k % 3],
                       k % 5 == 4 ? OperatorVariant::SpatiallyIndependent : OperatorVariant::SpatiallyDependent});
    }
    return out;
}

Outcome crit1()
{
    std::mt19937_64 rng(1002);
    double worst = 0.0;
    for (const Instance& in : elliptic_instances()) {
        const ScalarField rhs = random_field(in.weights.grid(), rng, -1.0, 1.0);
        const SolveResult cg = solve(WeightedOperator(in.weights, in.alpha, in.variant), rhs, CgConfig{});
        const std::vector<double> dense =
            reference::dense_solve(reference::assemble(in.weights, in.alpha, in.variant, rhs));
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < dense.size(); ++k) {
            num += (cg.solution[k] - dense[k]) * (cg.solution[k] - dense[k]);
            den += dense[k] * dense[k];
        }
        worst = std::max(worst, std::sqrt(num / den));
    }
    return {worst <= 1e-8, "max rel error " + cli::format_double(worst) + " (limit 1e-8)"};
}

Outcome crit2()
{
    std::mt19937_64 rng(1003);
    double sym = 0.0, cst = 0.0, adj = 0.0;
    for (const Instance& in : elliptic_instances()) {
        const GridSpec& g = in.weights.grid();
        const WeightedOperator op(in.weights, in.alpha, in.variant);
        const ScalarField u = random_field(g, rng, -1.0, 1.0), v = random_field(g, rng, -1.0, 1.0);
        const ScalarField au = op.apply(u), av = op.apply(v);
        const double lhs = inner_product(au.values(), v.values()), rhs = inner_product(u.values(), av.values());
        const double scale = std::sqrt(inner_product(au.values(), au.values()) * inner_product(v.values(), v.values()));
        sym = std::max(sym, std::abs(lhs - rhs) / scale);
        const ScalarField ac = op.apply(ScalarField(g, 1.7));
        for (double x : ac.values())
            cst = std::max(cst, std::abs(x - 1.7 * in.alpha) / (1.7 * in.alpha));

        const GridSpec c = g.dim == 1 ? GridSpec::cell_1d(g.nx, 1.0) : GridSpec::cell_2d(g.nx, g.ny, 1.0, 1.0);
        StaggeredFlux m(c);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (double& x : m.mx_data())
            x = d(rng);
        for (double& x : m.my_data())
            x = d(rng);
        m.zero_boundary();
        const ScalarField phi = random_field(c, rng, -1.0, 1.0);
        const double a = inner_product(staggered_divergence(m).values(), phi.values());
        const double b = -inner_product(m, cell_gradient_adjoint(phi));
        adj = std::max(adj, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
    const double worst = std::max({sym, cst, adj});
    return {worst <= 1e-12, "symmetry " + cli::format_double(sym) + ", constants " + cli::format_double(cst) +
                                ", adjointness " + cli::format_double(adj) + " (limit 1e-12)"};
}

Outcome crit3()
{
    std::mt19937_64 rng(1004);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const GridSpec g = GridSpec::node_1d(k % 2 ? 9 : 5, 1.0, (k / 2) % 2 ? 4 : 2);
        DensityPath path, eta;
        for (int n = 0; n <= g.nt; ++n) {
            path.slices.push_back(random_field(g, rng, 0.2, 1.5));
            const bool interior = n > 0 && n < g.nt;
            eta.slices.push_back(interior ? random_field(g, rng, -1.0, 1.0) : ScalarField(g));
        }
        const uw2::Problem p{DensityField(path.slices.front()), DensityField(path.slices.back()),
                             k % 3 == 0 ? 0.5 : 5.0,
                             k % 4 == 3 ? OperatorVariant::SpatiallyIndependent : OperatorVariant::SpatiallyDependent};
        const uw2::Potentials pot = uw2::compute_potentials(p, path, CgConfig{1e-13});
        const auto dirs = uw2::gradient_step_direction(p, path, pot.phi);
        double analytic = 0.0;
        for (int n = 1; n < g.nt; ++n)
            analytic += -2.0 * g.cell_volume() * g.dt() * inner_product(dirs[n - 1].values(), eta.slices[n].values());
        const auto fd = reference::fd_directional_derivative(
            [&](const DensityPath& q) { return reference::dense_energy(p, q); }, path, eta, {1e-3, 1e-4, 1e-5});
        worst = std::max(worst, std::abs(fd.richardson - analytic) / std::abs(analytic));
    }
    return {worst <= 1e-4, "max rel error " + cli::format_double(worst) + " (limit 1e-4)"};
}

uw2::Problem preset_uw2(const cli::RunConfig& cfg, double alpha, double lx = 0.0)
{
    std::vector<std::string> w;
    const GridSpec g = cfg.solver_grid(lx);
    return {cli::build_density(cfg, cfg.mu0, g, w), cli::build_density(cfg, cfg.mu1, g, w), alpha};
}

std::map<double, uw2::Solution> experiment1_solutions()
{
    const cli::RunConfig cfg = cli::preset("experiment1");
    std::map<double, uw2::Solution> out;
    for (double alpha : cfg.alphas)
        out.emplace(alpha, uw2::solve(preset_uw2(cfg, alpha), cfg.uw2));
    return out;
}

Outcome crit4(const std::map<double, uw2::Solution>& exp1)
{
    const uw2::Solution& s = exp1.at(10.0);
    const double initial = s.report.history.front().residual;
    const double ratio = s.hj_residual / initial;
    return {ratio <= 1e-2, "HJ residual " + cli::format_double(s.hj_residual) + " / initial " +
                               cli::format_double(initial) + " = " + cli::format_double(ratio) + " (limit 1e-2)"};
}

Outcome crit5()
{
    const GridSpec g = GridSpec::cell_1d(101, 1.0);
    const DensityField a = gaussian_density(g, {0.2, 0.5, 0.02, 0.02, 1.0}).density;
    const DensityField b = gaussian_density(g, {0.8, 0.5, 0.02, 0.02, 1.0}).density;
    bool ok = true;
    std::ostringstream detail;
    for (double alpha : {1.0, 10.0}) {
        const auto t0 = std::chrono::steady_clock::now();
        uw1::PdhgConfig cfg = uw1::PdhgConfig::balanced(g);
        cfg.max_iters = 2000000;
        const uw1::Solution s = uw1::solve({a, b, alpha}, cfg);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double exact = reference::two_bump_uw1_analytic(1.0, 0.6, alpha);
        const double perr = std::abs(s.primal - exact) / exact;
        const double below = (s.primal - s.dual.value) / s.primal;
        ok = ok && perr <= 0.02 && below >= 0.0 && below <= 0.03 && secs <= 60.0;
        detail << "alpha=" << alpha << ": primal " << cli::format_double(s.primal) << " vs " << exact << " (rel "
               << cli::format_double(perr) << "), dual below by " << cli::format_double(below) << ", " << secs
               << " s; ";
    }
    return {ok, detail.str() + "limits 2% primal, 3% dual, 60 s per alpha"};
}

Outcome crit6()
{
    const cli::RunConfig cfg = cli::preset("experiment5");
    const GridSpec g = cfg.solver_grid();
    std::vector<std::string> w;
    const DensityField a = cli::build_density(cfg, cfg.mu0, g, w), b = cli::build_density(cfg, cfg.mu1, g, w);
    uw1::PdhgConfig pd = uw1::PdhgConfig::balanced(g);
    pd.max_iters = 1000000;
    bool ok = true;
    std::ostringstream detail;
    for (double alpha : cfg.alphas) {
        const uw1::Solution s = uw1::solve({a, b, alpha, cfg.flux_norm}, pd);
        const double c = total_mass(s.state.source);
        ok = ok && std::abs(c - 0.4) <= 5e-3 && s.report.termination == Termination::Converged;
        detail << "alpha=" << alpha << ": sum c vol " << cli::format_double(c) << " (" << to_string(s.report.termination)
               << "); ";
    }
    return {ok, detail.str() + "limit |. - 0.4| <= 5e-3"};
}

Outcome crit7(const fs::path& scratch)
{
    const cli::RunConfig cfg = cli::preset("experiment2", scratch / "experiment2");
    std::ostringstream log;
    const cli::RunResult r = cli::execute(cfg, log);
    std::map<double, double> spatial, temporal;
    for (const auto& c : r.cases)
        (c.variant == cli::Variant::Spatial ? spatial : temporal)[c.lx] = c.value;
    double lo = 1e300, hi = 0.0;
    for (const auto& [lx, v] : spatial) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double spread = (hi - lo) / lo;
    bool increasing = temporal.size() == 3;
    double prev = -1.0;
    std::ostringstream detail;
    detail << "f(t,x) spread " << cli::format_double(spread) << " (limit 0.05); f(t):";
    for (const auto& [lx, v] : temporal) {
        increasing = increasing && v > prev;
        prev = v;
        detail << " lx=" << lx << ":" << cli::format_double(v);
    }
    return {spatial.size() == 3 && spread <= 0.05 && increasing, detail.str()};
}

Outcome crit8(const std::map<double, uw2::Solution>& exp1)
{
    const cli::RunConfig cfg = cli::preset("experiment1");
    const int mid = cfg.grid.nt / 2;
    const uw2::Problem p = preset_uw2(cfg, 1.0);
    const GridSpec& g = p.grid();
    std::vector<double> dist;
    std::ostringstream detail;
    for (const auto& [alpha, s] : exp1) {
        double acc = 0.0;
        for (std::size_t k = 0; k < g.cells(); ++k) {
            const double lin = 0.5 * (p.mu0[k] + p.mu1[k]);
            acc += (s.path.slices[mid][k] - lin) * (s.path.slices[mid][k] - lin);
        }
        dist.push_back(std::sqrt(acc * g.cell_volume()));
        detail << "alpha=" << alpha << ": " << cli::format_double(dist.back()) << "; ";
    }
    bool ok = dist.size() == 3;
    for (std::size_t k = 1; k < dist.size(); ++k)
        ok = ok && dist[k] < dist[k - 1];
    return {ok, detail.str() + "must strictly decrease"};
}

Outcome crit9()
{
    const GridSpec g1 = GridSpec::node_1d(41, 1.0, 30);
    const DensityField a1 = gaussian_density(g1, {0.3, 0.5, 0.05, 0.05, 1.0}).density;
    const DensityField b1 = gaussian_density(g1, {0.7, 0.5, 0.05, 0.05, 1.4}).density;
    uw2::SolverConfig sc;
    sc.step_control = uw2::StepControl::Backtracking;
    sc.cg.preconditioner = Preconditioner::Jacobi;
    sc.max_outer = 20000;
    sc.rel_energy_drop = 1e-10;
    const double same2 = uw2::solve({a1, a1, 10.0}, sc).energy;
    const double fwd2 = std::sqrt(uw2::solve({a1, b1, 10.0}, sc).energy);
    const double bwd2 = std::sqrt(uw2::solve({b1, a1, 10.0}, sc).energy);

    const GridSpec g2 = GridSpec::cell_2d(24, 24, 1.0, 1.0);
    const DensityField a2 = gaussian_density(g2, {1.0 / 3, 0.5, 0.1, 0.1, 1.0}).density;
    const DensityField b2 = gaussian_density(g2, {2.0 / 3, 0.5, 0.1, 0.1, 1.4}).density;
    uw1::PdhgConfig pd = uw1::PdhgConfig::balanced(g2);
    pd.max_iters = 1000000;
    const double same1 = uw1::solve({a2, a2, 10.0}, pd).primal;
    const double fwd1 = uw1::solve({a2, b2, 10.0}, pd).primal;
    const double bwd1 = uw1::solve({b2, a2, 10.0}, pd).primal;

    const double mass = 1.0;
    const bool ok = same2 <= 1e-6 * mass && same1 <= 1e-6 * mass && rel(fwd2, bwd2) <= 0.01 && rel(fwd1, bwd1) <= 0.01;
    std::ostringstream detail;
    detail << "UW2^2(mu,mu) " << cli::format_double(same2) << ", UW1(mu,mu) " << cli::format_double(same1)
           << ", UW2 swap " << cli::format_double(rel(fwd2, bwd2)) << ", UW1 swap " << cli::format_double(rel(fwd1, bwd1));
    return {ok, detail.str()};
}

std::map<std::string, std::string> csv_files(const fs::path& root)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file() && e.path().extension() == ".csv") {
            std::ifstream in(e.path(), std::ios::binary);
            std::ostringstream s;
            s << in.rdbuf();
            out[fs::relative(e.path(), root).string()] = s.str();
        }
    return out;
}

Outcome crit10(const fs::path& scratch)
{
    std::map<std::string, std::string> runs[2];
    for (int k = 0; k < 2; ++k) {
        const cli::RunConfig cfg = cli::preset("experiment1", scratch / ("determinism_" + std::to_string(k)));
        std::ostringstream log;
        cli::execute(cfg, log);
        runs[k] = csv_files(cfg.resolve(cfg.output.directory));
    }
    const bool ok = !runs[0].empty() && runs[0] == runs[1];
    return {ok, "experiment1: " + std::to_string(runs[0].size()) + " CSV files, " +
                    (ok ? "byte-identical" : "differ")};
}

}  // namespace

int main()
{
    const fs::path scratch = fs::temp_directory_path() / "uot_acceptance";
    fs::remove_all(scratch);
    fs::create_directories(scratch);

    std::map<double, uw2::Solution> exp1;
    const auto shared_start = std::chrono::steady_clock::now();
    exp1 = experiment1_solutions();
    const double shared_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - shared_start).count();

    struct Criterion {
        int id;
        const char* name;
        double limit_seconds;
        std::function<Outcome()> check;
        double extra_seconds = 0.0;
    };
    const std::vector<Criterion> criteria = {
        {1, "elliptic oracle equivalence", 10.0, crit1},
        {2, "operator identities", 60.0, crit2},
        {3, "UW2 gradient correctness", 30.0, crit3},
        {4, "discrete HJ at optimum", 120.0, [&] { return crit4(exp1); }, shared_secs},
        {5, "UW1 two-bump analytic oracle", 120.0, crit5},
        {6, "UW1 mass balance", 120.0, crit6},
        {7, "domain-size insensitivity", 300.0, [&] { return crit7(scratch); }},
        {8, "alpha interpolation", 300.0, [&] { return crit8(exp1); }, shared_secs},
        {9, "zero distance and symmetry", 60.0, crit9},
        {10, "determinism", 1e300, [&] { return crit10(scratch); }},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() + c.extra_seconds;
        const bool in_time = secs <= c.limit_seconds;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail
                  << "; runtime " << secs << " s" << (in_time ? "" : " over the limit") << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
    return failures == 0 ? 0 : 1;
}
