#include "uot/uw2.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace uot::uw2 {

void Problem::validate() const
{
    const GridSpec& g = grid();
    g.validate();
    if (g.layout != GridLayout::NodeCentered)
        throw StructuralError("uw2: densities must live on a node-centred grid");
    if (!(mu1.grid() == g))
        throw StructuralError("uw2: mu0 and mu1 must share a grid");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw StructuralError("uw2: alpha must be positive");
}

double NesterovSchedule::lambda(std::size_t k)
{
    double l = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        l = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * l * l));
    return l;
}

void SolverConfig::validate() const
{
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw StructuralError("uw2: tau must be positive");
    if (max_outer < 1)
        throw StructuralError("uw2: max_outer must be at least 1");
    if (!(rel_energy_drop >= 0.0))
        throw StructuralError("uw2: rel_energy_drop must be nonnegative");
    if (stagnation_window < 1)
        throw StructuralError("uw2: stagnation_window must be at least 1");
    if (!(divergence_factor > 1.0))
        throw StructuralError("uw2: divergence_factor must exceed 1");
    if (!(step_growth >= 1.0))
        throw StructuralError("uw2: step_growth must be at least 1");
    if (!(min_step_ratio > 0.0 && min_step_ratio < 1.0))
        throw StructuralError("uw2: min_step_ratio must lie in (0, 1)");
    if (!(hj_density_floor >= 0.0))
        throw StructuralError("uw2: hj_density_floor must be nonnegative");
    cg.validate();
}

DensityPath linear_path(const Problem& problem)
{
    problem.validate();
    const GridSpec& g = problem.grid();
    const int nt = g.nt;
    DensityPath path;
    path.slices.reserve(nt + 1);
    path.slices.push_back(problem.mu0.field());
    for (int n = 1; n < nt; ++n) {
        const double t = static_cast<double>(n) / nt;
        ScalarField s(g);
        for (std::size_t k = 0; k < s.size(); ++k)
            s[k] = std::max(0.0, problem.mu0[k] + t * (problem.mu1[k] - problem.mu0[k]));
        path.slices.push_back(std::move(s));
    }
    path.slices.push_back(problem.mu1.field());
    return path;
}

namespace {

void check_path(const Problem& problem, const DensityPath& path)
{
    const GridSpec& g = problem.grid();
    if (path.slices.size() != static_cast<std::size_t>(g.nt) + 1)
        throw StructuralError("uw2: path must have nt+1 slices");
    for (const auto& s : path.slices)
        if (!s.grid().same_shape(g))
            throw StructuralError("uw2: path slice grid mismatch");
}

}  // namespace

Potentials compute_potentials(const Problem& problem, const DensityPath& path, const CgConfig& cg,
                              const std::vector<ScalarField>* warm)
{
    problem.validate();
    check_path(problem, path);
    const GridSpec& g = problem.grid();
    const int nt = g.nt;
    const double inv_dt = 1.0 / g.dt();

    Potentials out;
    out.phi.reserve(nt);
    double acc = 0.0;
    for (int n = 0; n < nt; ++n) {
        const ScalarField& a = path.slices[n];
        const ScalarField& b = path.slices[n + 1];
        ScalarField rhs(g);
        for (std::size_t k = 0; k < rhs.size(); ++k)
            rhs[k] = (b[k] - a[k]) * inv_dt;

        WeightedOperator op(a, problem.alpha, problem.variant);
        const ScalarField* guess = (warm && warm->size() == static_cast<std::size_t>(nt)) ? &(*warm)[n] : nullptr;
        SolveResult r = solve(op, rhs, cg, guess);
        out.cg_iterations += r.iterations;

        // <Delta, Phi> with Delta = rhs * dt.
        acc += inner_product(rhs.values(), r.solution.values()) * g.dt();
        out.phi.push_back(std::move(r.solution));
    }
    out.energy = g.cell_volume() * acc;
    return out;
}

double energy(const Problem& problem, const DensityPath& path, const CgConfig& cg)
{
    return compute_potentials(problem, path, cg).energy;
}

std::vector<ScalarField> gradient_step_direction(const Problem& problem, const DensityPath& path,
                                                 const std::vector<ScalarField>& potentials)
{
    const GridSpec& g = problem.grid();
    check_path(problem, path);
    if (potentials.size() != static_cast<std::size_t>(g.nt))
        throw StructuralError("uw2: need one potential per time interval");

    const double inv_dt = 1.0 / g.dt();
    std::vector<ScalarField> dirs;
    dirs.reserve(g.nt > 1 ? g.nt - 1 : 0);
    for (int n = 1; n < g.nt; ++n) {
        const ScalarField& cur = potentials[n];
        const ScalarField& prev = potentials[n - 1];
        ScalarField hj = hj_quadratic_field(cur);
        for (std::size_t k = 0; k < hj.size(); ++k)
            hj[k] = (cur[k] - prev[k]) * inv_dt + 0.5 * hj[k];
        dirs.push_back(std::move(hj));
    }
    return dirs;
}

double hj_residual(const DensityPath& path, const std::vector<ScalarField>& directions, double floor)
{
    double worst = 0.0;
    for (std::size_t n = 0; n < directions.size(); ++n) {
        const ScalarField& mu = path.slices[n + 1];
        const ScalarField& d = directions[n];
        for (std::size_t k = 0; k < d.size(); ++k)
            if (mu[k] > floor)
                worst = std::max(worst, std::abs(d[k]));
    }
    return worst;
}

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// x + (tau/2) * direction on interior slices, clipped at zero.
DensityPath gradient_step(const DensityPath& x, const std::vector<ScalarField>& dirs, double tau)
{
    DensityPath out = x;
    const double step = 0.5 * tau;
    for (std::size_t n = 1; n + 1 < out.slices.size(); ++n) {
        ScalarField& s = out.slices[n];
        const ScalarField& d = dirs[n - 1];
        for (std::size_t q = 0; q < s.size(); ++q)
            s[q] = std::max(0.0, s[q] + step * d[q]);
    }
    return out;
}

// (1 - gamma) * half + gamma * anchor on interior slices.
DensityPath momentum_step(const DensityPath& half, const DensityPath& anchor, double gamma, bool reproject)
{
    DensityPath out = half;
    for (std::size_t n = 1; n + 1 < out.slices.size(); ++n) {
        ScalarField& s = out.slices[n];
        const ScalarField& h = half.slices[n];
        const ScalarField& a = anchor.slices[n];
        for (std::size_t q = 0; q < s.size(); ++q) {
            const double v = (1.0 - gamma) * h[q] + gamma * a[q];
            s[q] = reproject ? std::max(0.0, v) : v;
        }
    }
    return out;
}

class Tracker {
public:
    Tracker(const SolverConfig& cfg, Solution& sol) : cfg_(cfg), sol_(sol)
    {
        sol_.energy = std::numeric_limits<double>::infinity();
    }

    void offer(const DensityPath& path, const Potentials& pot)
    {
        if (pot.energy < sol_.energy) {
            sol_.energy = pot.energy;
            sol_.path = path;
            sol_.potentials = pot.phi;
        }
    }

    // Returns true once the energy has stagnated for the configured window.
    bool stagnated(double e)
    {
        if (have_prev_)
            quiet_ = std::abs(e - prev_) <= cfg_.rel_energy_drop * e0_ ? quiet_ + 1 : 0;
        prev_ = e;
        have_prev_ = true;
        return quiet_ >= cfg_.stagnation_window;
    }

    void set_initial(double e0) { e0_ = e0; }
    double initial() const { return e0_; }

private:
    const SolverConfig& cfg_;
    Solution& sol_;
    double e0_ = 0.0;
    double prev_ = 0.0;
    bool have_prev_ = false;
    std::size_t quiet_ = 0;
};

void require_finite(double e)
{
    if (!std::isfinite(e))
        throw StepSizeError("uw2: energy is not finite; reduce tau");
}

Termination run_fixed(const Problem& problem, const SolverConfig& cfg, Solution& sol)
{
    const int nt = problem.grid().nt;
    Tracker track(cfg, sol);
    DensityPath current = linear_path(problem);
    DensityPath half_prev = current;
    std::vector<ScalarField> warm;

    for (std::size_t k = 0; k < cfg.max_outer; ++k) {
        Potentials pot = compute_potentials(problem, current, cfg.cg, cfg.cg.warm_start ? &warm : nullptr);
        sol.report.cg_iterations += pot.cg_iterations;
        sol.report.iterations = k + 1;
        const double e = pot.energy;
        require_finite(e);

        std::vector<ScalarField> dirs = gradient_step_direction(problem, current, pot.phi);
        sol.report.history.push_back({k, e, hj_residual(current, dirs, cfg.hj_density_floor), kNaN, kNaN});
        track.offer(current, pot);

        if (k == 0) {
            track.set_initial(e);
            if (e <= 0.0)
                return Termination::TrivialInput;
        } else if (e > cfg.divergence_factor * track.initial()) {
            std::ostringstream msg;
            msg << "uw2: energy grew from " << track.initial() << " to " << e << " at iteration " << k
                << "; reduce tau (currently " << cfg.tau << ")";
            throw StepSizeError(msg.str());
        }
        if (track.stagnated(e) || nt < 2)
            return Termination::Converged;
        warm = std::move(pot.phi);

        // The first step uses gamma_1 = 0, a plain projected gradient step.
        const double gamma = NesterovSchedule::gamma(k + 1);
        DensityPath half = gradient_step(current, dirs, cfg.tau);
        const DensityPath& anchor = cfg.momentum == MomentumForm::Accelerated ? half_prev : current;
        DensityPath next = momentum_step(half, anchor, gamma, cfg.reproject_after_momentum);
        half_prev = std::move(half);
        current = std::move(next);
    }
    sol.final_tau = cfg.tau;
    return Termination::MaxIterations;
}

Termination run_backtracking(const Problem& problem, const SolverConfig& cfg, Solution& sol)
{
    const GridSpec& g = problem.grid();
    const double metric = 2.0 * g.cell_volume() * g.dt();
    const double min_tau = cfg.tau * cfg.min_step_ratio;

    Tracker track(cfg, sol);
    DensityPath y = linear_path(problem);
    Potentials pot_y = compute_potentials(problem, y, cfg.cg);
    sol.report.cg_iterations += pot_y.cg_iterations;
    require_finite(pot_y.energy);
    track.set_initial(pot_y.energy);
    track.offer(y, pot_y);
    if (pot_y.energy <= 0.0) {
        sol.report.history.push_back({0, pot_y.energy, 0.0, kNaN, kNaN});
        sol.report.iterations = 1;
        return Termination::TrivialInput;
    }

    DensityPath x_prev = y;
    double e_prev = pot_y.energy;
    double tau = cfg.tau;
    std::size_t momentum_k = 1;

    for (std::size_t k = 0; k < cfg.max_outer; ++k) {
        sol.report.iterations = k + 1;
        std::vector<ScalarField> dirs = gradient_step_direction(problem, y, pot_y.phi);
        const double hj = hj_residual(y, dirs, cfg.hj_density_floor);

        DensityPath x;
        Potentials pot_x;
        for (;;) {
            x = gradient_step(y, dirs, tau);
            // Sufficient decrease in the sum-of-squares metric scaled by 2 vol dt.
            double lin = 0.0, sq = 0.0;
            for (std::size_t n = 1; n + 1 < x.slices.size(); ++n) {
                const ScalarField& a = x.slices[n];
                const ScalarField& b = y.slices[n];
                const ScalarField& d = dirs[n - 1];
                for (std::size_t q = 0; q < a.size(); ++q) {
                    const double diff = a[q] - b[q];
                    lin += d[q] * diff;
                    sq += diff * diff;
                }
            }
            // A trial whose energy cannot be evaluated is treated like a failed test.
            bool evaluated = true;
            try {
                pot_x = compute_potentials(problem, x, cfg.cg, cfg.cg.warm_start ? &pot_y.phi : nullptr);
                sol.report.cg_iterations += pot_x.cg_iterations;
            } catch (const ConvergenceError&) {
                evaluated = false;
            }
            const double bound = pot_y.energy - metric * (lin - sq / tau);
            const double slack = 1e-9 * std::abs(pot_y.energy);
            if (evaluated && std::isfinite(pot_x.energy) && pot_x.energy <= bound + slack)
                break;
            tau *= 0.5;
            if (tau < min_tau)
                break;
        }
        if (tau < min_tau) {
            // No step can decrease the energy beyond solver precision.
            sol.final_tau = tau;
            return Termination::Converged;
        }
        sol.report.history.push_back({k, pot_x.energy, hj, kNaN, kNaN});
        track.offer(x, pot_x);
        if (track.stagnated(pot_x.energy) || g.nt < 2) {
            sol.final_tau = tau;
            return Termination::Converged;
        }

        double gamma = NesterovSchedule::gamma(momentum_k);
        ++momentum_k;
        if (cfg.restart_on_increase && pot_x.energy > e_prev) {
            gamma = 0.0;
            momentum_k = 1;
        }
        e_prev = pot_x.energy;

        const DensityPath& anchor = cfg.momentum == MomentumForm::Accelerated ? x_prev : y;
        y = momentum_step(x, anchor, gamma, cfg.reproject_after_momentum);
        x_prev = std::move(x);
        pot_y = gamma == 0.0 ? std::move(pot_x)
                             : compute_potentials(problem, y, cfg.cg, cfg.cg.warm_start ? &pot_x.phi : nullptr);
        if (gamma != 0.0)
            sol.report.cg_iterations += pot_y.cg_iterations;
        require_finite(pot_y.energy);
        tau = std::min(cfg.tau, tau * cfg.step_growth);
    }
    sol.final_tau = tau;
    return Termination::MaxIterations;
}

}  // namespace

Solution solve(const Problem& problem, const SolverConfig& cfg)
{
    problem.validate();
    cfg.validate();
    const auto start = Clock::now();

    Solution sol;
    sol.final_tau = cfg.tau;
    sol.report.termination = cfg.step_control == StepControl::Fixed ? run_fixed(problem, cfg, sol)
                                                                     : run_backtracking(problem, cfg, sol);

    // Residual of the returned iterate, with potentials solved afresh.
    if (problem.grid().nt > 1) {
        const auto dirs = gradient_step_direction(problem, sol.path, sol.potentials);
        sol.hj_residual = hj_residual(sol.path, dirs, cfg.hj_density_floor);
    }
    sol.report.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return sol;
}

double distance(const Problem& problem, const SolverConfig& cfg)
{
    return std::sqrt(std::max(0.0, solve(problem, cfg).energy));
}

}  // namespace uot::uw2
