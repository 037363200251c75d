#include "uot/uw1.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "uot/densities.hpp"

namespace uot::uw1 {

void Problem::validate() const
{
    const GridSpec& g = grid();
    g.validate();
    if (g.layout != GridLayout::CellCentered)
        throw StructuralError("uw1: densities must live on a cell-centred grid");
    if (!(mu1.grid() == g))
        throw StructuralError("uw1: mu0 and mu1 must share a grid");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw StructuralError("uw1: alpha must be positive");
}

double Problem::mass_difference() const
{
    return total_mass(mu1) - total_mass(mu0);
}

State State::zero(const Problem& problem)
{
    problem.validate();
    const GridSpec& g = problem.grid();
    State s{StaggeredFlux(g), ScalarField(g), ScalarField(g)};
    if (problem.variant == SourceVariant::SpatiallyIndependent) {
        const double c = problem.mass_difference() / g.domain_volume();
        for (std::size_t k = 0; k < s.source.size(); ++k)
            s.source[k] = c;
    }
    return s;
}

void PdhgConfig::validate() const
{
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw StructuralError("pdhg: lambda must be positive");
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw StructuralError("pdhg: tau must be positive");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw StructuralError("pdhg: epsilon must be nonnegative");
    if (max_iters < 1)
        throw StructuralError("pdhg: max_iters must be at least 1");
    if (!(residual_tolerance >= 0.0) || !(gap_tolerance >= 0.0))
        throw StructuralError("pdhg: tolerances must be nonnegative");
    if (check_every < 1)
        throw StructuralError("pdhg: check_every must be at least 1");
}

double operator_norm_squared_bound(const GridSpec& grid)
{
    double b = 4.0 / (grid.dx() * grid.dx()) + 1.0;
    if (grid.dim == 2)
        b += 4.0 / (grid.dy() * grid.dy());
    return b;
}

PdhgConfig PdhgConfig::balanced(const GridSpec& grid, double safety)
{
    if (!(safety > 0.0 && safety <= 1.0))
        throw StructuralError("pdhg: safety factor must lie in (0, 1]");
    PdhgConfig cfg;
    cfg.lambda = cfg.tau = safety / std::sqrt(operator_norm_squared_bound(grid));
    return cfg;
}

double shrink(double u, double t)
{
    if (u > t)
        return u - t;
    if (u < -t)
        return u + t;
    return 0.0;
}

void shrink_l1(std::span<double> u, double t)
{
    for (double& v : u)
        v = shrink(v, t);
}

void shrink_l2(std::span<double> u, double t)
{
    double nrm = 0.0;
    for (double v : u)
        nrm += v * v;
    nrm = std::sqrt(nrm);
    const double f = nrm > t ? 1.0 - t / nrm : 0.0;
    for (double& v : u)
        v *= f;
}

namespace {

// Average of the four y-faces around x-face (i,j), i.e. of the two cells it separates.
double y_at_x_face(const std::vector<double>& my, const GridSpec& g, int i, int j)
{
    const auto at = [&](int a, int b) { return my[static_cast<std::size_t>(a) * (g.ny + 1) + b]; };
    return 0.25 * (at(i - 1, j) + at(i - 1, j + 1) + at(i, j) + at(i, j + 1));
}

double x_at_y_face(const std::vector<double>& mx, const GridSpec& g, int i, int j)
{
    const auto at = [&](int a, int b) { return mx[static_cast<std::size_t>(a) * g.ny + b]; };
    return 0.25 * (at(i, j - 1) + at(i + 1, j - 1) + at(i, j) + at(i + 1, j));
}

// shrink applied to the interior faces of u; boundary faces stay zero.
void shrink_flux(StaggeredFlux& u, double t, FluxNorm norm)
{
    const GridSpec& g = u.grid();
    if (norm == FluxNorm::L1 || g.dim == 1) {
        for (int i = 1; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j)
                u.mx(i, j) = shrink(u.mx(i, j), t);
        if (g.dim == 2)
            for (int i = 0; i < g.nx; ++i)
                for (int j = 1; j < g.ny; ++j)
                    u.my(i, j) = shrink(u.my(i, j), t);
        return;
    }
    const std::vector<double> mx = u.mx_data();
    const std::vector<double> my = u.my_data();
    for (int i = 1; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double a = mx[u.mx_index(i, j)];
            const double b = y_at_x_face(my, g, i, j);
            const double n = std::hypot(a, b);
            u.mx(i, j) = n > t ? a * (1.0 - t / n) : 0.0;
        }
    for (int i = 0; i < g.nx; ++i)
        for (int j = 1; j < g.ny; ++j) {
            const double a = my[u.my_index(i, j)];
            const double b = x_at_y_face(mx, g, i, j);
            const double n = std::hypot(a, b);
            u.my(i, j) = n > t ? a * (1.0 - t / n) : 0.0;
        }
}

double flux_norm_sum(const StaggeredFlux& m, FluxNorm norm)
{
    const GridSpec& g = m.grid();
    double acc = 0.0;
    if (norm == FluxNorm::L1 || g.dim == 1) {
        for (double v : m.mx_data())
            acc += std::abs(v);
        for (double v : m.my_data())
            acc += std::abs(v);
        return acc;
    }
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double a = 0.5 * (m.mx(i, j) + m.mx(i + 1, j));
            const double b = 0.5 * (m.my(i, j) + m.my(i, j + 1));
            acc += std::hypot(a, b);
        }
    return acc;
}

// Largest dual norm of the face gradient.
double max_dual_grad(const StaggeredFlux& grad, FluxNorm norm)
{
    const GridSpec& g = grad.grid();
    double worst = 0.0;
    if (norm == FluxNorm::L1 || g.dim == 1) {
        for (double v : grad.mx_data())
            worst = std::max(worst, std::abs(v));
        for (double v : grad.my_data())
            worst = std::max(worst, std::abs(v));
        return worst;
    }
    for (int i = 1; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            worst = std::max(worst, std::hypot(grad.mx(i, j), y_at_x_face(grad.my_data(), g, i, j)));
    for (int i = 0; i < g.nx; ++i)
        for (int j = 1; j < g.ny; ++j)
            worst = std::max(worst, std::hypot(grad.my(i, j), x_at_y_face(grad.mx_data(), g, i, j)));
    return worst;
}

void check_state(const Problem& problem, const State& state)
{
    const GridSpec& g = problem.grid();
    if (!state.flux.grid().same_shape(g) || !state.source.grid().same_shape(g) || !state.phi.grid().same_shape(g))
        throw StructuralError("uw1: state does not match the problem grid");
}

}  // namespace

void pdhg_step(const Problem& problem, State& state, const PdhgConfig& cfg)
{
    check_state(problem, state);
    const GridSpec& g = problem.grid();
    const double damp = 1.0 / (1.0 + cfg.epsilon * cfg.lambda);

    const StaggeredFlux m_old = state.flux;
    StaggeredFlux grad = cell_gradient_adjoint(state.phi);
    StaggeredFlux& m = state.flux;
    for (std::size_t k = 0; k < m.mx_data().size(); ++k)
        m.mx_data()[k] += cfg.lambda * grad.mx_data()[k];
    for (std::size_t k = 0; k < m.my_data().size(); ++k)
        m.my_data()[k] += cfg.lambda * grad.my_data()[k];
    shrink_flux(m, cfg.lambda, problem.norm);
    for (double& v : m.mx_data())
        v *= damp;
    for (double& v : m.my_data())
        v *= damp;

    const bool free_source = problem.variant == SourceVariant::SpatiallyDependent;
    const ScalarField c_old = state.source;
    if (free_source) {
        const double t = cfg.lambda / problem.alpha;
        for (std::size_t k = 0; k < state.source.size(); ++k)
            state.source[k] = damp * shrink(state.source[k] + cfg.lambda * state.phi[k], t);
    }

    StaggeredFlux bar(g);
    for (std::size_t k = 0; k < bar.mx_data().size(); ++k)
        bar.mx_data()[k] = 2.0 * m.mx_data()[k] - m_old.mx_data()[k];
    for (std::size_t k = 0; k < bar.my_data().size(); ++k)
        bar.my_data()[k] = 2.0 * m.my_data()[k] - m_old.my_data()[k];
    const ScalarField div = staggered_divergence(bar);
    bool finite = true;
    for (std::size_t k = 0; k < state.phi.size(); ++k) {
        const double c_bar = 2.0 * state.source[k] - c_old[k];
        state.phi[k] += cfg.tau * (div[k] - c_bar + problem.mu1[k] - problem.mu0[k]);
        finite = finite && std::isfinite(state.phi[k]);
    }
    if (!finite)
        throw StepSizeError("uw1: iterates are no longer finite; reduce lambda or tau");
}

double primal_value(const State& state, double alpha, FluxNorm norm)
{
    const GridSpec& g = state.source.grid();
    double src = 0.0;
    for (double v : state.source.values())
        src += std::abs(v);
    return g.cell_volume() * (flux_norm_sum(state.flux, norm) + src / alpha);
}

ScalarField constraint_residual(const Problem& problem, const State& state)
{
    check_state(problem, state);
    ScalarField r = staggered_divergence(state.flux);
    for (std::size_t k = 0; k < r.size(); ++k)
        r[k] += problem.mu1[k] - problem.mu0[k] - state.source[k];
    return r;
}

double residual_norm(const Problem& problem, const State& state)
{
    const ScalarField r = constraint_residual(problem, state);
    double acc = 0.0;
    for (double v : r.values())
        acc += v * v;
    return std::sqrt(acc / static_cast<double>(r.size()));
}

double feasible_primal_value(const Problem& problem, const State& state)
{
    if (problem.variant == SourceVariant::SpatiallyIndependent)
        return primal_value(state, problem.alpha, problem.norm);
    State feasible{state.flux, constraint_residual(problem, state), state.phi};
    for (std::size_t k = 0; k < feasible.source.size(); ++k)
        feasible.source[k] += state.source[k];
    return primal_value(feasible, problem.alpha, problem.norm);
}

DualCertificate dual_value_certificate(const ScalarField& phi, const Problem& problem)
{
    problem.validate();
    const GridSpec& g = problem.grid();
    if (!phi.grid().same_shape(g))
        throw StructuralError("uw1: potential does not match the problem grid");

    DualCertificate out;
    ScalarField p = phi;
    const bool free_source = problem.variant == SourceVariant::SpatiallyDependent;
    if (free_source) {
        const double cap = 1.0 / problem.alpha;
        for (std::size_t k = 0; k < p.size(); ++k) {
            out.max_phi_alpha = std::max(out.max_phi_alpha, std::abs(p[k]) * problem.alpha);
            p[k] = std::clamp(p[k], -cap, cap);
        }
    }
    out.max_grad = max_dual_grad(cell_gradient_adjoint(phi), problem.norm);
    const double clipped_grad = max_dual_grad(cell_gradient_adjoint(p), problem.norm);
    if (clipped_grad > 1.0)
        out.scale = 1.0 / clipped_grad;

    // The pinned source is part of the data in the spatially independent case.
    const double c_bar = free_source ? 0.0 : problem.mass_difference() / g.domain_volume();
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k)
        acc += p[k] * (problem.mu1[k] - problem.mu0[k] - c_bar);
    out.value = out.scale * acc * g.cell_volume();
    if (!free_source)
        out.value += std::abs(problem.mass_difference()) / problem.alpha;
    return out;
}

Solution solve(const Problem& problem, const PdhgConfig& cfg)
{
    problem.validate();
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();

    Solution sol;
    sol.state = State::zero(problem);
    auto diagnose = [&](std::size_t it) {
        sol.primal = primal_value(sol.state, problem.alpha, problem.norm);
        sol.feasible_primal = feasible_primal_value(problem, sol.state);
        sol.dual = dual_value_certificate(sol.state.phi, problem);
        sol.residual = residual_norm(problem, sol.state);
        const double scale = std::max(std::abs(sol.feasible_primal), std::numeric_limits<double>::min());
        sol.gap = std::abs(sol.feasible_primal - sol.dual.value) / scale;
        sol.report.history.push_back({it, sol.primal, sol.residual, sol.gap, sol.dual.value});
    };

    double data = 0.0;
    for (std::size_t k = 0; k < problem.mu0.size(); ++k)
        data = std::max(data, std::abs(problem.mu1[k] - problem.mu0[k]));
    if (data == 0.0) {
        diagnose(0);
        sol.report.termination = Termination::TrivialInput;
    } else {
        sol.report.termination = Termination::MaxIterations;
        for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
            pdhg_step(problem, sol.state, cfg);
            sol.report.iterations = it;
            if (it % cfg.check_every == 0 || it == cfg.max_iters) {
                diagnose(it);
                if (sol.residual <= cfg.residual_tolerance && sol.gap <= cfg.gap_tolerance) {
                    sol.report.termination = Termination::Converged;
                    break;
                }
            }
        }
    }
    sol.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return sol;
}

}  // namespace uot::uw1
