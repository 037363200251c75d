#pragma once

#include <cstddef>
#include <vector>

#include "uot/elliptic.hpp"
#include "uot/grid.hpp"
#include "uot/report.hpp"

namespace uot::uw2 {

/// Dynamic L2 problem between mu0 and mu1 on a node-centred grid; the number
/// of time intervals comes from grid().nt.
struct Problem {
    DensityField mu0;
    DensityField mu1;
    double alpha = 1.0;
    OperatorVariant variant = OperatorVariant::SpatiallyDependent;

    const GridSpec& grid() const { return mu0.grid(); }
    void validate() const;
};

/// lambda_0 = 0, lambda_k = (1 + sqrt(1 + 4 lambda_{k-1}^2)) / 2,
/// gamma_k = (1 - lambda_k) / lambda_{k+1}.
struct NesterovSchedule {
    static double lambda(std::size_t k);
    static double gamma(std::size_t k) { return (1.0 - lambda(k)) / lambda(k + 1); }
};

/// How the momentum combination picks its second point.
///   Accelerated: mu^{k+1} = (1 - g) mu^{k+1/2} + g mu^{k-1/2}  (standard Nesterov)
///   CurrentAnchor: mu^{k+1} = (1 - g) mu^{k+1/2} + g mu^k
enum class MomentumForm { Accelerated, CurrentAnchor };

/// Fixed: every step uses tau and divergence aborts the solve.
/// Backtracking: tau is the largest step tried; a step is halved until the
/// projected-gradient sufficient-decrease test passes, and grows back by
/// step_growth after each accepted step.
enum class StepControl { Fixed, Backtracking };

struct SolverConfig {
    double tau = 0.1;
    std::size_t max_outer = 5000;
    /// Stop once |E_k - E_{k-1}| <= rel_energy_drop * E_0 on each of the last
    /// stagnation_window iterations.
    double rel_energy_drop = 1e-7;
    std::size_t stagnation_window = 10;
    bool reproject_after_momentum = true;
    MomentumForm momentum = MomentumForm::Accelerated;
    StepControl step_control = StepControl::Fixed;
    double step_growth = 1.25;
    /// Backtracking stops (as converged) once the step falls below tau * min_step_ratio.
    double min_step_ratio = 1e-12;
    /// Backtracking only: drop the momentum when the energy goes up.
    bool restart_on_increase = true;
    /// Energy above divergence_factor * E_0 aborts with StepSizeError.
    double divergence_factor = 10.0;
    /// Cells with density at or below this are skipped by the HJ residual.
    double hj_density_floor = 1e-6;
    CgConfig cg;

    void validate() const;
};

/// Phi^n solving L~_{mu^n} Phi^n = (mu^{n+1} - mu^n)/dt for n = 0..nt-1.
struct Potentials {
    std::vector<ScalarField> phi;
    double energy = 0.0;
    std::size_t cg_iterations = 0;
};

struct Solution {
    DensityPath path;
    std::vector<ScalarField> potentials;
    double energy = 0.0;
    /// hj_residual of the returned path.
    double hj_residual = 0.0;
    /// Last accepted step (equals tau for fixed steps).
    double final_tau = 0.0;
    SolveReport report;
};

/// Linear interpolation between the endpoints, clipped at zero.
DensityPath linear_path(const Problem& problem);

Potentials compute_potentials(const Problem& problem, const DensityPath& path, const CgConfig& cg,
                              const std::vector<ScalarField>* warm = nullptr);

/// (vol/dt) * sum_n <Delta^n, L~^{-1} Delta^n>, Delta^n = mu^{n+1} - mu^n.
double energy(const Problem& problem, const DensityPath& path, const CgConfig& cg = {});

/// For interior slices n = 1..nt-1 (returned at index n-1):
///   (Phi^n - Phi^{n-1})/dt + 1/2 <Phi^n, L_{e_i} Phi^n>.
/// The energy gradient with respect to mu^n is -2 vol dt times this.
std::vector<ScalarField> gradient_step_direction(const Problem& problem, const DensityPath& path,
                                                 const std::vector<ScalarField>& potentials);

/// Largest |direction| over interior slices where the density exceeds `floor`.
double hj_residual(const DensityPath& path, const std::vector<ScalarField>& directions, double floor);

/// Projected Nesterov descent from the linear path. Returns the best-energy
/// iterate. Throws StepSizeError on divergence.
Solution solve(const Problem& problem, const SolverConfig& cfg = {});

/// sqrt of the converged energy.
double distance(const Problem& problem, const SolverConfig& cfg = {});

}  // namespace uot::uw2
