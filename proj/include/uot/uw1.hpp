#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uot/grid.hpp"
#include "uot/report.hpp"

namespace uot::uw1 {

/// L1: |mx| + |my| per face. L2: Euclidean norm of the flux after averaging
/// the face values to cell centres.
enum class FluxNorm { L1, L2 };

/// SpatiallyDependent: the source c is a free cell field.
/// SpatiallyIndependent: c is pinned to the uniform field carrying the mass
/// difference, so only the flux is optimised.
enum class SourceVariant { SpatiallyDependent, SpatiallyIndependent };

/// inf ||m|| + (1/alpha) ||c||  s.t.  mu1 - mu0 + div m - c = 0 on a
/// cell-centred grid with zero-flux boundary.
struct Problem {
    DensityField mu0;
    DensityField mu1;
    double alpha = 1.0;
    FluxNorm norm = FluxNorm::L1;
    SourceVariant variant = SourceVariant::SpatiallyDependent;

    const GridSpec& grid() const { return mu0.grid(); }
    void validate() const;
    /// mass(mu1) - mass(mu0).
    double mass_difference() const;
};

struct State {
    StaggeredFlux flux;
    ScalarField source;
    ScalarField phi;

    /// All-zero state on the problem grid; for the spatially independent
    /// variant the source starts at its pinned value.
    static State zero(const Problem& problem);
};

struct PdhgConfig {
    double lambda = 1e-4;  // primal step
    double tau = 0.01;     // dual step
    double epsilon = 1e-3; // elastic-net weight
    std::size_t max_iters = 200000;
    /// Stop when the RMS constraint residual and the relative gap are both
    /// below these.
    double residual_tolerance = 1e-4;
    double gap_tolerance = 1e-2;
    /// Diagnostics (and the stopping test) run every check_every iterations.
    std::size_t check_every = 100;

    void validate() const;

    /// lambda = tau = safety / ||K|| with ||K||^2 bounded by 4/dx^2 (+ 4/dy^2) + 1,
    /// K the divergence / minus-identity block.
    static PdhgConfig balanced(const GridSpec& grid, double safety = 0.9);
};

/// Upper bound on ||K||^2 used by the step-size condition lambda tau ||K||^2 <= 1.
double operator_norm_squared_bound(const GridSpec& grid);

/// Soft thresholding of each entry.
double shrink(double u, double t);
void shrink_l1(std::span<double> u, double t);
/// Shrinks the vector as a whole: (1 - t/|u|) u, or zero.
void shrink_l2(std::span<double> u, double t);

/// One PDHG sweep: flux, then source, then the potential with
/// over-relaxation. Throws StepSizeError if the iterate stops being finite.
void pdhg_step(const Problem& problem, State& state, const PdhgConfig& cfg);

/// sum ||m|| vol + (1/alpha) sum |c| vol.
double primal_value(const State& state, double alpha, FluxNorm norm);

/// mu1 - mu0 + div m - c.
ScalarField constraint_residual(const Problem& problem, const State& state);
/// sqrt(sum r^2 vol / |Omega|).
double residual_norm(const Problem& problem, const State& state);

/// Objective of the feasible point obtained by replacing c with
/// mu1 - mu0 + div m (spatially dependent variant); an upper bound on the
/// optimum. For the pinned variant this is the plain primal value.
double feasible_primal_value(const Problem& problem, const State& state);

struct DualCertificate {
    double value = 0.0;
    /// max |phi| * alpha before the projection.
    double max_phi_alpha = 0.0;
    /// max dual norm of grad phi before the projection.
    double max_grad = 0.0;
    /// Uniform scale applied after clipping (1 when already feasible).
    double scale = 1.0;
};

/// Projects phi onto |phi| <= 1/alpha (spatially dependent only) and
/// dual-norm |grad phi| <= 1, then evaluates the dual objective. A lower
/// bound on the optimum for the L1 flux norm.
DualCertificate dual_value_certificate(const ScalarField& phi, const Problem& problem);

struct Solution {
    State state;
    double primal = 0.0;
    double feasible_primal = 0.0;
    DualCertificate dual;
    double residual = 0.0;
    double gap = 0.0;
    SolveReport report;
};

Solution solve(const Problem& problem, const PdhgConfig& cfg = {});

}  // namespace uot::uw1
