#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "uot/elliptic.hpp"
#include "uot/grid.hpp"
#include "uot/uw2.hpp"

namespace uot::reference {

/// Dense row-major system matrix * x = rhs.
struct DenseSystem {
    std::size_t n = 0;
    std::vector<double> matrix;
    std::vector<double> rhs;

    double at(std::size_t r, std::size_t c) const { return matrix[r * n + c]; }
    double& at(std::size_t r, std::size_t c) { return matrix[r * n + c]; }
};

/// Assembles the weighted operator entry by entry: -w_pq off the diagonal for
/// every neighbouring pair, the row sums plus the source term on the diagonal.
DenseSystem assemble(const ScalarField& weights, double alpha, OperatorVariant variant, const ScalarField& rhs);

/// Gaussian elimination with partial pivoting. Throws StructuralError on a
/// singular matrix or grids above 64x64.
std::vector<double> dense_solve(const DenseSystem& system);

/// UW2 energy of a path with every interval solved densely.
double dense_energy(const uw2::Problem& problem, const DensityPath& path);

struct FdEstimate {
    std::vector<double> steps;
    std::vector<double> values;
    /// Extrapolation (r^2 D(h/r) - D(h)) / (r^2 - 1) from the two smallest steps.
    double richardson = 0.0;
};

/// Central differences (E(mu + h eta) - E(mu - h eta)) / 2h for each h.
FdEstimate fd_directional_derivative(const std::function<double(const DensityPath&)>& energy,
                                     const DensityPath& path, const DensityPath& perturbation,
                                     const std::vector<double>& steps);

/// Optimal static L1 cost between two disjoint bumps of mass M a distance d
/// apart: transport costs M d, deleting and recreating costs 2M/alpha.
double two_bump_uw1_analytic(double mass, double separation, double alpha);

}  // namespace uot::reference
