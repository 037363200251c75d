#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "uot/grid.hpp"

namespace uot {

/// How the source term couples into the operator.
///   SpatiallyDependent:   -div(mu grad) + alpha Id
///   SpatiallyIndependent: -div(mu grad) + (alpha/|Omega|) * integral over Omega
enum class OperatorVariant { SpatiallyDependent, SpatiallyIndependent };

/// Raised when conjugate gradient exhausts its iteration budget.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual, std::size_t iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations)
    {
    }
    /// Relative residual at the point of failure.
    double residual() const { return residual_; }
    std::size_t iterations() const { return iterations_; }

private:
    double residual_;
    std::size_t iterations_;
};

enum class Preconditioner { None, Jacobi };

struct CgConfig {
    double rel_tolerance = 1e-10;
    /// 0 means 10 * number of unknowns.
    std::size_t max_iterations = 0;
    bool warm_start = true;
    Preconditioner preconditioner = Preconditioner::None;

    void validate() const;
};

/// The weighted operator L_mu + alpha * (Id or mean), applied matrix-free on a
/// node-centred grid with Neumann boundary. Face weights are the arithmetic
/// mean of the two adjacent samples.
class WeightedOperator {
public:
    WeightedOperator(const ScalarField& weights, double alpha,
                     OperatorVariant variant = OperatorVariant::SpatiallyDependent);

    const GridSpec& grid() const { return grid_; }
    double alpha() const { return alpha_; }
    OperatorVariant variant() const { return variant_; }

    ScalarField apply(const ScalarField& u) const;
    void apply(std::span<const double> u, std::span<double> out) const;
    std::vector<double> diagonal() const;

private:
    GridSpec grid_;
    double alpha_;
    OperatorVariant variant_;
    // Face coefficients already divided by h^2.
    std::vector<double> wx_;  // (nx-1)*ny, face between (i,j) and (i+1,j)
    std::vector<double> wy_;  // nx*(ny-1), face between (i,j) and (i,j+1)
};

struct SolveResult {
    ScalarField solution;
    std::size_t iterations = 0;
    double relative_residual = 0.0;
};

/// Conjugate gradient for op * x = rhs. `initial_guess` is used only when
/// cfg.warm_start is set. Throws ConvergenceError when the budget runs out.
SolveResult solve(const WeightedOperator& op, const ScalarField& rhs, const CgConfig& cfg,
                  const ScalarField* initial_guess = nullptr);

}  // namespace uot
