#include "uot/elliptic.hpp"

#include <cmath>
#include <numeric>

namespace uot {

void CgConfig::validate() const
{
    if (!(rel_tolerance > 0.0 && rel_tolerance < 1.0))
        throw StructuralError("cg: rel_tolerance must lie in (0, 1)");
}

WeightedOperator::WeightedOperator(const ScalarField& weights, double alpha, OperatorVariant variant)
    : grid_(weights.grid()), alpha_(alpha), variant_(variant)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw StructuralError("weighted operator: alpha must be positive");
    for (double w : weights.values())
        if (!(w >= 0.0) || !std::isfinite(w))
            throw StructuralError("weighted operator: weights must be finite and nonnegative");

    const int nx = grid_.nx, ny = grid_.ny;
    const double cx = 1.0 / (2.0 * grid_.dx() * grid_.dx());
    wx_.resize(static_cast<std::size_t>(nx - 1) * ny);
    for (int i = 0; i + 1 < nx; ++i)
        for (int j = 0; j < ny; ++j)
            wx_[static_cast<std::size_t>(i) * ny + j] = (weights(i, j) + weights(i + 1, j)) * cx;

    if (grid_.dim == 2) {
        const double cy = 1.0 / (2.0 * grid_.dy() * grid_.dy());
        wy_.resize(static_cast<std::size_t>(nx) * (ny - 1));
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j + 1 < ny; ++j)
                wy_[static_cast<std::size_t>(i) * (ny - 1) + j] = (weights(i, j) + weights(i, j + 1)) * cy;
    }
}

void WeightedOperator::apply(std::span<const double> u, std::span<double> out) const
{
    const std::size_t n = grid_.cells();
    if (u.size() != n || out.size() != n)
        throw StructuralError("weighted operator: field size does not match grid");

    const int nx = grid_.nx, ny = grid_.ny;
    double shift = 0.0;
    if (variant_ == OperatorVariant::SpatiallyDependent) {
        for (std::size_t k = 0; k < n; ++k)
            out[k] = alpha_ * u[k];
    } else {
        // alpha/|Omega| * sum(u) * vol, with |Omega| = cells * vol.
        shift = alpha_ * std::accumulate(u.begin(), u.end(), 0.0) / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k)
            out[k] = shift;
    }

    for (int i = 0; i + 1 < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const std::size_t p = static_cast<std::size_t>(i) * ny + j;
            const std::size_t q = p + ny;
            const double flux = wx_[p] * (u[p] - u[q]);
            out[p] += flux;
            out[q] -= flux;
        }
    }
    if (grid_.dim == 2) {
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j + 1 < ny; ++j) {
                const std::size_t p = static_cast<std::size_t>(i) * ny + j;
                const double flux = wy_[static_cast<std::size_t>(i) * (ny - 1) + j] * (u[p] - u[p + 1]);
                out[p] += flux;
                out[p + 1] -= flux;
            }
        }
    }
}

std::vector<double> WeightedOperator::diagonal() const
{
    const int nx = grid_.nx, ny = grid_.ny;
    const double base = variant_ == OperatorVariant::SpatiallyDependent ? alpha_ : alpha_ / static_cast<double>(grid_.cells());
    std::vector<double> d(grid_.cells(), base);
    for (int i = 0; i + 1 < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const std::size_t p = static_cast<std::size_t>(i) * ny + j;
            d[p] += wx_[p];
            d[p + ny] += wx_[p];
        }
    if (grid_.dim == 2)
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j + 1 < ny; ++j) {
                const std::size_t p = static_cast<std::size_t>(i) * ny + j;
                const double w = wy_[static_cast<std::size_t>(i) * (ny - 1) + j];
                d[p] += w;
                d[p + 1] += w;
            }
    return d;
}

ScalarField WeightedOperator::apply(const ScalarField& u) const
{
    if (!u.grid().same_shape(grid_))
        throw StructuralError("weighted operator: grid mismatch");
    ScalarField out(grid_);
    apply(u.values(), out.values());
    return out;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

SolveResult solve(const WeightedOperator& op, const ScalarField& rhs, const CgConfig& cfg,
                  const ScalarField* initial_guess)
{
    cfg.validate();
    const GridSpec& g = op.grid();
    if (!rhs.grid().same_shape(g))
        throw StructuralError("cg: rhs grid does not match operator");

    const std::size_t n = g.cells();
    const std::size_t max_it = cfg.max_iterations ? cfg.max_iterations : 10 * n;

    std::vector<double> x(n, 0.0);
    if (cfg.warm_start && initial_guess) {
        if (!initial_guess->grid().same_shape(g))
            throw StructuralError("cg: initial guess grid does not match operator");
        x = initial_guess->data();
    }

    const std::vector<double>& b = rhs.data();
    const double bnorm = std::sqrt(dot(b, b));
    SolveResult result;
    if (bnorm == 0.0) {
        result.solution = ScalarField(g);
        return result;
    }
    const double target = cfg.rel_tolerance * bnorm;

    std::vector<double> inv_diag;
    if (cfg.preconditioner == Preconditioner::Jacobi) {
        inv_diag = op.diagonal();
        for (double& v : inv_diag)
            v = 1.0 / v;
    }
    std::vector<double> r(n), z(n), p(n), ap(n);
    auto precondition = [&]() {
        if (inv_diag.empty())
            z = r;
        else
            for (std::size_t k = 0; k < n; ++k)
                z[k] = inv_diag[k] * r[k];
    };
    auto true_residual = [&]() {
        op.apply(x, ap);
        for (std::size_t k = 0; k < n; ++k)
            r[k] = b[k] - ap[k];
        return std::sqrt(dot(r, r));
    };

    double rnorm = true_residual();
    precondition();
    p = z;
    double rz = dot(r, z);
    std::size_t it = 0;
    while (rnorm > target) {
        if (it >= max_it)
            throw ConvergenceError("cg: iteration budget exhausted", rnorm / bnorm, it);
        op.apply(p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0))
            throw ConvergenceError("cg: breakdown, operator not positive definite on the Krylov space",
                                   rnorm / bnorm, it);
        const double step = rz / pap;
        for (std::size_t k = 0; k < n; ++k) {
            x[k] += step * p[k];
            r[k] -= step * ap[k];
        }
        ++it;
        rnorm = std::sqrt(dot(r, r));
        if (rnorm <= target) {
            // Recursive residuals drift; confirm against the true one and restart if needed.
            rnorm = true_residual();
            if (rnorm > target) {
                precondition();
                p = z;
                rz = dot(r, z);
                continue;
            }
            break;
        }
        precondition();
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < n; ++k)
            p[k] = z[k] + beta * p[k];
    }

    result.solution = ScalarField(g, std::move(x));
    result.iterations = it;
    result.relative_residual = rnorm / bnorm;
    return result;
}

}  // namespace uot
