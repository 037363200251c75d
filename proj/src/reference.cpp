#include "uot/reference.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace uot::reference {

DenseSystem assemble(const ScalarField& weights, double alpha, OperatorVariant variant, const ScalarField& rhs)
{
    const GridSpec& g = weights.grid();
    if (!rhs.grid().same_shape(g))
        throw StructuralError("reference: rhs grid does not match weights");
    if (!(alpha > 0.0))
        throw StructuralError("reference: alpha must be positive");

    DenseSystem sys;
    sys.n = g.cells();
    sys.matrix.assign(sys.n * sys.n, 0.0);
    sys.rhs = rhs.data();

    const auto couple = [&](std::size_t p, std::size_t q, double h) {
        const double w = 0.5 * (weights[p] + weights[q]) / (h * h);
        sys.at(p, p) += w;
        sys.at(q, q) += w;
        sys.at(p, q) -= w;
        sys.at(q, p) -= w;
    };
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            if (i + 1 < g.nx)
                couple(g.index(i, j), g.index(i + 1, j), g.dx());
            if (g.dim == 2 && j + 1 < g.ny)
                couple(g.index(i, j), g.index(i, j + 1), g.dy());
        }
    }
    if (variant == OperatorVariant::SpatiallyDependent) {
        for (std::size_t p = 0; p < sys.n; ++p)
            sys.at(p, p) += alpha;
    } else {
        const double a = alpha / static_cast<double>(sys.n);
        for (double& v : sys.matrix)
            v += a;
    }
    return sys;
}

std::vector<double> dense_solve(const DenseSystem& system)
{
    const std::size_t n = system.n;
    if (n > 64 * 64)
        throw StructuralError("reference: dense solve is limited to 4096 unknowns");
    if (system.matrix.size() != n * n || system.rhs.size() != n)
        throw StructuralError("reference: malformed dense system");

    std::vector<double> a = system.matrix;
    std::vector<double> b = system.rhs;
    double scale = 0.0;
    for (double v : a)
        scale = std::max(scale, std::abs(v));

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(a[r * n + k]) > std::abs(a[piv * n + k]))
                piv = r;
        if (!(std::abs(a[piv * n + k]) > 1e-14 * scale))
            throw StructuralError("reference: singular matrix");
        if (piv != k) {
            for (std::size_t c = 0; c < n; ++c)
                std::swap(a[k * n + c], a[piv * n + c]);
            std::swap(b[k], b[piv]);
        }
        const double d = a[k * n + k];
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = a[r * n + k] / d;
            if (f == 0.0)
                continue;
            for (std::size_t c = k; c < n; ++c)
                a[r * n + c] -= f * a[k * n + c];
            b[r] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t c = k + 1; c < n; ++c)
            s -= a[k * n + c] * x[c];
        x[k] = s / a[k * n + k];
    }
    return x;
}

double dense_energy(const uw2::Problem& problem, const DensityPath& path)
{
    const GridSpec& g = problem.grid();
    if (path.slices.size() != static_cast<std::size_t>(g.nt) + 1)
        throw StructuralError("reference: path must have nt+1 slices");
    double acc = 0.0;
    for (int n = 0; n < g.nt; ++n) {
        ScalarField delta(g);
        for (std::size_t k = 0; k < delta.size(); ++k)
            delta[k] = path.slices[n + 1][k] - path.slices[n][k];
        const std::vector<double> x = dense_solve(assemble(path.slices[n], problem.alpha, problem.variant, delta));
        for (std::size_t k = 0; k < x.size(); ++k)
            acc += delta[k] * x[k];
    }
    return g.cell_volume() / g.dt() * acc;
}

namespace {

DensityPath axpy(const DensityPath& x, double h, const DensityPath& eta)
{
    DensityPath out = x;
    for (std::size_t n = 0; n < out.slices.size(); ++n)
        for (std::size_t k = 0; k < out.slices[n].size(); ++k)
            out.slices[n][k] += h * eta.slices[n][k];
    return out;
}

}  // namespace

FdEstimate fd_directional_derivative(const std::function<double(const DensityPath&)>& energy,
                                     const DensityPath& path, const DensityPath& perturbation,
                                     const std::vector<double>& steps)
{
    if (perturbation.slices.size() != path.slices.size())
        throw StructuralError("reference: perturbation and path differ in length");
    for (std::size_t n = 0; n < path.slices.size(); ++n)
        if (perturbation.slices[n].size() != path.slices[n].size())
            throw StructuralError("reference: perturbation slice size mismatch");
    if (steps.empty())
        throw StructuralError("reference: need at least one step");

    FdEstimate out;
    out.steps = steps;
    std::sort(out.steps.begin(), out.steps.end(), std::greater<>());
    for (double h : out.steps)
        out.values.push_back((energy(axpy(path, h, perturbation)) - energy(axpy(path, -h, perturbation))) / (2.0 * h));
    const std::size_t m = out.values.size();
    out.richardson = out.values.back();
    if (m >= 2) {
        const double r = out.steps[m - 2] / out.steps[m - 1];
        out.richardson = (r * r * out.values[m - 1] - out.values[m - 2]) / (r * r - 1.0);
    }
    return out;
}

double two_bump_uw1_analytic(double mass, double separation, double alpha)
{
    if (!(mass >= 0.0) || !(separation >= 0.0) || !(alpha > 0.0))
        throw StructuralError("reference: two-bump inputs must be nonnegative with alpha > 0");
    return mass * std::min(separation, 2.0 / alpha);
}

}  // namespace uot::reference
