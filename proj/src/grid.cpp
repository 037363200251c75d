#include "uot/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uot {

GridSpec GridSpec::node_1d(int nx, double lx, int nt)
{
    GridSpec g{1, nx, 1, lx, 1.0, nt, GridLayout::NodeCentered};
    g.validate();
    return g;
}

GridSpec GridSpec::node_2d(int nx, int ny, double lx, double ly, int nt)
{
    GridSpec g{2, nx, ny, lx, ly, nt, GridLayout::NodeCentered};
    g.validate();
    return g;
}

GridSpec GridSpec::cell_1d(int nx, double lx)
{
    GridSpec g{1, nx, 1, lx, 1.0, 1, GridLayout::CellCentered};
    g.validate();
    return g;
}

GridSpec GridSpec::cell_2d(int nx, int ny, double lx, double ly)
{
    GridSpec g{2, nx, ny, lx, ly, 1, GridLayout::CellCentered};
    g.validate();
    return g;
}

void GridSpec::validate() const
{
    if (dim != 1 && dim != 2)
        throw StructuralError("grid: dim must be 1 or 2");
    if (nx < 3)
        throw StructuralError("grid: nx must be at least 3");
    if (nt < 1)
        throw StructuralError("grid: nt must be at least 1");
    if (!(lx > 0.0) || !std::isfinite(lx))
        throw StructuralError("grid: lx must be positive and finite");
    if (dim == 1 && ny != 1)
        throw StructuralError("grid: ny must be 1 in 1D");
    if (dim == 2) {
        if (ny < 3)
            throw StructuralError("grid: ny must be at least 3 in 2D");
        if (!(ly > 0.0) || !std::isfinite(ly))
            throw StructuralError("grid: ly must be positive and finite");
    }
    const double spacing[] = {dx(), dy(), dt()};
    for (double h : spacing)
        if (!(h > 0.0) || !std::isfinite(h))
            throw StructuralError("grid: spacings must be positive and finite");
}

double GridSpec::dx() const
{
    return layout == GridLayout::NodeCentered ? lx / (nx - 1) : lx / nx;
}

double GridSpec::dy() const
{
    if (dim == 1)
        return 1.0;
    return layout == GridLayout::NodeCentered ? ly / (ny - 1) : ly / ny;
}

double GridSpec::cell_volume() const
{
    return dim == 1 ? dx() : dx() * dy();
}

double GridSpec::x_coord(int i) const
{
    return layout == GridLayout::NodeCentered ? i * dx() : (i + 0.5) * dx();
}

double GridSpec::y_coord(int j) const
{
    if (dim == 1)
        return 0.0;
    return layout == GridLayout::NodeCentered ? j * dy() : (j + 0.5) * dy();
}

bool GridSpec::same_shape(const GridSpec& other) const
{
    return dim == other.dim && nx == other.nx && ny == other.ny && layout == other.layout;
}

bool operator==(const GridSpec& a, const GridSpec& b)
{
    return a.same_shape(b) && a.lx == b.lx && a.ly == b.ly && a.nt == b.nt;
}

ScalarField::ScalarField(const GridSpec& grid, double fill)
    : grid_(grid), values_(grid.cells(), fill)
{
}

ScalarField::ScalarField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values))
{
    if (values_.size() != grid_.cells())
        throw StructuralError("field: value count does not match grid");
}

double ScalarField::max() const
{
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

double ScalarField::min() const
{
    return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

bool ScalarField::all_finite() const
{
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

DensityField::DensityField(ScalarField field) : field_(std::move(field))
{
    for (double v : field_.values())
        if (!(v >= 0.0) || !std::isfinite(v))
            throw StructuralError("density: values must be finite and nonnegative");
}

DensityField::DensityField(const GridSpec& grid, std::vector<double> values)
    : DensityField(ScalarField(grid, std::move(values)))
{
}

DensityField DensityField::projected(ScalarField field)
{
    for (double& v : field.values())
        v = std::max(v, 0.0);
    return DensityField(std::move(field));
}

StaggeredFlux::StaggeredFlux(const GridSpec& grid)
    : grid_(grid),
      mx_(static_cast<std::size_t>(grid.nx + 1) * grid.ny, 0.0),
      my_(static_cast<std::size_t>(grid.nx) * (grid.ny + 1), 0.0)
{
}

bool StaggeredFlux::boundary_is_zero() const
{
    const int nx = grid_.nx, ny = grid_.ny;
    for (int j = 0; j < ny; ++j)
        if (mx(0, j) != 0.0 || mx(nx, j) != 0.0)
            return false;
    for (int i = 0; i < nx; ++i)
        if (my(i, 0) != 0.0 || my(i, ny) != 0.0)
            return false;
    return true;
}

void StaggeredFlux::zero_boundary()
{
    const int nx = grid_.nx, ny = grid_.ny;
    for (int j = 0; j < ny; ++j)
        mx(0, j) = mx(nx, j) = 0.0;
    for (int i = 0; i < nx; ++i)
        my(i, 0) = my(i, ny) = 0.0;
}

double inner_product(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw StructuralError("inner_product: size mismatch");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double inner_product(const StaggeredFlux& a, const StaggeredFlux& b)
{
    if (!a.grid().same_shape(b.grid()))
        throw StructuralError("inner_product: flux grids differ");
    return inner_product(a.mx_data(), b.mx_data()) + inner_product(a.my_data(), b.my_data());
}

ScalarField staggered_divergence(const StaggeredFlux& flux)
{
    const GridSpec& g = flux.grid();
    if (flux.mx_data().size() != static_cast<std::size_t>(g.nx + 1) * g.ny ||
        flux.my_data().size() != static_cast<std::size_t>(g.nx) * (g.ny + 1))
        throw StructuralError("staggered_divergence: flux layout does not match grid");

    ScalarField out(g);
    const double inv_dx = 1.0 / g.dx();
    const double inv_dy = 1.0 / g.dy();
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            double d = (flux.mx(i + 1, j) - flux.mx(i, j)) * inv_dx;
            if (g.dim == 2)
                d += (flux.my(i, j + 1) - flux.my(i, j)) * inv_dy;
            out(i, j) = d;
        }
    }
    return out;
}

StaggeredFlux cell_gradient_adjoint(const ScalarField& phi)
{
    const GridSpec& g = phi.grid();
    StaggeredFlux out(g);
    const double inv_dx = 1.0 / g.dx();
    const double inv_dy = 1.0 / g.dy();
    for (int i = 1; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            out.mx(i, j) = (phi(i, j) - phi(i - 1, j)) * inv_dx;
    if (g.dim == 2)
        for (int i = 0; i < g.nx; ++i)
            for (int j = 1; j < g.ny; ++j)
                out.my(i, j) = (phi(i, j) - phi(i, j - 1)) * inv_dy;
    return out;
}

double hj_quadratic(const ScalarField& phi, int i, int j)
{
    const GridSpec& g = phi.grid();
    if (i < 0 || i >= g.nx || j < 0 || j >= g.ny)
        throw StructuralError("hj_quadratic: index out of range");

    auto sq = [](double v) { return v * v; };
    const double u = phi(i, j);
    const double inv_dx = 1.0 / g.dx();
    double acc = 0.0;
    // Mirrored ghosts make the boundary differences vanish.
    if (i + 1 < g.nx)
        acc += 0.5 * sq((phi(i + 1, j) - u) * inv_dx);
    if (i > 0)
        acc += 0.5 * sq((u - phi(i - 1, j)) * inv_dx);
    if (g.dim == 2) {
        const double inv_dy = 1.0 / g.dy();
        if (j + 1 < g.ny)
            acc += 0.5 * sq((phi(i, j + 1) - u) * inv_dy);
        if (j > 0)
            acc += 0.5 * sq((u - phi(i, j - 1)) * inv_dy);
    }
    return acc;
}

ScalarField hj_quadratic_field(const ScalarField& phi)
{
    const GridSpec& g = phi.grid();
    ScalarField out(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            out(i, j) = hj_quadratic(phi, i, j);
    return out;
}

}  // namespace uot
