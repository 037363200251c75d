#include "uot/densities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace uot {

void GaussianSpec::validate(const GridSpec& grid) const
{
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw StructuralError("gaussian: mass must be positive");
    if (!(sigma_x > 0.0) || !std::isfinite(sigma_x))
        throw StructuralError("gaussian: sigma_x must be positive");
    if (!(center_x >= 0.0 && center_x <= grid.lx))
        throw StructuralError("gaussian: center_x outside the domain");
    if (grid.dim == 2) {
        if (!(sigma_y > 0.0) || !std::isfinite(sigma_y))
            throw StructuralError("gaussian: sigma_y must be positive");
        if (!(center_y >= 0.0 && center_y <= grid.ly))
            throw StructuralError("gaussian: center_y outside the domain");
    }
}

DensityResult gaussian_density(const GridSpec& grid, const GaussianSpec& spec)
{
    grid.validate();
    spec.validate(grid);

    // Work with exponents shifted by their minimum so a very narrow bump
    // between samples does not underflow to an all-zero field.
    std::vector<double> expo(grid.cells());
    for (int i = 0; i < grid.nx; ++i) {
        const double qx = (grid.x_coord(i) - spec.center_x) / spec.sigma_x;
        for (int j = 0; j < grid.ny; ++j) {
            double q = 0.5 * qx * qx;
            if (grid.dim == 2) {
                const double qy = (grid.y_coord(j) - spec.center_y) / spec.sigma_y;
                q += 0.5 * qy * qy;
            }
            expo[grid.index(i, j)] = q;
        }
    }
    const double qmin = *std::min_element(expo.begin(), expo.end());
    std::vector<double> values(expo.size());
    for (std::size_t k = 0; k < expo.size(); ++k)
        values[k] = std::exp(-(expo[k] - qmin));

    const double raw_mass = std::accumulate(values.begin(), values.end(), 0.0) * grid.cell_volume();
    const double c = spec.mass / raw_mass;
    for (double& v : values)
        v *= c;

    DensityResult out{DensityField(grid, std::move(values)), {}};
    auto warn = [&](const char* axis, double sigma, double h) {
        if (sigma < 0.5 * h) {
            std::ostringstream msg;
            msg << "gaussian: sigma_" << axis << "=" << sigma << " is below half the grid spacing (" << h
                << "); the bump is under-resolved";
            out.warnings.push_back(msg.str());
        }
    };
    warn("x", spec.sigma_x, grid.dx());
    if (grid.dim == 2)
        warn("y", spec.sigma_y, grid.dy());
    return out;
}

DensityResult gaussian_mixture(const GridSpec& grid, const std::vector<GaussianSpec>& specs)
{
    if (specs.empty())
        throw StructuralError("gaussian_mixture: no components");
    std::vector<double> sum(grid.cells(), 0.0);
    std::vector<std::string> warnings;
    for (const auto& spec : specs) {
        DensityResult part = gaussian_density(grid, spec);
        for (std::size_t k = 0; k < sum.size(); ++k)
            sum[k] += part.density[k];
        warnings.insert(warnings.end(), part.warnings.begin(), part.warnings.end());
    }
    return {DensityField(grid, std::move(sum)), std::move(warnings)};
}

DensityField image_to_density(const GrayImage& image, const GridSpec& grid, double scale)
{
    if (!(scale >= 0.0) || !std::isfinite(scale))
        throw IngestionError("image density: scale must be finite and nonnegative");
    // Resample to an (nx wide, ny tall) raster, then flip rows so j = 0 is the bottom.
    const std::vector<double> raster = resample_bilinear(image, grid.nx, grid.ny);
    ScalarField field(grid);
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j)
            field(i, j) = scale * raster[static_cast<std::size_t>(grid.ny - 1 - j) * grid.nx + i];
    return DensityField(std::move(field));
}

DensityField load_image_density(const std::string& path, const GridSpec& grid, double scale)
{
    return image_to_density(read_gray_image(path), grid, scale);
}

double total_mass(const ScalarField& field)
{
    const auto v = field.values();
    return std::accumulate(v.begin(), v.end(), 0.0) * field.grid().cell_volume();
}

double total_mass(const DensityField& field)
{
    return total_mass(field.field());
}

DensityField embed_1d(const DensityField& density, double lx)
{
    const GridSpec& g = density.grid();
    if (g.dim != 1)
        throw StructuralError("embed_1d: 1D densities only");
    const double h = g.dx();
    const double steps = g.layout == GridLayout::NodeCentered ? lx / h + 1.0 : lx / h;
    const int nx = static_cast<int>(std::lround(steps));
    if (std::abs(steps - nx) > 1e-9 * steps || nx < g.nx)
        throw StructuralError("embed_1d: target length is not a whole number of spacings beyond the source");

    GridSpec big = g;
    big.nx = nx;
    big.lx = lx;
    big.validate();
    std::vector<double> values(big.cells(), 0.0);
    std::copy(density.values().begin(), density.values().end(), values.begin());
    return DensityField(big, std::move(values));
}

}  // namespace uot
