#pragma once

#include <string>
#include <vector>

#include "uot/grid.hpp"
#include "uot/image_io.hpp"

namespace uot {

/// Gaussian bump C * exp(-|x - center|^2 / (2 sigma^2)) with C fixed by the
/// requested total mass.
struct GaussianSpec {
    double center_x = 0.5;
    double center_y = 0.5;
    double sigma_x = 0.1;
    double sigma_y = 0.1;
    double mass = 1.0;

    void validate(const GridSpec& grid) const;
};

struct DensityResult {
    DensityField density;
    std::vector<std::string> warnings;
};

/// Samples the bump on the grid and rescales so that the discrete mass
/// (sum of values times cell volume) equals spec.mass. Warns when sigma is
/// below half a grid spacing.
DensityResult gaussian_density(const GridSpec& grid, const GaussianSpec& spec);

/// Sum of several bumps; warnings are concatenated.
DensityResult gaussian_mixture(const GridSpec& grid, const std::vector<GaussianSpec>& specs);

/// Reads an 8-bit grayscale image and maps it onto the grid: bilinear
/// resampling at sample centres, intensity/255, times `scale`. Image columns
/// run along x and the top row is y = ly.
DensityField load_image_density(const std::string& path, const GridSpec& grid, double scale);

/// Same mapping, from an image already in memory.
DensityField image_to_density(const GrayImage& image, const GridSpec& grid, double scale);

/// Sum of values times cell volume.
double total_mass(const ScalarField& field);
double total_mass(const DensityField& field);

/// Pads a 1D density with zeros on the right so that it sits on [0, lx] with
/// unchanged spacing. `lx` must be a whole number of spacings.
DensityField embed_1d(const DensityField& density, double lx);

}  // namespace uot
