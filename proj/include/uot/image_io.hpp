#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace uot {

/// Unreadable, malformed or non-grayscale image input.
class IngestionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 8-bit grayscale raster, row 0 at the top.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    std::uint8_t at(int col, int row) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

/// Reads a binary (P5) or ASCII (P2) portable graymap, or an 8-bit grayscale
/// PNG when built with libpng. The container is detected from the file magic.
GrayImage read_gray_image(const std::string& path);

GrayImage read_pgm(const std::string& path);
GrayImage read_png_gray(const std::string& path);

/// Writes a binary P5 graymap.
void write_pgm(const std::string& path, const GrayImage& image);

/// Bilinear resampling with pixel-centre alignment and clamped borders.
/// Output intensities are in [0, 1]; output row 0 matches input row 0.
std::vector<double> resample_bilinear(const GrayImage& image, int out_width, int out_height);

}  // namespace uot
