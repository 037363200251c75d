#include "uot/cli/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "uot/grid.hpp"
#include "uot/image_io.hpp"

namespace uot::cli {

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

void write_field_csv(const std::filesystem::path& path, std::span<const double> values, int nx, int ny, double dx,
                     double dy)
{
    if (values.size() != static_cast<std::size_t>(nx) * ny)
        throw StructuralError("csv: value count does not match nx*ny");
    std::ofstream out = open_out(path);
    out << "# nx=" << nx << ",ny=" << ny << ",dx=" << format_double(dx) << ",dy=" << format_double(dy) << '\n';
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            if (j)
                out << ',';
            out << format_double(values[static_cast<std::size_t>(i) * ny + j]);
        }
        out << '\n';
    }
}

void write_heatmap(const std::filesystem::path& path, std::span<const double> values, int nx, int ny, double scale)
{
    if (values.size() != static_cast<std::size_t>(nx) * ny)
        throw StructuralError("heatmap: value count does not match nx*ny");
    GrayImage img;
    img.width = nx;
    img.height = ny;
    img.pixels.resize(values.size());
    const double inv = scale > 0.0 ? 1.0 / scale : 0.0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const double v = std::clamp(values[static_cast<std::size_t>(i) * ny + j] * inv, 0.0, 1.0);
            img.pixels[static_cast<std::size_t>(ny - 1 - j) * nx + i] =
                static_cast<std::uint8_t>(std::lround(255.0 * v));
        }
    write_pgm(path.string(), img);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc)
{
    std::ofstream out = open_out(path);
    out << doc.dump(2) << '\n';
}

}  // namespace uot::cli
