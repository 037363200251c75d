#include "uot/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#ifdef UOT_HAVE_PNG
#include <png.h>
#endif

namespace uot {

namespace {

// Skips whitespace and '#' comments in a PNM header.
void skip_header_space(std::istream& in)
{
    while (in) {
        const int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
}

int read_header_int(std::istream& in, const std::string& path)
{
    skip_header_space(in);
    int v = -1;
    if (!(in >> v) || v <= 0)
        throw IngestionError("pgm: malformed header in " + path);
    return v;
}

}  // namespace

GrayImage read_pgm(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IngestionError("cannot open image " + path);

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P')
        throw IngestionError("not a portable anymap: " + path);
    if (magic[1] == '3' || magic[1] == '6')
        throw IngestionError("color image rejected (grayscale required): " + path);
    if (magic[1] != '2' && magic[1] != '5')
        throw IngestionError("unsupported anymap flavour in " + path);
    const bool binary = magic[1] == '5';

    GrayImage img;
    img.width = read_header_int(in, path);
    img.height = read_header_int(in, path);
    const int maxval = read_header_int(in, path);
    if (maxval > 255)
        throw IngestionError("pgm: only 8-bit graymaps are supported: " + path);

    const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
    img.pixels.resize(count);
    if (binary) {
        in.get();  // single whitespace after maxval
        in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(count));
        if (static_cast<std::size_t>(in.gcount()) != count)
            throw IngestionError("pgm: truncated pixel data in " + path);
    } else {
        for (std::size_t k = 0; k < count; ++k) {
            int v = -1;
            if (!(in >> v) || v < 0 || v > maxval)
                throw IngestionError("pgm: bad pixel value in " + path);
            img.pixels[k] = static_cast<std::uint8_t>(v);
        }
    }
    if (maxval != 255)
        for (auto& p : img.pixels)
            p = static_cast<std::uint8_t>(std::lround(p * 255.0 / maxval));
    return img;
}

#ifdef UOT_HAVE_PNG
GrayImage read_png_gray(const std::string& path)
{
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "rb"), &std::fclose);
    if (!fp)
        throw IngestionError("cannot open image " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IngestionError("png: cannot allocate decoder");
    }

    GrayImage img;
    std::string failure;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IngestionError("png: decode failure in " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color != PNG_COLOR_TYPE_GRAY || depth != 8) {
        failure = "png: 8-bit grayscale required: " + path;
    } else {
        img.width = static_cast<int>(png_get_image_width(png, info));
        img.height = static_cast<int>(png_get_image_height(png, info));
        img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
        rows.resize(img.height);
        for (int r = 0; r < img.height; ++r)
            rows[r] = img.pixels.data() + static_cast<std::size_t>(r) * img.width;
        png_read_image(png, rows.data());
    }
    png_destroy_read_struct(&png, &info, nullptr);
    if (!failure.empty())
        throw IngestionError(failure);
    return img;
}
#else
GrayImage read_png_gray(const std::string& path)
{
    throw IngestionError("png support not compiled in: " + path);
}
#endif

GrayImage read_gray_image(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IngestionError("cannot open image " + path);
    unsigned char head[8] = {};
    in.read(reinterpret_cast<char*>(head), 8);
    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    if (in.gcount() == 8 && std::equal(head, head + 8, png_sig))
        return read_png_gray(path);
    if (in.gcount() >= 2 && head[0] == 'P')
        return read_pgm(path);
    throw IngestionError("unrecognised image container: " + path);
}

void write_pgm(const std::string& path, const GrayImage& image)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
}

std::vector<double> resample_bilinear(const GrayImage& image, int out_width, int out_height)
{
    if (image.width <= 0 || image.height <= 0 || out_width <= 0 || out_height <= 0)
        throw IngestionError("resample: empty image or target");

    auto sample = [&](int col, int row) {
        col = std::clamp(col, 0, image.width - 1);
        row = std::clamp(row, 0, image.height - 1);
        return image.at(col, row) / 255.0;
    };

    std::vector<double> out(static_cast<std::size_t>(out_width) * out_height);
    for (int r = 0; r < out_height; ++r) {
        const double v = (r + 0.5) * image.height / out_height - 0.5;
        const int r0 = static_cast<int>(std::floor(v));
        const double fr = v - r0;
        for (int c = 0; c < out_width; ++c) {
            const double u = (c + 0.5) * image.width / out_width - 0.5;
            const int c0 = static_cast<int>(std::floor(u));
            const double fc = u - c0;
            const double top = (1 - fc) * sample(c0, r0) + fc * sample(c0 + 1, r0);
            const double bottom = (1 - fc) * sample(c0, r0 + 1) + fc * sample(c0 + 1, r0 + 1);
            out[static_cast<std::size_t>(r) * out_width + c] = (1 - fr) * top + fr * bottom;
        }
    }
    return out;
}

}  // namespace uot
