#include "uot/cli/presets.hpp"

#include <algorithm>
#include <cmath>

namespace uot::cli {

namespace fs = std::filesystem;

namespace {

DensityInput gaussian(double cx, double cy, double sx, double sy, double mass)
{
    DensityInput in;
    in.gaussian = {cx, cy, sx, sy, mass};
    return in;
}

DensityInput gaussian_1d(double cx, double sigma, double mass)
{
    return gaussian(cx, 0.5, sigma, sigma, mass);
}

DensityInput image(const std::string& path, double scale)
{
    DensityInput in;
    in.kind = DensityInput::Kind::Image;
    in.path = path;
    in.scale = scale;
    return in;
}

uw2::SolverConfig uw2_defaults(double tau)
{
    uw2::SolverConfig c;
    c.tau = tau;
    c.step_control = uw2::StepControl::Backtracking;
    c.cg.preconditioner = Preconditioner::Jacobi;
    return c;
}

uw1::PdhgConfig uw1_defaults()
{
    uw1::PdhgConfig c;
    c.lambda = 1e-4;
    c.tau = 0.01;
    c.epsilon = 1e-3;
    return c;
}

const char* kCat0 = "inputs/cat_a.pgm";
const char* kCat1 = "inputs/cat_b.pgm";

}  // namespace

std::vector<std::string> preset_names()
{
    return {"experiment1", "experiment2", "experiment3", "experiment4", "experiment5", "experiment6"};
}

RunConfig preset(const std::string& name, const fs::path& base_dir)
{
    RunConfig c;
    c.name = name;
    c.base_dir = base_dir;
    c.output.directory = "results";

    if (name == "experiment1") {
        c.solver = SolverKind::Uw2;
        c.grid = {1, 40, 1, 1.0, 1.0, 30};
        c.alphas = {0.1, 10.0, 100.0};
        c.uw2 = uw2_defaults(0.1);
        c.uw2.max_outer = 30000;
        c.uw2.rel_energy_drop = 1e-9;
        c.mu0 = {gaussian_1d(0.2, 0.01, 1.0)};
        c.mu1 = {gaussian_1d(0.8, 0.01, 1.4)};
    } else if (name == "experiment2") {
        c.solver = SolverKind::Uw2;
        c.variants = {Variant::Spatial, Variant::Temporal};
        c.grid = {1, 41, 1, 1.0, 1.0, 20};
        c.alphas = {100.0};
        c.domain_sweep = {1.0, 2.0, 4.0};
        c.uw2 = uw2_defaults(0.1);
        c.uw2.max_outer = 20000;
        c.uw2.rel_energy_drop = 1e-9;
        DensityInput background;
        background.kind = DensityInput::Kind::Uniform;
        background.scale = 0.05;
        c.mu0 = {gaussian_1d(0.3, 0.05, 1.0), background};
        c.mu1 = {gaussian_1d(0.7, 0.05, 1.4), background};
    } else if (name == "experiment3") {
        c.solver = SolverKind::Uw2;
        c.grid = {2, 35, 35, 1.0, 1.0, 15};
        c.alphas = {1.0, 1000.0};
        c.uw2 = uw2_defaults(0.1);
        c.uw2.max_outer = 3000;
        const double s = std::sqrt(2.0) / 20.0;
        c.mu0 = {gaussian(1.0 / 3, 1.0 / 3, s, s, 1.0), gaussian(2.0 / 3, 1.0 / 3, s, s, 1.0)};
        c.mu1 = {gaussian(2.0 / 3, 2.0 / 3, s, s, 1.0)};
    } else if (name == "experiment4") {
        c.solver = SolverKind::Uw2;
        c.grid = {2, 64, 64, 1.0, 1.0, 15};
        c.alphas = {0.5, 1000.0};
        c.uw2 = uw2_defaults(0.05);
        c.uw2.max_outer = 2000;
        c.mu0 = {image(kCat0, 1.0)};
        c.mu1 = {image(kCat1, 1.0)};
    } else if (name == "experiment5") {
        c.solver = SolverKind::Uw1;
        c.variants = {Variant::Spatial, Variant::Temporal};
        c.grid = {2, 40, 40, 1.0, 1.0, 1};
        c.alphas = {0.1, 10.0, 100.0};
        c.uw1 = uw1_defaults();
        c.uw1.max_iters = 1000000;
        c.mu0 = {gaussian(1.0 / 3, 0.5, 0.1, 0.1, 1.0)};
        c.mu1 = {gaussian(2.0 / 3, 0.5, 0.1, 0.1, 1.4)};
    } else if (name == "experiment6") {
        c.solver = SolverKind::Uw1;
        c.variants = {Variant::Spatial, Variant::Temporal};
        c.grid = {2, 256, 256, 1.0, 1.0, 1};
        c.alphas = {0.1, 5.0, 10.0};
        c.uw1 = uw1_defaults();
        c.uw1.max_iters = 20000;
        c.mu0 = {image(kCat0, 1.0)};
        c.mu1 = {image(kCat1, 1.0)};
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return c;
}

GrayImage synthetic_cat(int size, int which)
{
    if (size < 8)
        throw StructuralError("synthetic_cat: size must be at least 8");
    // Shapes in unit coordinates, y pointing down.
    struct Ellipse {
        double cx, cy, rx, ry;
    };
    struct Triangle {
        double ax, ay, bx, by, cx, cy;
    };
    const double shift = which == 0 ? 0.0 : 0.08;
    const double grow = which == 0 ? 1.0 : 1.15;
    const Ellipse body{0.45 + shift, 0.66, 0.22 * grow, 0.2 * grow};
    const Ellipse head{0.45 + shift + (which == 0 ? 0.0 : 0.12), 0.36, 0.14 * grow, 0.12 * grow};
    const double hx = head.cx, hy = head.cy;
    const Triangle ear_l{hx - 0.13, hy - 0.04, hx - 0.03, hy - 0.1, hx - 0.12, hy - 0.22};
    const Triangle ear_r{hx + 0.13, hy - 0.04, hx + 0.03, hy - 0.1, hx + 0.12, hy - 0.22};
    const Ellipse tail{body.cx - body.rx - 0.02, 0.78, 0.06, 0.03};

    const auto in_ellipse = [](const Ellipse& e, double x, double y) {
        const double u = (x - e.cx) / e.rx, v = (y - e.cy) / e.ry;
        return u * u + v * v <= 1.0;
    };
    const auto in_triangle = [](const Triangle& t, double x, double y) {
        const auto side = [&](double x1, double y1, double x2, double y2) {
            return (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1);
        };
        const double a = side(t.ax, t.ay, t.bx, t.by), b = side(t.bx, t.by, t.cx, t.cy),
                     c = side(t.cx, t.cy, t.ax, t.ay);
        return (a >= 0 && b >= 0 && c >= 0) || (a <= 0 && b <= 0 && c <= 0);
    };

    GrayImage img;
    img.width = img.height = size;
    img.pixels.resize(static_cast<std::size_t>(size) * size);
    constexpr int ss = 4;  // supersampling per axis for soft edges
    for (int row = 0; row < size; ++row)
        for (int col = 0; col < size; ++col) {
            int hits = 0;
            for (int a = 0; a < ss; ++a)
                for (int b = 0; b < ss; ++b) {
                    const double x = (col + (a + 0.5) / ss) / size;
                    const double y = (row + (b + 0.5) / ss) / size;
                    if (in_ellipse(body, x, y) || in_ellipse(head, x, y) || in_ellipse(tail, x, y) ||
                        in_triangle(ear_l, x, y) || in_triangle(ear_r, x, y))
                        ++hits;
                }
            img.pixels[static_cast<std::size_t>(row) * size + col] =
                static_cast<std::uint8_t>(std::lround(255.0 * hits / (ss * ss)));
        }
    return img;
}

void materialize_inputs(const RunConfig& cfg)
{
    for (const auto* list : {&cfg.mu0, &cfg.mu1})
        for (const DensityInput& in : *list) {
            if (in.kind != DensityInput::Kind::Image)
                continue;
            const int which = in.path == kCat0 ? 0 : in.path == kCat1 ? 1 : -1;
            if (which < 0)
                continue;
            const fs::path p = cfg.resolve(in.path);
            fs::create_directories(p.parent_path());
            write_pgm(p.string(), synthetic_cat(256, which));
        }
}

}  // namespace uot::cli
