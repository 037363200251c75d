#include "uot/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace uot::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where)
{
    if (!obj.is_object())
        throw ConfigError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items())
        if (!ok.count(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
}

template <class T>
T get(const json& obj, const char* key, const std::string& where)
{
    if (!obj.contains(key))
        throw ConfigError(where + ": missing key '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + ": key '" + key + "' has the wrong type");
    }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where)
{
    return obj.contains(key) ? get<T>(obj, key, where) : fallback;
}

template <class E>
E parse_enum(const std::string& text, std::initializer_list<std::pair<const char*, E>> table, const std::string& where)
{
    for (const auto& [name, value] : table)
        if (text == name)
            return value;
    throw ConfigError(where + ": unrecognised value '" + text + "'");
}

template <class E>
std::string enum_name(E value, std::initializer_list<std::pair<const char*, E>> table)
{
    for (const auto& [name, v] : table)
        if (v == value)
            return name;
    return "unknown";
}

const std::initializer_list<std::pair<const char*, SolverKind>> kSolvers{{"uw1", SolverKind::Uw1},
                                                                         {"uw2", SolverKind::Uw2}};
const std::initializer_list<std::pair<const char*, Variant>> kVariants{{"spatial", Variant::Spatial},
                                                                       {"temporal", Variant::Temporal}};
const std::initializer_list<std::pair<const char*, uw2::MomentumForm>> kMomentum{
    {"accelerated", uw2::MomentumForm::Accelerated}, {"current_anchor", uw2::MomentumForm::CurrentAnchor}};
const std::initializer_list<std::pair<const char*, uw2::StepControl>> kStepControl{
    {"fixed", uw2::StepControl::Fixed}, {"backtracking", uw2::StepControl::Backtracking}};
const std::initializer_list<std::pair<const char*, Preconditioner>> kPreconditioner{
    {"none", Preconditioner::None}, {"jacobi", Preconditioner::Jacobi}};
const std::initializer_list<std::pair<const char*, uw1::FluxNorm>> kNorms{{"l1", uw1::FluxNorm::L1},
                                                                         {"l2", uw1::FluxNorm::L2}};

std::vector<double> pair_of(const json& obj, const char* key, int dim, const std::string& where)
{
    const auto v = get<std::vector<double>>(obj, key, where);
    if (static_cast<int>(v.size()) != dim)
        throw ConfigError(where + ": '" + key + "' needs one entry per dimension");
    return v;
}

DensityInput parse_input(const json& j, int dim, const std::string& where)
{
    check_keys(j, {"gaussian", "image", "uniform"}, where);
    if (j.size() != 1)
        throw ConfigError(where + ": give exactly one of 'gaussian', 'image' or 'uniform'");
    DensityInput in;
    if (j.contains("gaussian")) {
        const json& g = j.at("gaussian");
        const std::string w = where + ".gaussian";
        check_keys(g, {"center", "sigma", "mass"}, w);
        const auto c = pair_of(g, "center", dim, w);
        const auto s = pair_of(g, "sigma", dim, w);
        in.gaussian.center_x = c[0];
        in.gaussian.sigma_x = s[0];
        if (dim == 2) {
            in.gaussian.center_y = c[1];
            in.gaussian.sigma_y = s[1];
        }
        in.gaussian.mass = get<double>(g, "mass", w);
    } else if (j.contains("uniform")) {
        const json& u = j.at("uniform");
        const std::string w = where + ".uniform";
        check_keys(u, {"value"}, w);
        in.kind = DensityInput::Kind::Uniform;
        in.scale = get<double>(u, "value", w);
    } else {
        const json& im = j.at("image");
        const std::string w = where + ".image";
        check_keys(im, {"path", "scale"}, w);
        in.kind = DensityInput::Kind::Image;
        in.path = get<std::string>(im, "path", w);
        in.scale = get_or<double>(im, "scale", 1.0, w);
    }
    return in;
}

json input_to_json(const DensityInput& in, int dim)
{
    if (in.kind == DensityInput::Kind::Image)
        return {{"image", {{"path", in.path}, {"scale", in.scale}}}};
    if (in.kind == DensityInput::Kind::Uniform)
        return {{"uniform", {{"value", in.scale}}}};
    const GaussianSpec& g = in.gaussian;
    json center = dim == 2 ? json{g.center_x, g.center_y} : json{g.center_x};
    json sigma = dim == 2 ? json{g.sigma_x, g.sigma_y} : json{g.sigma_x};
    return {{"gaussian", {{"center", center}, {"sigma", sigma}, {"mass", g.mass}}}};
}

void parse_uw2(const json& j, uw2::SolverConfig& c)
{
    const std::string w = "uw2";
    check_keys(j, {"tau", "max_outer", "rel_energy_drop", "stagnation_window", "reproject_after_momentum", "momentum",
                   "step_control", "step_growth", "min_step_ratio", "restart_on_increase", "divergence_factor",
                   "hj_density_floor", "cg"},
               w);
    c.tau = get_or(j, "tau", c.tau, w);
    c.max_outer = get_or(j, "max_outer", c.max_outer, w);
    c.rel_energy_drop = get_or(j, "rel_energy_drop", c.rel_energy_drop, w);
    c.stagnation_window = get_or(j, "stagnation_window", c.stagnation_window, w);
    c.reproject_after_momentum = get_or(j, "reproject_after_momentum", c.reproject_after_momentum, w);
    if (j.contains("momentum"))
        c.momentum = parse_enum(get<std::string>(j, "momentum", w), kMomentum, w + ".momentum");
    if (j.contains("step_control"))
        c.step_control = parse_enum(get<std::string>(j, "step_control", w), kStepControl, w + ".step_control");
    c.step_growth = get_or(j, "step_growth", c.step_growth, w);
    c.min_step_ratio = get_or(j, "min_step_ratio", c.min_step_ratio, w);
    c.restart_on_increase = get_or(j, "restart_on_increase", c.restart_on_increase, w);
    c.divergence_factor = get_or(j, "divergence_factor", c.divergence_factor, w);
    c.hj_density_floor = get_or(j, "hj_density_floor", c.hj_density_floor, w);
    if (j.contains("cg")) {
        const json& g = j.at("cg");
        const std::string wc = "uw2.cg";
        check_keys(g, {"rel_tolerance", "max_iterations", "warm_start", "preconditioner"}, wc);
        c.cg.rel_tolerance = get_or(g, "rel_tolerance", c.cg.rel_tolerance, wc);
        c.cg.max_iterations = get_or(g, "max_iterations", c.cg.max_iterations, wc);
        c.cg.warm_start = get_or(g, "warm_start", c.cg.warm_start, wc);
        if (g.contains("preconditioner"))
            c.cg.preconditioner =
                parse_enum(get<std::string>(g, "preconditioner", wc), kPreconditioner, wc + ".preconditioner");
    }
}

json uw2_to_json(const uw2::SolverConfig& c)
{
    return {{"tau", c.tau},
            {"max_outer", c.max_outer},
            {"rel_energy_drop", c.rel_energy_drop},
            {"stagnation_window", c.stagnation_window},
            {"reproject_after_momentum", c.reproject_after_momentum},
            {"momentum", enum_name(c.momentum, kMomentum)},
            {"step_control", enum_name(c.step_control, kStepControl)},
            {"step_growth", c.step_growth},
            {"min_step_ratio", c.min_step_ratio},
            {"restart_on_increase", c.restart_on_increase},
            {"divergence_factor", c.divergence_factor},
            {"hj_density_floor", c.hj_density_floor},
            {"cg",
             {{"rel_tolerance", c.cg.rel_tolerance},
              {"max_iterations", c.cg.max_iterations},
              {"warm_start", c.cg.warm_start},
              {"preconditioner", enum_name(c.cg.preconditioner, kPreconditioner)}}}};
}

void parse_uw1(const json& j, uw1::PdhgConfig& c, uw1::FluxNorm& norm)
{
    const std::string w = "uw1";
    check_keys(j, {"lambda", "tau", "epsilon", "max_iters", "residual_tolerance", "gap_tolerance", "check_every",
                   "flux_norm"},
               w);
    c.lambda = get_or(j, "lambda", c.lambda, w);
    c.tau = get_or(j, "tau", c.tau, w);
    c.epsilon = get_or(j, "epsilon", c.epsilon, w);
    c.max_iters = get_or(j, "max_iters", c.max_iters, w);
    c.residual_tolerance = get_or(j, "residual_tolerance", c.residual_tolerance, w);
    c.gap_tolerance = get_or(j, "gap_tolerance", c.gap_tolerance, w);
    c.check_every = get_or(j, "check_every", c.check_every, w);
    if (j.contains("flux_norm"))
        norm = parse_enum(get<std::string>(j, "flux_norm", w), kNorms, w + ".flux_norm");
}

json uw1_to_json(const uw1::PdhgConfig& c, uw1::FluxNorm norm)
{
    return {{"lambda", c.lambda},
            {"tau", c.tau},
            {"epsilon", c.epsilon},
            {"max_iters", c.max_iters},
            {"residual_tolerance", c.residual_tolerance},
            {"gap_tolerance", c.gap_tolerance},
            {"check_every", c.check_every},
            {"flux_norm", enum_name(norm, kNorms)}};
}

bool positive(double v)
{
    return v > 0.0 && std::isfinite(v);
}

}  // namespace

std::string to_string(SolverKind s)
{
    return enum_name(s, kSolvers);
}

std::string to_string(Variant v)
{
    return enum_name(v, kVariants);
}

GridSpec RunConfig::solver_grid(double lx_override) const
{
    const double lx = lx_override > 0.0 ? lx_override : grid.lx;
    int nx = grid.nx;
    if (lx_override > 0.0) {
        // Keep the spacing of the configured grid.
        const double cells = solver == SolverKind::Uw2 ? (grid.nx - 1) * lx / grid.lx : grid.nx * lx / grid.lx;
        nx = static_cast<int>(std::lround(cells)) + (solver == SolverKind::Uw2 ? 1 : 0);
    }
    if (solver == SolverKind::Uw2)
        return grid.dim == 1 ? GridSpec::node_1d(nx, lx, grid.nt)
                             : GridSpec::node_2d(nx, grid.ny, lx, grid.ly, grid.nt);
    return grid.dim == 1 ? GridSpec::cell_1d(nx, lx) : GridSpec::cell_2d(nx, grid.ny, lx, grid.ly);
}

std::filesystem::path RunConfig::resolve(const std::string& path) const
{
    const std::filesystem::path p(path);
    return p.is_absolute() ? p : base_dir / p;
}

void RunConfig::validate() const
{
    if (grid.dim != 1 && grid.dim != 2)
        throw ConfigError("grid.dim must be 1 or 2");
    if (grid.dim == 1 && grid.ny != 1)
        throw ConfigError("grid.ny must be 1 in one dimension");
    try {
        solver_grid().validate();
    } catch (const StructuralError& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
    if (alphas.empty())
        throw ConfigError("alpha: need at least one value");
    for (double a : alphas)
        if (!positive(a))
            throw ConfigError("alpha: values must be positive");
    if (variants.empty())
        throw ConfigError("variant: need at least one value");
    if (mu0.empty() || mu1.empty())
        throw ConfigError("inputs: mu0 and mu1 need at least one component each");
    if (output.directory.empty())
        throw ConfigError("output.directory must not be empty");

    if (!domain_sweep.empty()) {
        if (solver != SolverKind::Uw2 || grid.dim != 1)
            throw ConfigError("domain_sweep is only available for one-dimensional uw2 runs");
        for (double l : domain_sweep) {
            if (!positive(l) || l < grid.lx)
                throw ConfigError("domain_sweep: lengths must be at least grid.lx");
            const double steps = l / solver_grid().dx();
            if (std::abs(steps - std::round(steps)) > 1e-9 * steps)
                throw ConfigError("domain_sweep: lengths must be whole multiples of the grid spacing");
        }
    }

    const GridSpec g = solver_grid();
    for (const auto* list : {&mu0, &mu1})
        for (const DensityInput& in : *list) {
            if (in.kind == DensityInput::Kind::Gaussian) {
                try {
                    in.gaussian.validate(g);
                } catch (const StructuralError& e) {
                    throw ConfigError(std::string("inputs: ") + e.what());
                }
            } else if (in.kind == DensityInput::Kind::Uniform) {
                if (!(in.scale >= 0.0) || !std::isfinite(in.scale))
                    throw ConfigError("inputs: uniform value must be nonnegative");
            } else {
                if (in.path.empty())
                    throw ConfigError("inputs: image path must not be empty");
                if (!(in.scale >= 0.0) || !std::isfinite(in.scale))
                    throw ConfigError("inputs: image scale must be nonnegative");
                if (grid.dim != 2)
                    throw ConfigError("inputs: images need a two-dimensional grid");
            }
        }

    try {
        if (solver == SolverKind::Uw2)
            uw2.validate();
        else
            uw1.validate();
    } catch (const StructuralError& e) {
        throw ConfigError(e.what());
    }
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir)
{
    const std::string w = "config";
    check_keys(doc, {"schema_version", "name", "solver", "variant", "grid", "alpha", "domain_sweep", "uw2", "uw1",
                     "inputs", "output"},
               w);
    const int version = get<int>(doc, "schema_version", w);
    if (version != kSchemaVersion)
        throw ConfigError("config: unsupported schema_version " + std::to_string(version));

    RunConfig c;
    c.base_dir = base_dir;
    c.name = get_or<std::string>(doc, "name", "", w);
    c.solver = parse_enum(get<std::string>(doc, "solver", w), kSolvers, "solver");

    if (doc.contains("variant")) {
        c.variants.clear();
        const json& v = doc.at("variant");
        if (v.is_string()) {
            c.variants.push_back(parse_enum(v.get<std::string>(), kVariants, "variant"));
        } else if (v.is_array()) {
            for (const json& e : v) {
                if (!e.is_string())
                    throw ConfigError("variant: entries must be strings");
                c.variants.push_back(parse_enum(e.get<std::string>(), kVariants, "variant"));
            }
        } else {
            throw ConfigError("variant: expected a string or a list of strings");
        }
    }

    const json& g = doc.contains("grid") ? doc.at("grid") : throw ConfigError("config: missing key 'grid'");
    check_keys(g, {"dim", "nx", "ny", "lx", "ly", "nt"}, "grid");
    c.grid.dim = get<int>(g, "dim", "grid");
    c.grid.nx = get<int>(g, "nx", "grid");
    c.grid.ny = get_or<int>(g, "ny", 1, "grid");
    c.grid.lx = get_or<double>(g, "lx", 1.0, "grid");
    c.grid.ly = get_or<double>(g, "ly", 1.0, "grid");
    c.grid.nt = get_or<int>(g, "nt", 1, "grid");

    const json& a = doc.contains("alpha") ? doc.at("alpha") : throw ConfigError("config: missing key 'alpha'");
    try {
        c.alphas = a.is_number() ? std::vector<double>{a.get<double>()} : a.get<std::vector<double>>();
    } catch (const json::exception&) {
        throw ConfigError("alpha: expected a number or a list of numbers");
    }
    c.domain_sweep = get_or<std::vector<double>>(doc, "domain_sweep", {}, w);

    if (doc.contains("uw2"))
        parse_uw2(doc.at("uw2"), c.uw2);
    if (doc.contains("uw1"))
        parse_uw1(doc.at("uw1"), c.uw1, c.flux_norm);

    const json& in = doc.contains("inputs") ? doc.at("inputs") : throw ConfigError("config: missing key 'inputs'");
    check_keys(in, {"mu0", "mu1"}, "inputs");
    for (const char* key : {"mu0", "mu1"}) {
        auto& list = std::string(key) == "mu0" ? c.mu0 : c.mu1;
        const json& arr = in.contains(key) ? in.at(key) : throw ConfigError(std::string("inputs: missing ") + key);
        if (!arr.is_array())
            throw ConfigError(std::string("inputs.") + key + ": expected a list");
        for (std::size_t k = 0; k < arr.size(); ++k)
            list.push_back(parse_input(arr[k], c.grid.dim, "inputs." + std::string(key) + "[" + std::to_string(k) + "]"));
    }

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        check_keys(o, {"directory", "csv", "heatmaps", "diagnostics"}, "output");
        c.output.directory = get_or<std::string>(o, "directory", c.output.directory, "output");
        c.output.csv = get_or<bool>(o, "csv", true, "output");
        c.output.heatmaps = get_or<bool>(o, "heatmaps", true, "output");
        c.output.diagnostics = get_or<bool>(o, "diagnostics", true, "output");
    }

    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(doc, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

json to_json(const RunConfig& c)
{
    json variants = json::array();
    for (Variant v : c.variants)
        variants.push_back(to_string(v));
    json mu0 = json::array(), mu1 = json::array();
    for (const auto& in : c.mu0)
        mu0.push_back(input_to_json(in, c.grid.dim));
    for (const auto& in : c.mu1)
        mu1.push_back(input_to_json(in, c.grid.dim));

    json doc = {{"schema_version", kSchemaVersion},
                {"name", c.name},
                {"solver", to_string(c.solver)},
                {"variant", variants},
                {"grid",
                 {{"dim", c.grid.dim},
                  {"nx", c.grid.nx},
                  {"ny", c.grid.ny},
                  {"lx", c.grid.lx},
                  {"ly", c.grid.ly},
                  {"nt", c.grid.nt}}},
                {"alpha", c.alphas},
                {"inputs", {{"mu0", mu0}, {"mu1", mu1}}},
                {"output",
                 {{"directory", c.output.directory},
                  {"csv", c.output.csv},
                  {"heatmaps", c.output.heatmaps},
                  {"diagnostics", c.output.diagnostics}}}};
    if (!c.domain_sweep.empty())
        doc["domain_sweep"] = c.domain_sweep;
    if (c.solver == SolverKind::Uw2)
        doc["uw2"] = uw2_to_json(c.uw2);
    else
        doc["uw1"] = uw1_to_json(c.uw1, c.flux_norm);
    return doc;
}

}  // namespace uot::cli
