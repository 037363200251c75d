#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uot {

/// Thrown when fields, grids or indices do not fit together.
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Where the unknowns of a grid sit.
///
/// NodeCentered: samples at x_i = i*dx with dx = lx/(nx-1) (dynamic L2 solver).
/// CellCentered: samples at x_i = (i+1/2)*dx with dx = lx/nx, fluxes on the
/// cell faces (static L1 solver).
enum class GridLayout { NodeCentered, CellCentered };

struct GridSpec {
    int dim = 1;
    int nx = 3;
    int ny = 1;
    double lx = 1.0;
    double ly = 1.0;
    int nt = 1;
    GridLayout layout = GridLayout::NodeCentered;

    static GridSpec node_1d(int nx, double lx, int nt = 1);
    static GridSpec node_2d(int nx, int ny, double lx, double ly, int nt = 1);
    static GridSpec cell_1d(int nx, double lx);
    static GridSpec cell_2d(int nx, int ny, double lx, double ly);

    /// Throws StructuralError if the grid is not usable.
    void validate() const;

    double dx() const;
    double dy() const;
    double dt() const { return 1.0 / nt; }
    /// dx in 1D, dx*dy in 2D.
    double cell_volume() const;
    /// Discrete measure of the domain, cells() * cell_volume().
    double domain_volume() const { return static_cast<double>(cells()) * cell_volume(); }
    std::size_t cells() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }

    /// Row-major, y fastest.
    std::size_t index(int i, int j = 0) const { return static_cast<std::size_t>(i) * ny + j; }
    double x_coord(int i) const;
    double y_coord(int j) const;

    bool same_shape(const GridSpec& other) const;
};

bool operator==(const GridSpec& a, const GridSpec& b);

/// A scalar per grid sample.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const GridSpec& grid, double fill = 0.0);
    ScalarField(const GridSpec& grid, std::vector<double> values);

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    const std::vector<double>& data() const { return values_; }

    double operator()(int i, int j = 0) const { return values_[grid_.index(i, j)]; }
    double& operator()(int i, int j = 0) { return values_[grid_.index(i, j)]; }
    double operator[](std::size_t k) const { return values_[k]; }
    double& operator[](std::size_t k) { return values_[k]; }

    double max() const;
    double min() const;
    bool all_finite() const;

private:
    GridSpec grid_;
    std::vector<double> values_;
};

/// A nonnegative, finite scalar field. Construction validates.
class DensityField {
public:
    DensityField() = default;
    explicit DensityField(ScalarField field);
    DensityField(const GridSpec& grid, std::vector<double> values);

    const ScalarField& field() const { return field_; }
    const GridSpec& grid() const { return field_.grid(); }
    std::span<const double> values() const { return field_.values(); }
    std::size_t size() const { return field_.size(); }
    double operator[](std::size_t k) const { return field_[k]; }

    /// Clamps negative entries to zero before validating.
    static DensityField projected(ScalarField field);

private:
    ScalarField field_;
};

/// Slices 0..nt of a density path; the first and last are the pinned data.
struct DensityPath {
    std::vector<ScalarField> slices;

    std::size_t intervals() const { return slices.empty() ? 0 : slices.size() - 1; }
};

/// Face-centred flux on a cell-centred grid.
///
/// mx has (nx+1)*ny entries, mx(i,j) is the face between cells i-1 and i;
/// my has nx*(ny+1) entries, my(i,j) is the face between cells j-1 and j.
/// Boundary faces (i = 0, nx and j = 0, ny) are zero.
class StaggeredFlux {
public:
    StaggeredFlux() = default;
    explicit StaggeredFlux(const GridSpec& grid);

    const GridSpec& grid() const { return grid_; }

    std::size_t mx_index(int i, int j) const { return static_cast<std::size_t>(i) * grid_.ny + j; }
    std::size_t my_index(int i, int j) const { return static_cast<std::size_t>(i) * (grid_.ny + 1) + j; }

    double mx(int i, int j = 0) const { return mx_[mx_index(i, j)]; }
    double& mx(int i, int j = 0) { return mx_[mx_index(i, j)]; }
    double my(int i, int j) const { return my_[my_index(i, j)]; }
    double& my(int i, int j) { return my_[my_index(i, j)]; }

    std::vector<double>& mx_data() { return mx_; }
    std::vector<double>& my_data() { return my_; }
    const std::vector<double>& mx_data() const { return mx_; }
    const std::vector<double>& my_data() const { return my_; }

    /// Exactly zero on every boundary face.
    bool boundary_is_zero() const;
    void zero_boundary();

private:
    GridSpec grid_;
    std::vector<double> mx_;
    std::vector<double> my_;
};

double inner_product(std::span<const double> a, std::span<const double> b);
/// Plain sum of products over both flux components.
double inner_product(const StaggeredFlux& a, const StaggeredFlux& b);

/// Cell-centred divergence of a face flux, zero-flux boundary.
ScalarField staggered_divergence(const StaggeredFlux& flux);

/// Forward differences of a cell field onto interior faces; boundary faces
/// are zero. Satisfies <div m, phi> = -<m, grad phi>.
StaggeredFlux cell_gradient_adjoint(const ScalarField& phi);

/// Discrete squared gradient <u, L_{e_i} u> at one sample, Neumann mirrored
/// ghosts (so boundary faces drop out).
double hj_quadratic(const ScalarField& phi, int i, int j = 0);

/// hj_quadratic evaluated at every sample.
ScalarField hj_quadratic_field(const ScalarField& phi);

}  // namespace uot
