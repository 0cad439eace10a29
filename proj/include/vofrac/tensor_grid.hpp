#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vofrac {

/// One coordinate direction [lo, hi] split into `cells` uniform cells.
struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    int cells = 2;

    double dx() const noexcept { return (hi - lo) / cells; }
    int interior() const noexcept { return cells - 1; }
    double node(int j) const noexcept { return lo + j * dx(); }
};

/// Tensor-product mesh on a box in 1 to 3 dimensions. Unknowns live on the
/// interior nodes only (homogeneous Dirichlet boundary), flattened with the
/// last dimension contiguous.
class SpatialMesh {
public:
    explicit SpatialMesh(std::vector<Axis> axes);

    /// The cube [lo, hi]^dims with m cells per direction.
    static SpatialMesh cube(int dims, double lo, double hi, int m);

    int dims() const noexcept { return static_cast<int>(axes_.size()); }
    const Axis& axis(int r) const { return axes_.at(static_cast<std::size_t>(r)); }
    std::size_t size() const noexcept { return size_; }
    /// Flat offset between neighbours along dimension r.
    std::size_t stride(int r) const { return strides_.at(static_cast<std::size_t>(r)); }
    /// Cell volume prod_r dx_r, the weight of the discrete inner product.
    double cell_volume() const noexcept { return volume_; }

    /// Interior multi-index (1-based, as on the mesh) of flat position `flat`.
    void unflatten(std::size_t flat, int* index) const;

private:
    std::vector<Axis> axes_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
    double volume_ = 0.0;
};

/// Values on the interior nodes of a mesh; boundary values are zero.
class Field {
public:
    explicit Field(const SpatialMesh& mesh);
    Field(const SpatialMesh& mesh, std::vector<double> values);

    const SpatialMesh& mesh() const noexcept { return mesh_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    SpatialMesh mesh_;
    std::vector<double> values_;
};

// Raw-buffer forms write into `out`, which must not alias `in`, and have
// the mesh's size. The Field forms allocate.

/// delta_r^2 u_j = (u_{j+1} - 2 u_j + u_{j-1}) / dx_r^2 along dimension r.
void apply_second_difference(const SpatialMesh& mesh, int dim, std::span<const double> in, std::span<double> out);
Field apply_second_difference(const Field& f, int dim);

/// (u_{j-1} + 10 u_j + u_{j+1}) / 12 along dimension r.
void apply_compact_average(const SpatialMesh& mesh, int dim, std::span<const double> in, std::span<double> out);
Field apply_compact_average(const Field& f, int dim);

/// Product of the compact averages over all dimensions.
void apply_A_h(const SpatialMesh& mesh, std::span<const double> in, std::span<double> out);
Field apply_A_h(const Field& f);

/// Compact Laplacian: sum_k (prod_{l != k} A_l) delta_k^2.
void apply_Lambda_h(const SpatialMesh& mesh, std::span<const double> in, std::span<double> out);
Field apply_Lambda_h(const Field& f);

/// Standard Laplacian sum_k delta_k^2.
void apply_Delta_h(const SpatialMesh& mesh, std::span<const double> in, std::span<double> out);
Field apply_Delta_h(const Field& f);

/// Sine-basis spectra of the one-dimensional stencils, j = 1..m-1:
///   average[j-1]  = (5 + cos(j pi / m)) / 6
///   second[j-1]   = -(4 / dx^2) sin^2(j pi / (2m))
struct StencilEigens {
    std::vector<std::vector<double>> average;
    std::vector<std::vector<double>> second;

    explicit StencilEigens(const SpatialMesh& mesh);
};

/// (u, v) = cell_volume * sum_j u_j v_j.
double inner_product(const SpatialMesh& mesh, std::span<const double> u, std::span<const double> v);

struct Norms {
    double max = 0.0;
    double l2 = 0.0;
    double h1 = 0.0;    ///< forward differences over every edge, boundary edges included
    double h1_Ah = 0.0; ///< sqrt((A_h u, -Delta_h u))
};

Norms norms(const Field& f);
Norms norms(const SpatialMesh& mesh, std::span<const double> u);

/// |u|_{1,A_h}^2 alone, without the square root; used by the stability check.
double energy_Ah(const SpatialMesh& mesh, std::span<const double> u);

} // namespace vofrac
