#include "vofrac/tensor_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vofrac/error.hpp"

namespace vofrac {

namespace {

void require_size(const SpatialMesh& mesh, std::size_t n, const char* what)
{
    if (n != mesh.size()) {
        std::ostringstream msg;
        msg << what << ": buffer holds " << n << " values, mesh has " << mesh.size();
        throw InvalidArgument(msg.str());
    }
}

void require_dim(const SpatialMesh& mesh, int dim)
{
    if (dim < 0 || dim >= mesh.dims())
        throw InvalidArgument("dimension index out of range");
}

// Applies the symmetric 3-point stencil (side, centre, side) along every
// line of dimension `dim`; ghost values are zero.
void sweep(const SpatialMesh& mesh, int dim, double side, double centre, std::span<const double> in,
           std::span<double> out)
{
    const std::size_t s = mesh.stride(dim);
    const std::size_t n = static_cast<std::size_t>(mesh.axis(dim).interior());
    const std::size_t block = n * s;
    const std::size_t outer = mesh.size() / block;
    for (std::size_t o = 0; o < outer; ++o) {
        const double* src = in.data() + o * block;
        double* dst = out.data() + o * block;
        // j = 0
        for (std::size_t i = 0; i < s; ++i)
            dst[i] = centre * src[i] + (n > 1 ? side * src[s + i] : 0.0);
        for (std::size_t j = 1; j + 1 < n; ++j) {
            const double* c = src + j * s;
            double* d = dst + j * s;
            for (std::size_t i = 0; i < s; ++i)
                d[i] = centre * c[i] + side * (c[i - s] + c[i + s]);
        }
        if (n > 1) {
            const double* c = src + (n - 1) * s;
            double* d = dst + (n - 1) * s;
            for (std::size_t i = 0; i < s; ++i)
                d[i] = centre * c[i] + side * c[i - s];
        }
    }
}

} // namespace

SpatialMesh::SpatialMesh(std::vector<Axis> axes) : axes_(std::move(axes))
{
    if (axes_.empty() || axes_.size() > 3)
        throw InvalidArgument("mesh dimension must be 1, 2 or 3");
    for (const Axis& a : axes_) {
        if (a.cells < 2)
            throw InvalidArgument("each direction needs at least 2 cells");
        if (!(a.hi > a.lo))
            throw InvalidArgument("axis must satisfy lo < hi");
    }
    strides_.assign(axes_.size(), 1);
    size_ = 1;
    volume_ = 1.0;
    for (int r = dims() - 1; r >= 0; --r) {
        strides_[static_cast<std::size_t>(r)] = size_;
        size_ *= static_cast<std::size_t>(axes_[static_cast<std::size_t>(r)].interior());
        volume_ *= axes_[static_cast<std::size_t>(r)].dx();
    }
}

SpatialMesh SpatialMesh::cube(int dims, double lo, double hi, int m)
{
    if (dims < 1 || dims > 3)
        throw InvalidArgument("mesh dimension must be 1, 2 or 3");
    return SpatialMesh(std::vector<Axis>(static_cast<std::size_t>(dims), Axis{lo, hi, m}));
}

void SpatialMesh::unflatten(std::size_t flat, int* index) const
{
    for (int r = 0; r < dims(); ++r) {
        const std::size_t s = strides_[static_cast<std::size_t>(r)];
        index[r] = static_cast<int>(flat / s) + 1;
        flat %= s;
    }
}

Field::Field(const SpatialMesh& mesh) : mesh_(mesh), values_(mesh.size(), 0.0) {}

Field::Field(const SpatialMesh& mesh, std::vector<double> values) : mesh_(mesh), values_(std::move(values))
{
    require_size(mesh_, values_.size(), "Field");
    for (double v : values_)
        if (!std::isfinite(v))
            throw InvalidArgument("Field values must be finite");
}

void apply_second_difference(const SpatialMesh& mesh, int dim, std::span<const double> in, std::span<double> out)
{
    require_dim(mesh, dim);
    require_size(mesh, in.size(), "apply_second_difference");
    require_size(mesh, out.size(), "apply_second_difference");
    const double dx = mesh.axis(dim).dx();
    const double inv = 1.0 / (dx * dx);
    sweep(mesh, dim, inv, -2.0 * inv, in, out);
}

Field apply_second_difference(const Field& f, int dim)
{
    Field out(f.mesh());
    apply_second_difference(f.mesh(), dim, f.values(), out.values());
    return out;
}

void apply_compact_average(const SpatialMesh& mesh, int dim, std::span<const double> in, std::span<double> out)
{
    require_dim(mesh, dim);
    require_size(mesh, in.size(), "apply_compact_average");
    require_size(mesh, out.size(), "apply_compact_average");
    sweep(mesh, dim, 1.0 / 12.0, 10.0 / 12.0, in, out);
}

Field apply_compact_average(const Field& f, int dim)
{
    Field out(f.mesh());
    apply_compact_average(f.mesh(), dim, f.values(), out.values());
    return out;
}

void apply_A_h(const SpatialMesh& mesh, std::span<const double> in, std::span<double> out)
{
    require_size(mesh, in.size(), "apply_A_h");
    require_size(mesh, out.size(), "apply_A_h");
    std::vector<double> tmp(in.begin(), in.end());
    for (int r = 0; r < mesh.dims(); ++r) {
        apply_compact_average(mesh, r, tmp, out);
        if (r + 1 < mesh.dims())
            std::copy(out.begin(), out.end(), tmp.begin());
    }
}

Field apply_A_h(const Field& f)
{
    Field out(f.mesh());
    apply_A_h(f.mesh(), f.values(), out.values());
    return out;
}

void apply_Lambda_h(const SpatialMesh& mesh, std::span<const double> in, std::span<double> out)
{
    require_size(mesh, in.size(), "apply_Lambda_h");
    require_size(mesh, out.size(), "apply_Lambda_h");
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> a(mesh.size());
    std::vector<double> b(mesh.size());
    for (int k = 0; k < mesh.dims(); ++k) {
        apply_second_difference(mesh, k, in, a);
        for (int l = 0; l < mesh.dims(); ++l) {
            if (l == k)
                continue;
            apply_compact_average(mesh, l, a, b);
            a.swap(b);
        }
        for (std::size_t i = 0; i < a.size(); ++i)
            out[i] += a[i];
    }
}

Field apply_Lambda_h(const Field& f)
{
    Field out(f.mesh());
    apply_Lambda_h(f.mesh(), f.values(), out.values());
    return out;
}

void apply_Delta_h(const SpatialMesh& mesh, std::span<const double> in, std::span<double> out)
{
    require_size(mesh, in.size(), "apply_Delta_h");
    require_size(mesh, out.size(), "apply_Delta_h");
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> a(mesh.size());
    for (int k = 0; k < mesh.dims(); ++k) {
        apply_second_difference(mesh, k, in, a);
        for (std::size_t i = 0; i < a.size(); ++i)
            out[i] += a[i];
    }
}

Field apply_Delta_h(const Field& f)
{
    Field out(f.mesh());
    apply_Delta_h(f.mesh(), f.values(), out.values());
    return out;
}

StencilEigens::StencilEigens(const SpatialMesh& mesh)
{
    for (int r = 0; r < mesh.dims(); ++r) {
        const Axis& ax = mesh.axis(r);
        const int m = ax.cells;
        const double dx = ax.dx();
        std::vector<double> avg(static_cast<std::size_t>(m - 1));
        std::vector<double> sec(static_cast<std::size_t>(m - 1));
        for (int j = 1; j < m; ++j) {
            const double s = std::sin(j * std::numbers::pi / (2.0 * m));
            avg[static_cast<std::size_t>(j - 1)] = (5.0 + std::cos(j * std::numbers::pi / m)) / 6.0;
            sec[static_cast<std::size_t>(j - 1)] = -4.0 / (dx * dx) * s * s;
        }
        average.push_back(std::move(avg));
        second.push_back(std::move(sec));
    }
}

double inner_product(const SpatialMesh& mesh, std::span<const double> u, std::span<const double> v)
{
    require_size(mesh, u.size(), "inner_product");
    require_size(mesh, v.size(), "inner_product");
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        sum += u[i] * v[i];
    return mesh.cell_volume() * sum;
}

double energy_Ah(const SpatialMesh& mesh, std::span<const double> u)
{
    std::vector<double> au(mesh.size());
    std::vector<double> lap(mesh.size());
    apply_A_h(mesh, u, au);
    apply_Delta_h(mesh, u, lap);
    return -inner_product(mesh, au, lap);
}

Norms norms(const SpatialMesh& mesh, std::span<const double> u)
{
    require_size(mesh, u.size(), "norms");
    Norms out;
    for (double v : u)
        out.max = std::max(out.max, std::abs(v));
    out.l2 = std::sqrt(inner_product(mesh, u, u));

    double h1_sq = 0.0;
    for (int r = 0; r < mesh.dims(); ++r) {
        const std::size_t s = mesh.stride(r);
        const std::size_t n = static_cast<std::size_t>(mesh.axis(r).interior());
        const std::size_t block = n * s;
        const double dx = mesh.axis(r).dx();
        double sum = 0.0;
        for (std::size_t o = 0; o < mesh.size() / block; ++o) {
            const double* line = u.data() + o * block;
            for (std::size_t i = 0; i < s; ++i) {
                // Edges 0..n, with zero values beyond either end.
                double prev = 0.0;
                for (std::size_t j = 0; j <= n; ++j) {
                    const double cur = j < n ? line[j * s + i] : 0.0;
                    const double d = cur - prev;
                    sum += d * d;
                    prev = cur;
                }
            }
        }
        h1_sq += sum / (dx * dx);
    }
    out.h1 = std::sqrt(mesh.cell_volume() * h1_sq);
    out.h1_Ah = std::sqrt(std::max(0.0, energy_Ah(mesh, u)));
    return out;
}

Norms norms(const Field& f)
{
    return norms(f.mesh(), f.values());
}

} // namespace vofrac
