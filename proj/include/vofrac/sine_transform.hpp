#pragma once

#include <memory>
#include <span>
#include <vector>

#include "vofrac/tensor_grid.hpp"

namespace vofrac {

/// Tensor DST-I over the interior nodes of a mesh.
///
/// forward:  F_p = sum_j f_j sin(j p pi / m)          (per dimension)
/// inverse:  f_j = (2/m) sum_p F_p sin(j p pi / m)
///
/// Lines shorter than 31 points use an explicit sine matrix; longer ones go
/// through FFTW's RODFT00. `Backend` pins one path for cross-checks.
class SineTransform {
public:
    enum class Backend { automatic, matrix, fftw };

    explicit SineTransform(const SpatialMesh& mesh, Backend backend = Backend::automatic);
    ~SineTransform();
    SineTransform(const SineTransform&) = delete;
    SineTransform& operator=(const SineTransform&) = delete;
    SineTransform(SineTransform&&) noexcept;
    SineTransform& operator=(SineTransform&&) noexcept;

    const SpatialMesh& mesh() const noexcept;

    /// In place on a buffer of mesh().size() values.
    void forward(std::span<double> data);
    void inverse(std::span<double> data);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Solves (c A_h - sigma Lambda_h) u = rhs by diagonalization in the sine
/// basis. Denominators c prod_r a_r - sigma sum_k mu_k prod_{l != k} a_l are
/// tabulated once per mesh, so each solve costs two transforms.
class CompactHelmholtzSolver {
public:
    explicit CompactHelmholtzSolver(const SpatialMesh& mesh,
                                    SineTransform::Backend backend = SineTransform::Backend::automatic);

    const SpatialMesh& mesh() const noexcept { return transform_.mesh(); }

    /// `out` may alias `rhs`.
    void solve(std::span<const double> rhs, double c, double sigma, std::span<double> out);

    /// Symbols of A_h and Lambda_h at every sine mode (same layout as a field).
    std::span<const double> average_symbol() const noexcept { return average_symbol_; }
    std::span<const double> laplacian_symbol() const noexcept { return laplacian_symbol_; }

    /// Applies an operator diagonal in the sine basis; `symbol` has one entry
    /// per mode. Used to cross-check the stencils.
    void apply_symbol(std::span<const double> symbol, std::span<const double> in, std::span<double> out);

private:
    SineTransform transform_;
    std::vector<double> average_symbol_;
    std::vector<double> laplacian_symbol_;
    std::vector<double> work_;
};

/// One-shot form of CompactHelmholtzSolver::solve. Requires c > 0 and
/// sigma in (1/2, 1).
Field dst_solve(const Field& rhs, double c, double sigma);

} // namespace vofrac
