#include "vofrac/sine_transform.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "vofrac/error.hpp"

namespace vofrac {

namespace {

constexpr int kMatrixBelow = 32;

// FFTW's planner is not thread-safe.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

} // namespace

struct SineTransform::Impl {
    struct Pass {
        int dim = 0;
        std::size_t n = 0;      // points per line
        std::size_t stride = 1; // between points of a line
        std::size_t outer = 1;  // blocks of n * stride values
        fftw_plan plan = nullptr;
        std::vector<double> sines; // n x n, only for the matrix path
        double forward_scale = 1.0;
        double inverse_scale = 1.0;
    };

    SpatialMesh mesh;
    std::vector<Pass> passes;
    double* buffer = nullptr; // fftw-aligned scratch the plans were made on
    std::vector<double> line_in;
    std::vector<double> line_out;

    Impl(const SpatialMesh& m, Backend backend) : mesh(m)
    {
        bool any_fftw = false;
        for (int r = 0; r < mesh.dims(); ++r) {
            Pass p;
            p.dim = r;
            p.n = static_cast<std::size_t>(mesh.axis(r).interior());
            p.stride = mesh.stride(r);
            p.outer = mesh.size() / (p.n * p.stride);
            const int cells = mesh.axis(r).cells;
            const bool use_fftw =
                backend == Backend::fftw || (backend == Backend::automatic && cells >= kMatrixBelow);
            if (use_fftw) {
                any_fftw = true;
                // RODFT00 returns twice the plain sine sum.
                p.forward_scale = 0.5;
                p.inverse_scale = 1.0 / cells;
            } else {
                p.sines.resize(p.n * p.n);
                for (std::size_t j = 0; j < p.n; ++j)
                    for (std::size_t q = 0; q < p.n; ++q)
                        p.sines[j * p.n + q] =
                            std::sin(static_cast<double>((j + 1) * (q + 1)) * std::numbers::pi / cells);
                p.forward_scale = 1.0;
                p.inverse_scale = 2.0 / cells;
            }
            passes.push_back(std::move(p));
        }

        if (any_fftw) {
            buffer = fftw_alloc_real(mesh.size());
            std::lock_guard lock(planner_mutex());
            for (Pass& p : passes) {
                if (!p.sines.empty())
                    continue;
                fftw_iodim dim{static_cast<int>(p.n), static_cast<int>(p.stride), static_cast<int>(p.stride)};
                fftw_iodim loops[2] = {
                    {static_cast<int>(p.outer), static_cast<int>(p.n * p.stride), static_cast<int>(p.n * p.stride)},
                    {static_cast<int>(p.stride), 1, 1},
                };
                fftw_r2r_kind kind = FFTW_RODFT00;
                p.plan = fftw_plan_guru_r2r(1, &dim, 2, loops, buffer, buffer, &kind, FFTW_ESTIMATE);
                if (!p.plan)
                    throw Error("FFTW could not plan a sine transform");
            }
        }
        std::size_t longest = 0;
        for (const Pass& p : passes)
            longest = std::max(longest, p.n);
        line_in.resize(longest);
        line_out.resize(longest);
    }

    ~Impl()
    {
        std::lock_guard lock(planner_mutex());
        for (Pass& p : passes)
            if (p.plan)
                fftw_destroy_plan(p.plan);
        if (buffer)
            fftw_free(buffer);
    }

    void matrix_pass(const Pass& p, double* data, double scale)
    {
        const std::size_t block = p.n * p.stride;
        for (std::size_t o = 0; o < p.outer; ++o) {
            double* base = data + o * block;
            for (std::size_t i = 0; i < p.stride; ++i) {
                for (std::size_t j = 0; j < p.n; ++j)
                    line_in[j] = base[j * p.stride + i];
                for (std::size_t q = 0; q < p.n; ++q) {
                    const double* row = p.sines.data() + q * p.n;
                    double sum = 0.0;
                    for (std::size_t j = 0; j < p.n; ++j)
                        sum += row[j] * line_in[j];
                    line_out[q] = scale * sum;
                }
                for (std::size_t q = 0; q < p.n; ++q)
                    base[q * p.stride + i] = line_out[q];
            }
        }
    }

    void run(std::span<double> data, bool inverse)
    {
        if (data.size() != mesh.size())
            throw InvalidArgument("sine transform: buffer does not match the mesh");
        bool in_buffer = false;
        for (const Pass& p : passes) {
            const double scale = inverse ? p.inverse_scale : p.forward_scale;
            if (p.plan) {
                if (!in_buffer) {
                    std::copy(data.begin(), data.end(), buffer);
                    in_buffer = true;
                }
                fftw_execute(p.plan);
                for (std::size_t i = 0; i < data.size(); ++i)
                    buffer[i] *= scale;
            } else {
                if (in_buffer) {
                    std::copy(buffer, buffer + data.size(), data.begin());
                    in_buffer = false;
                }
                matrix_pass(p, data.data(), scale);
            }
        }
        if (in_buffer)
            std::copy(buffer, buffer + data.size(), data.begin());
    }
};

SineTransform::SineTransform(const SpatialMesh& mesh, Backend backend)
    : impl_(std::make_unique<Impl>(mesh, backend))
{
}

SineTransform::~SineTransform() = default;
SineTransform::SineTransform(SineTransform&&) noexcept = default;
SineTransform& SineTransform::operator=(SineTransform&&) noexcept = default;

const SpatialMesh& SineTransform::mesh() const noexcept
{
    return impl_->mesh;
}

void SineTransform::forward(std::span<double> data)
{
    impl_->run(data, false);
}

void SineTransform::inverse(std::span<double> data)
{
    impl_->run(data, true);
}

CompactHelmholtzSolver::CompactHelmholtzSolver(const SpatialMesh& mesh, SineTransform::Backend backend)
    : transform_(mesh, backend), average_symbol_(mesh.size()), laplacian_symbol_(mesh.size()), work_(mesh.size())
{
    const StencilEigens eig(mesh);
    const int d = mesh.dims();
    int index[3];
    for (std::size_t flat = 0; flat < mesh.size(); ++flat) {
        mesh.unflatten(flat, index);
        double a[3];
        double mu[3];
        double prod = 1.0;
        for (int r = 0; r < d; ++r) {
            a[r] = eig.average[static_cast<std::size_t>(r)][static_cast<std::size_t>(index[r] - 1)];
            mu[r] = eig.second[static_cast<std::size_t>(r)][static_cast<std::size_t>(index[r] - 1)];
            prod *= a[r];
        }
        double lap = 0.0;
        for (int k = 0; k < d; ++k) {
            double others = 1.0;
            for (int l = 0; l < d; ++l)
                if (l != k)
                    others *= a[l];
            lap += mu[k] * others;
        }
        average_symbol_[flat] = prod;
        laplacian_symbol_[flat] = lap;
    }
}

void CompactHelmholtzSolver::solve(std::span<const double> rhs, double c, double sigma, std::span<double> out)
{
    if (!(c > 0.0))
        throw InvalidArgument("compact solve needs c > 0");
    if (!(sigma > 0.5 && sigma < 1.0))
        throw InvalidArgument("compact solve needs sigma in (1/2, 1)");
    if (rhs.size() != work_.size() || out.size() != work_.size())
        throw InvalidArgument("compact solve: buffer does not match the mesh");
    std::copy(rhs.begin(), rhs.end(), work_.begin());
    transform_.forward(work_);
    for (std::size_t i = 0; i < work_.size(); ++i)
        work_[i] /= c * average_symbol_[i] - sigma * laplacian_symbol_[i];
    transform_.inverse(work_);
    std::copy(work_.begin(), work_.end(), out.begin());
}

void CompactHelmholtzSolver::apply_symbol(std::span<const double> symbol, std::span<const double> in,
                                          std::span<double> out)
{
    if (symbol.size() != work_.size() || in.size() != work_.size() || out.size() != work_.size())
        throw InvalidArgument("apply_symbol: buffer does not match the mesh");
    std::copy(in.begin(), in.end(), work_.begin());
    transform_.forward(work_);
    for (std::size_t i = 0; i < work_.size(); ++i)
        work_[i] *= symbol[i];
    transform_.inverse(work_);
    std::copy(work_.begin(), work_.end(), out.begin());
}

Field dst_solve(const Field& rhs, double c, double sigma)
{
    CompactHelmholtzSolver solver(rhs.mesh());
    Field out(rhs.mesh());
    solver.solve(rhs.values(), c, sigma, out.values());
    return out;
}

} // namespace vofrac
