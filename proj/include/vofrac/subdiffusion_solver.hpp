#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vofrac/tensor_grid.hpp"
#include "vofrac/temporal_order.hpp"

namespace vofrac {

enum class Scheme { direct, fast };

const char* to_string(Scheme s) noexcept;
Scheme parse_scheme(std::string_view name);

/// D^{alpha(t)} u = Delta u + f on a box, u = phi at t = 0, u = 0 on the
/// boundary.
struct ProblemSpec {
    /// Writes f(x, t) at every interior node into `out` (field layout).
    using Source = std::function<void(double t, std::span<double> out)>;
    using Initial = std::function<double(std::span<const double> x)>;
    using Exact = std::function<double(std::span<const double> x, double t)>;

    SpatialMesh mesh;
    double horizon = 1.0;
    OrderFunction order;
    Source source;
    Initial initial;
    Exact exact; ///< optional
    std::string name;
};

struct SolverConfig {
    Scheme scheme = Scheme::fast;
    int steps = 1;
    std::optional<double> epsilon;        ///< fast only; default_epsilon() when empty
    double sigma_tol = kDefaultSigmaTol;
    std::optional<std::size_t> max_storage; ///< scalars; exceeded -> StorageLimitExceeded
};

struct RunReport {
    explicit RunReport(Field field) : final_field(std::move(field)) {}

    Field final_field;
    std::optional<double> max_error; ///< max-norm error at t_n when the exact solution is known
    double wall_time = 0.0;          ///< seconds, setup excluded
    std::size_t peak_storage = 0;    ///< live history scalars plus retained levels
    std::vector<double> step_times;
    std::size_t exponentials = 0;    ///< 0 for the direct scheme
    double epsilon = 0.0;            ///< 0 for the direct scheme
};

/// Called after each accepted level u^k, k = 0..n.
using StepObserver = std::function<void(int k, std::span<const double> u)>;

/// Runs the direct or fast scheme for `config.steps` steps. Errors raised
/// inside a step are rethrown with the step index in the message (same
/// exception type).
RunReport run(const ProblemSpec& problem, const SolverConfig& config, const StepObserver& observer = {});

/// Exact solution sampled at the interior nodes.
Field sample_exact(const ProblemSpec& problem, double t);

} // namespace vofrac
