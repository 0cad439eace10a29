#pragma once

#include <functional>
#include <string_view>
#include <utility>
#include <vector>

namespace vofrac {

/// Variable fractional order alpha(t) on [0, T] with declared bounds
/// 0 < alpha_lo <= alpha(t) <= alpha_hi < 1.
///
/// The bounds are checked on a dense uniform sample of [0, T] when the object
/// is built; a violation throws InvalidArgument.
class OrderFunction {
public:
    using Fn = std::function<double(double)>;

    static constexpr int kBoundCheckSamples = 1000;

    OrderFunction(Fn fn, double alpha_lo, double alpha_hi, double horizon);

    double operator()(double t) const { return fn_(t); }
    double alpha_lo() const noexcept { return alpha_lo_; }
    double alpha_hi() const noexcept { return alpha_hi_; }
    double horizon() const noexcept { return horizon_; }

    /// alpha(t) = a.
    static OrderFunction constant(double a, double horizon = 1.0);

    /// alpha(t) = (2 + sin t) / 4, with bounds taken over [0, horizon].
    static OrderFunction sin4(double horizon = 1.0);

    /// Piecewise-linear interpolation of (time, value) knots; constant
    /// extrapolation outside the knot range. Bounds are the knot extrema.
    static OrderFunction tabulated(std::vector<std::pair<double, double>> knots, double horizon);

    /// Parses `const:<a>`, `sin4`, or `table:t0:v0,t1:v1,...`.
    static OrderFunction parse(std::string_view spec, double horizon = 1.0);

private:
    Fn fn_;
    double alpha_lo_;
    double alpha_hi_;
    double horizon_;
};

/// Uniform mesh t_k = k * dt on [0, T], dt = T / n.
class TemporalMesh {
public:
    TemporalMesh(double horizon, int steps);

    double horizon() const noexcept { return horizon_; }
    int steps() const noexcept { return steps_; }
    double dt() const noexcept { return dt_; }
    double node(int k) const noexcept { return k * dt_; }

private:
    double horizon_;
    int steps_;
    double dt_;
};

/// Superconvergence data for every step k = 0..n-1.
struct SigmaSchedule {
    std::vector<double> sigma;       ///< sigma_k in (1/2, 1)
    std::vector<double> t_sigma;     ///< t_k + sigma_k * dt
    std::vector<double> alpha_sigma; ///< alpha(t_sigma[k])
    std::vector<double> s_factor;    ///< dt^{-alpha} / Gamma(2 - alpha)
    double dt = 0.0;
    double horizon = 0.0;

    int size() const noexcept { return static_cast<int>(sigma.size()); }
};

inline constexpr double kDefaultSigmaTol = 1e-14;

/// Root in (1/2, 1) of sigma - (1 - alpha(t_k + sigma*dt)/2).
///
/// Newton from sigma = 0.75 with a central-difference slope; falls back to
/// bisection on [1/2 + 1e-12, 1 - 1e-12] if Newton leaves the interval or
/// stalls. Throws ConvergenceError if neither reaches |F| <= tol, and
/// InvalidArgument if alpha leaves (0, 1) at a probed point.
double solve_sigma(const OrderFunction& order, double t_k, double dt, double tol = kDefaultSigmaTol);

SigmaSchedule build_schedule(const TemporalMesh& mesh, const OrderFunction& order,
                             double tol = kDefaultSigmaTol);

} // namespace vofrac
