#include "vofrac/problems.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace vofrac {

namespace {

double profile(std::span<const double> x)
{
    double p = 1.0;
    for (double xi : x)
        p *= std::sin(xi);
    return p;
}

double time_factor(double t)
{
    return t * t * t + 3.0 * t * t + 1.0;
}

// D^{a} t^3 = 6 t^{3-a} / Gamma(4-a),  D^{a} t^2 = 2 t^{2-a} / Gamma(3-a).
double caputo_cubic(double t, double a)
{
    return 6.0 * std::pow(t, 3.0 - a) / std::tgamma(4.0 - a);
}

double caputo_square(double t, double a)
{
    return 2.0 * std::pow(t, 2.0 - a) / std::tgamma(3.0 - a);
}

} // namespace

ProblemSpec manufactured_problem(int dims, int m, double horizon, const OrderFunction& order)
{
    SpatialMesh mesh = SpatialMesh::cube(dims, 0.0, std::numbers::pi, m);

    // f is separable: the spatial profile is tabulated once.
    auto shape = std::make_shared<std::vector<double>>(mesh.size());
    {
        int index[3];
        double x[3];
        for (std::size_t i = 0; i < shape->size(); ++i) {
            mesh.unflatten(i, index);
            for (int r = 0; r < dims; ++r)
                x[r] = mesh.axis(r).node(index[r]);
            (*shape)[i] = profile(std::span<const double>(x, static_cast<std::size_t>(dims)));
        }
    }

    ProblemSpec p{mesh, horizon, order, {}, {}, {}, {}};
    p.source = [shape, order, dims](double t, std::span<double> out) {
        const double a = order(t);
        const double amp = caputo_cubic(t, a) + 3.0 * caputo_square(t, a) + dims * time_factor(t);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = amp * (*shape)[i];
    };
    p.initial = [](std::span<const double> x) { return profile(x); };
    p.exact = [](std::span<const double> x, double t) { return time_factor(t) * profile(x); };
    p.name = dims == 2 ? "example1_2d" : dims == 3 ? "example2_3d" : "manufactured_" + std::to_string(dims) + "d";
    return p;
}

ProblemSpec example1_2d(int m)
{
    return manufactured_problem(2, m, 1.0, OrderFunction::sin4(1.0));
}

ProblemSpec example2_3d(int m)
{
    return manufactured_problem(3, m, 1.0, OrderFunction::sin4(1.0));
}

ProblemSpec homogeneous_problem(const SpatialMesh& mesh, double horizon, const OrderFunction& order,
                                ProblemSpec::Initial initial)
{
    ProblemSpec p{mesh, horizon, order, {}, std::move(initial), {}, "homogeneous"};
    p.source = [](double, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
    return p;
}

ScalarProblem scalar_ode(const OrderFunction& order)
{
    return {order,
            [](double t) { return time_factor(t); },
            [](double t) { return 3.0 * t * t + 6.0 * t; },
            [order](double t) {
                const double a = order(t);
                return caputo_cubic(t, a) + 3.0 * caputo_square(t, a);
            }};
}

ScalarProblem scalar_cubic(const OrderFunction& order)
{
    return {order,
            [](double t) { return t * t * t; },
            [](double t) { return 3.0 * t * t; },
            [order](double t) { return caputo_cubic(t, order(t)); }};
}

} // namespace vofrac
