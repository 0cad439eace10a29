#pragma once

#include <functional>
#include <string_view>

#include "vofrac/subdiffusion_solver.hpp"

namespace vofrac {

/// u = (t^3 + 3t^2 + 1) prod_r sin x_r on (0, pi)^dims with
/// alpha(t) = (2 + sin t)/4 unless another order is given.
ProblemSpec manufactured_problem(int dims, int m, double horizon, const OrderFunction& order);

/// The 2D manufactured problem on (0, pi)^2, T = 1.
ProblemSpec example1_2d(int m);
/// The 3D manufactured problem on (0, pi)^3, T = 1.
ProblemSpec example2_3d(int m);

/// f = 0 with the given initial condition; no exact solution.
ProblemSpec homogeneous_problem(const SpatialMesh& mesh, double horizon, const OrderFunction& order,
                                ProblemSpec::Initial initial);

/// A scalar trajectory with known derivative and known Caputo derivative.
struct ScalarProblem {
    OrderFunction order;
    std::function<double(double)> u;
    std::function<double(double)> du;
    std::function<double(double)> caputo; ///< exact D^{alpha(t)} u at t
};

/// u = t^3 + 3t^2 + 1 with the given order.
ScalarProblem scalar_ode(const OrderFunction& order);
/// u = t^3 with the given order.
ScalarProblem scalar_cubic(const OrderFunction& order);

} // namespace vofrac
