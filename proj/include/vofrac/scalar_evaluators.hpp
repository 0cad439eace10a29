#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vofrac/esa_quadrature.hpp"
#include "vofrac/temporal_order.hpp"

namespace vofrac {

/// Caputo values at every t_{k+sigma_k}, k = 0..n-1, of a sampled scalar
/// trajectory u_0..u_n.
struct ScalarEvaluation {
    std::vector<double> values;
    std::size_t peak_storage = 0; ///< scalars held at the busiest step
    double wall_time = 0.0;       ///< seconds
};

/// Direct formula; keeps every sample and rebuilds each weight row.
ScalarEvaluation evaluate_direct_trajectory(const SigmaSchedule& schedule, std::span<const double> u);

/// Fast formula with a one-dof history bank.
ScalarEvaluation evaluate_fast_trajectory(const SigmaSchedule& schedule, const EsaQuadrature& quad,
                                          std::span<const double> u);

} // namespace vofrac
