#include "vofrac/scalar_evaluators.hpp"

#include <chrono>

#include "vofrac/direct_l21.hpp"
#include "vofrac/error.hpp"
#include "vofrac/fast_fl21.hpp"

namespace vofrac {

namespace {

using Clock = std::chrono::steady_clock;

void require_trajectory(const SigmaSchedule& schedule, std::span<const double> u)
{
    if (u.size() != static_cast<std::size_t>(schedule.size()) + 1)
        throw InvalidArgument("trajectory must hold n + 1 samples");
}

} // namespace

ScalarEvaluation evaluate_direct_trajectory(const SigmaSchedule& schedule, std::span<const double> u)
{
    require_trajectory(schedule, u);
    ScalarEvaluation out;
    out.values.resize(static_cast<std::size_t>(schedule.size()));
    const auto start = Clock::now();
    for (int k = 0; k < schedule.size(); ++k) {
        const CoefficientRowG row = g_row(k, schedule);
        out.values[static_cast<std::size_t>(k)] =
            evaluate_direct(u.first(static_cast<std::size_t>(k) + 2), row, schedule.s_factor[static_cast<std::size_t>(k)]);
    }
    out.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    // The last step reads u_0..u_n and a row of n weights.
    out.peak_storage = 2 * u.size() - 1;
    return out;
}

ScalarEvaluation evaluate_fast_trajectory(const SigmaSchedule& schedule, const EsaQuadrature& quad,
                                          std::span<const double> u)
{
    require_trajectory(schedule, u);
    ScalarEvaluation out;
    out.values.resize(static_cast<std::size_t>(schedule.size()));
    HistoryBank bank(quad.size(), 1);
    PanelIntegrals panels;
    const auto start = Clock::now();
    for (int k = 0; k < schedule.size(); ++k) {
        const std::size_t ks = static_cast<std::size_t>(k);
        if (k > 0) {
            panel_integrals(quad, schedule.sigma[ks], schedule.sigma[ks - 1], schedule.dt, schedule.horizon, panels);
            bank.advance(k, panels, u.subspan(ks - 1, 1), u.subspan(ks, 1), u.subspan(ks + 1, 1));
        }
        out.values[ks] = evaluate_fast(bank, quad, schedule, k, u[ks], u[ks + 1], k > 0 ? u[ks - 1] : 0.0);
    }
    out.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    // Bank, three panel tables, and the three samples u_{k-1}, u_k, u_{k+1}.
    out.peak_storage = bank.storage_scalars() + 3 * quad.size() + 3;
    return out;
}

} // namespace vofrac
