#include "vofrac/subdiffusion_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "vofrac/direct_l21.hpp"
#include "vofrac/error.hpp"
#include "vofrac/esa_quadrature.hpp"
#include "vofrac/fast_fl21.hpp"
#include "vofrac/sine_transform.hpp"

namespace vofrac {

const char* to_string(Scheme s) noexcept
{
    return s == Scheme::direct ? "direct" : "fast";
}

Scheme parse_scheme(std::string_view name)
{
    if (name == "direct")
        return Scheme::direct;
    if (name == "fast")
        return Scheme::fast;
    throw InvalidArgument("unknown scheme '" + std::string(name) + "' (expected direct or fast)");
}

namespace {

using Clock = std::chrono::steady_clock;

template <class E>
[[noreturn]] void rethrow_at(int k, const E& e)
{
    std::ostringstream msg;
    msg << "step " << k << ": " << e.what();
    throw E(msg.str());
}

void node_coords(const SpatialMesh& mesh, std::size_t flat, double* x)
{
    int index[3];
    mesh.unflatten(flat, index);
    for (int r = 0; r < mesh.dims(); ++r)
        x[r] = mesh.axis(r).node(index[r]);
}

std::vector<double> sample(const SpatialMesh& mesh, const std::function<double(std::span<const double>)>& fn)
{
    std::vector<double> out(mesh.size());
    double x[3];
    for (std::size_t i = 0; i < out.size(); ++i) {
        node_coords(mesh, i, x);
        out[i] = fn(std::span<const double>(x, static_cast<std::size_t>(mesh.dims())));
    }
    return out;
}

// Shared per-step arithmetic: assembles
//   c A_h u^k + (1 - sigma) Lambda_h u^k - A_h history + A_h f(t_{k+sigma})
// and solves (c A_h - sigma Lambda_h) u^{k+1} = rhs.
class Stepper {
public:
    Stepper(const ProblemSpec& problem) : problem_(problem), solver_(problem.mesh)
    {
        const std::size_t n = problem.mesh.size();
        rhs_.resize(n);
        tmp_.resize(n);
        au_.resize(n);
        lu_.resize(n);
        f_.resize(n);
    }

    void step(double c, double sigma, double t_sigma, std::span<const double> u_k,
              std::span<const double> history, std::span<double> u_next)
    {
        const SpatialMesh& mesh = problem_.mesh;
        const std::size_t n = mesh.size();
        problem_.source(t_sigma, f_);
        // tmp = c u^k - history + f, so one A_h application covers three terms.
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = c * u_k[i] + f_[i] - (history.empty() ? 0.0 : history[i]);
        apply_A_h(mesh, tmp_, au_);
        apply_Lambda_h(mesh, u_k, lu_);
        for (std::size_t i = 0; i < n; ++i)
            rhs_[i] = au_[i] + (1.0 - sigma) * lu_[i];
        solver_.solve(rhs_, c, sigma, u_next);
    }

private:
    const ProblemSpec& problem_;
    CompactHelmholtzSolver solver_;
    std::vector<double> rhs_, tmp_, au_, lu_, f_;
};

void check_storage(const SolverConfig& config, std::size_t needed)
{
    if (config.max_storage && needed > *config.max_storage) {
        std::ostringstream msg;
        msg << "direct scheme needs " << needed << " scalars, cap is " << *config.max_storage;
        throw StorageLimitExceeded(msg.str());
    }
}

RunReport run_direct(const ProblemSpec& problem, const SolverConfig& config, const SigmaSchedule& schedule,
                     const StepObserver& observer)
{
    const std::size_t dofs = problem.mesh.size();
    const int n = config.steps;
    RunReport report(Field(problem.mesh));
    Stepper stepper(problem);

    // levels[k] = u^k, all retained.
    std::vector<std::vector<double>> levels;
    levels.reserve(static_cast<std::size_t>(n) + 1);
    levels.push_back(sample(problem.mesh, problem.initial));
    std::vector<double> history(dofs);
    if (observer)
        observer(0, levels[0]);

    const auto start = Clock::now();
    for (int k = 0; k < n; ++k) {
        const auto t0 = Clock::now();
        try {
            const std::size_t needed = (static_cast<std::size_t>(k) + 2) * dofs;
            check_storage(config, needed);
            report.peak_storage = std::max(report.peak_storage, needed);

            const CoefficientRowG row = g_row(k, schedule);
            const double s = schedule.s_factor[static_cast<std::size_t>(k)];
            std::fill(history.begin(), history.end(), 0.0);
            for (int l = 1; l <= k; ++l) {
                const double w = s * row.g[static_cast<std::size_t>(l)];
                const auto& hi = levels[static_cast<std::size_t>(k - l + 1)];
                const auto& lo = levels[static_cast<std::size_t>(k - l)];
                for (std::size_t i = 0; i < dofs; ++i)
                    history[i] += w * (hi[i] - lo[i]);
            }
            std::vector<double> next(dofs);
            stepper.step(s * row.g[0], schedule.sigma[static_cast<std::size_t>(k)],
                         schedule.t_sigma[static_cast<std::size_t>(k)], levels.back(), history, next);
            levels.push_back(std::move(next));
        } catch (const StorageLimitExceeded& e) {
            rethrow_at(k, e);
        } catch (const InvalidArgument& e) {
            rethrow_at(k, e);
        } catch (const ConvergenceError& e) {
            rethrow_at(k, e);
        }
        report.step_times.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
        if (observer)
            observer(k + 1, levels.back());
    }
    report.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    std::copy(levels.back().begin(), levels.back().end(), report.final_field.values().begin());
    return report;
}

RunReport run_fast(const ProblemSpec& problem, const SolverConfig& config, const SigmaSchedule& schedule,
                   const StepObserver& observer)
{
    const std::size_t dofs = problem.mesh.size();
    const int n = config.steps;
    const double dt = schedule.dt;
    const double alo = problem.order.alpha_lo();
    const double ahi = problem.order.alpha_hi();
    const double eps = config.epsilon.value_or(default_epsilon(alo, ahi, dt));

    RunReport report(Field(problem.mesh));
    const EsaQuadrature quad(compute_esa_params(eps, alo, ahi, dt, problem.horizon));
    report.exponentials = quad.size();
    report.epsilon = eps;

    Stepper stepper(problem);
    HistoryBank bank(quad.size(), dofs);
    std::vector<double> u_prev = sample(problem.mesh, problem.initial);
    std::vector<double> u_cur = u_prev;
    std::vector<double> u_next(dofs);
    std::vector<double> history(dofs);
    std::vector<double> theta(quad.size());
    PanelIntegrals panels;
    report.peak_storage = bank.storage_scalars() + 3 * dofs;
    if (observer)
        observer(0, u_cur);

    const auto start = Clock::now();
    for (int k = 0; k < n; ++k) {
        const auto t0 = Clock::now();
        const std::size_t ks = static_cast<std::size_t>(k);
        try {
            const double sigma = schedule.sigma[ks];
            const double a = schedule.alpha_sigma[ks];
            const double local = schedule.s_factor[ks] * std::pow(sigma, 1.0 - a);
            if (k == 0) {
                stepper.step(local, sigma, schedule.t_sigma[ks], u_cur, {}, u_next);
            } else {
                panel_integrals(quad, sigma, schedule.sigma[ks - 1], dt, problem.horizon, panels);
                quad.weights(a, theta);
                const StepOperator op = step_operator(schedule, panels, theta, k);
                bank.begin_advance(k, panels, u_prev, u_cur, theta, history);
                for (double& h : history)
                    h *= op.weight_on_history;
                stepper.step(op.c_implicit, sigma, schedule.t_sigma[ks], u_cur, history, u_next);
                bank.finish_advance(k, panels, u_cur, u_next);
            }
        } catch (const InvalidArgument& e) {
            rethrow_at(k, e);
        } catch (const SequenceError& e) {
            rethrow_at(k, e);
        } catch (const ConvergenceError& e) {
            rethrow_at(k, e);
        }
        // Rotate u^{k-1} <- u^k <- u^{k+1}.
        std::swap(u_prev, u_cur);
        std::swap(u_cur, u_next);
        report.step_times.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
        if (observer)
            observer(k + 1, u_cur);
    }
    report.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    std::copy(u_cur.begin(), u_cur.end(), report.final_field.values().begin());
    return report;
}

} // namespace

Field sample_exact(const ProblemSpec& problem, double t)
{
    if (!problem.exact)
        throw InvalidArgument("problem '" + problem.name + "' has no exact solution");
    return Field(problem.mesh,
                 sample(problem.mesh, [&](std::span<const double> x) { return problem.exact(x, t); }));
}

RunReport run(const ProblemSpec& problem, const SolverConfig& config, const StepObserver& observer)
{
    if (config.steps < 1)
        throw InvalidArgument("solver needs at least one time step");
    if (!problem.source || !problem.initial)
        throw InvalidArgument("problem needs a source and an initial condition");
    if (std::abs(problem.order.horizon() - problem.horizon) > 1e-12 * problem.horizon)
        throw InvalidArgument("order function horizon does not match the problem horizon");

    const TemporalMesh tmesh(problem.horizon, config.steps);
    const SigmaSchedule schedule = build_schedule(tmesh, problem.order, config.sigma_tol);

    RunReport report = config.scheme == Scheme::direct ? run_direct(problem, config, schedule, observer)
                                                       : run_fast(problem, config, schedule, observer);
    if (problem.exact) {
        const Field exact = sample_exact(problem, problem.horizon);
        double err = 0.0;
        for (std::size_t i = 0; i < exact.size(); ++i)
            err = std::max(err, std::abs(exact[i] - report.final_field[i]));
        report.max_error = err;
    }
    return report;
}

} // namespace vofrac
