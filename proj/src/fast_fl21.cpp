#include "vofrac/fast_fl21.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vofrac/error.hpp"

namespace vofrac {

namespace {

// Below this reduced exponent the bracketed closed forms lose digits to
// cancellation; a Taylor series is used instead.
constexpr double kSeriesSwitch = 1.0;

void require_len(std::span<const double> v, std::size_t n, const char* what)
{
    if (v.size() != n) {
        std::ostringstream msg;
        msg << what << ": expected " << n << " values, got " << v.size();
        throw InvalidArgument(msg.str());
    }
}

} // namespace

void panel_integrals(const EsaQuadrature& quad, double sigma_k, double sigma_km1, double dt, double horizon,
                     PanelIntegrals& out)
{
    const auto lambdas = quad.lambdas();
    const std::size_t n = lambdas.size();
    out.a.resize(n);
    out.b.resize(n);
    out.decay.resize(n);
    const double ratio = dt / horizon;

    for (std::size_t i = 0; i < n; ++i) {
        const double z = lambdas[i] * ratio;
        const double w = std::exp(-z * sigma_k);
        double a_bracket = 0.0;
        double b_bracket = 0.0;
        if (z < kSeriesSwitch) {
            // E1 = sum (-z)^j/(j+1)!, E2 = sum (-z)^j/(j! (j+2)).
            double term = 1.0; // (-z)^j / j!
            for (int j = 0; j < 30; ++j) {
                const double e1 = term / (j + 1);
                const double e2 = term / (j + 2);
                a_bracket += 0.5 * e1 + e2;
                b_bracket += 0.5 * e1 - e2;
                term *= -z / (j + 1);
                if (std::abs(term) < 1e-18)
                    break;
            }
        } else {
            const double ez = std::exp(-z);
            const double e1 = (1.0 - ez) / z;
            const double e2 = (1.0 - (1.0 + z) * ez) / (z * z);
            a_bracket = 0.5 * e1 + e2;
            b_bracket = 0.5 * e1 - e2;
        }
        out.a[i] = w * a_bracket;
        out.b[i] = w * b_bracket;
        out.decay[i] = std::exp(-z * (1.0 + sigma_k - sigma_km1));
    }
}

PanelIntegrals panel_integrals(const EsaQuadrature& quad, double sigma_k, double sigma_km1, double dt,
                               double horizon)
{
    PanelIntegrals out;
    panel_integrals(quad, sigma_k, sigma_km1, dt, horizon, out);
    return out;
}

HistoryBank::HistoryBank(std::size_t exponentials, std::size_t dofs)
    : exponentials_(exponentials), dofs_(dofs), values_(exponentials * dofs, 0.0)
{
    if (exponentials == 0 || dofs == 0)
        throw InvalidArgument("history bank needs at least one exponential and one dof");
}

std::span<const double> HistoryBank::row(std::size_t i) const
{
    return std::span<const double>(values_).subspan(i * dofs_, dofs_);
}

void HistoryBank::advance(int k, const PanelIntegrals& panels, std::span<const double> u_km1,
                          std::span<const double> u_k, std::span<const double> u_kp1)
{
    begin_advance(k, panels, u_km1, u_k, {}, {});
    finish_advance(k, panels, u_k, u_kp1);
}

void HistoryBank::begin_advance(int k, const PanelIntegrals& panels, std::span<const double> u_km1,
                                std::span<const double> u_k, std::span<const double> weights,
                                std::span<double> weighted)
{
    if (half_step_ || k != step_ + 1 || k < 1) {
        std::ostringstream msg;
        msg << "history bank at step " << step_ << (half_step_ ? " (mid-advance)" : "")
            << " cannot begin step " << k;
        throw SequenceError(msg.str());
    }
    require_len(u_km1, dofs_, "begin_advance u_{k-1}");
    require_len(u_k, dofs_, "begin_advance u_k");
    if (panels.a.size() != exponentials_)
        throw InvalidArgument("panel integrals do not match the bank's exponential count");
    const bool contract_now = !weights.empty();
    if (contract_now) {
        require_len(weights, exponentials_, "begin_advance weights");
        if (weighted.size() != dofs_)
            throw InvalidArgument("begin_advance: output has wrong length");
        std::fill(weighted.begin(), weighted.end(), 0.0);
    }

    for (std::size_t i = 0; i < exponentials_; ++i) {
        double* h = values_.data() + i * dofs_;
        const double decay = panels.decay[i];
        const double a = panels.a[i];
        for (std::size_t j = 0; j < dofs_; ++j)
            h[j] = decay * h[j] + a * (u_k[j] - u_km1[j]);
        if (contract_now) {
            const double theta = weights[i];
            for (std::size_t j = 0; j < dofs_; ++j)
                weighted[j] += theta * h[j];
        }
    }
    half_step_ = true;
}

void HistoryBank::finish_advance(int k, const PanelIntegrals& panels, std::span<const double> u_k,
                                 std::span<const double> u_kp1)
{
    if (!half_step_ || k != step_ + 1) {
        std::ostringstream msg;
        msg << "history bank at step " << step_ << " cannot finish step " << k;
        throw SequenceError(msg.str());
    }
    require_len(u_k, dofs_, "finish_advance u_k");
    require_len(u_kp1, dofs_, "finish_advance u_{k+1}");
    for (std::size_t i = 0; i < exponentials_; ++i) {
        double* h = values_.data() + i * dofs_;
        const double b = panels.b[i];
        for (std::size_t j = 0; j < dofs_; ++j)
            h[j] += b * (u_kp1[j] - u_k[j]);
    }
    half_step_ = false;
    step_ = k;
}

void HistoryBank::contract(std::span<const double> weights, std::span<double> out) const
{
    require_len(weights, exponentials_, "contract weights");
    if (out.size() != dofs_)
        throw InvalidArgument("contract: output has wrong length");
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < exponentials_; ++i) {
        const double* h = values_.data() + i * dofs_;
        const double theta = weights[i];
        for (std::size_t j = 0; j < dofs_; ++j)
            out[j] += theta * h[j];
    }
}

StepOperator step_operator(const SigmaSchedule& schedule, const PanelIntegrals& panels,
                           std::span<const double> theta, int k)
{
    if (k < 1 || k >= schedule.size())
        throw InvalidArgument("step_operator: k must be in [1, n-1]");
    require_len(theta, panels.b.size(), "step_operator weights");
    const double a = schedule.alpha_sigma[k];
    StepOperator op;
    op.weight_on_history = std::pow(schedule.horizon, -a) / std::tgamma(1.0 - a);
    double sum_b = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i)
        sum_b += theta[i] * panels.b[i];
    op.c_implicit = schedule.s_factor[k] * std::pow(schedule.sigma[k], 1.0 - a) + op.weight_on_history * sum_b;
    return op;
}

void evaluate_fast(const HistoryBank& bank, const EsaQuadrature& quad, const SigmaSchedule& schedule, int k,
                   std::span<const double> u_k, std::span<const double> u_kp1, std::span<const double> u_km1,
                   std::span<double> out)
{
    if (k < 0 || k >= schedule.size())
        throw InvalidArgument("evaluate_fast: step index out of range");
    const std::size_t n = bank.dofs();
    require_len(u_k, n, "evaluate_fast u_k");
    require_len(u_kp1, n, "evaluate_fast u_{k+1}");
    if (out.size() != n)
        throw InvalidArgument("evaluate_fast: output has wrong length");

    const double a = schedule.alpha_sigma[k];
    const double local = schedule.s_factor[k] * std::pow(schedule.sigma[k], 1.0 - a);
    if (k == 0) {
        if (bank.step() != 0)
            throw SequenceError("evaluate_fast: step 0 requires an untouched bank");
        // Direct formula with g_0^{(0)} = sigma_0^{1 - alpha}.
        for (std::size_t j = 0; j < n; ++j)
            out[j] = local * (u_kp1[j] - u_k[j]);
        return;
    }
    (void)u_km1; // already folded into the bank
    if (bank.step() != k) {
        std::ostringstream msg;
        msg << "evaluate_fast: bank is at step " << bank.step() << ", requested step " << k;
        throw SequenceError(msg.str());
    }
    const auto theta = quad.weights(a);
    bank.contract(theta, out);
    const double w = std::pow(schedule.horizon, -a) / std::tgamma(1.0 - a);
    for (std::size_t j = 0; j < n; ++j)
        out[j] = w * out[j] + local * (u_kp1[j] - u_k[j]);
}

double evaluate_fast(const HistoryBank& bank, const EsaQuadrature& quad, const SigmaSchedule& schedule, int k,
                     double u_k, double u_kp1, double u_km1)
{
    double out = 0.0;
    evaluate_fast(bank, quad, schedule, k, std::span<const double>(&u_k, 1), std::span<const double>(&u_kp1, 1),
                  std::span<const double>(&u_km1, 1), std::span<double>(&out, 1));
    return out;
}

CoefficientRowRho rho_row(int k, const EsaQuadrature& quad, const SigmaSchedule& schedule)
{
    if (k < 0 || k >= schedule.size())
        throw InvalidArgument("rho_row: step index out of range");
    const double sigma = schedule.sigma[k];
    const double a = schedule.alpha_sigma[k];
    const double dt = schedule.dt;
    const double horizon = schedule.horizon;

    CoefficientRowRho row;
    row.k = k;
    row.rho.assign(static_cast<std::size_t>(k) + 1, 0.0);
    const double last_panel = std::pow(sigma, 1.0 - a);
    if (k == 0) {
        row.rho[0] = last_panel;
        return row;
    }

    const auto panels = panel_integrals(quad, sigma, sigma, dt, horizon);
    const auto theta = quad.weights(a);
    const auto lambdas = quad.lambdas();
    const double scale = std::pow(dt / horizon, a) * (1.0 - a);

    // shift_i = exp(-lambda_i (l - 1) dt/T), advanced by one panel per l.
    std::vector<double> shift(lambdas.size(), 1.0);
    std::vector<double> step(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        step[i] = std::exp(-lambdas[i] * dt / horizon);

    double sum0 = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i)
        sum0 += theta[i] * panels.b[i];
    row.rho[0] = scale * sum0 + last_panel;

    for (int l = 1; l <= k; ++l) {
        double sum = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double next = shift[i] * step[i];
            sum += theta[i] * (shift[i] * panels.a[i] + (l < k ? next * panels.b[i] : 0.0));
            shift[i] = next;
        }
        row.rho[l] = scale * sum;
    }
    return row;
}

double rho_epsilon_bound(double alpha_lo, double alpha_hi, double dt)
{
    return 2.0 * (1.0 - alpha_hi) * std::pow(2.0 - 0.5 * alpha_hi, 1.0 - alpha_hi) * std::pow(dt, alpha_hi) /
           ((6.0 - 3.5 * alpha_lo) * (1.0 - 0.5 * alpha_lo));
}

double default_epsilon(double alpha_lo, double alpha_hi, double dt)
{
    return std::min({dt * dt, 0.5 * rho_epsilon_bound(alpha_lo, alpha_hi, dt), std::exp(-1.0)});
}

RhoReport check_rho_properties(const CoefficientRowRho& row, const SigmaSchedule& schedule, double epsilon)
{
    RhoReport report;
    const int k = row.k;
    const double sigma = schedule.sigma[k];
    const double a = schedule.alpha_sigma[k];
    const auto& rho = row.rho;
    auto fail = [&](int l, std::string what) {
        if (report.passed) {
            report.passed = false;
            report.first_failure = l;
            report.failure = std::move(what);
        }
    };

    if (!(rho[0] > 0.0))
        fail(0, "rho_0 is not positive");
    if (k == 0)
        return report;

    for (int l = 0; l < k; ++l)
        if (!(rho[l + 1] < rho[l]))
            fail(l + 1, "rho is not strictly decreasing");

    const double floor = (1.0 - epsilon) * (1.0 - a) / (2.0 * std::pow(k + sigma, a));
    report.floor_margin = rho[k] - floor;
    if (!(floor > 0.0 && rho[k] > floor))
        fail(k, "rho_k is below the positivity floor");

    report.difference_margin = (2.0 * sigma - 1.0) * rho[0] - sigma * rho[1];
    if (!(report.difference_margin >= 0.0))
        fail(1, "(2 sigma - 1) rho_0 - sigma rho_1 < 0");
    return report;
}

GapReport check_rho_gap(const CoefficientRowRho& rho, const CoefficientRowG& g, const SigmaSchedule& schedule,
                        double epsilon)
{
    if (rho.k != g.k || rho.rho.size() != g.g.size())
        throw InvalidArgument("check_rho_gap: rows belong to different steps");
    GapReport report;
    const int k = rho.k;
    const double a = schedule.alpha_sigma[k];
    const double unit = (1.0 - a) * std::pow(schedule.dt, -a) * epsilon;
    for (int l = 0; l <= k; ++l) {
        const double gap = std::abs(rho.rho[l] - g.g[l]);
        double bound = 0.0;
        if (k == 0)
            bound = 0.0;
        else if (l == 0)
            bound = 0.25 * unit;
        else if (l == k)
            bound = unit;
        else
            bound = 1.25 * unit;
        // k = 0 rows agree by construction; allow roundoff only.
        if (k == 0)
            bound = 1e-15 * std::abs(g.g[0]);
        const double ratio = bound > 0.0 ? gap / bound : (gap == 0.0 ? 0.0 : INFINITY);
        report.worst_ratio = std::max(report.worst_ratio, ratio);
        if (!(gap <= bound) && report.passed) {
            report.passed = false;
            report.first_failure = l;
        }
    }
    return report;
}

} // namespace vofrac
