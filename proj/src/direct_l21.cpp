#include "vofrac/direct_l21.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "vofrac/compensated_sum.hpp"
#include "vofrac/error.hpp"

namespace vofrac {

PanelMoments panel_moments(double zc, double a)
{
    if (zc < 2.0) {
        const double z0 = zc + 0.5;
        const double z1 = zc - 0.5;
        const double flat = (std::pow(z0, 1.0 - a) - std::pow(z1, 1.0 - a)) / (1.0 - a);
        const double tilt = (std::pow(z0, 2.0 - a) - std::pow(z1, 2.0 - a)) / (2.0 - a) - zc * flat;
        return {flat, tilt};
    }

    // (1 + v/zc)^{-a} = sum_j c_j (v/zc)^j, c_j = binom(-a, j); integrate
    // v^j and v^{j+1} over [-1/2, 1/2]. Only even (odd) j survive in flat (tilt).
    const double x = 0.5 / zc;
    double coeff = 1.0; // c_j
    double xpow = 1.0;  // x^j
    double flat = 0.0;
    double tilt = 0.0;
    for (int j = 0; j < 80; ++j) {
        const double term = coeff * xpow;
        if (j % 2 == 0)
            flat += term / (j + 1);
        else
            tilt += term / (j + 2);
        if (j > 2 && std::abs(term) < 1e-18 * std::abs(flat))
            break;
        coeff *= (-a - j) / (j + 1);
        xpow *= x;
    }
    const double scale = std::pow(zc, -a);
    return {scale * flat, 0.5 * scale * tilt};
}

CoefficientRowG g_row(int k, const SigmaSchedule& schedule)
{
    if (k < 0 || k >= schedule.size())
        throw InvalidArgument("g_row: step index out of range");

    const double sigma = schedule.sigma[k];
    const double a = schedule.alpha_sigma[k];
    CoefficientRowG row;
    row.k = k;
    row.g.resize(static_cast<std::size_t>(k) + 1);

    const double last_panel = std::pow(sigma, 1.0 - a);
    if (k == 0) {
        row.g[0] = last_panel;
        return row;
    }

    // Panel q (q = 1..k) is centred at distance zc = sigma + q - 1/2 (in dt
    // units) from t_{k+sigma}.
    PanelMoments next = panel_moments(sigma + 0.5, a);
    row.g[0] = last_panel - (1.0 - a) * next.tilt;
    for (int l = 1; l <= k; ++l) {
        const PanelMoments cur = next;
        if (l < k) {
            next = panel_moments(sigma + l + 0.5, a);
            row.g[l] = (1.0 - a) * (cur.flat + cur.tilt - next.tilt);
        } else {
            row.g[l] = (1.0 - a) * (cur.flat + cur.tilt);
        }
    }
    return row;
}

double evaluate_direct(std::span<const double> history, const CoefficientRowG& row, double s_k)
{
    const std::size_t k = static_cast<std::size_t>(row.k);
    if (history.size() != k + 2) {
        std::ostringstream msg;
        msg << "evaluate_direct: history has " << history.size() << " values, step " << k << " needs "
            << k + 2;
        throw InvalidArgument(msg.str());
    }
    CompensatedSum<> acc;
    for (std::size_t l = 0; l <= k; ++l)
        acc += row.g[l] * (history[k - l + 1] - history[k - l]);
    return s_k * acc.value();
}

double caputo_oracle(const std::function<double(double)>& u_prime, const OrderFunction& order, double t,
                     double tol)
{
    if (!(tol > 0.0))
        throw InvalidArgument("caputo_oracle: tolerance must be positive");
    if (t < 0.0)
        throw InvalidArgument("caputo_oracle: t must be non-negative");
    if (t == 0.0)
        return 0.0;

    // tanh-sinh copes with the endpoint singularity; the complement argument
    // gives t - tau without cancellation next to t.
    boost::math::quadrature::tanh_sinh<double> integrator(15);
    const double a = order(t);
    auto integrand = [&](double tau, double tau_c) {
        const double gap = tau_c > 0.0 ? tau_c : t - tau;
        return u_prime(tau) * std::pow(gap, -a);
    };
    auto run = [&](double rel_tol) {
        double err = 0.0;
        const double value = integrator.integrate(integrand, 0.0, t, rel_tol, &err);
        return std::pair{value, err};
    };

    // Termination inside the integrator is relative; tighten until the
    // absolute estimate meets tol.
    auto [value, err] = run(tol);
    double rel = tol / std::max(1.0, std::abs(value));
    for (int attempt = 0; attempt < 3 && err > tol; ++attempt) {
        rel *= 0.1;
        std::tie(value, err) = run(rel);
    }
    if (!(err <= tol)) {
        std::ostringstream msg;
        msg << "caputo_oracle: quadrature error estimate " << err << " exceeds tolerance " << tol;
        throw ConvergenceError(msg.str());
    }
    return value / std::tgamma(1.0 - a);
}

} // namespace vofrac
