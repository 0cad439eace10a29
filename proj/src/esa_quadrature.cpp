#include "vofrac/esa_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "vofrac/error.hpp"

namespace vofrac {

namespace {

constexpr int kOrderProbes = 11;

void widen(EsaParams& p)
{
    const double budget = 0.25 * p.epsilon;
    const double s_min = 0.5 * p.dt / p.horizon;
    int lo = p.n_lo;
    int hi = p.n_hi;
    for (int j = 0; j < kOrderProbes; ++j) {
        const double a = p.alpha_lo + (p.alpha_hi - p.alpha_lo) * j / (kOrderProbes - 1);
        const double x = boost::math::gamma_q_inv(a, budget);
        hi = std::max(hi, static_cast<int>(std::ceil(std::log(x / s_min) / p.h)));
        const double head = (std::log(budget) + std::lgamma(1.0 + a)) / (a * p.h) - 1.0;
        lo = std::min(lo, static_cast<int>(std::floor(head)));
    }
    p.n_lo = lo;
    p.n_hi = hi;
}

} // namespace

EsaParams compute_esa_params(double epsilon, double alpha_lo, double alpha_hi, double dt, double horizon,
                             EsaRule rule)
{
    if (!(epsilon > 0.0 && epsilon <= std::exp(-1.0)))
        throw InvalidArgument("ESA accuracy must satisfy 0 < eps <= 1/e");
    if (!(alpha_lo > 0.0 && alpha_lo <= alpha_hi && alpha_hi < 1.0))
        throw InvalidArgument("ESA order range must satisfy 0 < alpha_lo <= alpha_hi < 1");
    if (!(dt > 0.0 && dt <= horizon))
        throw InvalidArgument("ESA requires 0 < dt <= T");

    const double log_inv_eps = -std::log(epsilon);
    EsaParams p;
    p.epsilon = epsilon;
    p.horizon = horizon;
    p.dt = dt;
    p.alpha_lo = alpha_lo;
    p.alpha_hi = alpha_hi;
    p.h = 2.0 * std::numbers::pi /
          (std::log(3.0) + alpha_hi * std::log(1.0 / std::cos(1.0)) + log_inv_eps);
    p.n_lo = static_cast<int>(
        std::ceil((std::log(epsilon) + std::lgamma(1.0 + alpha_hi)) / (p.h * alpha_lo)));
    p.n_hi = static_cast<int>(std::floor(
        (std::log(horizon / dt) + std::log(log_inv_eps) + std::log(alpha_lo) + 0.5) / p.h));

    p.rule = rule;
    p.printed_n_lo = p.n_lo;
    p.printed_n_hi = p.n_hi;
    if (rule == EsaRule::certified)
        widen(p);

    if (p.n_hi <= p.n_lo) {
        std::ostringstream msg;
        msg << "empty exponential sum (n_lo = " << p.n_lo << ", n_hi = " << p.n_hi
            << "); eps too large for dt/T = " << dt / horizon;
        throw InvalidArgument(msg.str());
    }
    return p;
}

EsaQuadrature::EsaQuadrature(const EsaParams& params) : params_(params)
{
    if (params_.n_hi <= params_.n_lo)
        throw InvalidArgument("ESA ladder is empty");
    lambdas_.resize(static_cast<std::size_t>(params_.count()));
    for (std::size_t pos = 0; pos < lambdas_.size(); ++pos)
        lambdas_[pos] = std::exp(index(pos) * params_.h);
}

void EsaQuadrature::weights(double alpha, std::span<double> out) const
{
    if (out.size() != lambdas_.size())
        throw InvalidArgument("weight buffer has wrong length");
    const double scale = params_.h / std::tgamma(alpha);
    // e^{alpha i h} evaluated in the log domain.
    for (std::size_t pos = 0; pos < out.size(); ++pos)
        out[pos] = scale * std::exp(alpha * index(pos) * params_.h);
}

std::vector<double> EsaQuadrature::weights(double alpha) const
{
    std::vector<double> out(lambdas_.size());
    weights(alpha, out);
    return out;
}

double EsaQuadrature::kernel_approx(double alpha, double s) const
{
    const double scale = params_.h / std::tgamma(alpha);
    double sum = 0.0;
    for (std::size_t pos = 0; pos < lambdas_.size(); ++pos)
        sum += std::exp(alpha * index(pos) * params_.h - lambdas_[pos] * s);
    return scale * sum;
}

CertifyReport certify(const EsaQuadrature& quad, int samples, int alpha_samples, double s_min)
{
    if (samples < 2)
        throw InvalidArgument("certification needs at least two abscissae");
    if (alpha_samples < 1)
        throw InvalidArgument("certification needs at least one order sample");
    const EsaParams& p = quad.params();
    if (s_min <= 0.0)
        s_min = p.dt / p.horizon;

    CertifyReport report;
    report.s_min = s_min;
    const double log_lo = std::log(s_min);
    for (int a = 0; a < alpha_samples; ++a) {
        const double alpha = alpha_samples == 1
                                 ? p.alpha_lo
                                 : p.alpha_lo + (p.alpha_hi - p.alpha_lo) * a / (alpha_samples - 1);
        for (int j = 0; j < samples; ++j) {
            // Exact endpoints: the last abscissa is s = 1.
            const double s = j == samples - 1 ? 1.0 : std::exp(log_lo * (1.0 - double(j) / (samples - 1)));
            const double exact = std::pow(s, -alpha);
            const double err = std::abs(quad.kernel_approx(alpha, s) - exact) / exact;
            if (err > report.max_rel_err) {
                report.max_rel_err = err;
                report.argmax_s = s;
                report.argmax_alpha = alpha;
            }
        }
    }
    report.passed = report.max_rel_err <= p.epsilon;
    return report;
}

} // namespace vofrac
