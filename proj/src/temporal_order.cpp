#include "vofrac/temporal_order.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "vofrac/error.hpp"

namespace vofrac {

namespace {

// Roundoff slack for the sampled bound check.
constexpr double kBoundSlack = 1e-14;

double parse_double(std::string_view text, std::string_view what)
{
    std::string s(text);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InvalidArgument("cannot parse " + std::string(what) + " from '" + s + "'");
    }
    if (used != s.size())
        throw InvalidArgument("trailing characters in " + std::string(what) + " '" + s + "'");
    return value;
}

} // namespace

OrderFunction::OrderFunction(Fn fn, double alpha_lo, double alpha_hi, double horizon)
    : fn_(std::move(fn)), alpha_lo_(alpha_lo), alpha_hi_(alpha_hi), horizon_(horizon)
{
    if (!fn_)
        throw InvalidArgument("order function is empty");
    if (!(alpha_lo > 0.0 && alpha_lo <= alpha_hi && alpha_hi < 1.0))
        throw InvalidArgument("order bounds must satisfy 0 < alpha_lo <= alpha_hi < 1");
    if (!(horizon > 0.0))
        throw InvalidArgument("order function horizon must be positive");

    for (int i = 0; i <= kBoundCheckSamples; ++i) {
        const double t = horizon_ * i / kBoundCheckSamples;
        const double a = fn_(t);
        if (!(a >= alpha_lo_ - kBoundSlack && a <= alpha_hi_ + kBoundSlack)) {
            std::ostringstream msg;
            msg << "alpha(" << t << ") = " << a << " outside declared bounds [" << alpha_lo_ << ", "
                << alpha_hi_ << "]";
            throw InvalidArgument(msg.str());
        }
    }
}

OrderFunction OrderFunction::constant(double a, double horizon)
{
    return OrderFunction([a](double) { return a; }, a, a, horizon);
}

OrderFunction OrderFunction::sin4(double horizon)
{
    // Extrema of sin over [0, horizon]: endpoints plus interior critical points.
    double lo = std::min(0.0, std::sin(horizon));
    double hi = std::max(0.0, std::sin(horizon));
    for (double c = std::numbers::pi / 2; c < horizon; c += std::numbers::pi) {
        lo = std::min(lo, std::sin(c));
        hi = std::max(hi, std::sin(c));
    }
    return OrderFunction([](double t) { return (2.0 + std::sin(t)) / 4.0; }, (2.0 + lo) / 4.0,
                         (2.0 + hi) / 4.0, horizon);
}

OrderFunction OrderFunction::tabulated(std::vector<std::pair<double, double>> knots, double horizon)
{
    if (knots.empty())
        throw InvalidArgument("tabulated order needs at least one knot");
    std::sort(knots.begin(), knots.end());
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (knots[i].first == knots[i - 1].first)
            throw InvalidArgument("tabulated order has duplicate knot times");

    double lo = knots.front().second;
    double hi = lo;
    for (const auto& [t, v] : knots) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    auto fn = [knots = std::move(knots)](double t) {
        if (t <= knots.front().first)
            return knots.front().second;
        if (t >= knots.back().first)
            return knots.back().second;
        auto it = std::upper_bound(knots.begin(), knots.end(), t,
                                   [](double x, const auto& knot) { return x < knot.first; });
        const auto& [t1, v1] = *it;
        const auto& [t0, v0] = *(it - 1);
        const double w = (t - t0) / (t1 - t0);
        return v0 + w * (v1 - v0);
    };
    return OrderFunction(std::move(fn), lo, hi, horizon);
}

OrderFunction OrderFunction::parse(std::string_view spec, double horizon)
{
    if (spec == "sin4")
        return sin4(horizon);
    if (spec.starts_with("const:"))
        return constant(parse_double(spec.substr(6), "constant order"), horizon);
    if (spec.starts_with("table:")) {
        std::vector<std::pair<double, double>> knots;
        std::string_view rest = spec.substr(6);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string_view item = rest.substr(0, comma);
            const auto colon = item.find(':');
            if (colon == std::string_view::npos)
                throw InvalidArgument("table knot must be time:value, got '" + std::string(item) + "'");
            knots.emplace_back(parse_double(item.substr(0, colon), "knot time"),
                               parse_double(item.substr(colon + 1), "knot value"));
            if (comma == std::string_view::npos)
                break;
            rest = rest.substr(comma + 1);
        }
        return tabulated(std::move(knots), horizon);
    }
    throw InvalidArgument("unknown order function '" + std::string(spec) +
                          "' (expected const:<a>, sin4 or table:t:v,...)");
}

TemporalMesh::TemporalMesh(double horizon, int steps)
    : horizon_(horizon), steps_(steps), dt_(horizon / steps)
{
    if (steps < 1)
        throw InvalidArgument("temporal mesh needs at least one step");
    if (!(horizon >= 1.0))
        throw InvalidArgument("temporal mesh requires T >= 1");
}

double solve_sigma(const OrderFunction& order, double t_k, double dt, double tol)
{
    if (!(tol > 0.0))
        throw InvalidArgument("sigma tolerance must be positive");
    if (!(dt > 0.0))
        throw InvalidArgument("dt must be positive");

    auto alpha_at = [&](double sigma) {
        const double a = order(t_k + sigma * dt);
        if (!(a > 0.0 && a < 1.0)) {
            std::ostringstream msg;
            msg << "alpha(" << t_k + sigma * dt << ") = " << a << " is outside (0, 1)";
            throw InvalidArgument(msg.str());
        }
        return a;
    };
    auto residual = [&](double sigma) { return sigma - (1.0 - 0.5 * alpha_at(sigma)); };

    constexpr int kMaxNewton = 50;
    constexpr double kSlopeStep = 1e-6;
    double sigma = 0.75;
    for (int it = 0; it < kMaxNewton; ++it) {
        const double f = residual(sigma);
        if (std::abs(f) <= tol)
            return sigma;
        const double lo = std::max(0.5, sigma - kSlopeStep);
        const double hi = std::min(1.0, sigma + kSlopeStep);
        const double slope = (residual(hi) - residual(lo)) / (hi - lo);
        if (!(slope > 0.0) || !std::isfinite(slope))
            break;
        sigma -= f / slope;
        if (!(sigma > 0.5 && sigma < 1.0))
            break;
    }

    // Bisection: F(1/2) = (alpha - 1)/2 < 0 and F(1) = alpha/2 > 0.
    double lo = 0.5 + 1e-12;
    double hi = 1.0 - 1e-12;
    double f_lo = residual(lo);
    if (residual(hi) < 0.0 || f_lo > 0.0)
        throw ConvergenceError("sigma equation is not bracketed on (1/2, 1)");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = residual(mid);
        if (std::abs(f) <= tol)
            return mid;
        if ((f < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
        }
        if (hi - lo <= 0.0)
            break;
    }
    std::ostringstream msg;
    msg << "sigma root solve failed at t_k = " << t_k;
    throw ConvergenceError(msg.str());
}

SigmaSchedule build_schedule(const TemporalMesh& mesh, const OrderFunction& order, double tol)
{
    const int n = mesh.steps();
    SigmaSchedule schedule;
    schedule.dt = mesh.dt();
    schedule.horizon = mesh.horizon();
    schedule.sigma.resize(n);
    schedule.t_sigma.resize(n);
    schedule.alpha_sigma.resize(n);
    schedule.s_factor.resize(n);

    for (int k = 0; k < n; ++k) {
        double sigma = 0.0;
        try {
            sigma = solve_sigma(order, mesh.node(k), mesh.dt(), tol);
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "step " << k << ": " << e.what();
            throw ConvergenceError(msg.str());
        }
        const double t_sigma = mesh.node(k) + sigma * mesh.dt();
        const double alpha = order(t_sigma);
        schedule.sigma[k] = sigma;
        schedule.t_sigma[k] = t_sigma;
        schedule.alpha_sigma[k] = alpha;
        schedule.s_factor[k] = std::pow(mesh.dt(), -alpha) / std::tgamma(2.0 - alpha);
    }
    return schedule;
}

} // namespace vofrac
