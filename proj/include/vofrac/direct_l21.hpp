#pragma once

#include <functional>
#include <span>
#include <vector>

#include "vofrac/temporal_order.hpp"

namespace vofrac {

/// Weights g_l^{(k)}, l = 0..k, of the direct formula at step k.
struct CoefficientRowG {
    int k = 0;
    std::vector<double> g;
};

/// Moments of z^{-a} over the unit panel [zc - 1/2, zc + 1/2], zc > 1/2:
///   flat  = int z^{-a} dz
///   tilt  = int (z - zc) z^{-a} dz
/// Closed form for zc < 2, binomial series about zc otherwise (the closed
/// form cancels catastrophically for distant panels).
struct PanelMoments {
    double flat;
    double tilt;
};
PanelMoments panel_moments(double zc, double a);

/// Row k of the direct weights, built from closed-form panel moments.
CoefficientRowG g_row(int k, const SigmaSchedule& schedule);

/// s_k * sum_{l=0}^{k} g_l (u_{k-l+1} - u_{k-l}) with compensated summation.
/// `history` holds u_0 .. u_{k+1}.
double evaluate_direct(std::span<const double> history, const CoefficientRowG& row, double s_k);

/// Reference value of the Caputo derivative of order alpha(t) at time t,
///   1/Gamma(1 - alpha) int_0^t u'(tau) (t - tau)^{-alpha} dtau,
/// by tanh-sinh quadrature.
/// Throws ConvergenceError when the error estimate exceeds tol.
double caputo_oracle(const std::function<double(double)>& u_prime, const OrderFunction& order, double t,
                     double tol = 1e-12);

} // namespace vofrac
