#pragma once

#include <span>
#include <string>
#include <vector>

#include "vofrac/direct_l21.hpp"
#include "vofrac/esa_quadrature.hpp"
#include "vofrac/temporal_order.hpp"

namespace vofrac {

/// Per-exponential integrals of the quadratic interpolant's derivative over
/// the newest history panel [t_{k-1}, t_k], plus the decay that carries
/// H^{(k-1)} forward from t_{k-1+sigma_{k-1}} to t_{k+sigma_k}.
///   a_i = int_0^1 (3/2 - x) exp(-lambda_i (sigma_k + 1 - x) dt/T) dx
///   b_i = int_0^1 (x - 1/2) exp(-lambda_i (sigma_k + 1 - x) dt/T) dx
struct PanelIntegrals {
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> decay;
};

void panel_integrals(const EsaQuadrature& quad, double sigma_k, double sigma_km1, double dt, double horizon,
                     PanelIntegrals& out);
PanelIntegrals panel_integrals(const EsaQuadrature& quad, double sigma_k, double sigma_km1, double dt,
                               double horizon);

/// History values H_i^{(k)}: one row per exponential, one column per degree
/// of freedom, row-major. All zero at step 0.
///
/// advance() applies
///   H^{(k)} = decay * H^{(k-1)} + a (u_k - u_{k-1}) + b (u_{k+1} - u_k)
/// and must be called for k = 1, 2, ... in order. The two-phase pair
/// begin_advance()/finish_advance() performs the same update in two sweeps
/// so the b-term can wait until u_{k+1} has been solved for.
class HistoryBank {
public:
    HistoryBank(std::size_t exponentials, std::size_t dofs);

    std::size_t exponentials() const noexcept { return exponentials_; }
    std::size_t dofs() const noexcept { return dofs_; }
    int step() const noexcept { return step_; }
    std::span<const double> row(std::size_t i) const;
    std::size_t storage_scalars() const noexcept { return values_.size(); }

    void advance(int k, const PanelIntegrals& panels, std::span<const double> u_km1,
                 std::span<const double> u_k, std::span<const double> u_kp1);

    /// H <- decay * H + a (u_k - u_{k-1}); when `weights` is non-empty also
    /// writes sum_i weights_i * H_i into `weighted` (one entry per dof).
    void begin_advance(int k, const PanelIntegrals& panels, std::span<const double> u_km1,
                       std::span<const double> u_k, std::span<const double> weights,
                       std::span<double> weighted);
    /// H <- H + b (u_{k+1} - u_k); completes step k.
    void finish_advance(int k, const PanelIntegrals& panels, std::span<const double> u_k,
                        std::span<const double> u_kp1);

    /// sum_i weights_i * H_i for every dof.
    void contract(std::span<const double> weights, std::span<double> out) const;

private:
    std::size_t exponentials_;
    std::size_t dofs_;
    int step_ = 0;
    bool half_step_ = false;
    std::vector<double> values_;
};

/// The fast formula at step k >= 1 regrouped as
///   c_implicit (u_{k+1} - u_k)
///     + weight_on_history * sum_i theta_i (decay_i H_i^{(k-1)} + a_i (u_k - u_{k-1})).
struct StepOperator {
    double c_implicit = 0.0;
    double weight_on_history = 0.0;
};

/// `theta` are the weights at alpha_{k+sigma_k}.
StepOperator step_operator(const SigmaSchedule& schedule, const PanelIntegrals& panels,
                           std::span<const double> theta, int k);

/// Fast value at step k. For k = 0 this is the direct value
/// s_0 g_0^{(0)} (u_1 - u_0) and the bank must be untouched; otherwise the
/// bank must have completed step k.
double evaluate_fast(const HistoryBank& bank, const EsaQuadrature& quad, const SigmaSchedule& schedule, int k,
                     double u_k, double u_kp1, double u_km1);
void evaluate_fast(const HistoryBank& bank, const EsaQuadrature& quad, const SigmaSchedule& schedule, int k,
                   std::span<const double> u_k, std::span<const double> u_kp1, std::span<const double> u_km1,
                   std::span<double> out);

/// Regrouped weights rho_l^{(k)} of the fast formula, so that the fast value
/// equals s_k sum_l rho_l (u_{k-l+1} - u_{k-l}). Diagnostic only.
struct CoefficientRowRho {
    int k = 0;
    std::vector<double> rho;
};

CoefficientRowRho rho_row(int k, const EsaQuadrature& quad, const SigmaSchedule& schedule);

/// Largest eps for which the fast weights keep the monotonicity and the
/// (2 sigma - 1) rho_0 - sigma rho_1 >= 0 property:
///   2 (1 - a_hi) (2 - a_hi/2)^{1 - a_hi} dt^{a_hi} / ((6 - 7 a_lo/2)(1 - a_lo/2)).
double rho_epsilon_bound(double alpha_lo, double alpha_hi, double dt);

/// min(dt^2, rho_epsilon_bound/2, 1/e).
double default_epsilon(double alpha_lo, double alpha_hi, double dt);

struct RhoReport {
    bool passed = true;
    int first_failure = -1; ///< offending l, or -1
    std::string failure;    ///< which inequality failed
    double floor_margin = 0.0;
    double difference_margin = 0.0; ///< (2 sigma - 1) rho_0 - sigma rho_1
};

/// Strict decrease rho_k < ... < rho_0, the floor
/// (1 - eps)(1 - alpha)/(2 (k + sigma)^alpha) < rho_k, and
/// (2 sigma - 1) rho_0 - sigma rho_1 >= 0 (k >= 1).
RhoReport check_rho_properties(const CoefficientRowRho& row, const SigmaSchedule& schedule, double epsilon);

/// |rho_l - g_l| <= (1 - alpha) dt^{-alpha} eps * {1/4 (l = 0), 5/4 (0 < l < k), 1 (l = k)}.
/// `worst_ratio` is the largest gap relative to its bound.
struct GapReport {
    bool passed = true;
    int first_failure = -1;
    double worst_ratio = 0.0;
};
GapReport check_rho_gap(const CoefficientRowRho& rho, const CoefficientRowG& g, const SigmaSchedule& schedule,
                        double epsilon);

} // namespace vofrac
