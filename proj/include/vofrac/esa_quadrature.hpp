#pragma once

#include <span>
#include <vector>

namespace vofrac {

/// How the truncation indices are chosen.
///
/// `printed` uses the closed-form indices below verbatim. Its upper index
/// stops a few terms short: the relative error near s = dt/T exceeds eps.
///
/// `certified` starts from the printed indices and widens them until the
/// omitted head and tail are each provably below eps/4 on [dt/(2T), 1]:
///   tail: Q(alpha, e^{n_hi h} s_min) <= eps/4   (regularized upper incomplete gamma)
///   head: e^{alpha (n_lo + 1) h} / Gamma(1 + alpha) <= eps/4
/// The lower end of the interval covers the newest history panel, where the
/// scheme samples the kernel at s = sigma_k dt/T.
enum class EsaRule { printed, certified };

/// Parameters of the exponential-sum approximation of s^{-alpha} on
/// [dt/T, 1] for alpha in [alpha_lo, alpha_hi].
///
/// The exponentials run over i = n_lo + 1 .. n_hi.
struct EsaParams {
    double epsilon = 0.0;
    double h = 0.0;
    int n_lo = 0;
    int n_hi = 0;
    double horizon = 0.0;
    double dt = 0.0;
    double alpha_lo = 0.0;
    double alpha_hi = 0.0;
    EsaRule rule = EsaRule::certified;
    int printed_n_lo = 0;
    int printed_n_hi = 0;

    int count() const noexcept { return n_hi - n_lo; }
};

/// Step and truncation indices:
///   h    = 2 pi / (log 3 + alpha_hi log(1/cos 1) + log(1/eps))
///   n_lo = ceil((log eps + log Gamma(1 + alpha_hi)) / (h alpha_lo))
///   n_hi = floor((log(T/dt) + log log(1/eps) + log alpha_lo + 1/2) / h)
/// Throws InvalidArgument on bad ranges or when n_hi <= n_lo.
EsaParams compute_esa_params(double epsilon, double alpha_lo, double alpha_hi, double dt, double horizon,
                             EsaRule rule = EsaRule::certified);

/// Exponents lambda_i = e^{ih} are fixed; the alpha-dependent weights
/// theta_i(alpha) = h e^{alpha i h} / Gamma(alpha) are regenerated on demand.
class EsaQuadrature {
public:
    explicit EsaQuadrature(const EsaParams& params);

    const EsaParams& params() const noexcept { return params_; }
    std::size_t size() const noexcept { return lambdas_.size(); }
    std::span<const double> lambdas() const noexcept { return lambdas_; }

    /// Ladder index i of entry `pos` (pos = 0 is i = n_lo + 1).
    int index(std::size_t pos) const noexcept { return params_.n_lo + 1 + static_cast<int>(pos); }

    void weights(double alpha, std::span<double> out) const;
    std::vector<double> weights(double alpha) const;

    /// sum_i theta_i(alpha) e^{-lambda_i s}, an approximation of s^{-alpha}.
    double kernel_approx(double alpha, double s) const;

private:
    EsaParams params_;
    std::vector<double> lambdas_;
};

struct CertifyReport {
    double max_rel_err = 0.0;
    double argmax_s = 0.0;
    double argmax_alpha = 0.0;
    double s_min = 0.0;
    bool passed = false;
};

/// Sweeps `samples` log-spaced abscissae in [s_min, 1] (s_min defaults to
/// dt/T) against `alpha_samples` evenly spaced orders in [alpha_lo,
/// alpha_hi] and reports the worst relative kernel error. Passes when it is
/// at most epsilon.
CertifyReport certify(const EsaQuadrature& quad, int samples, int alpha_samples = 10, double s_min = 0.0);

} // namespace vofrac
