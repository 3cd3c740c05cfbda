#ifndef XYDIMER_RESERVOIR_HPP
#define XYDIMER_RESERVOIR_HPP

// Vacuum-reservoir rates for two parallel dipoles: individual and collective
// decay rates (omega-type) and Lamb shifts (lambda-type) at the dressed
// frequencies alpha, beta and at the bare/mean atomic frequencies, plus the
// composite combinations used by the master-equation generators.
//
// Branch conventions. The spectral functions carry delta(kc +- mu) support,
// so a decay rate is nonzero only for (superscript -, mu > 0) or
// (superscript +, mu < 0), where it equals the positive free-space value.
// Shifts come in a pole flavor (the principal-value integral, reached for
// the same sign/frequency pairings as the decay rates) and a pole-free
// flavor; both are odd under mu -> -mu with the superscript flipped.

#include <xydimer/model.hpp>
#include <xydimer/specfun.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace xydimer {

enum class Branch { plus, minus };

// Single-frequency scale factor: Gamma (|mu|/omega0)^3 (cubic vacuum density
// of states for identical dipole magnitudes).
inline double gamma_mu(double mu, const SystemParams& p, const DerivedParams& d) {
    const double r = std::abs(mu) / d.omega0;
    return p.gamma_single * r * r * r;
}

// a(chi, Theta) = sin^2(Theta) sinc(chi) + (1 - 3cos^2(Theta)) (cos chi/chi^2 - sin chi/chi^3).
// Series branch below |chi| = 0.5 avoids the 1/chi^2 cancellation; a(0) = 2/3.
inline double angular_bracket(double chi, double theta) {
    const double a_w = std::sin(theta) * std::sin(theta);
    const double b_w = 1.0 - 3.0 * std::cos(theta) * std::cos(theta);
    const double x = std::abs(chi);
    if (x < 0.5) {
        const double x2 = x * x;
        // sinc = sum_k (-1)^k x^(2k)/(2k+1)!
        double sinc = 1.0, s_term = 1.0;
        for (int k = 1; k < 16; ++k) {
            s_term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
            sinc += s_term;
            if (std::abs(s_term) < 1e-18) break;
        }
        // cos x/x^2 - sin x/x^3 = sum_k (-1)^k x^(2k-2) (2k)/(2k+1)!, k >= 1
        double tail = -1.0 / 3.0, t_term = -1.0 / 3.0;
        for (int k = 2; k < 16; ++k) {
            t_term *= -x2 / ((2.0 * k - 2.0) * (2.0 * k + 1.0));
            tail += t_term;
            if (std::abs(t_term) < 1e-18) break;
        }
        return a_w * sinc + b_w * tail;
    }
    const double s = std::sin(x), c = std::cos(x);
    return a_w * s / x + b_w * (c / (x * x) - s / (x * x * x));
}

namespace detail {

// Pole-branch collective shift at m > 0 (principal-value integral),
// normalized so the prefactor is (3/8) gamma_b(m).
inline double lambda_pole_bracket(double x, double theta) {
    const double a_w = std::sin(theta) * std::sin(theta);
    const double b_w = 1.0 - 3.0 * std::cos(theta) * std::cos(theta);
    const double s = std::sin(x), c = std::cos(x);
    const double F1 = f1(x), F2 = f2(x);
    const double two_over_pi = 2.0 / std::numbers::pi;
    return -a_w * (c / x + two_over_pi * (1.0 / (x * x) - F1 / x)) +
           b_w * ((s / (x * x) + c / (x * x * x)) -
                  two_over_pi * (F2 / (x * x) + F1 / (x * x * x)));
}

// Pole-free collective shift at m > 0, same normalization.
inline double lambda_nonpole_bracket(double x, double theta) {
    const double a_w = std::sin(theta) * std::sin(theta);
    const double b_w = 1.0 - 3.0 * std::cos(theta) * std::cos(theta);
    const double s = std::sin(x), c = std::cos(x);
    const double F1 = f1(x), F2 = f2(x);
    const double two_over_pi = 2.0 / std::numbers::pi;
    return a_w * (c / x - two_over_pi * (1.0 / (x * x) - F1 / x)) -
           b_w * ((s / (x * x) + c / (x * x * x)) +
                  two_over_pi * (F2 / (x * x) + F1 / (x * x * x)));
}

} // namespace detail

// Collective decay rate Omega^sign_{12 mu}. Zero off the delta-function
// support; on support, (3/2) gamma_mu(mu) a(chi, Theta). chi = 0 uses the
// analytic limit a -> 2/3.
inline double omega_collective(double mu, Branch sign, const SystemParams& p,
                               const DerivedParams& d) {
    const bool on_support = (sign == Branch::minus && mu > 0.0) || (sign == Branch::plus && mu < 0.0);
    if (!on_support) return 0.0;
    const double chi = d.chi(std::abs(mu));
    return 1.5 * gamma_mu(mu, p, d) * angular_bracket(chi, p.theta_dipole);
}

// Individual decay rate Omega^sign_{i mu}: the chi -> 0 limit of the
// collective expression, i.e. gamma_mu on support, else zero.
inline double omega_individual(double mu, Branch sign, const SystemParams& p,
                               const DerivedParams& d) {
    const bool on_support = (sign == Branch::minus && mu > 0.0) || (sign == Branch::plus && mu < 0.0);
    return on_support ? gamma_mu(mu, p, d) : 0.0;
}

// Collective Lamb shift Lambda^sign_{12 mu}. The (minus, mu>0) and
// (plus, mu<0) pairings hit the pole; the other two are pole-free. Both
// flavors are odd under (mu, sign) -> (-mu, flipped sign).
inline double lambda_collective(double mu, Branch sign, const SystemParams& p,
                                const DerivedParams& d) {
    if (mu == 0.0) throw std::domain_error("lambda_collective: contact_divergence (chi = 0)");
    const double x = std::abs(d.chi(mu));
    const double pref = 0.375 * gamma_mu(mu, p, d);
    const bool pole = (sign == Branch::minus && mu > 0.0) || (sign == Branch::plus && mu < 0.0);
    const double sgn = (mu > 0.0) ? 1.0 : -1.0;
    if (pole) return sgn * pref * detail::lambda_pole_bracket(x, p.theta_dipole);
    return sgn * pref * detail::lambda_nonpole_bracket(x, p.theta_dipole);
}

// Individual (cutoff-regularized) Lamb shift magnitude at frequency |mu|:
// (1/2pi) gamma_mu ln[ |wc/|mu| - 1| (wc/|mu| + 1) ]. Honors lamb_shift_mode.
inline double lambda_individual(double mu, const SystemParams& p, const DerivedParams& d) {
    if (p.lamb_shift_mode == LambShiftMode::zeroed) return 0.0;
    const double m = std::abs(mu);
    if (m == 0.0) throw std::domain_error("lambda_individual: zero frequency");
    const double r = p.omega_cutoff / m;
    if (r == 1.0) throw std::domain_error("lambda_individual: cutoff equals transition frequency");
    return gamma_mu(mu, p, d) / (2.0 * std::numbers::pi) * std::log(std::abs(r - 1.0) * (r + 1.0));
}

// All rates needed by the generators, including the composite combinations
//   Lambda^pm_i  = Lambda^-_{i alpha} pm Lambda^+_{i beta},
//   Omega^pm_i   = (Omega^-_{i alpha} pm Omega^+_{i beta})/2,
// and likewise for the 12 (collective) index pair.
struct ReservoirRates {
    // Building blocks at the dressed frequencies.
    double omega_ind_alpha = 0.0;   // Omega^-_{i alpha}
    double omega_ind_beta = 0.0;    // Omega^+_{i beta}
    double omega_col_alpha = 0.0;   // Omega^-_{12 alpha}
    double omega_col_beta = 0.0;    // Omega^+_{12 beta}
    double lambda_ind_alpha = 0.0;  // Lambda^-_{i alpha}
    double lambda_ind_beta = 0.0;   // Lambda^+_{i beta}
    double lambda_col_alpha = 0.0;  // Lambda^-_{12 alpha}
    double lambda_col_beta = 0.0;   // Lambda^+_{12 beta}

    // Phenomenological inputs at the mean and bare frequencies.
    double omega_col_omega0 = 0.0;   // Omega^-_{12 omega0}
    double lambda_col_omega0 = 0.0;  // Lambda^-_{12 omega0}
    double omega_ind_w1 = 0.0;       // Omega^-_{omega1}
    double omega_ind_w2 = 0.0;       // Omega^-_{omega2}
    double lambda_ind_w1 = 0.0;      // Lambda^-_{omega1}
    double lambda_ind_w2 = 0.0;      // Lambda^-_{omega2}

    // Composites.
    double lambda_plus_i = 0.0, lambda_minus_i = 0.0;
    double omega_plus_i = 0.0, omega_minus_i = 0.0;
    double lambda_plus_12 = 0.0, lambda_minus_12 = 0.0;
    double omega_plus_12 = 0.0, omega_minus_12 = 0.0;

    std::vector<std::string> warnings;
};

inline ReservoirRates composite_rates(const SystemParams& p, const DerivedParams& d) {
    if (d.beta >= 0.0)
        throw std::domain_error(
            "composite_rates: beyond_rwa (beta >= 0; excitation-conserving "
            "system-reservoir coupling assumed J < omega0)");
    ReservoirRates r;
    r.omega_ind_alpha = omega_individual(d.alpha, Branch::minus, p, d);
    r.omega_ind_beta = omega_individual(d.beta, Branch::plus, p, d);
    r.omega_col_alpha = omega_collective(d.alpha, Branch::minus, p, d);
    r.omega_col_beta = omega_collective(d.beta, Branch::plus, p, d);

    r.lambda_ind_alpha = lambda_individual(d.alpha, p, d);
    r.lambda_ind_beta = -lambda_individual(d.beta, p, d);
    r.lambda_col_alpha = lambda_collective(d.alpha, Branch::minus, p, d);
    r.lambda_col_beta = lambda_collective(d.beta, Branch::plus, p, d);

    r.omega_col_omega0 = omega_collective(d.omega0, Branch::minus, p, d);
    r.lambda_col_omega0 = lambda_collective(d.omega0, Branch::minus, p, d);
    r.omega_ind_w1 = omega_individual(p.omega1, Branch::minus, p, d);
    r.omega_ind_w2 = omega_individual(p.omega2, Branch::minus, p, d);
    r.lambda_ind_w1 = lambda_individual(p.omega1, p, d);
    r.lambda_ind_w2 = lambda_individual(p.omega2, p, d);

    r.lambda_plus_i = r.lambda_ind_alpha + r.lambda_ind_beta;
    r.lambda_minus_i = r.lambda_ind_alpha - r.lambda_ind_beta;
    r.omega_plus_i = 0.5 * (r.omega_ind_alpha + r.omega_ind_beta);
    r.omega_minus_i = 0.5 * (r.omega_ind_alpha - r.omega_ind_beta);
    r.lambda_plus_12 = r.lambda_col_alpha + r.lambda_col_beta;
    r.lambda_minus_12 = r.lambda_col_alpha - r.lambda_col_beta;
    r.omega_plus_12 = 0.5 * (r.omega_col_alpha + r.omega_col_beta);
    r.omega_minus_12 = 0.5 * (r.omega_col_alpha - r.omega_col_beta);

    if (p.lamb_shift_mode == LambShiftMode::full && p.omega_cutoff <= d.alpha)
        r.warnings.push_back("omega_cutoff at or below the upper dressed frequency alpha");
    return r;
}

} // namespace xydimer

#endif
