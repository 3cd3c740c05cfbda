#ifndef XYDIMER_MODEL_HPP
#define XYDIMER_MODEL_HPP

// Physical parameter set and the spectral quantities derived from the
// XY-coupled pair: Delta, alpha, beta, gamma, delta, and the
// interaction-picture coefficient functions theta1, theta2, phi1.
//
// Units: hbar = 1; all frequencies and rates in units of a reference
// frequency omega_ref (normally the mean atomic frequency omega0).

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace xydimer {

enum class LambShiftMode { full, zeroed };

struct SystemParams {
    double omega1 = 1.0;              // atomic frequency, atom 1
    double omega2 = 1.0;              // atomic frequency, atom 2
    double j_coupling = 0.0;          // XY exchange J = 2g
    double r12_over_lambda = 0.2;     // separation over transition wavelength
    double theta_dipole = std::numbers::pi / 2.0;  // angle(dipole, r12)
    double gamma_single = 0.05;       // single-atom decay rate Gamma
    double omega_cutoff = 50.0;       // Lamb-shift frequency cutoff
    LambShiftMode lamb_shift_mode = LambShiftMode::full;
};

// Throws std::invalid_argument on hard violations; returns human-readable
// warnings for soft ones (weak-coupling strain).
inline std::vector<std::string> validate(const SystemParams& p) {
    auto bad = [](const std::string& msg) { return std::invalid_argument("SystemParams: " + msg); };
    if (!(p.omega1 > 0.0) || !std::isfinite(p.omega1)) throw bad("omega1 must be positive");
    if (!(p.omega2 > 0.0) || !std::isfinite(p.omega2)) throw bad("omega2 must be positive");
    if (p.j_coupling < 0.0 || !std::isfinite(p.j_coupling)) throw bad("j_coupling must be >= 0");
    if (!(p.r12_over_lambda > 0.0) || !std::isfinite(p.r12_over_lambda))
        throw bad("r12_over_lambda must be positive");
    if (p.theta_dipole < 0.0 || p.theta_dipole > std::numbers::pi)
        throw bad("theta_dipole must lie in [0, pi]");
    if (!(p.gamma_single > 0.0) || !std::isfinite(p.gamma_single))
        throw bad("gamma_single must be positive");
    if (!(p.omega_cutoff > 0.0) || !std::isfinite(p.omega_cutoff))
        throw bad("omega_cutoff must be positive");
    std::vector<std::string> warnings;
    const double omega0 = 0.5 * (p.omega1 + p.omega2);
    if (p.gamma_single / omega0 > 0.2)
        warnings.push_back("gamma_single/omega0 > 0.2: weak-coupling (Born-Markov) validity strained");
    return warnings;
}

struct DerivedParams {
    double delta_big = 0.0;    // Delta = sqrt(4J^2 + (w1-w2)^2)
    double alpha = 0.0;        // (Delta + w1 + w2)/2
    double beta = 0.0;         // (Delta - w1 - w2)/2, negative below ultrastrong coupling
    double gamma_coef = 0.5;   // (Delta + w1 - w2)/(2 Delta)
    double delta_coef = 0.5;   // (Delta - w1 + w2)/(2 Delta)
    double omega0 = 1.0;       // (w1 + w2)/2
    double j_over_delta = 0.0; // J/Delta (0 in the degenerate limit)
    double r12_over_lambda = 0.0;
    bool degenerate = false;   // Delta = 0: gamma, delta set by the continuous limit

    // Retardation argument chi_mu = 2 pi (mu/omega0) (r12/lambda); signed like mu.
    double chi(double mu) const { return 2.0 * std::numbers::pi * (mu / omega0) * r12_over_lambda; }
};

inline DerivedParams derive(const SystemParams& p) {
    validate(p);
    DerivedParams d;
    const double w1 = p.omega1, w2 = p.omega2, j = p.j_coupling;
    d.omega0 = 0.5 * (w1 + w2);
    d.delta_big = std::sqrt(4.0 * j * j + (w1 - w2) * (w1 - w2));
    d.alpha = 0.5 * (d.delta_big + w1 + w2);
    d.beta = 0.5 * (d.delta_big - w1 - w2);
    d.r12_over_lambda = p.r12_over_lambda;
    if (d.delta_big > 0.0) {
        d.gamma_coef = (d.delta_big + w1 - w2) / (2.0 * d.delta_big);
        d.delta_coef = (d.delta_big - w1 + w2) / (2.0 * d.delta_big);
        d.j_over_delta = j / d.delta_big;
        d.degenerate = false;
    } else {
        d.gamma_coef = 0.5;
        d.delta_coef = 0.5;
        d.j_over_delta = 0.0;
        d.degenerate = true;
    }
    return d;
}

// Interaction-picture coefficients of the dressed lowering operators:
// sigma1(t) = theta1*(t) sigma1- + theta2*(t) sigma1z sigma2-,
// sigma2(t) = phi1*(t) sigma2- + theta2*(t) sigma1- sigma2z.
inline std::complex<double> theta1(const DerivedParams& d, double t) {
    const std::complex<double> i{0.0, 1.0};
    return d.delta_coef * std::exp(-i * d.beta * t) + d.gamma_coef * std::exp(i * d.alpha * t);
}

inline std::complex<double> theta2(const DerivedParams& d, double t) {
    const std::complex<double> i{0.0, 1.0};
    return d.j_over_delta * (std::exp(i * d.alpha * t) - std::exp(-i * d.beta * t));
}

inline std::complex<double> phi1(const DerivedParams& d, double t) {
    const std::complex<double> i{0.0, 1.0};
    return d.gamma_coef * std::exp(-i * d.beta * t) + d.delta_coef * std::exp(i * d.alpha * t);
}

} // namespace xydimer

#endif
