#ifndef XYDIMER_SPECFUN_HPP
#define XYDIMER_SPECFUN_HPP

// Sine/cosine integral functions and the auxiliary combinations f1, f2
// entering the collective Lamb-shift closed forms.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace xydimer {

namespace detail {

// Si by its power series; converges fast for x <= 4.
inline double si_series(double x) {
    const double x2 = x * x;
    double u = x;      // (-1)^k x^(2k+1) / (2k+1)!
    double sum = x;    // add u / (2k+1), k = 0 term is x
    for (int k = 1; k < 64; ++k) {
        u *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
        const double term = u / (2.0 * k + 1.0);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// Cin(x) = gamma + ln x - Ci(x) by its power series; x <= 4.
inline double cin_series(double x) {
    const double x2 = x * x;
    double v = -1.0;   // builds (-1)^(k+1) x^(2k) / (2k)!
    double sum = 0.0;
    for (int k = 1; k < 64; ++k) {
        v *= -x2 / ((2.0 * k - 1.0) * (2.0 * k));
        const double term = v / (2.0 * k);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// E1(ix) for x > 0 by the continued fraction
// E1(z) = e^{-z} / (z + 1 - 1^2/(z + 3 - 2^2/(z + 5 - ...))),
// evaluated with the modified Lentz algorithm. Accurate for x > ~2.
inline std::complex<double> e1_imag_axis(double x) {
    const std::complex<double> z(0.0, x);
    constexpr double tiny = 1e-300;
    std::complex<double> f = z + 1.0;
    if (std::abs(f) < tiny) f = tiny;
    std::complex<double> c = f, d = 0.0;
    for (int k = 1; k < 200; ++k) {
        const double a = -static_cast<double>(k) * k;
        const std::complex<double> b = z + (2.0 * k + 1.0);
        d = b + a * d;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const std::complex<double> delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-z) / f;
}

inline void require_finite(double x, const char* who) {
    if (!std::isfinite(x)) throw std::domain_error(std::string(who) + ": non-finite argument");
}

} // namespace detail

// Si(x) = integral_0^x sin(t)/t dt, x >= 0.
inline double sin_integral(double x) {
    detail::require_finite(x, "sin_integral");
    if (x < 0.0) throw std::domain_error("sin_integral: negative argument");
    if (x == 0.0) return 0.0;
    if (x <= 4.0) return detail::si_series(x);
    return std::numbers::pi / 2.0 + detail::e1_imag_axis(x).imag();
}

// Ci(x) = gamma_E + ln x + integral_0^x (cos t - 1)/t dt, x > 0.
inline double cos_integral(double x) {
    detail::require_finite(x, "cos_integral");
    if (x <= 0.0) throw std::domain_error("cos_integral: argument must be positive");
    if (x <= 4.0) return std::numbers::egamma + std::log(x) - detail::cin_series(x);
    return -detail::e1_imag_axis(x).real();
}

// f1(x) = sin(x) Ci(x) - cos(x) Si(x), x > 0.
inline double f1(double x) {
    detail::require_finite(x, "f1");
    if (x <= 0.0) throw std::domain_error("f1: argument must be positive");
    return std::sin(x) * cos_integral(x) - std::cos(x) * sin_integral(x);
}

// f2(x) = -sin(x) Si(x) - cos(x) Ci(x), x > 0.
inline double f2(double x) {
    detail::require_finite(x, "f2");
    if (x <= 0.0) throw std::domain_error("f2: argument must be positive");
    return -std::sin(x) * sin_integral(x) - std::cos(x) * cos_integral(x);
}

} // namespace xydimer

#endif
