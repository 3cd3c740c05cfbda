#ifndef XYDIMER_SPECTRUM_HPP
#define XYDIMER_SPECTRUM_HPP

// Steady-state incoherent fluorescence spectrum through the quantum
// regression theorem. The laser-frame generators are time independent, so
// lag propagation uses a cached matrix exponential; the one-sided Fourier
// transform is a trapezoid sum with a Hann taper on the last tenth of the
// lag range to suppress truncation ringing. The elastic component is removed
// by subtracting the product of steady-state dipole expectations before
// transforming, so no spurious line appears at zero offset.

#include <xydimer/dynamics.hpp>
#include <xydimer/generators.hpp>
#include <xydimer/operators.hpp>
#include <xydimer/reservoir.hpp>

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace xydimer {

struct Peak {
    double location = 0.0;
    double height = 0.0;
    double width = 0.0;  // full width at half maximum, 0 when not resolved
};

struct SpectrumResult {
    std::vector<double> omega;   // offsets from the laser frequency
    std::vector<double> values;  // incoherent spectrum, raw scale, clamped at zero
    std::vector<Peak> peaks;     // tallest first
    double imag_residue = 0.0;      // discarded imaginary part, relative
    double negative_residue = 0.0;  // deepest negative raw value, relative
    std::string model;
};

// Uniform lag grid tau_k = k * dtau, k = 0 .. count-1.
struct TauGrid {
    double dtau = 0.0;
    int count = 0;
};

// One term of the detected-field correlation sum: weight times
// <raising(t) lowering(t+tau)>.
struct DipoleChannel {
    Mat4 raising;
    Mat4 lowering;
    double weight = 0.0;
};

// Lag grid resolving the fastest oscillation of the generator and of the
// requested frequency window with twenty points per period, spanning twelve
// lifetimes of the slowest decaying mode.
inline TauGrid correlation_grid(const Generator& g, double max_abs_omega) {
    if (!g.time_independent)
        throw std::invalid_argument("correlation_grid needs a time-independent generator");
    Eigen::ComplexEigenSolver<Mat16> es(g.constant, false);
    double oscillation = std::abs(max_abs_omega);
    double decay_fast = 0.0;
    for (int i = 0; i < 16; ++i) {
        oscillation = std::max(oscillation, std::abs(es.eigenvalues()[i].imag()));
        decay_fast = std::max(decay_fast, -es.eigenvalues()[i].real());
    }
    if (!(decay_fast > 0.0))
        throw std::runtime_error("correlation_grid: generator has no decaying modes");
    double decay_slow = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 16; ++i) {
        const double rate = -es.eigenvalues()[i].real();
        if (rate > 1e-10 * decay_fast) decay_slow = std::min(decay_slow, rate);
    }
    TauGrid grid;
    grid.dtau = 0.1 / decay_fast;
    if (oscillation > 0.0)
        grid.dtau = std::min(grid.dtau, 2.0 * M_PI / (20.0 * oscillation));
    const double span = 12.0 / decay_slow;
    const double samples = std::ceil(span / grid.dtau) + 1.0;
    if (!(samples < 4e6))
        throw std::runtime_error("correlation_grid: generator too stiff for the window");
    grid.count = static_cast<int>(samples);
    return grid;
}

namespace detail {

// Covector u with u * vec(M) = Tr[a M].
inline Eigen::Matrix<cplx, 1, 16> trace_covector(const Mat4& a) {
    return vec(a.transpose()).transpose();
}

// g(tau_k) = Tr[lowering * Phi_tau(unvec(m0))] on a uniform lag grid, where
// Phi_tau propagates the argument with the generator. Static generators step
// with a cached matrix exponential; time-dependent ones use the embedded
// Runge-Kutta pair on the vectorized argument, which need not stay Hermitian.
inline std::vector<cplx> regression_series(const Generator& g, const Vec16& m0,
                                           const Mat4& lowering, const TauGrid& grid) {
    if (grid.count < 4 || !(grid.dtau > 0.0))
        throw std::invalid_argument("regression series needs a finer lag grid");
    const Eigen::Matrix<cplx, 1, 16> u = trace_covector(lowering);
    std::vector<cplx> out(static_cast<size_t>(grid.count));
    Vec16 y = m0;
    out[0] = u * y;
    if (g.time_independent) {
        const Mat16 step = (grid.dtau * g.constant).exp();
        for (int k = 1; k < grid.count; ++k) {
            y = (step * y).eval();
            out[static_cast<size_t>(k)] = u * y;
        }
        return out;
    }
    const auto f = [&g](double t, const Vec16& v) -> Vec16 { return g.at(t) * v; };
    const double rel = 1e-9, abs = 1e-12;
    double h = grid.dtau;
    for (int k = 1; k < grid.count; ++k) {
        const double target = k * grid.dtau;
        double t = (k - 1) * grid.dtau;
        while (t < target) {
            const double step = std::min(h, target - t);
            Vec16 y5, err;
            rk45_step(f, t, y, step, y5, err);
            const double en = error_norm(err, y, y5, rel, abs);
            if (en <= 1.0) {
                t += step;
                y = y5;
            }
            const double factor = std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2), 0.2, 5.0);
            h = std::max(step * factor, 1e-14 * (1.0 + std::abs(t)));
        }
        out[static_cast<size_t>(k)] = u * y;
    }
    return out;
}

}  // namespace detail

// <sigma_i^+(t) sigma_j^-(t+tau)> in the stationary state, by quantum
// regression: the argument rho_ss sigma_i^+ is propagated over the lag and
// contracted with sigma_j^-. Atom indices are 1 or 2; the dipole operators
// are expressed in whichever basis the generator uses.
inline std::vector<cplx> two_time_correlation(const Generator& g, const Mat4& rho_ss, int i,
                                              int j, const TauGrid& grid) {
    if ((i != 1 && i != 2) || (j != 1 && j != 2))
        throw std::invalid_argument("two_time_correlation: atom index must be 1 or 2");
    Mat4 raising = sigma_plus(i);
    Mat4 lowering = sigma_minus(j);
    if (g.collective_basis) {
        raising = to_collective(raising);
        lowering = to_collective(lowering);
    }
    return detail::regression_series(g, vec(rho_ss * raising), lowering, grid);
}

// Interior local maxima above a floor of 1e-6 of the global maximum, with
// parabolic sub-grid refinement and a half-maximum width estimate, sorted
// tallest first. The frequency grid must be uniform.
inline std::vector<Peak> find_peaks(const std::vector<double>& omega,
                                    const std::vector<double>& values) {
    std::vector<Peak> peaks;
    const size_t n = omega.size();
    if (n != values.size()) throw std::invalid_argument("find_peaks: grid size mismatch");
    if (n < 3) return peaks;
    const double dw = omega[1] - omega[0];
    double vmax = 0.0;
    for (double v : values) vmax = std::max(vmax, v);
    if (!(vmax > 0.0)) return peaks;
    const double floor = 1e-6 * vmax;
    for (size_t k = 1; k + 1 < n; ++k) {
        if (!(values[k] > floor)) continue;
        if (!(values[k] > values[k - 1] && values[k] > values[k + 1])) continue;
        Peak pk;
        const double denom = values[k - 1] - 2.0 * values[k] + values[k + 1];
        const double slope = values[k - 1] - values[k + 1];
        const double shift = (denom < 0.0) ? 0.5 * slope / denom : 0.0;
        pk.location = omega[k] + shift * dw;
        pk.height = values[k] - 0.25 * slope * shift;
        const double half = 0.5 * pk.height;
        double left = 0.0, right = 0.0;
        for (size_t l = k; l-- > 0;) {
            if (values[l] < half) {
                const double frac = (half - values[l]) / (values[l + 1] - values[l]);
                left = omega[l] + frac * dw;
                break;
            }
            if (l == 0) left = std::numeric_limits<double>::quiet_NaN();
        }
        for (size_t rgt = k + 1; rgt < n; ++rgt) {
            if (values[rgt] < half) {
                const double frac = (values[rgt - 1] - half) / (values[rgt - 1] - values[rgt]);
                right = omega[rgt - 1] + frac * dw;
                break;
            }
            if (rgt + 1 == n) right = std::numeric_limits<double>::quiet_NaN();
        }
        pk.width = (std::isnan(left) || std::isnan(right)) ? 0.0 : right - left;
        peaks.push_back(pk);
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const Peak& a, const Peak& b) { return a.height > b.height; });
    return peaks;
}

// Incoherent spectrum for an arbitrary set of dipole channels. The channel
// operators must already be in the generator's basis. Values are the real
// part of the one-sided transform of the weighted correlation sum with the
// stationary dipole product subtracted; tiny negative excursions are clamped
// and both discarded residues are recorded.
inline SpectrumResult incoherent_spectrum_channels(const Generator& g, const Mat4& rho_ss,
                                                   const std::vector<DipoleChannel>& channels,
                                                   const std::vector<double>& omega_grid,
                                                   const TauGrid& grid) {
    const size_t n = omega_grid.size();
    if (n < 2) throw std::invalid_argument("incoherent_spectrum: frequency grid too small");
    const double dw = omega_grid[1] - omega_grid[0];
    if (!(dw > 0.0)) throw std::invalid_argument("incoherent_spectrum: grid must increase");
    double wmax = 0.0;
    for (size_t k = 0; k < n; ++k) {
        wmax = std::max(wmax, std::abs(omega_grid[k]));
        if (k > 0 && std::abs(omega_grid[k] - omega_grid[k - 1] - dw) > 1e-9 * std::abs(dw))
            throw std::invalid_argument("incoherent_spectrum: grid must be uniform");
    }
    if (grid.dtau * wmax > M_PI)
        throw std::invalid_argument(
            "aliasing_risk: lag grid too coarse for the requested frequency window");

    // Weighted correlation sum with the coherent part removed.
    std::vector<cplx> h(static_cast<size_t>(grid.count), cplx(0.0, 0.0));
    for (const DipoleChannel& ch : channels) {
        const std::vector<cplx> series =
            detail::regression_series(g, vec(rho_ss * ch.raising), ch.lowering, grid);
        const cplx coherent =
            (rho_ss * ch.raising).trace() * (rho_ss * ch.lowering).trace();
        for (size_t k = 0; k < series.size(); ++k)
            h[k] += ch.weight * (series[k] - coherent);
    }

    double habs = 0.0;
    for (const cplx& v : h) habs = std::max(habs, std::abs(v));

    // Hann taper on the last tenth of the lag range.
    const double tau_max = (grid.count - 1) * grid.dtau;
    const double taper_start = 0.9 * tau_max;
    std::vector<cplx> hw(h);
    for (size_t k = 0; k < hw.size(); ++k) {
        const double tau = static_cast<double>(k) * grid.dtau;
        if (tau > taper_start)
            hw[k] *= 0.5 * (1.0 + std::cos(M_PI * (tau - taper_start) / (tau_max - taper_start)));
    }

    SpectrumResult res;
    res.model = g.name;
    res.omega = omega_grid;
    res.values.resize(n);
    res.imag_residue = habs > 0.0 ? std::abs(h[0].imag()) / habs : 0.0;
    double raw_min = 0.0, raw_max = 0.0;
    for (size_t m = 0; m < n; ++m) {
        const cplx rot = std::exp(cplx(0.0, omega_grid[m] * grid.dtau));
        cplx phase(1.0, 0.0);
        cplx acc(0.0, 0.0);
        for (size_t k = 0; k < hw.size(); ++k) {
            const cplx term = hw[k] * phase;
            const bool edge = (k == 0 || k + 1 == hw.size());
            acc += edge ? 0.5 * term : term;
            phase *= rot;
        }
        const double raw = (acc * grid.dtau).real();
        raw_min = std::min(raw_min, raw);
        raw_max = std::max(raw_max, raw);
        res.values[m] = std::max(raw, 0.0);
    }
    res.negative_residue = raw_max > 0.0 ? -raw_min / raw_max : 0.0;
    res.peaks = find_peaks(res.omega, res.values);
    return res;
}

// Spectrum of the atomic pair: channels are the four dipole pairs weighted
// by the emission rates at the bare transition frequency.
inline SpectrumResult incoherent_spectrum(const Generator& g, const Mat4& rho_ss,
                                          const ReservoirRates& rates,
                                          const std::vector<double>& omega_grid,
                                          const TauGrid& grid) {
    const double w_ind[2] = {rates.omega_ind_w1, rates.omega_ind_w2};
    std::vector<DipoleChannel> channels;
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) {
            DipoleChannel ch;
            ch.raising = g.collective_basis ? to_collective(sigma_plus(i)) : sigma_plus(i);
            ch.lowering = g.collective_basis ? to_collective(sigma_minus(j)) : sigma_minus(j);
            ch.weight = (i == j) ? w_ind[i - 1] : rates.omega_col_omega0;
            channels.push_back(ch);
        }
    return incoherent_spectrum_channels(g, rho_ss, channels, omega_grid, grid);
}

inline SpectrumResult incoherent_spectrum(const Generator& g, const Mat4& rho_ss,
                                          const ReservoirRates& rates,
                                          const std::vector<double>& omega_grid) {
    double wmax = 0.0;
    for (double w : omega_grid) wmax = std::max(wmax, std::abs(w));
    return incoherent_spectrum(g, rho_ss, rates, omega_grid, correlation_grid(g, wmax));
}

}  // namespace xydimer

#endif
