#ifndef XYDIMER_DYNAMICS_HPP
#define XYDIMER_DYNAMICS_HPP

// Time integration of the master-equation generators: adaptive
// Dormand-Prince 5(4) and fixed-step classical RK4 on vec(rho), with trace,
// Hermiticity, and positivity diagnostics accumulated along the way, plus a
// null-space steady-state solver.

#include <xydimer/generators.hpp>
#include <xydimer/operators.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace xydimer {

struct IntegratorOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    bool fixed_step = false;
    double fixed_dt = 1e-2;
    double max_step = 0.0;  // 0 means uncapped
};

struct TrajectoryDiagnostics {
    double max_trace_drift = 0.0;
    double max_hermiticity_defect = 0.0;  // measured before re-Hermitization
    double min_eigenvalue = 0.0;          // most negative eigenvalue encountered
    long accepted_steps = 0;
    long rejected_steps = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Mat4> states;
    bool collective_basis = false;
    TrajectoryDiagnostics diag;
};

struct Populations {
    double eps, sym, asym, gnd;
};

// Diagonal of rho in the collective basis, whichever basis rho arrives in.
inline Populations populations_collective(const Mat4& rho, bool collective_basis) {
    const Mat4 rc = collective_basis ? rho : to_collective(rho);
    return {rc(kEps, kEps).real(), rc(kSym, kSym).real(), rc(kAsym, kAsym).real(),
            rc(kGnd, kGnd).real()};
}

namespace detail {

// Weighted RMS of the embedded error estimate; a value <= 1 accepts the step.
inline double error_norm(const Vec16& diff, const Vec16& y0, const Vec16& y1, double rel,
                         double abs) {
    double acc = 0.0;
    for (int i = 0; i < 16; ++i) {
        const double scale = abs + rel * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double e = std::abs(diff[i]) / scale;
        acc += e * e;
    }
    return std::sqrt(acc / 16.0);
}

template <class F>
void rk45_step(const F& f, double t, const Vec16& y, double h, Vec16& y5, Vec16& err) {
    const Vec16 k1 = f(t, y);
    const Vec16 k2 = f(t + h / 5.0, y + h * (k1 / 5.0));
    const Vec16 k3 = f(t + 3.0 * h / 10.0, y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
    const Vec16 k4 = f(t + 4.0 * h / 5.0,
                       y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
    const Vec16 k5 =
        f(t + 8.0 * h / 9.0, y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                      64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
    const Vec16 k6 = f(t + h, y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                       46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                       5103.0 / 18656.0 * k5));
    y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                  2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
    const Vec16 k7 = f(t + h, y5);
    err = h * (71.0 / 57600.0 * k1 - 71.0 / 16695.0 * k3 + 71.0 / 1920.0 * k4 -
               17253.0 / 339200.0 * k5 + 22.0 / 525.0 * k6 - 1.0 / 40.0 * k7);
}

template <class F>
Vec16 rk4_step(const F& f, double t, const Vec16& y, double h) {
    const Vec16 k1 = f(t, y);
    const Vec16 k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const Vec16 k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const Vec16 k4 = f(t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline void record_state_diagnostics(const Mat4& rho, TrajectoryDiagnostics& diag) {
    diag.max_trace_drift = std::max(diag.max_trace_drift, std::abs(rho.trace().real() - 1.0) +
                                                              std::abs(rho.trace().imag()));
    Eigen::SelfAdjointEigenSolver<Mat4> es(rho, Eigen::EigenvaluesOnly);
    diag.min_eigenvalue = std::min(diag.min_eigenvalue, es.eigenvalues().minCoeff());
}

} // namespace detail

// Integrates rho through the requested sample times (ascending; the first
// entry is the initial time). States are re-Hermitized after every accepted
// step; the defect removed that way is tracked in the diagnostics.
inline Trajectory integrate(const Generator& g, const Mat4& rho0,
                            const std::vector<double>& sample_times,
                            const IntegratorOptions& opt = {}) {
    if (sample_times.empty()) throw std::invalid_argument("integrate: no sample times");
    for (size_t k = 1; k < sample_times.size(); ++k)
        if (!(sample_times[k] > sample_times[k - 1]))
            throw std::invalid_argument("integrate: sample times must increase");
    if (opt.fixed_step && !(opt.fixed_dt > 0.0))
        throw std::invalid_argument("integrate: fixed_dt must be positive");

    const Mat16 frozen = g.time_independent ? g.constant : Mat16();
    const auto f = [&g, &frozen](double t, const Vec16& y) -> Vec16 {
        return g.time_independent ? Vec16(frozen * y) : Vec16(g.at(t) * y);
    };

    Trajectory traj;
    traj.collective_basis = g.collective_basis;
    traj.times = sample_times;
    traj.states.reserve(sample_times.size());

    Mat4 rho = 0.5 * (rho0 + rho0.adjoint()).eval();
    Vec16 y = vec(rho);
    double t = sample_times.front();
    traj.states.push_back(rho);
    detail::record_state_diagnostics(rho, traj.diag);

    // Initial step guess from the right-hand-side magnitude.
    double h = opt.fixed_step ? opt.fixed_dt : 0.0;
    if (!opt.fixed_step) {
        const double fn = f(t, y).norm();
        h = (fn > 0.0) ? std::min(0.1 * (1.0 + y.norm()) / fn, 1.0) : 1.0;
    }

    for (size_t k = 1; k < sample_times.size(); ++k) {
        const double target = sample_times[k];
        while (t < target) {
            const double gap = target - t;
            double step = std::min(h, gap);
            if (opt.max_step > 0.0) step = std::min(step, opt.max_step);
            // A step that spans the remaining gap must land on the target
            // exactly, or roundoff in t + step can leave a sub-ulp sliver.
            const bool lands_on_target = step >= gap;
            bool accepted = false;
            if (opt.fixed_step) {
                y = detail::rk4_step(f, t, y, step);
                t = lands_on_target ? target : t + step;
                ++traj.diag.accepted_steps;
                accepted = true;
            } else {
                Vec16 y5, err;
                detail::rk45_step(f, t, y, step, y5, err);
                const double en = detail::error_norm(err, y, y5, opt.rel_tol, opt.abs_tol);
                if (en <= 1.0) {
                    t = lands_on_target ? target : t + step;
                    y = y5;
                    ++traj.diag.accepted_steps;
                    accepted = true;
                } else {
                    ++traj.diag.rejected_steps;
                    if (step <= 1e-14 * (1.0 + std::abs(t)))
                        throw std::runtime_error(
                            "integrate: step size underflow, tolerance unreachable");
                }
                const double factor =
                    std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2), 0.2, 5.0);
                h = std::max(step * factor, 1e-14 * (1.0 + std::abs(t)));
            }
            // Re-Hermitize and note the removed defect after each accepted step.
            if (accepted) {
                if (!y.allFinite())
                    throw std::runtime_error(
                        "integrate: state became non-finite (unstable step size?)");
                rho = unvec(y);
                const double defect = (rho - rho.adjoint()).norm();
                traj.diag.max_hermiticity_defect =
                    std::max(traj.diag.max_hermiticity_defect, defect);
                rho = 0.5 * (rho + rho.adjoint()).eval();
                y = vec(rho);
            }
        }
        rho = unvec(y);
        detail::record_state_diagnostics(rho, traj.diag);
        traj.states.push_back(rho);
    }
    return traj;
}

// Steady state of a time-independent generator from the null space of its
// superoperator, validated by residual and positivity; falls back to long
// integration from the maximally mixed state when the algebraic route is
// ill-conditioned. rate_scale sets the tolerance and fallback horizon
// (typically the single-atom decay rate).
inline Mat4 steady_state(const Generator& g, double rate_scale) {
    if (!g.time_independent)
        throw std::invalid_argument("steady_state: generator must be time independent");
    if (!(rate_scale > 0.0)) throw std::invalid_argument("steady_state: rate_scale must be > 0");

    const Mat16& s = g.constant;
    const double tol = 1e-8 * rate_scale;

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s, Eigen::ComputeFullV);
    Mat4 rho = unvec(svd.matrixV().col(15));
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double tr = rho.trace().real();
    bool ok = std::abs(tr) > 1e-10;
    if (ok) {
        rho /= tr;
        Eigen::SelfAdjointEigenSolver<Mat4> es(rho, Eigen::EigenvaluesOnly);
        ok = (s * vec(rho)).norm() < tol && es.eigenvalues().minCoeff() > -1e-8;
    }
    if (!ok) {
        // Long relaxation from the maximally mixed state.
        const double horizon = 60.0 / rate_scale;
        const Trajectory traj =
            integrate(g, Mat4::Identity() / 4.0, {0.0, horizon}, IntegratorOptions{});
        rho = traj.states.back();
        rho /= rho.trace().real();
        if ((s * vec(rho)).norm() > 10.0 * tol)
            throw std::runtime_error("steady_state: no stationary solution found");
    }
    return rho;
}

} // namespace xydimer

#endif
