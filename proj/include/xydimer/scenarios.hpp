// Named simulation scenarios: figure presets, a flat key=value
// serialization, and a runner that turns a scenario into population
// tables, spectra, and model-distance tables.

#ifndef XYDIMER_SCENARIOS_HPP
#define XYDIMER_SCENARIOS_HPP

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "config.hpp"
#include "csvio.hpp"
#include "dynamics.hpp"
#include "generators.hpp"
#include "model.hpp"
#include "operators.hpp"
#include "reservoir.hpp"
#include "spectrum.hpp"

namespace xydimer {

enum class InitialState { excited_ee, ground_gg, symmetric_s, custom };
enum class DriveRule { none, minus, plus, explicit_frequency };

struct DriveSpec {
    DriveRule rule = DriveRule::none;
    double rabi_over_gamma = 0.0;            // equal illumination of both atoms
    double omega_laser_over_omega0 = 0.0;    // used by the explicit rule only
    bool secular = false;
};

struct GridSpec {
    double gamma_t_max = 10.0;               // population horizon, units of 1/Gamma
    int population_samples = 1000;
    double spectrum_halfwidth_rabi = 3.0;    // half window in generalized Rabi units
    int spectrum_samples = 2000;
};

struct IntegratorSettings {
    bool fixed_step = false;
    double fixed_dt = 0.02;                  // fixed-step size, bare frequency units
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
};

struct Scenario {
    std::string name = "custom";
    SystemParams params;
    std::vector<std::string> models = {"me2"};
    InitialState initial = InitialState::excited_ee;
    Mat4 custom_initial = Mat4::Zero();      // collective basis, used when initial == custom
    DriveSpec drive;
    bool want_populations = true;
    bool want_spectrum = false;
    bool want_reductions = false;
    GridSpec grids;
    std::vector<double> j_sweep;             // spectrum and reduction sweep, empty = params value
    std::vector<double> r_sweep;             // reduction sweep, empty = params value
    IntegratorSettings integrator;
};

// ---------------------------------------------------------------------------
// Presets.

inline const std::vector<std::pair<std::string, std::string>>& preset_catalog() {
    static const std::vector<std::pair<std::string, std::string>> catalog = {
        {"fig2_populations", "undriven decay of the fully excited pair, three models"},
        {"fig4_drive_minus", "drive at the lower collective resonance from the ground state"},
        {"fig5_drive_plus", "drive at the upper collective resonance from the excited state"},
        {"fig6_spectrum_sweep", "incoherent spectra across coupling strengths, three models"},
        {"reduction_chain", "superoperator distances along the model reduction chain"},
    };
    return catalog;
}

inline Scenario preset(const std::string& name) {
    Scenario sc;
    sc.name = name;
    if (name == "fig2_populations") {
        sc.params.j_coupling = 0.6;
        sc.params.r12_over_lambda = 0.2;
        sc.params.gamma_single = 0.05;
        sc.models = {"me1", "me2", "me4"};
        sc.initial = InitialState::excited_ee;
        sc.grids.gamma_t_max = 10.0;
        sc.grids.population_samples = 1000;
        return sc;
    }
    if (name == "fig4_drive_minus" || name == "fig5_drive_plus") {
        sc.params.j_coupling = 0.1;
        sc.params.r12_over_lambda = 0.2;
        sc.params.gamma_single = 0.002;
        sc.models = {"me4"};
        sc.initial = (name == "fig4_drive_minus") ? InitialState::ground_gg
                                                  : InitialState::excited_ee;
        sc.drive.rule = (name == "fig4_drive_minus") ? DriveRule::minus : DriveRule::plus;
        sc.drive.rabi_over_gamma = 10.0;
        sc.grids.gamma_t_max = 20.0;
        sc.grids.population_samples = 1000;
        return sc;
    }
    if (name == "fig6_spectrum_sweep") {
        sc.params.j_coupling = 0.1;
        sc.params.r12_over_lambda = 0.2;
        sc.params.gamma_single = 0.002;
        sc.models = {"me1", "me2", "me4"};
        sc.initial = InitialState::ground_gg;
        sc.drive.rule = DriveRule::minus;
        sc.drive.rabi_over_gamma = 10.0;
        sc.want_populations = false;
        sc.want_spectrum = true;
        sc.j_sweep = {0.0, 0.05, 0.1};
        return sc;
    }
    if (name == "reduction_chain") {
        sc.params.j_coupling = 0.1;
        sc.params.r12_over_lambda = 0.2;
        sc.params.gamma_single = 0.05;
        sc.models = {"me1", "me2", "me4"};
        sc.want_populations = false;
        sc.want_reductions = true;
        sc.j_sweep = {1e-6, 1e-3, 0.1};
        sc.r_sweep = {0.2, 10.0};
        return sc;
    }
    std::string available;
    for (const auto& [n, desc] : preset_catalog()) {
        if (!available.empty()) available += ", ";
        available += n;
    }
    throw std::invalid_argument("unknown preset '" + name + "'; available: " + available);
}

// ---------------------------------------------------------------------------
// Key=value serialization. Every field appears, so a round trip through
// scenario_from_kv(scenario_to_kv(sc)) is lossless.

namespace detail {

inline std::string join_numbers(const std::vector<double>& xs) {
    std::string out;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += format_short(xs[i]);
    }
    return out;
}

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t c = text.find(',', pos);
        const std::string piece =
            trim(std::string_view(text).substr(pos, c == std::string::npos ? std::string::npos
                                                                           : c - pos));
        if (!piece.empty()) parts.push_back(piece);
        if (c == std::string::npos) break;
        pos = c + 1;
    }
    return parts;
}

inline std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> xs;
    for (const std::string& piece : split_list(text)) xs.push_back(parse_double(piece));
    return xs;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw std::invalid_argument(key + ": expected true or false, got '" + value + "'");
}

inline int parse_int(const std::string& key, const std::string& value) {
    int v = 0;
    const char* b = value.data();
    const char* e = b + value.size();
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e)
        throw std::invalid_argument(key + ": expected an integer, got '" + value + "'");
    return v;
}

inline const char* initial_label(InitialState s) {
    switch (s) {
        case InitialState::excited_ee: return "excited_ee";
        case InitialState::ground_gg: return "ground_gg";
        case InitialState::symmetric_s: return "symmetric_s";
        case InitialState::custom: return "custom";
    }
    return "excited_ee";
}

inline const char* rule_label(DriveRule r) {
    switch (r) {
        case DriveRule::none: return "none";
        case DriveRule::minus: return "minus";
        case DriveRule::plus: return "plus";
        case DriveRule::explicit_frequency: return "explicit";
    }
    return "none";
}

inline std::string matrix_values(const Mat4& m) {
    std::vector<double> xs;
    xs.reserve(32);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            xs.push_back(m(i, j).real());
            xs.push_back(m(i, j).imag());
        }
    return join_numbers(xs);
}

inline Mat4 matrix_from_values(const std::string& key, const std::string& text) {
    const std::vector<double> xs = parse_number_list(text);
    if (xs.size() != 32)
        throw std::invalid_argument(key + ": expected 32 numbers (re,im row-major), got " +
                                    std::to_string(xs.size()));
    Mat4 m;
    size_t k = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            m(i, j) = std::complex<double>(xs[k], xs[k + 1]);
            k += 2;
        }
    return m;
}

} // namespace detail

inline const std::vector<std::string>& model_tags() {
    static const std::vector<std::string> tags = {"me1", "me2", "me4", "general"};
    return tags;
}

inline KvList scenario_to_kv(const Scenario& sc) {
    using detail::join_numbers;
    KvList kv;
    auto add = [&kv](const std::string& k, std::string v) { kv.emplace_back(k, std::move(v)); };
    add("scenario.name", sc.name);
    add("system.omega1_over_omega0", format_short(sc.params.omega1));
    add("system.omega2_over_omega0", format_short(sc.params.omega2));
    add("system.j_over_omega0", format_short(sc.params.j_coupling));
    add("system.r12_over_lambda", format_short(sc.params.r12_over_lambda));
    add("system.theta_dipole", format_short(sc.params.theta_dipole));
    add("system.gamma_over_omega0", format_short(sc.params.gamma_single));
    add("system.omega_cutoff_over_omega0", format_short(sc.params.omega_cutoff));
    add("system.lamb_shifts",
        sc.params.lamb_shift_mode == LambShiftMode::zeroed ? "zeroed" : "full");
    std::string models;
    for (size_t i = 0; i < sc.models.size(); ++i) {
        if (i) models += ',';
        models += sc.models[i];
    }
    add("run.models", models);
    add("run.initial", detail::initial_label(sc.initial));
    if (sc.initial == InitialState::custom)
        add("run.initial_matrix", detail::matrix_values(sc.custom_initial));
    add("run.populations", sc.want_populations ? "true" : "false");
    add("run.spectrum", sc.want_spectrum ? "true" : "false");
    add("run.reductions", sc.want_reductions ? "true" : "false");
    add("drive.rule", detail::rule_label(sc.drive.rule));
    add("drive.rabi_over_gamma", format_short(sc.drive.rabi_over_gamma));
    add("drive.omega_laser_over_omega0", format_short(sc.drive.omega_laser_over_omega0));
    add("drive.secular", sc.drive.secular ? "true" : "false");
    add("grid.gamma_t_max", format_short(sc.grids.gamma_t_max));
    add("grid.population_samples", std::to_string(sc.grids.population_samples));
    add("grid.spectrum_halfwidth_rabi", format_short(sc.grids.spectrum_halfwidth_rabi));
    add("grid.spectrum_samples", std::to_string(sc.grids.spectrum_samples));
    add("sweep.j_values", join_numbers(sc.j_sweep));
    add("sweep.r_values", join_numbers(sc.r_sweep));
    add("integrator.fixed_step", sc.integrator.fixed_step ? "true" : "false");
    add("integrator.fixed_dt", format_short(sc.integrator.fixed_dt));
    add("integrator.rel_tol", format_short(sc.integrator.rel_tol));
    add("integrator.abs_tol", format_short(sc.integrator.abs_tol));
    return kv;
}

inline void apply_setting(Scenario& sc, const std::string& key, const std::string& value) {
    using detail::parse_bool;
    using detail::parse_int;
    if (key == "scenario.name") {
        sc.name = value;
    } else if (key == "system.omega1_over_omega0") {
        sc.params.omega1 = parse_double(value);
    } else if (key == "system.omega2_over_omega0") {
        sc.params.omega2 = parse_double(value);
    } else if (key == "system.j_over_omega0") {
        sc.params.j_coupling = parse_double(value);
    } else if (key == "system.r12_over_lambda") {
        sc.params.r12_over_lambda = parse_double(value);
    } else if (key == "system.theta_dipole") {
        sc.params.theta_dipole = parse_double(value);
    } else if (key == "system.gamma_over_omega0") {
        sc.params.gamma_single = parse_double(value);
    } else if (key == "system.omega_cutoff_over_omega0") {
        sc.params.omega_cutoff = parse_double(value);
    } else if (key == "system.lamb_shifts") {
        if (value == "full")
            sc.params.lamb_shift_mode = LambShiftMode::full;
        else if (value == "zeroed")
            sc.params.lamb_shift_mode = LambShiftMode::zeroed;
        else
            throw std::invalid_argument(key + ": expected full or zeroed, got '" + value + "'");
    } else if (key == "run.models") {
        const std::vector<std::string> parts = detail::split_list(value);
        if (parts.empty()) throw std::invalid_argument(key + ": at least one model required");
        for (const std::string& m : parts) {
            const auto& tags = model_tags();
            if (std::find(tags.begin(), tags.end(), m) == tags.end())
                throw std::invalid_argument(key + ": unknown model '" + m +
                                            "' (me1, me2, me4, general)");
            if (std::count(parts.begin(), parts.end(), m) > 1)
                throw std::invalid_argument(key + ": duplicate model '" + m + "'");
        }
        sc.models = parts;
    } else if (key == "run.initial") {
        if (value == "excited_ee")
            sc.initial = InitialState::excited_ee;
        else if (value == "ground_gg")
            sc.initial = InitialState::ground_gg;
        else if (value == "symmetric_s")
            sc.initial = InitialState::symmetric_s;
        else if (value == "custom")
            sc.initial = InitialState::custom;
        else
            throw std::invalid_argument(
                key + ": expected excited_ee, ground_gg, symmetric_s or custom, got '" + value +
                "'");
    } else if (key == "run.initial_matrix") {
        sc.custom_initial = detail::matrix_from_values(key, value);
    } else if (key == "run.populations") {
        sc.want_populations = parse_bool(key, value);
    } else if (key == "run.spectrum") {
        sc.want_spectrum = parse_bool(key, value);
    } else if (key == "run.reductions") {
        sc.want_reductions = parse_bool(key, value);
    } else if (key == "drive.rule") {
        if (value == "none")
            sc.drive.rule = DriveRule::none;
        else if (value == "minus")
            sc.drive.rule = DriveRule::minus;
        else if (value == "plus")
            sc.drive.rule = DriveRule::plus;
        else if (value == "explicit")
            sc.drive.rule = DriveRule::explicit_frequency;
        else
            throw std::invalid_argument(key + ": expected none, minus, plus or explicit, got '" +
                                        value + "'");
    } else if (key == "drive.rabi_over_gamma") {
        sc.drive.rabi_over_gamma = parse_double(value);
    } else if (key == "drive.omega_laser_over_omega0") {
        sc.drive.omega_laser_over_omega0 = parse_double(value);
    } else if (key == "drive.secular") {
        sc.drive.secular = parse_bool(key, value);
    } else if (key == "grid.gamma_t_max") {
        sc.grids.gamma_t_max = parse_double(value);
    } else if (key == "grid.population_samples") {
        sc.grids.population_samples = parse_int(key, value);
    } else if (key == "grid.spectrum_halfwidth_rabi") {
        sc.grids.spectrum_halfwidth_rabi = parse_double(value);
    } else if (key == "grid.spectrum_samples") {
        sc.grids.spectrum_samples = parse_int(key, value);
    } else if (key == "sweep.j_values") {
        sc.j_sweep = detail::parse_number_list(value);
    } else if (key == "sweep.r_values") {
        sc.r_sweep = detail::parse_number_list(value);
    } else if (key == "integrator.fixed_step") {
        sc.integrator.fixed_step = parse_bool(key, value);
    } else if (key == "integrator.fixed_dt") {
        sc.integrator.fixed_dt = parse_double(value);
    } else if (key == "integrator.rel_tol") {
        sc.integrator.rel_tol = parse_double(value);
    } else if (key == "integrator.abs_tol") {
        sc.integrator.abs_tol = parse_double(value);
    } else {
        throw std::invalid_argument("unknown setting '" + key + "'");
    }
}

inline Scenario scenario_from_kv(const KvList& kv) {
    Scenario sc;
    for (const auto& [k, v] : kv) apply_setting(sc, k, v);
    return sc;
}

// ---------------------------------------------------------------------------
// Runner.

struct PopulationPoint {
    double gamma_t = 0.0;
    Populations pops{0.0, 0.0, 0.0, 0.0};
    double trace = 0.0;
    double min_eig = 0.0;
};

struct PopulationSeries {
    std::string model;
    std::vector<PopulationPoint> rows;
    TrajectoryDiagnostics diag;
};

struct SpectrumRun {
    std::string model;
    double j_over_omega0 = 0.0;
    double gamma = 0.0;
    SpectrumResult result;
};

struct ReductionRow {
    std::string comparison;       // me4_vs_me2 or me2_vs_me1
    double j_over_omega0 = 0.0;
    double r12_over_lambda = 0.0;
    double distance_over_gamma = 0.0;  // Frobenius norm of the superoperator difference
};

struct RunBundle {
    Scenario scenario;
    std::vector<std::string> warnings;
    std::vector<PopulationSeries> populations;
    std::vector<SpectrumRun> spectra;
    std::vector<ReductionRow> reductions;
};

namespace detail {

inline void run_parallel(std::vector<std::function<void()>>& tasks, int jobs) {
    if (tasks.empty()) return;
    const int n = static_cast<int>(tasks.size());
    const int workers = std::max(1, std::min(jobs, n));
    std::vector<std::exception_ptr> errors(tasks.size());
    if (workers == 1) {
        for (size_t i = 0; i < tasks.size(); ++i) {
            try {
                tasks[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                try {
                    tasks[i]();
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
}

inline std::vector<double> linear_grid(double a, double b, int n) {
    std::vector<double> xs(static_cast<size_t>(n));
    const double step = (b - a) / (n - 1);
    for (int k = 0; k < n; ++k) xs[static_cast<size_t>(k)] = a + step * k;
    xs.back() = b;
    return xs;
}

} // namespace detail

inline Generator build_model(const std::string& tag, const SystemParams& p,
                             const DerivedParams& d, const ReservoirRates& r) {
    if (tag == "me1") return build_me1(p, d, r);
    if (tag == "me2") return build_me2(p, d, r);
    if (tag == "me4") return build_me4(p, d, r);
    if (tag == "general") return build_general(p, d, r);
    throw std::invalid_argument("unknown model '" + tag + "' (me1, me2, me4, general)");
}

// Laser parameters with the frequency rule applied. The minus rule targets
// the ground <-> symmetric resonance omega' - J+, the plus rule the
// symmetric <-> doubly-excited resonance omega' + J+.
inline DriveParams resolved_drive(const Scenario& sc, const SystemParams& p,
                                  const DerivedParams& d, const ReservoirRates& r) {
    DriveParams dr;
    dr.rabi_1 = dr.rabi_2 = sc.drive.rabi_over_gamma * p.gamma_single;
    dr.secular = sc.drive.secular;
    switch (sc.drive.rule) {
        case DriveRule::none:
            throw std::invalid_argument("resolved_drive: scenario has no drive");
        case DriveRule::minus: {
            const CollectiveSplittings cs = collective_splittings(p, d, r);
            dr.omega_laser = cs.omega_prime - cs.j_plus;
            break;
        }
        case DriveRule::plus: {
            const CollectiveSplittings cs = collective_splittings(p, d, r);
            dr.omega_laser = cs.omega_prime + cs.j_plus;
            break;
        }
        case DriveRule::explicit_frequency:
            dr.omega_laser = sc.drive.omega_laser_over_omega0;
            break;
    }
    return dr;
}

inline Mat4 initial_density_collective(const Scenario& sc) {
    switch (sc.initial) {
        case InitialState::excited_ee: return unit(kEps, kEps);
        case InitialState::ground_gg: return unit(kGnd, kGnd);
        case InitialState::symmetric_s: return unit(kSym, kSym);
        case InitialState::custom: {
            Mat4 rho = 0.5 * (sc.custom_initial + sc.custom_initial.adjoint());
            const double tr = rho.trace().real();
            if (std::abs(tr - 1.0) > 1e-9)
                throw std::invalid_argument("custom initial state must have unit trace");
            return rho;
        }
    }
    throw std::invalid_argument("unknown initial state");
}

inline void validate_scenario(const Scenario& sc) {
    validate(sc.params);
    if (sc.models.empty()) throw std::invalid_argument("scenario lists no models");
    for (const std::string& m : sc.models) {
        const auto& tags = model_tags();
        if (std::find(tags.begin(), tags.end(), m) == tags.end())
            throw std::invalid_argument("unknown model '" + m + "' (me1, me2, me4, general)");
    }
    const bool has_me4 = std::find(sc.models.begin(), sc.models.end(), "me4") != sc.models.end();
    if (has_me4) require_identical_atoms(sc.params, "me4");
    const bool driven = sc.drive.rule != DriveRule::none;
    if (driven) {
        if (std::find(sc.models.begin(), sc.models.end(), "general") != sc.models.end())
            throw std::invalid_argument(
                "the general model is time dependent and cannot be driven in the rotating frame");
        if (sc.drive.rabi_over_gamma < 0.0 || !std::isfinite(sc.drive.rabi_over_gamma))
            throw std::invalid_argument("drive.rabi_over_gamma must be >= 0");
    }
    if (sc.want_populations) {
        if (sc.grids.population_samples < 2)
            throw std::invalid_argument("grid.population_samples must be at least 2");
        if (!(sc.grids.gamma_t_max > 0.0) || !std::isfinite(sc.grids.gamma_t_max))
            throw std::invalid_argument("grid.gamma_t_max must be positive");
    }
    if (sc.want_spectrum) {
        if (!driven) throw std::invalid_argument("spectrum output requires a drive");
        if (sc.grids.spectrum_samples < 2)
            throw std::invalid_argument("grid.spectrum_samples must be at least 2");
        if (!(sc.grids.spectrum_halfwidth_rabi > 0.0))
            throw std::invalid_argument("grid.spectrum_halfwidth_rabi must be positive");
    }
    for (double j : sc.j_sweep)
        if (j < 0.0 || !std::isfinite(j))
            throw std::invalid_argument("sweep.j_values must be finite and >= 0");
    for (double rr : sc.r_sweep)
        if (!(rr > 0.0) || !std::isfinite(rr))
            throw std::invalid_argument("sweep.r_values must be finite and positive");
    if (sc.integrator.fixed_step && !(sc.integrator.fixed_dt > 0.0))
        throw std::invalid_argument("integrator.fixed_dt must be positive");
    if (!(sc.integrator.rel_tol > 0.0))
        throw std::invalid_argument("integrator.rel_tol must be positive");
    if (sc.integrator.abs_tol < 0.0)
        throw std::invalid_argument("integrator.abs_tol must be >= 0");
    if (sc.initial == InitialState::custom) initial_density_collective(sc);
}

namespace detail {

inline IntegratorOptions integrator_options(const Scenario& sc) {
    IntegratorOptions opt;
    opt.fixed_step = sc.integrator.fixed_step;
    opt.fixed_dt = sc.integrator.fixed_dt;
    opt.rel_tol = sc.integrator.rel_tol;
    opt.abs_tol = sc.integrator.abs_tol;
    return opt;
}

inline PopulationSeries population_series(const Scenario& sc, const std::string& model) {
    const SystemParams& p = sc.params;
    const DerivedParams d = derive(p);
    const ReservoirRates r = composite_rates(p, d);
    Generator g = build_model(model, p, d, r);
    if (sc.drive.rule != DriveRule::none)
        g = with_rotating_drive(g, resolved_drive(sc, p, d, r));

    const Mat4 rho0c = initial_density_collective(sc);
    const Mat4 rho0 = g.collective_basis ? rho0c : to_product(rho0c);

    const std::vector<double> gamma_ts =
        linear_grid(0.0, sc.grids.gamma_t_max, sc.grids.population_samples);
    std::vector<double> times(gamma_ts.size());
    for (size_t k = 0; k < gamma_ts.size(); ++k) times[k] = gamma_ts[k] / p.gamma_single;

    const Trajectory traj = integrate(g, rho0, times, integrator_options(sc));

    PopulationSeries series;
    series.model = model;
    series.diag = traj.diag;
    series.rows.resize(gamma_ts.size());
    for (size_t k = 0; k < gamma_ts.size(); ++k) {
        const Mat4& rho = traj.states[k];
        PopulationPoint& row = series.rows[k];
        row.gamma_t = gamma_ts[k];
        row.pops = populations_collective(rho, traj.collective_basis);
        row.trace = rho.trace().real();
        Eigen::SelfAdjointEigenSolver<Mat4> es(rho, Eigen::EigenvaluesOnly);
        row.min_eig = es.eigenvalues().minCoeff();
    }
    return series;
}

inline SpectrumRun spectrum_single(const Scenario& sc, const std::string& model, double j) {
    SystemParams p = sc.params;
    p.j_coupling = j;
    const DerivedParams d = derive(p);
    const ReservoirRates r = composite_rates(p, d);
    const DriveParams dr = resolved_drive(sc, p, d, r);
    const Generator g = with_rotating_drive(build_model(model, p, d, r), dr);
    const Mat4 rho_ss = steady_state(g, p.gamma_single);

    const CollectiveSplittings cs = collective_splittings(p, d, r);
    const double detuning = (cs.omega_prime - cs.j_plus) - dr.omega_laser;
    const double rabi_general = std::hypot(detuning, dr.rabi_mean());
    const double half = sc.grids.spectrum_halfwidth_rabi * rabi_general;
    const std::vector<double> omega_grid =
        linear_grid(-half, half, sc.grids.spectrum_samples);

    SpectrumRun run;
    run.model = model;
    run.j_over_omega0 = j;
    run.gamma = p.gamma_single;
    run.result = incoherent_spectrum(g, rho_ss, r, omega_grid);
    return run;
}

inline std::vector<ReductionRow> reduction_table(const Scenario& sc) {
    const std::vector<double> jlist =
        sc.j_sweep.empty() ? std::vector<double>{sc.params.j_coupling} : sc.j_sweep;
    const std::vector<double> rlist =
        sc.r_sweep.empty() ? std::vector<double>{sc.params.r12_over_lambda} : sc.r_sweep;
    std::vector<ReductionRow> rows;
    rows.reserve(2 * jlist.size() * rlist.size());
    for (const char* comparison : {"me4_vs_me2", "me2_vs_me1"}) {
        for (double j : jlist) {
            for (double rr : rlist) {
                SystemParams p = sc.params;
                p.j_coupling = j;
                p.r12_over_lambda = rr;
                const DerivedParams d = derive(p);
                const ReservoirRates r = composite_rates(p, d);
                const Mat16 a = (std::string(comparison) == "me4_vs_me2")
                                    ? build_me4(p, d, r).constant
                                    : build_me2(p, d, r).constant;
                const Mat16 b = (std::string(comparison) == "me4_vs_me2")
                                    ? build_me2(p, d, r).constant
                                    : build_me1(p, d, r).constant;
                rows.push_back(
                    {comparison, j, rr, (a - b).norm() / p.gamma_single});
            }
        }
    }
    return rows;
}

} // namespace detail

// Runs every requested output of the scenario. Tasks are independent and
// distributed over at most `jobs` threads; results land in fixed slots, so
// the bundle does not depend on the scheduling.
inline RunBundle run_scenario(const Scenario& sc, int jobs = 1) {
    validate_scenario(sc);
    RunBundle bundle;
    bundle.scenario = sc;
    bundle.warnings = validate(sc.params);

    std::vector<std::function<void()>> tasks;
    if (sc.want_populations) {
        bundle.populations.resize(sc.models.size());
        for (size_t i = 0; i < sc.models.size(); ++i) {
            tasks.push_back([&bundle, &sc, i] {
                bundle.populations[i] = detail::population_series(sc, sc.models[i]);
            });
        }
    }
    if (sc.want_spectrum) {
        const std::vector<double> jlist =
            sc.j_sweep.empty() ? std::vector<double>{sc.params.j_coupling} : sc.j_sweep;
        bundle.spectra.resize(sc.models.size() * jlist.size());
        for (size_t i = 0; i < sc.models.size(); ++i) {
            for (size_t k = 0; k < jlist.size(); ++k) {
                const size_t slot = i * jlist.size() + k;
                const double j = jlist[k];
                tasks.push_back([&bundle, &sc, i, j, slot] {
                    bundle.spectra[slot] = detail::spectrum_single(sc, sc.models[i], j);
                });
            }
        }
    }
    detail::run_parallel(tasks, jobs);
    if (sc.want_reductions) bundle.reductions = detail::reduction_table(sc);
    return bundle;
}

// ---------------------------------------------------------------------------
// CSV artifacts.

inline std::string populations_csv(const PopulationSeries& s) {
    std::string out = "gamma_t,rho_e,rho_s,rho_a,rho_g,trace,min_eig\n";
    for (const PopulationPoint& row : s.rows) {
        out += format_full(row.gamma_t);
        out += ',';
        out += format_full(row.pops.eps);
        out += ',';
        out += format_full(row.pops.sym);
        out += ',';
        out += format_full(row.pops.asym);
        out += ',';
        out += format_full(row.pops.gnd);
        out += ',';
        out += format_full(row.trace);
        out += ',';
        out += format_full(row.min_eig);
        out += '\n';
    }
    return out;
}

inline std::string spectrum_csv(const SpectrumRun& s) {
    double peak = 0.0;
    for (double v : s.result.values) peak = std::max(peak, v);
    const double scale = peak > 0.0 ? 1.0 / peak : 0.0;
    std::string out = "omega_offset_over_gamma,s_i_normalized\n";
    for (size_t k = 0; k < s.result.omega.size(); ++k) {
        out += format_full(s.result.omega[k] / s.gamma);
        out += ',';
        out += format_full(s.result.values[k] * scale);
        out += '\n';
    }
    return out;
}

inline std::string reduction_csv(const std::vector<ReductionRow>& rows) {
    std::string out = "comparison,j_over_omega0,r12_over_lambda,distance_over_gamma\n";
    for (const ReductionRow& row : rows) {
        out += row.comparison;
        out += ',';
        out += format_full(row.j_over_omega0);
        out += ',';
        out += format_full(row.r12_over_lambda);
        out += ',';
        out += format_full(row.distance_over_gamma);
        out += '\n';
    }
    return out;
}

inline std::string population_filename(const std::string& model) {
    return "populations_" + model + ".csv";
}

inline std::string spectrum_filename(const std::string& model, double j) {
    return "spectrum_" + model + "_j" + format_short(j) + ".csv";
}

// Deterministically ordered (filename, content) pairs for a finished run.
inline std::vector<std::pair<std::string, std::string>> artifact_files(const RunBundle& b) {
    std::vector<std::pair<std::string, std::string>> files;
    for (const PopulationSeries& s : b.populations)
        files.emplace_back(population_filename(s.model), populations_csv(s));
    for (const SpectrumRun& s : b.spectra)
        files.emplace_back(spectrum_filename(s.model, s.j_over_omega0), spectrum_csv(s));
    if (!b.reductions.empty())
        files.emplace_back("reduction_chain.csv", reduction_csv(b.reductions));
    return files;
}

} // namespace xydimer

#endif
