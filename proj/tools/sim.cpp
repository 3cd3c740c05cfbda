// Command-line front end: runs named scenarios, writes CSV artifacts plus a
// manifest with content digests, and offers a quick self-check suite.

#include <xydimer/scenarios.hpp>
#include <xydimer/specfun.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace xydimer;

namespace {

constexpr const char* kToolName = "sim";
constexpr const char* kToolVersion = "1.0.0";

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("SIM_LOG");
        if (env == nullptr) return 1;
        const std::string v = env;
        if (v == "quiet" || v == "0") return 0;
        if (v == "debug" || v == "2") return 2;
        return 1;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << kToolName << ": " << msg << '\n';
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::cerr << kToolName << ": " << msg << '\n';
}

std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r' || c == '\t') c = ' ';
    return s;
}

// Single machine-parseable error line on stderr.
void report_error(const std::string& kind, const std::string& message) {
    std::cerr << kToolName << ": error kind=" << kind << " message=\"" << one_line(message)
              << "\"\n";
}

struct RunOptions {
    std::string preset_name;
    std::string config_path;
    std::string out_dir = "out";
    int jobs = 1;
    bool fixed_step = false;
    bool secular = false;
    std::string lamb_shifts;  // empty, "full" or "zeroed"
};

Scenario resolve_scenario(const RunOptions& opt) {
    KvList entries;
    if (!opt.config_path.empty()) entries = parse_config_text(read_file(opt.config_path));

    std::string base = opt.preset_name;
    if (base.empty())
        for (const auto& [k, v] : entries)
            if (k == "scenario.preset") base = v;

    Scenario sc;
    if (!base.empty())
        sc = preset(base);
    else if (opt.config_path.empty())
        throw std::invalid_argument("run needs --preset or --config");

    for (const auto& [k, v] : entries) {
        if (k == "scenario.preset") continue;
        apply_setting(sc, k, v);
        log_debug("config: " + k + " = " + v);
    }
    if (opt.fixed_step) sc.integrator.fixed_step = true;
    if (opt.secular) sc.drive.secular = true;
    if (opt.lamb_shifts == "full") sc.params.lamb_shift_mode = LambShiftMode::full;
    if (opt.lamb_shifts == "zeroed") sc.params.lamb_shift_mode = LambShiftMode::zeroed;
    return sc;
}

json scenario_echo(const Scenario& sc) {
    json echo = json::object();
    for (const auto& [k, v] : scenario_to_kv(sc)) echo[k] = v;
    return echo;
}

json diagnostics_json(const RunBundle& bundle) {
    json diag;
    diag["populations"] = json::array();
    for (const PopulationSeries& s : bundle.populations) {
        diag["populations"].push_back({{"model", s.model},
                                       {"accepted_steps", s.diag.accepted_steps},
                                       {"rejected_steps", s.diag.rejected_steps},
                                       {"max_trace_drift", s.diag.max_trace_drift},
                                       {"max_hermiticity_defect", s.diag.max_hermiticity_defect},
                                       {"min_eigenvalue", s.diag.min_eigenvalue}});
    }
    diag["spectra"] = json::array();
    for (const SpectrumRun& s : bundle.spectra) {
        json peaks = json::array();
        for (const Peak& p : s.result.peaks)
            peaks.push_back({{"location_over_gamma", p.location / s.gamma},
                             {"height", p.height},
                             {"width_over_gamma", p.width / s.gamma}});
        diag["spectra"].push_back({{"model", s.model},
                                   {"j_over_omega0", s.j_over_omega0},
                                   {"imag_residue", s.result.imag_residue},
                                   {"negative_residue", s.result.negative_residue},
                                   {"peaks", peaks}});
    }
    return diag;
}

int cmd_run(const RunOptions& opt) {
    Scenario sc;
    try {
        sc = resolve_scenario(opt);
    } catch (const std::exception& e) {
        report_error("config", e.what());
        return 2;
    }

    RunBundle bundle;
    try {
        log_info("running scenario '" + sc.name + "' with " + std::to_string(opt.jobs) +
                 " job(s)");
        bundle = run_scenario(sc, opt.jobs);
    } catch (const std::invalid_argument& e) {
        report_error("config", e.what());
        return 2;
    } catch (const std::exception& e) {
        report_error("numerical", e.what());
        json diag = {{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                     {"error", one_line(e.what())},
                     {"scenario", scenario_echo(sc)}};
        try {
            atomic_write(fs::path(opt.out_dir) / "diagnostics.json", diag.dump(2) + "\n");
        } catch (const std::exception& io) {
            report_error("io", io.what());
        }
        return 3;
    }

    try {
        const auto files = artifact_files(bundle);
        json outputs = json::array();
        for (const auto& [name, content] : files) {
            atomic_write(fs::path(opt.out_dir) / name, content);
            outputs.push_back(
                {{"file", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
            log_info("wrote " + name + " (" + std::to_string(content.size()) + " bytes)");
        }
        json manifest = {{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                         {"command", "run"},
                         {"jobs", opt.jobs},
                         {"scenario", scenario_echo(bundle.scenario)},
                         {"warnings", bundle.warnings},
                         {"diagnostics", diagnostics_json(bundle)},
                         {"outputs", outputs}};
        atomic_write(fs::path(opt.out_dir) / "manifest.json", manifest.dump(2) + "\n");
        log_info("wrote manifest.json");
    } catch (const std::exception& e) {
        report_error("io", e.what());
        return 3;
    }
    return 0;
}

int cmd_validate() {
    using Check = std::pair<std::string, std::function<std::string()>>;
    // Each check returns a detail string on success and throws on failure.
    auto expect = [](bool ok, const std::string& msg) {
        if (!ok) throw std::runtime_error(msg);
    };

    const std::vector<Check> checks = {
        {"independent_decay_limit",
         [&] {
             Scenario sc = preset("reduction_chain");
             sc.j_sweep = {1e-6};
             sc.r_sweep = {10.0};
             const RunBundle b = run_scenario(sc);
             double dist = -1.0;
             for (const ReductionRow& row : b.reductions)
                 if (row.comparison == "me2_vs_me1") dist = row.distance_over_gamma;
             expect(dist >= 0.0, "me2_vs_me1 row missing");
             expect(dist < 0.05, "collective corrections too large at r12 = 10 lambda: " +
                                     format_short(dist));
             return "distance " + format_short(dist) + " Gamma at r12 = 10 lambda";
         }},
        {"reduction_chain_monotone",
         [&] {
             Scenario sc = preset("reduction_chain");
             const RunBundle b = run_scenario(sc);
             double weak = -1.0, strong = -1.0;
             for (const ReductionRow& row : b.reductions) {
                 if (row.comparison != "me4_vs_me2" || row.r12_over_lambda != 0.2) continue;
                 if (row.j_over_omega0 == 1e-6) weak = row.distance_over_gamma;
                 if (row.j_over_omega0 == 0.1) strong = row.distance_over_gamma;
             }
             expect(weak >= 0.0 && strong >= 0.0, "me4_vs_me2 rows missing");
             expect(weak < strong, "distance does not grow with the coupling");
             return "distance " + format_short(weak) + " -> " + format_short(strong) +
                    " Gamma as J goes 1e-6 -> 0.1";
         }},
        {"trace_audit",
         [&] {
             Scenario sc = preset("fig2_populations");
             sc.models = {"me2"};
             sc.grids.population_samples = 51;
             const RunBundle b = run_scenario(sc);
             const TrajectoryDiagnostics& d = b.populations.front().diag;
             expect(d.max_trace_drift < 1e-8,
                    "trace drift " + format_short(d.max_trace_drift));
             expect(d.max_hermiticity_defect < 1e-10,
                    "hermiticity defect " + format_short(d.max_hermiticity_defect));
             expect(d.min_eigenvalue > -1e-6,
                    "negative population " + format_short(d.min_eigenvalue));
             return "drift " + format_short(d.max_trace_drift) + ", min eigenvalue " +
                    format_short(d.min_eigenvalue);
         }},
        {"integral_function_values",
         [&] {
             const double si1 = sin_integral(1.0);
             const double ci1 = cos_integral(1.0);
             expect(std::abs(si1 - 0.94608307036718302) < 1e-12,
                    "Si(1) = " + format_full(si1));
             expect(std::abs(ci1 - 0.33740392290096813) < 1e-12,
                    "Ci(1) = " + format_full(ci1));
             return "Si(1), Ci(1) match their series values to 1e-12";
         }},
    };

    bool all_ok = true;
    for (const auto& [name, fn] : checks) {
        try {
            const std::string detail = fn();
            std::cout << "PASS " << name << " (" << detail << ")\n";
        } catch (const std::exception& e) {
            std::cout << "FAIL " << name << " (" << one_line(e.what()) << ")\n";
            all_ok = false;
        }
    }
    return all_ok ? 0 : 3;
}

int cmd_list_presets() {
    for (const auto& [name, desc] : preset_catalog()) std::cout << name << "  " << desc << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"open-system dynamics and fluorescence spectra of two coupled two-level atoms"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    RunOptions opt;
    CLI::App* run = app.add_subcommand("run", "run a scenario and write CSV artifacts");
    run->add_option("--preset", opt.preset_name, "scenario preset name (see list-presets)");
    run->add_option("--config", opt.config_path, "key=value configuration file")
        ->check(CLI::ExistingFile);
    run->add_option("--out", opt.out_dir, "output directory (default: out)");
    run->add_option("--jobs", opt.jobs, "max parallel tasks (default: 1)")
        ->check(CLI::PositiveNumber);
    run->add_flag("--fixed-step", opt.fixed_step, "use the fixed-step integrator");
    run->add_flag("--secular", opt.secular, "drop the far-detuned drive leg");
    run->add_option("--lamb-shifts", opt.lamb_shifts, "full or zeroed")
        ->check(CLI::IsMember({"full", "zeroed"}));

    CLI::App* validate = app.add_subcommand("validate", "run the invariant quick-suite");
    CLI::App* list = app.add_subcommand("list-presets", "list the scenario presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        report_error("config", e.what());
        return 2;
    }

    if (run->parsed()) return cmd_run(opt);
    if (validate->parsed()) return cmd_validate();
    if (list->parsed()) return cmd_list_presets();
    return 2;
}
