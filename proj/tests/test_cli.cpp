// End-to-end checks of the sim binary: exit codes, artifacts, manifest
// digests, config precedence, determinism.

#include <xydimer/csvio.hpp>

#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() /
               (std::string("sim_cli_") + info->name() + "_" + std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }

    void TearDown() override { fs::remove_all(dir_); }

    fs::path path(const std::string& name) const { return dir_ / name; }

    void write_text(const std::string& name, const std::string& content) const {
        std::ofstream out(path(name), std::ios::binary);
        out << content;
    }

    CliResult run_cli(const std::string& args) const {
        const fs::path out_file = path("stdout.txt");
        const fs::path err_file = path("stderr.txt");
        const std::string cmd = std::string(SIM_BINARY_PATH) + " " + args + " > " +
                                out_file.string() + " 2> " + err_file.string();
        const int status = std::system(cmd.c_str());
        CliResult r;
        r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = xydimer::read_file(out_file);
        r.err = xydimer::read_file(err_file);
        return r;
    }

    fs::path dir_;
};

json load_manifest(const fs::path& out_dir) {
    return json::parse(xydimer::read_file(out_dir / "manifest.json"));
}

size_t count_lines(const std::string& text) {
    size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

} // namespace

TEST_F(CliTest, ListPresetsNamesAllFive) {
    const CliResult r = run_cli("list-presets");
    EXPECT_EQ(r.exit_code, 0);
    for (const char* name : {"fig2_populations", "fig4_drive_minus", "fig5_drive_plus",
                             "fig6_spectrum_sweep", "reduction_chain"})
        EXPECT_NE(r.out.find(name), std::string::npos) << name;
}

TEST_F(CliTest, RunPresetWritesArtifactsAndManifest) {
    const fs::path out = path("out");
    const CliResult r = run_cli("run --preset fig2_populations --fixed-step --out " +
                                out.string());
    ASSERT_EQ(r.exit_code, 0) << r.err;

    for (const char* name :
         {"populations_me1.csv", "populations_me2.csv", "populations_me4.csv", "manifest.json"})
        EXPECT_TRUE(fs::exists(out / name)) << name;

    const json manifest = load_manifest(out);
    EXPECT_EQ(manifest["tool"]["name"], "sim");
    EXPECT_EQ(manifest["command"], "run");
    EXPECT_EQ(manifest["scenario"]["scenario.name"], "fig2_populations");
    EXPECT_DOUBLE_EQ(
        xydimer::parse_double(manifest["scenario"]["system.j_over_omega0"].get<std::string>()),
        0.6);

    const auto& outputs = manifest["outputs"];
    ASSERT_EQ(outputs.size(), 3u);
    for (const json& entry : outputs) {
        const std::string file = entry["file"].get<std::string>();
        const std::string content = xydimer::read_file(out / file);
        EXPECT_EQ(entry["sha256"].get<std::string>(), xydimer::sha256_hex(content)) << file;
        EXPECT_EQ(entry["bytes"].get<size_t>(), content.size()) << file;
        // Header plus one row per grid sample.
        EXPECT_EQ(count_lines(content), 1001u) << file;
    }
    ASSERT_EQ(manifest["diagnostics"]["populations"].size(), 3u);
}

TEST_F(CliTest, ConfigOverridesThePreset) {
    write_text("custom.cfg",
               "scenario.preset = fig2_populations\n"
               "# tighter grid for the test\n"
               "system.j_over_omega0 = 0.3\n"
               "grid.population_samples = 101\n"
               "run.models = me2\n");
    const fs::path out = path("out");
    const CliResult r =
        run_cli("run --config " + path("custom.cfg").string() + " --out " + out.string());
    ASSERT_EQ(r.exit_code, 0) << r.err;

    const json manifest = load_manifest(out);
    EXPECT_DOUBLE_EQ(
        xydimer::parse_double(manifest["scenario"]["system.j_over_omega0"].get<std::string>()),
        0.3);
    EXPECT_EQ(manifest["scenario"]["run.models"], "me2");
    const std::string csv = xydimer::read_file(out / "populations_me2.csv");
    EXPECT_EQ(count_lines(csv), 102u);
    EXPECT_FALSE(fs::exists(out / "populations_me1.csv"));
}

TEST_F(CliTest, FlagsBeatTheConfig) {
    write_text("custom.cfg",
               "scenario.preset = fig2_populations\n"
               "system.lamb_shifts = full\n"
               "grid.population_samples = 21\n"
               "run.models = me2\n");
    const fs::path out = path("out");
    const CliResult r = run_cli("run --config " + path("custom.cfg").string() +
                                " --lamb-shifts zeroed --out " + out.string());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(load_manifest(out)["scenario"]["system.lamb_shifts"], "zeroed");
}

TEST_F(CliTest, BadConfigFailsWithExitTwo) {
    write_text("bad.cfg",
               "scenario.preset = fig2_populations\n"
               "system.coupling_strengthiness = 0.6\n");
    const fs::path out = path("out");
    const CliResult r =
        run_cli("run --config " + path("bad.cfg").string() + " --out " + out.string());
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_FALSE(fs::exists(out / "manifest.json"));
    ASSERT_FALSE(r.err.empty());
    EXPECT_NE(r.err.find("error kind=config"), std::string::npos);
    EXPECT_NE(r.err.find("coupling_strengthiness"), std::string::npos);
    // Machine parseable: the error is a single line.
    EXPECT_EQ(count_lines(r.err), 1u);
}

TEST_F(CliTest, UnknownPresetFailsWithExitTwo) {
    const CliResult r = run_cli("run --preset fig9_hopeful --out " + path("out").string());
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("error kind=config"), std::string::npos);
    EXPECT_NE(r.err.find("fig2_populations"), std::string::npos);
}

TEST_F(CliTest, MissingScenarioFailsWithExitTwo) {
    const CliResult r = run_cli("run --out " + path("out").string());
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("error kind=config"), std::string::npos);
}

TEST_F(CliTest, NumericalFailureWritesDiagnosticsAndExitsThree) {
    // A fixed step far beyond the stability limit makes the state diverge.
    write_text("doomed.cfg",
               "scenario.preset = fig2_populations\n"
               "run.models = me2\n"
               "grid.gamma_t_max = 1000\n"
               "grid.population_samples = 2\n"
               "integrator.fixed_step = true\n"
               "integrator.fixed_dt = 10\n");
    const fs::path out = path("out");
    const CliResult r =
        run_cli("run --config " + path("doomed.cfg").string() + " --out " + out.string());
    EXPECT_EQ(r.exit_code, 3);
    EXPECT_NE(r.err.find("error kind=numerical"), std::string::npos);
    ASSERT_TRUE(fs::exists(out / "diagnostics.json"));
    const json diag = json::parse(xydimer::read_file(out / "diagnostics.json"));
    EXPECT_FALSE(diag["error"].get<std::string>().empty());
    EXPECT_EQ(diag["scenario"]["scenario.name"], "fig2_populations");
    EXPECT_FALSE(fs::exists(out / "manifest.json"));
}

TEST_F(CliTest, FixedStepRerunsAreByteIdentical) {
    write_text("small.cfg",
               "scenario.preset = fig4_drive_minus\n"
               "grid.population_samples = 41\n"
               "grid.gamma_t_max = 2\n"
               "integrator.fixed_dt = 0.5\n");
    const fs::path out_a = path("out_a");
    const fs::path out_b = path("out_b");
    const std::string base = "run --fixed-step --config " + path("small.cfg").string();
    ASSERT_EQ(run_cli(base + " --out " + out_a.string()).exit_code, 0);
    ASSERT_EQ(run_cli(base + " --jobs 2 --out " + out_b.string()).exit_code, 0);

    const std::string csv_a = xydimer::read_file(out_a / "populations_me4.csv");
    const std::string csv_b = xydimer::read_file(out_b / "populations_me4.csv");
    EXPECT_EQ(csv_a, csv_b);
    EXPECT_EQ(xydimer::sha256_hex(csv_a), xydimer::sha256_hex(csv_b));
}

TEST_F(CliTest, SpectrumRunNamesFilesByCoupling) {
    write_text("sweep.cfg",
               "scenario.preset = fig6_spectrum_sweep\n"
               "run.models = me4\n"
               "sweep.j_values = 0,0.1\n"
               "grid.spectrum_samples = 201\n");
    const fs::path out = path("out");
    const CliResult r =
        run_cli("run --config " + path("sweep.cfg").string() + " --out " + out.string());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_TRUE(fs::exists(out / "spectrum_me4_j0.csv"));
    EXPECT_TRUE(fs::exists(out / "spectrum_me4_j0.1.csv"));

    const json manifest = load_manifest(out);
    ASSERT_EQ(manifest["diagnostics"]["spectra"].size(), 2u);
    for (const json& entry : manifest["diagnostics"]["spectra"]) {
        EXPECT_LT(entry["imag_residue"].get<double>(), 1e-6);
        EXPECT_GT(entry["peaks"].size(), 0u);
    }
}

TEST_F(CliTest, ValidatePassesOnAHealthyBuild) {
    const CliResult r = run_cli("validate");
    EXPECT_EQ(r.exit_code, 0) << r.out;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
    size_t passes = 0;
    size_t pos = 0;
    while ((pos = r.out.find("PASS ", pos)) != std::string::npos) {
        ++passes;
        pos += 5;
    }
    EXPECT_GE(passes, 4u);
}

TEST_F(CliTest, QuietModeSuppressesTheProgressLog) {
    const fs::path out = path("out");
    write_text("tiny.cfg",
               "scenario.preset = fig2_populations\n"
               "run.models = me1\n"
               "grid.population_samples = 11\n");
    const std::string cmd = "SIM_LOG=quiet " + std::string(SIM_BINARY_PATH) +
                            " run --config " + path("tiny.cfg").string() + " --out " +
                            out.string() + " > " + path("q_out.txt").string() + " 2> " +
                            path("q_err.txt").string();
    const int status = std::system(cmd.c_str());
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 0);
    EXPECT_TRUE(xydimer::read_file(path("q_err.txt")).empty());
}
