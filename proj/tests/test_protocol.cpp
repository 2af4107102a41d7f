#include <doctest.h>

#include <stdexcept>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "elbowsim/config.hpp"
#include "elbowsim/csv.hpp"
#include "elbowsim/protocol.hpp"
#include "elbowsim/svg.hpp"

using namespace elbowsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("trial CSV: exact header and read-back round trip") {
    SimConfig cfg = presets::config_for(ModelClass::length, 2.0, 0.1, 90.0);
    cfg.record_decimation = 50;
    const TrialRecord rec = run_trial(cfg);
    CHECK(trial_csv_header(rec) ==
          "t_s,theta_rad,theta_dot_rps,torque_robot_Nm,"
          "lhb_l_m,lhb_v_mps,lhb_f_N,lhb_E,lhb_a,"
          "shb_l_m,shb_v_mps,shb_f_N,shb_E,shb_a,"
          "brd_l_m,brd_v_mps,brd_f_N,brd_E,brd_a");

    TempDir dir("elbowsim_csv_test");
    const std::string path = (dir.path / "trial.csv").string();
    write_trial_csv(rec, path);
    const TrialCsvData data = read_trial_csv(path);
    REQUIRE(data.t.size() == rec.rows.size());
    REQUIRE(data.muscle_names.size() == 3);
    CHECK(data.muscle_names[0] == "lhb");
    CHECK(data.muscle_names[2] == "brd");
    for (std::size_t i = 0; i < data.t.size(); i += 7) {
        CHECK(data.theta[i] == doctest::Approx(rec.rows[i].theta).epsilon(1e-9));
        CHECK(data.E[0][i] == doctest::Approx(rec.rows[i].m[0].E).epsilon(1e-9));
    }
}

TEST_CASE("reference CSV: header skipped, rows sorted, duplicates rejected") {
    TempDir dir("elbowsim_ref_test");
    const std::string path = (dir.path / "ref.csv").string();
    {
        std::ofstream out(path);
        out << "theta_deg,torque_Nm\n120,2.5\n100,0.5\n140,4.5\n";
    }
    const SampledCurve c = read_reference_csv(path);
    REQUIRE(c.theta_deg.size() == 3);
    CHECK(c.theta_deg.front() == 100.0);
    CHECK(c.value_at(110.0) == doctest::Approx(1.5));

    {
        std::ofstream out(path);
        out << "theta_deg,torque_Nm\n120,2.5\n120,3.0\n";
    }
    CHECK_THROWS(read_reference_csv(path));

    {
        std::ofstream out(path);
        out << "theta_deg,torque_Nm\n120,abc\n";
    }
    CHECK_THROWS(read_reference_csv(path));
}

TEST_CASE("config: defaults round-trip through the canonical text") {
    const std::string text = default_config_text();
    const AppConfig parsed = parse_config_text(text);
    const AppConfig def;

    CHECK(parsed.sim.dt == def.sim.dt);
    CHECK(parsed.sim.profile.omega == doctest::Approx(def.sim.profile.omega).epsilon(1e-12));
    CHECK(parsed.sim.gains.kp == def.sim.gains.kp);
    CHECK(parsed.sim.joint.damping == def.sim.joint.damping);
    REQUIRE(parsed.sim.units.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(parsed.sim.units[i].muscle.name == def.sim.units[i].muscle.name);
        CHECK(parsed.sim.units[i].muscle.f_max == def.sim.units[i].muscle.f_max);
        CHECK(parsed.sim.units[i].path.a ==
              doctest::Approx(def.sim.units[i].path.a).epsilon(1e-12));
        CHECK(parsed.sim.units[i].reflex.G_l == 0.0);
    }
    CHECK(parsed.protocol.velocities_dps.size() == 9);
    CHECK(parsed.fit_options.max_simulations == 200);
}

TEST_CASE("config: overrides, per-muscle reflex, rejection of unknown keys") {
    const AppConfig cfg = parse_config_text(
        "[profile]\nomega_dps = 45\n"
        "[reflex]\nG_l = 2\nlambda_l = 0.1\n"
        "[reflex.brd]\nG_v = 1.5\nlambda_v = 0.2\n"
        "[muscle.lhb]\nf_max_N = 800\n");
    CHECK(cfg.sim.profile.omega == doctest::Approx(45.0 * std::numbers::pi / 180.0));
    CHECK(cfg.sim.units[0].muscle.f_max == 800.0);
    CHECK(cfg.sim.units[0].reflex.G_l == 2.0);  // shared section
    CHECK(cfg.sim.units[1].reflex.G_l == 2.0);
    CHECK(cfg.sim.units[2].reflex.G_v == 1.5);  // per-muscle override wins
    CHECK(cfg.sim.units[2].reflex.G_l == 0.0);

    CHECK_THROWS_AS(parse_config_text("[profile]\nomega = 45\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("[nosuch]\nx = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("[profile]\nomega_dps = abc\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("[muscle.xyz]\nl0_m = 1\n"), std::invalid_argument);
}

TEST_CASE("protocol: spec validation") {
    ProtocolSpec spec;
    spec.velocities_dps.clear();
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = ProtocolSpec{};
    spec.velocities_dps = {0.0};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = ProtocolSpec{};
    spec.gains.clear();
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    CHECK_NOTHROW(ProtocolSpec{}.validate());
}

TEST_CASE("protocol: small sweep produces per-trial CSVs and a deterministic summary") {
    TempDir dir("elbowsim_protocol_test");
    ProtocolSpec spec;
    spec.model = ModelClass::length;
    spec.gains = {2.0};
    spec.lambdas = {0.1};
    spec.velocities_dps = {30.0, 60.0};
    spec.output_dir = (dir.path / "a").string();
    spec.threads = 2;

    const SimConfig base = presets::default_config();
    const ProtocolResult r1 = run_protocol(spec, base);
    REQUIRE(r1.summary.size() == 2);
    CHECK(fs::exists(r1.baseline_file));
    CHECK(fs::exists(r1.summary_file));
    for (const auto& f : r1.trial_files) {
        CHECK(fs::exists(f));
    }
    CHECK(r1.summary[0].velocity_dps == 30.0);
    CHECK(r1.summary[1].velocity_dps == 60.0);
    CHECK(r1.summary[0].model == "length");
    CHECK(r1.summary[0].G_l == 2.0);
    CHECK(!r1.summary[0].diverged);

    // byte-identical outputs on a re-run
    spec.output_dir = (dir.path / "b").string();
    const ProtocolResult r2 = run_protocol(spec, base);
    CHECK(slurp(r1.summary_file) == slurp(r2.summary_file));
    REQUIRE(r1.trial_files.size() == r2.trial_files.size());
    for (std::size_t i = 0; i < r1.trial_files.size(); ++i) {
        CHECK(slurp(r1.trial_files[i]) == slurp(r2.trial_files[i]));
    }
    CHECK(slurp(r1.baseline_file) == slurp(r2.baseline_file));
}

TEST_CASE("protocol: a diverging baseline configuration is rejected, not analyzed") {
    TempDir dir("elbowsim_protocol_diverge");
    ProtocolSpec spec;
    spec.gains = {1.0};
    spec.lambdas = {0.1};
    spec.velocities_dps = {30.0};
    spec.output_dir = dir.path.string();
    SimConfig base = presets::default_config();
    base.joint.inertia = 1e-6;
    CHECK_THROWS_AS(run_protocol(spec, base), std::invalid_argument);
}

TEST_CASE("svg: polyline per series, legend labels, empty input rejected") {
    std::vector<PlotSeries> series;
    for (int s = 0; s < 9; ++s) {
        PlotSeries ps;
        ps.label = "v=" + std::to_string((s + 1) * 10);
        for (int i = 0; i <= 50; ++i) {
            ps.x.push_back(i);
            ps.y.push_back(0.1 * s * i);
        }
        series.push_back(std::move(ps));
    }
    const std::string svg = render_line_chart({"title", "x [u]", "y [u]"}, series);
    std::size_t polylines = 0, pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
        ++polylines;
        pos += 9;
    }
    CHECK(polylines == 9);
    for (const auto& s : series) {
        CHECK(svg.find(">" + s.label + "<") != std::string::npos);
    }
    CHECK(svg.find("x [u]") != std::string::npos);

    CHECK_THROWS_AS(render_line_chart({"t", "x", "y"}, {}), std::invalid_argument);
    CHECK_THROWS_AS(render_line_chart({"t", "x", "y"}, {PlotSeries{"e", {}, {}}}),
                    std::invalid_argument);
}

#ifdef ELBOWSIM_BIN
namespace {
int run_cli(const std::string& args) {
    const std::string cmd = std::string(ELBOWSIM_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}
} // namespace

TEST_CASE("cli: exit codes for success, usage errors and divergence") {
    TempDir dir("elbowsim_cli_test");
    const std::string trial = (dir.path / "t.csv").string();

    CHECK(run_cli("--emit-default-config") == 0);
    CHECK(run_cli("run --model length --gain 2 --lambda 0.1 --velocity 60 -o " + trial) == 0);
    CHECK(fs::exists(trial));

    // usage errors -> 1
    CHECK(run_cli("frobnicate") == 1);
    CHECK(run_cli("run --model nosuchmodel -o " + trial) == 1);
    CHECK(run_cli("plot --kind reflex-angle -o " + (dir.path / "p.svg").string()) == 1);

    // a diverging run -> 2
    const std::string cfgfile = (dir.path / "bad.ini").string();
    {
        std::ofstream out(cfgfile);
        out << "[joint]\ninertia = 0.000001\n";
    }
    CHECK(run_cli("--config " + cfgfile + " run --model length --gain 2 --lambda 0.1 -o " +
                  trial) == 2);

    // protocol happy path and grid validation
    const std::string outdir = (dir.path / "proto").string();
    CHECK(run_cli("protocol --model length --gains 2 --lambdas 0.1 --velocities 60 -o " +
                  outdir) == 0);
    CHECK(fs::exists(outdir + "/summary.csv"));
    CHECK(run_cli("protocol --velocities 0 -o " + outdir) == 1);

    // plot happy path over two runs
    const std::string t2 = (dir.path / "t2.csv").string();
    const std::string base = (dir.path / "base.csv").string();
    CHECK(run_cli("run --model hybrid --gain 2 --lambda 0.1 --velocity 90 -o " + t2) == 0);
    CHECK(run_cli("run --velocity 10 -o " + base) == 0);
    const std::string svg = (dir.path / "plot.svg").string();
    CHECK(run_cli("plot --kind reflex-angle --baseline " + base + " -o " + svg + " " + t2) == 0);
    CHECK(fs::exists(svg));
    CHECK(run_cli("plot --kind excitation-time --muscle lhb -o " + svg + " " + t2) == 0);
}
#endif
