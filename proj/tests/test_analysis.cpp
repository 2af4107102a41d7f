#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

#include "elbowsim/analysis.hpp"
#include "elbowsim/presets.hpp"

using namespace elbowsim;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

// hand-built record with theta moving linearly over the ramp and a
// prescribed torque-vs-angle law
TrialRecord synthetic_record(const std::function<double(double)>& torque_of_theta) {
    TrialRecord rec;
    rec.config = presets::baseline_config();
    const auto& prof = rec.config.profile;
    const double dt = rec.config.dt;
    const long n = std::llround(prof.total_duration() / dt);
    for (long k = 0; k <= n; ++k) {
        TrialRow row;
        row.t = static_cast<double>(k) * dt;
        const auto ref = reference(row.t, prof);
        row.theta = ref.theta;
        row.theta_dot = ref.omega;
        row.torque_robot = torque_of_theta(ref.theta);
        row.m.resize(rec.config.units.size());
        rec.rows.push_back(std::move(row));
    }
    return rec;
}

} // namespace

TEST_CASE("SampledCurve::value_at interpolates and refuses extrapolation") {
    SampledCurve c;
    c.theta_deg = {100.0, 101.0, 102.0};
    c.torque = {1.0, 3.0, 5.0};
    CHECK(c.value_at(100.0) == doctest::Approx(1.0));
    CHECK(c.value_at(100.5) == doctest::Approx(2.0));
    CHECK(c.value_at(102.0) == doctest::Approx(5.0));
    CHECK_THROWS_AS(c.value_at(99.0), std::domain_error);
    CHECK_THROWS_AS(c.value_at(103.0), std::domain_error);
}

TEST_CASE("estimate_passive_curve: linear torque law is reproduced exactly at the nodes") {
    const TrialRecord rec = synthetic_record([](double th) { return 2.0 * th; });
    const PassiveCurve curve = estimate_passive_curve(rec);
    REQUIRE(curve.theta_deg.size() == 91); // 90..180 deg at 1 deg spacing
    CHECK(curve.front_theta() == doctest::Approx(90.0));
    CHECK(curve.back_theta() == doctest::Approx(180.0));
    for (std::size_t i = 0; i < curve.theta_deg.size(); ++i) {
        const double theta_rad = curve.theta_deg[i] * kDeg;
        CHECK(curve.torque[i] == doctest::Approx(2.0 * theta_rad).epsilon(1e-9));
    }
}

TEST_CASE("estimate_passive_curve: rejects baselines with active reflex gains") {
    TrialRecord rec = synthetic_record([](double) { return 1.0; });
    rec.config.units[0].reflex.G_l = 1.0;
    CHECK_THROWS_AS(estimate_passive_curve(rec), std::invalid_argument);
}

TEST_CASE("estimate_passive_curve: engine baseline matches the static passive oracle") {
    const SimConfig cfg = presets::baseline_config();
    const TrialRecord rec = run_trial(cfg);
    const PassiveCurve curve = estimate_passive_curve(rec);

    double oracle = -passive_joint_torque(kPi, 0.0, cfg.joint);
    for (const auto& u : cfg.units) {
        const double l = muscle_length(kPi, u.path, u.muscle);
        oracle += moment_arm(kPi, u.path) * muscle_force(0.0, l, 0.0, u.muscle);
    }
    CHECK(std::abs(curve.value_at(180.0) - oracle) < 0.3);
    // resistance grows toward full extension
    CHECK(curve.value_at(180.0) > curve.value_at(120.0));
    CHECK(curve.value_at(120.0) > curve.value_at(95.0));
}

TEST_CASE("reflex_torque_curve: baseline against its own passive curve is near zero") {
    const TrialRecord rec = run_trial(presets::baseline_config());
    const PassiveCurve passive = estimate_passive_curve(rec);
    const ReflexTorqueCurve rc = reflex_torque_curve(rec, passive);
    REQUIRE(!rc.curve.empty());
    for (double v : rc.curve.torque) {
        CHECK(std::abs(v) < 0.2);
    }
    CHECK(rc.model_label == "none");
    CHECK(rc.omega_dps == doctest::Approx(10.0));
}

TEST_CASE("reflex_torque_curve: estimate matches the engine ground truth") {
    const TrialRecord baseline = run_trial(presets::baseline_config());
    const PassiveCurve passive = estimate_passive_curve(baseline);

    const SimConfig cfg = presets::config_for(ModelClass::hybrid, 2.0, 0.1, 90.0);
    const TrialRecord rec = run_trial(cfg);
    const ReflexTorqueCurve est = reflex_torque_curve(rec, passive);
    const SampledCurve gt = reflex_torque_ground_truth(rec);
    REQUIRE(!est.curve.empty());
    REQUIRE(est.curve.theta_deg.size() == gt.theta_deg.size());
    for (std::size_t i = 0; i < gt.theta_deg.size(); ++i) {
        const double tol = std::max(0.3, 0.1 * std::abs(gt.torque[i]));
        CHECK(std::abs(est.curve.torque[i] - gt.torque[i]) <= tol);
    }
    CHECK(est.model_label == "hybrid");
}

TEST_CASE("compute_metrics: zero curve has no catch angle and zero peak") {
    ReflexTorqueCurve rc;
    for (int th = 100; th <= 170; ++th) {
        rc.curve.theta_deg.push_back(th);
        rc.curve.torque.push_back(0.0);
    }
    const SpasticityMetrics m = compute_metrics(rc);
    CHECK(!m.catch_angle_deg.has_value());
    CHECK(m.peak_torque == 0.0);
    CHECK(!m.reflex_stiffness.has_value());
}

TEST_CASE("compute_metrics: synthetic ramp 0.1*(theta-120)+") {
    ReflexTorqueCurve rc;
    for (int th = 90; th <= 180; ++th) {
        rc.curve.theta_deg.push_back(th);
        rc.curve.torque.push_back(0.1 * std::max(0.0, th - 120.0));
    }
    const SpasticityMetrics m = compute_metrics(rc);
    REQUIRE(m.catch_angle_deg.has_value());
    // threshold max(0.5, 0.05*6) = 0.5 crossed at 125 deg
    CHECK(*m.catch_angle_deg == doctest::Approx(125.0));
    CHECK(m.peak_torque == doctest::Approx(6.0));
    REQUIRE(m.reflex_stiffness.has_value());
    CHECK(*m.reflex_stiffness == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("curve_rmse: identity, constant offset, disjoint supports") {
    SampledCurve a;
    for (int th = 100; th <= 140; ++th) {
        a.theta_deg.push_back(th);
        a.torque.push_back(0.05 * th);
    }
    CHECK(curve_rmse(a, a) == doctest::Approx(0.0));

    SampledCurve b = a;
    for (double& v : b.torque) {
        v += 1.0;
    }
    CHECK(curve_rmse(a, b) == doctest::Approx(1.0).epsilon(1e-12));
    // symmetry on the shared support
    CHECK(curve_rmse(a, b) == doctest::Approx(curve_rmse(b, a)).epsilon(1e-12));

    SampledCurve c;
    c.theta_deg = {150.0, 160.0};
    c.torque = {0.0, 0.0};
    CHECK_THROWS_AS(curve_rmse(a, c), std::invalid_argument);
}

TEST_CASE("peak reflex torque is monotone non-decreasing in the gain for every model class") {
    const TrialRecord baseline = run_trial(presets::baseline_config());
    const PassiveCurve passive = estimate_passive_curve(baseline);
    for (const ModelClass model : {ModelClass::length, ModelClass::velocity, ModelClass::force,
                                   ModelClass::hybrid}) {
        double prev_peak = -1.0;
        for (double gain : {1.0, 2.0, 3.0}) {
            const SimConfig cfg = presets::config_for(model, gain, 0.1, 90.0);
            const ReflexTorqueCurve rc = reflex_torque_curve(run_trial(cfg), passive);
            const SpasticityMetrics m = compute_metrics(rc);
            INFO("model=", to_string(model), " gain=", gain, " peak=", m.peak_torque);
            CHECK(m.peak_torque >= prev_peak);
            prev_peak = m.peak_torque;
        }
    }
}

TEST_CASE("catch angle is monotone non-decreasing in lambda for the hybrid model") {
    const TrialRecord baseline = run_trial(presets::baseline_config());
    const PassiveCurve passive = estimate_passive_curve(baseline);
    std::optional<double> prev_catch;
    for (double lambda : {0.1, 0.2, 0.3, 0.4}) {
        const SimConfig cfg = presets::config_for(ModelClass::hybrid, 2.0, lambda, 90.0);
        const ReflexTorqueCurve rc = reflex_torque_curve(run_trial(cfg), passive);
        const SpasticityMetrics m = compute_metrics(rc);
        REQUIRE(m.catch_angle_deg.has_value());
        if (prev_catch) {
            CHECK(*m.catch_angle_deg >= *prev_catch);
        }
        prev_catch = m.catch_angle_deg;
    }
}

TEST_CASE("fit: degenerate lambda dimension returns the gain-grid argmin exactly") {
    SimConfig base = presets::default_config();
    // target generated at G = 2 velocity model
    SimConfig gen = presets::config_for(ModelClass::velocity, 2.0, 0.1, 90.0);
    const TrialRecord baseline = run_trial(presets::baseline_config());
    const PassiveCurve passive = estimate_passive_curve(baseline);
    const ReflexTorqueCurve target = reflex_torque_curve(run_trial(gen), passive);

    std::map<double, SampledCurve> targets;
    targets[90.0] = target.curve;
    FitBounds bounds;
    bounds.gain_min = 1.0;
    bounds.gain_max = 3.0;
    bounds.lambda_min = 0.1;
    bounds.lambda_max = 0.1;
    FitOptions opts;
    opts.grid_points = 3;       // gains {1, 2, 3}
    opts.max_simulations = 4;   // baseline + the three grid cells, no descent
    opts.threads = 1;
    const FitResult r = fit_parameters(targets, ModelClass::velocity, base, bounds, opts);
    CHECK(r.gain == doctest::Approx(2.0));
    CHECK(r.lambda == doctest::Approx(0.1));
    CHECK(r.rmse < 1e-9); // determinism: the generating cell reproduces the target
    CHECK(r.simulations <= 4);
}

TEST_CASE("fit: fitting the wrong model class gives a strictly worse objective") {
    SimConfig base = presets::default_config();
    const TrialRecord baseline = run_trial(presets::baseline_config());
    const PassiveCurve passive = estimate_passive_curve(baseline);
    const SimConfig gen = presets::config_for(ModelClass::velocity, 2.0, 0.1, 90.0);
    const ReflexTorqueCurve target = reflex_torque_curve(run_trial(gen), passive);
    std::map<double, SampledCurve> targets;
    targets[90.0] = target.curve;

    FitBounds bounds;
    bounds.gain_min = 1.0;
    bounds.gain_max = 3.0;
    bounds.lambda_min = 0.0;
    bounds.lambda_max = 0.4;
    FitOptions opts;
    opts.grid_points = 3;
    opts.max_simulations = 40;
    opts.threads = 1;
    const FitResult right = fit_parameters(targets, ModelClass::velocity, base, bounds, opts);
    const FitResult wrong = fit_parameters(targets, ModelClass::length, base, bounds, opts);
    CHECK(right.rmse < wrong.rmse);
}

TEST_CASE("fit: validation errors") {
    const SimConfig base = presets::default_config();
    std::map<double, SampledCurve> empty;
    CHECK_THROWS_AS(fit_parameters(empty, ModelClass::hybrid, base), std::invalid_argument);

    SampledCurve c;
    c.theta_deg = {100.0, 110.0};
    c.torque = {1.0, 2.0};
    std::map<double, SampledCurve> targets;
    targets[90.0] = c;
    FitBounds zero_gain;
    zero_gain.gain_min = 0.0;
    zero_gain.gain_max = 0.0;
    CHECK_THROWS_AS(fit_parameters(targets, ModelClass::hybrid, base, zero_gain),
                    std::invalid_argument);
}

TEST_CASE("fit: a configuration whose passive baseline diverges is rejected") {
    SimConfig base = presets::default_config();
    base.joint.inertia = 1e-6; // the plant explodes under the PID
    SampledCurve c;
    for (int th = 100; th <= 160; ++th) {
        c.theta_deg.push_back(th);
        c.torque.push_back(1.0);
    }
    std::map<double, SampledCurve> targets;
    targets[90.0] = c;
    FitOptions opts;
    opts.grid_points = 2;
    opts.max_simulations = 6;
    opts.threads = 1;
    CHECK_THROWS_AS(fit_parameters(targets, ModelClass::hybrid, base, {}, opts),
                    std::invalid_argument);
}
