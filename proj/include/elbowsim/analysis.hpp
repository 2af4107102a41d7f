#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "elbowsim/engine.hpp"
#include "elbowsim/presets.hpp"

namespace elbowsim {

/// A torque-vs-angle curve sampled on an increasing angle grid in degrees.
struct SampledCurve {
    std::vector<double> theta_deg;
    std::vector<double> torque; // [N m], resistance-positive

    bool empty() const { return theta_deg.empty(); }
    double front_theta() const { return theta_deg.front(); }
    double back_theta() const { return theta_deg.back(); }

    /// Linear interpolation; throws std::domain_error outside the support
    /// (extrapolation refused).
    double value_at(double theta) const;
};

/// Passive (elastic) resistance versus angle, estimated from the reflex-free
/// slowest-stretch baseline trial.
using PassiveCurve = SampledCurve;

/// Default analysis grid spacing [deg].
inline constexpr double kGridSpacingDeg = 1.0;

/// Bins the baseline driving torque by angle over the ramp onto a uniform
/// grid covering [theta_init, theta_final]. The baseline must have all
/// reflex gains at 0; throws std::invalid_argument otherwise.
PassiveCurve estimate_passive_curve(const TrialRecord& baseline,
                                    double spacing_deg = kGridSpacingDeg);

/// Reflex resistance torque versus angle over the constant-velocity window
/// (middle 80% of the ramp): T_s = T_total - T_e, with the viscous part
/// neglected and the inertial part zero in the window.
struct ReflexTorqueCurve {
    SampledCurve curve;
    double omega_dps = 0.0;      // source stretch velocity [deg/s]
    std::string model_label;
    ReflexParams params;         // snapshot of the (shared) reflex parameters
    bool saturated = false;
    bool diverged = false;       // truncated at the divergence point when set
};

ReflexTorqueCurve reflex_torque_curve(const TrialRecord& trial, const PassiveCurve& passive,
                                      double spacing_deg = kGridSpacingDeg);

/// Ground-truth reflex torque curve from the engine's per-row
/// sum r_i*(F_i - F_i at zero activation), binned the same way as the
/// estimate. Test oracle for the decomposition pipeline.
SampledCurve reflex_torque_ground_truth(const TrialRecord& trial,
                                        double spacing_deg = kGridSpacingDeg);

struct SpasticityMetrics {
    std::optional<double> catch_angle_deg;      // absent when never above threshold
    double peak_torque = 0.0;                   // [N m]
    std::optional<double> reflex_stiffness;     // [N m/deg], catch..peak slope
    bool saturated = false;
    bool diverged = false;
};

/// Catch angle = first angle where T_s exceeds max(0.5 N m, 5% of peak) and
/// stays above for at least 5 deg; stiffness = least-squares slope from the
/// catch angle to the angle of peak torque.
SpasticityMetrics compute_metrics(const ReflexTorqueCurve& curve);

/// RMSE over the overlapping angle support (b interpolated onto a's grid).
/// Throws std::invalid_argument when the supports are disjoint.
double curve_rmse(const SampledCurve& a, const SampledCurve& b);

/// Bins scattered (theta_deg, value) samples onto a uniform grid aligned to
/// `anchor_deg`. Shared by the analysis pipeline and the CSV plotting path.
SampledCurve bin_samples(const std::vector<std::pair<double, double>>& samples,
                         double anchor_deg, double spacing_deg = kGridSpacingDeg);

struct FitBounds {
    double gain_min = 1.0;
    double gain_max = 3.0;
    double lambda_min = 0.0;
    double lambda_max = 0.4;
};

struct FitOptions {
    int grid_points = 5;      // coarse grid points per dimension
    int max_simulations = 200; // total engine runs allowed (incl. the baseline)
    double step_tol = 0.01;   // descent stops when both steps are below this
    int threads = 0;          // 0 = hardware concurrency (grid stage only)
};

struct FitResult {
    ModelClass model = ModelClass::hybrid;
    double gain = 0.0;
    double lambda = 0.0;
    ReflexParams params;
    double rmse = 0.0;        // achieved mean RMSE across target velocities
    int simulations = 0;      // engine runs spent
};

/// Fits (gain, lambda) of a model class to reference reflex-torque curves,
/// one per stretch velocity [deg/s]. Two-stage derivative-free search:
/// coarse grid then coordinate descent with shrinking steps. Deterministic;
/// ties break toward the lexicographically smallest (gain, lambda).
/// Divergent candidate trials receive a penalty objective instead of aborting.
FitResult fit_parameters(const std::map<double, SampledCurve>& targets_by_velocity,
                         ModelClass model, const SimConfig& base_config,
                         const FitBounds& bounds = {}, const FitOptions& options = {});

} // namespace elbowsim
