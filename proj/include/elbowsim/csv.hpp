#pragma once

#include <string>
#include <vector>

#include "elbowsim/analysis.hpp"
#include "elbowsim/engine.hpp"

namespace elbowsim {

/// Fixed trial CSV header for the stock three-flexor setup.
std::string trial_csv_header(const TrialRecord& record);

/// Serializes a trial record; column order: t, theta, theta_dot, robot
/// torque, then l/v/f/E/a per muscle. Deterministic formatting.
void write_trial_csv(const TrialRecord& record, const std::string& path);
std::string trial_csv_string(const TrialRecord& record);

/// Minimal view of a trial CSV read back for plotting.
struct TrialCsvData {
    std::vector<std::string> muscle_names;
    std::vector<double> t, theta, theta_dot, torque_robot;
    std::vector<std::vector<double>> E; // per muscle
    std::vector<std::vector<double>> a;
};
TrialCsvData read_trial_csv(const std::string& path);

struct SummaryRow {
    std::string model;
    double G_l = 0, G_v = 0, G_f = 0;
    double lambda_l = 0, lambda_v = 0, lambda_f = 0;
    double velocity_dps = 0;
    std::optional<double> catch_angle_deg;
    double peak_torque_Nm = 0;
    std::optional<double> reflex_stiffness; // [N m/deg]
    bool saturated = false;
    bool diverged = false;
};

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path);

/// Reference curve file: one-line header then theta_deg,torque_Nm rows.
SampledCurve read_reference_csv(const std::string& path);
void write_reference_csv(const SampledCurve& curve, const std::string& path);

/// Compact deterministic number formatting shared by all writers.
std::string format_number(double v);

} // namespace elbowsim
