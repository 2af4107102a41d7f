#pragma once

#include <string>
#include <vector>

#include "elbowsim/analysis.hpp"
#include "elbowsim/csv.hpp"

namespace elbowsim {

/// Batch stretch-experiment specification: a (gain x lambda) grid of one
/// model class, each cell stretched at every listed velocity.
struct ProtocolSpec {
    ModelClass model = ModelClass::hybrid;
    std::vector<double> gains{1.0, 2.0};
    std::vector<double> lambdas{0.1, 0.2, 0.3, 0.4};
    std::vector<double> velocities_dps{10, 20, 30, 40, 50, 60, 70, 80, 90};
    std::string output_dir = "out";
    int threads = 0; // 0 = hardware concurrency

    void validate() const; // throws std::invalid_argument on empty/invalid grids
};

struct ProtocolResult {
    std::vector<SummaryRow> summary;        // sorted by (params, velocity)
    std::vector<std::string> trial_files;   // same order as summary
    std::string baseline_file;
    std::string summary_file;
};

/// Runs the gains-zero baseline at 10 deg/s, then every grid cell at every
/// velocity; writes one trial CSV per run plus summary.csv. Trials run on a
/// worker pool; outputs are deterministic for a given spec.
ProtocolResult run_protocol(const ProtocolSpec& spec, const SimConfig& base_config);

/// Deterministic trial file name for a grid cell and velocity.
std::string trial_file_name(ModelClass model, double gain, double lambda, double velocity_dps);

} // namespace elbowsim
