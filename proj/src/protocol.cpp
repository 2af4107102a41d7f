#include "elbowsim/protocol.hpp"

#include <algorithm>
#include <filesystem>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "elbowsim/parallel.hpp"

namespace elbowsim {

namespace {

namespace fs = std::filesystem;

std::string compact(double v) {
    std::string s = format_number(v);
    for (char& c : s) {
        if (c == '.') c = 'p'; // keep file names dot-free apart from the extension
    }
    return s;
}

} // namespace

void ProtocolSpec::validate() const {
    if (velocities_dps.empty()) {
        throw std::invalid_argument("protocol: velocity list is empty");
    }
    for (double v : velocities_dps) {
        if (!(v > 0.0) || !(v <= 180.0)) {
            throw std::invalid_argument("protocol: velocities must lie in (0, 180] deg/s");
        }
    }
    if (gains.empty() || lambdas.empty()) {
        throw std::invalid_argument("protocol: gain and lambda grids must be non-empty");
    }
    for (double g : gains) {
        if (g < 0.0) {
            throw std::invalid_argument("protocol: gains must be non-negative");
        }
    }
    for (double l : lambdas) {
        if (l < 0.0 || l > 1.0) {
            throw std::invalid_argument("protocol: lambdas must lie in [0, 1]");
        }
    }
    if (output_dir.empty()) {
        throw std::invalid_argument("protocol: output directory not set");
    }
}

std::string trial_file_name(ModelClass model, double gain, double lambda, double velocity_dps) {
    return "trial_" + to_string(model) + "_G" + compact(gain) + "_L" + compact(lambda) + "_v" +
           compact(velocity_dps) + ".csv";
}

ProtocolResult run_protocol(const ProtocolSpec& spec, const SimConfig& base_config) {
    spec.validate();
    fs::create_directories(spec.output_dir);

    // reflex-free baseline at the lowest protocol velocity
    SimConfig baseline_cfg = base_config;
    baseline_cfg.profile.omega = 10.0 * std::numbers::pi / 180.0;
    for (auto& u : baseline_cfg.units) {
        u.reflex = ReflexParams{};
    }
    const TrialRecord baseline = run_trial(baseline_cfg);
    if (baseline.diverged) {
        throw std::invalid_argument("protocol: the passive baseline trial diverged; "
                                    "the configuration cannot be analyzed");
    }
    const PassiveCurve passive = estimate_passive_curve(baseline);

    ProtocolResult result;
    result.baseline_file = (fs::path(spec.output_dir) / "baseline_v10.csv").string();
    write_trial_csv(baseline, result.baseline_file);

    struct Job {
        double gain, lambda, velocity;
    };
    std::vector<Job> jobs;
    for (double g : spec.gains) {
        for (double l : spec.lambdas) {
            for (double v : spec.velocities_dps) {
                jobs.push_back({g, l, v});
            }
        }
    }

    std::vector<SummaryRow> rows(jobs.size());
    std::vector<std::string> files(jobs.size());
    parallel_for(jobs.size(), spec.threads, [&](std::size_t i) {
        const Job& job = jobs[i];
        SimConfig cfg = base_config;
        cfg.profile.omega = job.velocity * std::numbers::pi / 180.0;
        const ReflexParams reflex =
            make_reflex(spec.model, job.gain, job.lambda,
                        base_config.units.empty() ? ReflexParams{}
                                                  : base_config.units.front().reflex);
        for (auto& u : cfg.units) {
            u.reflex = reflex;
        }
        const TrialRecord rec = run_trial(cfg);
        const std::string file = trial_file_name(spec.model, job.gain, job.lambda, job.velocity);
        const std::string path = (fs::path(spec.output_dir) / file).string();
        write_trial_csv(rec, path);

        const auto metrics = compute_metrics(reflex_torque_curve(rec, passive));
        SummaryRow row;
        row.model = to_string(spec.model);
        row.G_l = reflex.G_l;
        row.G_v = reflex.G_v;
        row.G_f = reflex.G_f;
        row.lambda_l = reflex.lambda_l;
        row.lambda_v = reflex.lambda_v;
        row.lambda_f = reflex.lambda_f;
        row.velocity_dps = job.velocity;
        row.catch_angle_deg = metrics.catch_angle_deg;
        row.peak_torque_Nm = metrics.peak_torque;
        row.reflex_stiffness = metrics.reflex_stiffness;
        row.saturated = metrics.saturated;
        row.diverged = metrics.diverged;
        rows[i] = std::move(row);
        files[i] = path;
    });

    // deterministic summary order regardless of worker scheduling
    std::vector<std::size_t> order(jobs.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto key = [&](std::size_t i) {
            const auto& r = rows[i];
            return std::make_tuple(r.G_l, r.G_v, r.G_f, r.lambda_l, r.lambda_v, r.lambda_f,
                                   r.velocity_dps);
        };
        return key(a) < key(b);
    });
    for (std::size_t i : order) {
        result.summary.push_back(rows[i]);
        result.trial_files.push_back(files[i]);
    }

    result.summary_file = (fs::path(spec.output_dir) / "summary.csv").string();
    write_summary_csv(result.summary, result.summary_file);
    return result;
}

} // namespace elbowsim
