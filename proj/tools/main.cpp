#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "elbowsim/analysis.hpp"
#include "elbowsim/config.hpp"
#include "elbowsim/csv.hpp"
#include "elbowsim/protocol.hpp"
#include "elbowsim/svg.hpp"

namespace {

using namespace elbowsim;

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

std::string file_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

// [t0, t1] of the ramp, inferred from where the joint actually moves
std::pair<double, double> infer_ramp(const TrialCsvData& d) {
    double peak = 0.0;
    for (double td : d.theta_dot) {
        peak = std::max(peak, std::abs(td));
    }
    if (peak <= 0.0) {
        throw std::runtime_error("trial has no motion; cannot locate the ramp");
    }
    double t0 = d.t.front(), t1 = d.t.back();
    bool found = false;
    for (std::size_t i = 0; i < d.t.size(); ++i) {
        if (std::abs(d.theta_dot[i]) > 0.1 * peak) {
            if (!found) {
                t0 = d.t[i];
                found = true;
            }
            t1 = d.t[i];
        }
    }
    return {t0, t1};
}

SampledCurve torque_angle_curve(const TrialCsvData& d, double t_lo, double t_hi) {
    std::vector<std::pair<double, double>> samples;
    for (std::size_t i = 0; i < d.t.size(); ++i) {
        if (d.t[i] >= t_lo && d.t[i] <= t_hi) {
            samples.emplace_back(d.theta[i] * kRadToDeg, d.torque_robot[i]);
        }
    }
    const double anchor = samples.empty() ? 0.0 : samples.front().first;
    return bin_samples(samples, anchor);
}

int cmd_run(const AppConfig& app_cfg, const std::string& model_s, double gain, double lambda,
            double velocity_dps, const std::string& out_path) {
    SimConfig cfg = app_cfg.sim;
    if (!model_s.empty()) {
        const ReflexParams base = cfg.units.empty() ? ReflexParams{} : cfg.units.front().reflex;
        const ReflexParams reflex =
            make_reflex(model_class_from_string(model_s), gain, lambda, base);
        for (auto& u : cfg.units) {
            u.reflex = reflex;
        }
    }
    if (velocity_dps > 0.0) {
        cfg.profile.omega = velocity_dps * std::numbers::pi / 180.0;
    }
    const TrialRecord rec = run_trial(cfg);
    write_trial_csv(rec, out_path);
    std::cout << "wrote " << out_path << " (" << rec.rows.size() << " rows"
              << (rec.saturated ? ", saturated" : "")
              << (rec.diverged ? ", DIVERGED" : "") << ")\n";
    return rec.diverged ? 2 : 0;
}

int cmd_protocol(const AppConfig& app_cfg, ProtocolSpec spec) {
    const ProtocolResult result = run_protocol(spec, app_cfg.sim);
    std::size_t diverged = 0;
    for (const auto& row : result.summary) {
        diverged += row.diverged ? 1 : 0;
    }
    std::cout << "baseline: " << result.baseline_file << "\n"
              << "trials:   " << result.summary.size() << " (" << diverged << " diverged)\n"
              << "summary:  " << result.summary_file << "\n";
    return 0;
}

int cmd_fit(const AppConfig& app_cfg, const std::string& model_s,
            const std::vector<std::string>& target_args, const std::string& out_path) {
    std::map<double, SampledCurve> targets;
    for (const auto& arg : target_args) {
        const auto eq = arg.find('=');
        if (eq == std::string::npos) {
            throw CLI::ValidationError("--target", "expected VELOCITY_DPS=CSV_PATH");
        }
        const double vel = std::stod(arg.substr(0, eq));
        targets[vel] = read_reference_csv(arg.substr(eq + 1));
    }
    const FitResult result = fit_parameters(targets, model_class_from_string(model_s),
                                            app_cfg.sim, app_cfg.fit_bounds,
                                            app_cfg.fit_options);
    std::cout << "model       = " << to_string(result.model) << "\n"
              << "gain        = " << format_number(result.gain) << "\n"
              << "lambda      = " << format_number(result.lambda) << "\n"
              << "rmse_Nm     = " << format_number(result.rmse) << "\n"
              << "simulations = " << result.simulations << "\n";
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) {
            throw std::runtime_error("cannot open '" + out_path + "' for writing");
        }
        out << "model = " << to_string(result.model) << "\n"
            << "gain = " << format_number(result.gain) << "\n"
            << "lambda = " << format_number(result.lambda) << "\n"
            << "rmse_Nm = " << format_number(result.rmse) << "\n"
            << "simulations = " << result.simulations << "\n";
    }
    return 0;
}

int cmd_plot(const std::string& kind, const std::vector<std::string>& trial_paths,
             const std::string& baseline_path, const std::string& muscle,
             const std::string& out_path) {
    if (trial_paths.empty()) {
        throw CLI::ValidationError("plot", "no trial CSV files given");
    }
    std::vector<PlotSeries> series;
    PlotSpec spec;

    if (kind == "torque-time") {
        spec = {"Driving torque", "time [s]", "torque [N m]"};
        for (const auto& path : trial_paths) {
            const TrialCsvData d = read_trial_csv(path);
            series.push_back({file_stem(path), d.t, d.torque_robot});
        }
    } else if (kind == "excitation-time") {
        spec = {"Reflex excitation (" + muscle + ")", "time [s]", "excitation"};
        for (const auto& path : trial_paths) {
            const TrialCsvData d = read_trial_csv(path);
            std::size_t mi = d.muscle_names.size();
            for (std::size_t i = 0; i < d.muscle_names.size(); ++i) {
                if (d.muscle_names[i] == muscle) {
                    mi = i;
                }
            }
            if (mi == d.muscle_names.size()) {
                throw std::runtime_error("muscle '" + muscle + "' not present in " + path);
            }
            series.push_back({file_stem(path), d.t, d.E[mi]});
        }
    } else if (kind == "reflex-angle") {
        if (baseline_path.empty()) {
            throw CLI::ValidationError("plot", "--baseline is required for reflex-angle plots");
        }
        const TrialCsvData base = read_trial_csv(baseline_path);
        const auto [b0, b1] = infer_ramp(base);
        const SampledCurve passive = torque_angle_curve(base, b0, b1);
        spec = {"Reflex torque vs joint angle", "elbow angle [deg]", "reflex torque [N m]"};
        for (const auto& path : trial_paths) {
            const TrialCsvData d = read_trial_csv(path);
            const auto [t0, t1] = infer_ramp(d);
            const double span = t1 - t0;
            const SampledCurve total =
                torque_angle_curve(d, t0 + 0.1 * span, t1 - 0.1 * span);
            PlotSeries s{file_stem(path), {}, {}};
            for (std::size_t i = 0; i < total.theta_deg.size(); ++i) {
                const double th = total.theta_deg[i];
                if (th < passive.front_theta() || th > passive.back_theta()) {
                    continue;
                }
                s.x.push_back(th);
                s.y.push_back(total.torque[i] - passive.value_at(th));
            }
            series.push_back(std::move(s));
        }
    } else {
        throw CLI::ValidationError(
            "--kind", "unknown plot kind (expected reflex-angle|torque-time|excitation-time)");
    }
    write_line_chart(spec, series, out_path);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"elbowsim: forward simulation of robot-assisted constant-velocity "
                 "elbow stretches with stretch-reflex muscle models"};
    app.require_subcommand(0, 1);

    std::string config_path;
    int threads = 0;
    bool emit_default = false;
    app.add_option("-c,--config", config_path, "configuration file (key = value sections)");
    app.add_option("--threads", threads, "worker threads for batch runs (0 = all cores)");
    app.add_flag("--emit-default-config", emit_default,
                 "print the canonical configuration file and exit");

    auto* run = app.add_subcommand("run", "run one stretch trial and write its CSV");
    std::string run_model;
    double run_gain = 2.0, run_lambda = 0.1, run_velocity = 0.0;
    std::string run_out = "trial.csv";
    run->add_option("--model", run_model, "reflex model: length|velocity|force|hybrid");
    run->add_option("--gain", run_gain, "reflex gain G")->capture_default_str();
    run->add_option("--lambda", run_lambda, "threshold factor")->capture_default_str();
    run->add_option("--velocity", run_velocity, "stretch velocity [deg/s]");
    run->add_option("-o,--out", run_out, "output CSV path")->capture_default_str();

    auto* protocol = app.add_subcommand("protocol",
                                        "run a (gain x lambda x velocity) grid of trials");
    std::string proto_model;
    std::vector<double> proto_gains, proto_lambdas, proto_velocities;
    std::string proto_outdir;
    protocol->add_option("--model", proto_model, "reflex model class");
    protocol->add_option("--gains", proto_gains, "gain grid")->delimiter(',');
    protocol->add_option("--lambdas", proto_lambdas, "threshold factor grid")->delimiter(',');
    protocol->add_option("--velocities", proto_velocities, "stretch velocities [deg/s]")
        ->delimiter(',');
    protocol->add_option("-o,--output-dir", proto_outdir, "output directory");

    auto* fit = app.add_subcommand("fit", "fit model parameters to reference torque curves");
    std::string fit_model = "hybrid";
    std::vector<std::string> fit_targets;
    std::string fit_out;
    double fit_gain_min = -1, fit_gain_max = -1, fit_lambda_min = -1, fit_lambda_max = -1;
    int fit_budget = 0;
    fit->add_option("--model", fit_model, "reflex model class")->capture_default_str();
    fit->add_option("--target", fit_targets,
                    "reference curve as VELOCITY_DPS=CSV_PATH (repeatable)")
        ->required();
    fit->add_option("--gain-min", fit_gain_min, "lower gain bound");
    fit->add_option("--gain-max", fit_gain_max, "upper gain bound");
    fit->add_option("--lambda-min", fit_lambda_min, "lower threshold-factor bound");
    fit->add_option("--lambda-max", fit_lambda_max, "upper threshold-factor bound");
    fit->add_option("--budget", fit_budget, "maximum engine runs");
    fit->add_option("-o,--out", fit_out, "write the fit result to this file");

    auto* plot = app.add_subcommand("plot", "render SVG charts from trial CSVs");
    std::string plot_kind = "reflex-angle";
    std::vector<std::string> plot_trials;
    std::string plot_baseline, plot_muscle = "lhb", plot_out = "plot.svg";
    plot->add_option("--kind", plot_kind,
                     "reflex-angle|torque-time|excitation-time")->capture_default_str();
    plot->add_option("--baseline", plot_baseline, "baseline trial CSV (reflex-angle)");
    plot->add_option("--muscle", plot_muscle, "muscle name (excitation-time)")
        ->capture_default_str();
    plot->add_option("-o,--out", plot_out, "output SVG path")->capture_default_str();
    plot->add_option("trials", plot_trials, "trial CSV files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // spec exit codes: 1 for usage errors
    }

    try {
        if (emit_default) {
            std::cout << default_config_text();
            return 0;
        }
        AppConfig cfg;
        if (!config_path.empty()) {
            cfg = load_config_file(config_path);
        }
        if (threads > 0) {
            cfg.protocol.threads = threads;
            cfg.fit_options.threads = threads;
        }

        if (run->parsed()) {
            return cmd_run(cfg, run_model, run_gain, run_lambda, run_velocity, run_out);
        }
        if (protocol->parsed()) {
            ProtocolSpec spec = cfg.protocol;
            if (!proto_model.empty()) {
                spec.model = model_class_from_string(proto_model);
            }
            if (!proto_gains.empty()) spec.gains = proto_gains;
            if (!proto_lambdas.empty()) spec.lambdas = proto_lambdas;
            if (!proto_velocities.empty()) spec.velocities_dps = proto_velocities;
            if (!proto_outdir.empty()) spec.output_dir = proto_outdir;
            if (threads > 0) spec.threads = threads;
            return cmd_protocol(cfg, spec);
        }
        if (fit->parsed()) {
            if (fit_gain_min >= 0) cfg.fit_bounds.gain_min = fit_gain_min;
            if (fit_gain_max >= 0) cfg.fit_bounds.gain_max = fit_gain_max;
            if (fit_lambda_min >= 0) cfg.fit_bounds.lambda_min = fit_lambda_min;
            if (fit_lambda_max >= 0) cfg.fit_bounds.lambda_max = fit_lambda_max;
            if (fit_budget > 0) cfg.fit_options.max_simulations = fit_budget;
            return cmd_fit(cfg, fit_model, fit_targets, fit_out);
        }
        if (plot->parsed()) {
            return cmd_plot(plot_kind, plot_trials, plot_baseline, plot_muscle, plot_out);
        }
        std::cerr << app.help();
        return 1;
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
