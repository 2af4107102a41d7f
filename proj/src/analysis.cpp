#include "elbowsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "elbowsim/parallel.hpp"

namespace elbowsim {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kEps = 1e-9;

struct ThetaTorque {
    double theta_deg;
    double value;
};

// Local degree-1 least squares inside each bin, evaluated at the node.
// Exact for affine data regardless of how samples fall inside the bin.
std::optional<double> bin_value(const std::vector<ThetaTorque>& samples, double node,
                                double half_width) {
    double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& s : samples) {
        const double x = s.theta_deg - node;
        if (std::abs(x) > half_width + kEps) {
            continue;
        }
        sw += 1.0;
        sx += x;
        sy += s.value;
        sxx += x * x;
        sxy += x * s.value;
    }
    if (sw == 0.0) {
        return std::nullopt;
    }
    const double det = sw * sxx - sx * sx;
    if (det < 1e-12) {
        return sy / sw; // single sample or degenerate spread
    }
    // intercept of the local fit = value at the node
    return (sy * sxx - sx * sxy) / det;
}

std::vector<double> grid_nodes(double lo_deg, double hi_deg, double anchor_deg, double spacing) {
    std::vector<double> nodes;
    const long k_min = static_cast<long>(std::ceil((lo_deg - anchor_deg) / spacing - kEps));
    const long k_max = static_cast<long>(std::floor((hi_deg - anchor_deg) / spacing + kEps));
    for (long k = k_min; k <= k_max; ++k) {
        nodes.push_back(anchor_deg + static_cast<double>(k) * spacing);
    }
    return nodes;
}

SampledCurve bin_onto_grid(const std::vector<ThetaTorque>& samples,
                           const std::vector<double>& nodes, double spacing) {
    std::vector<double> theta, value;
    std::vector<bool> filled;
    theta.reserve(nodes.size());
    for (double node : nodes) {
        auto v = bin_value(samples, node, spacing / 2.0);
        theta.push_back(node);
        value.push_back(v.value_or(0.0));
        filled.push_back(v.has_value());
    }
    // drop unfilled edges, interpolate across interior gaps
    std::size_t first = 0, last = theta.size();
    while (first < last && !filled[first]) ++first;
    while (last > first && !filled[last - 1]) --last;
    SampledCurve out;
    for (std::size_t i = first; i < last; ++i) {
        if (!filled[i]) {
            std::size_t j = i + 1;
            while (!filled[j]) ++j; // bounded by `last`
            const std::size_t i0 = i - 1;
            const double t = (theta[i] - theta[i0]) / (theta[j] - theta[i0]);
            value[i] = value[i0] + t * (value[j] - value[i0]);
            filled[i] = true;
        }
        out.theta_deg.push_back(theta[i]);
        out.torque.push_back(value[i]);
    }
    return out;
}

struct RampWindow {
    double t_lo;
    double t_hi;
};

// ends half a step early: at t = t_start + ramp the reference has already
// switched to the hold phase and the sample carries the deceleration kick
RampWindow full_ramp(const StretchProfile& p, double dt) {
    return {p.t_start, p.t_start + p.ramp_duration() - 0.5 * dt};
}

RampWindow constant_velocity_window(const StretchProfile& p) {
    const double ramp = p.ramp_duration();
    return {p.t_start + 0.1 * ramp, p.t_start + 0.9 * ramp};
}

std::vector<ThetaTorque> collect(const TrialRecord& rec, const RampWindow& w,
                                 const std::function<double(const TrialRow&)>& get) {
    std::vector<ThetaTorque> out;
    for (const auto& row : rec.rows) {
        if (row.t >= w.t_lo - kEps && row.t <= w.t_hi + kEps) {
            out.push_back({row.theta * kRadToDeg, get(row)});
        }
    }
    return out;
}

std::string infer_model_label(const ReflexParams& p) {
    const bool l = p.G_l > 0.0, v = p.G_v > 0.0, f = p.G_f > 0.0;
    if (l && v && !f) return "hybrid";
    if (l && !v && !f) return "length";
    if (!l && v && !f) return "velocity";
    if (!l && !v && f) return "force";
    if (!l && !v && !f) return "none";
    return "mixed";
}

} // namespace

double SampledCurve::value_at(double theta) const {
    if (theta_deg.size() < 1) {
        throw std::domain_error("curve is empty");
    }
    if (theta < theta_deg.front() - kEps || theta > theta_deg.back() + kEps) {
        throw std::domain_error("angle " + std::to_string(theta) +
                                " deg outside the curve support (extrapolation refused)");
    }
    const auto it = std::lower_bound(theta_deg.begin(), theta_deg.end(), theta);
    const std::size_t hi = std::min<std::size_t>(
        static_cast<std::size_t>(it - theta_deg.begin()), theta_deg.size() - 1);
    if (hi == 0 || theta_deg[hi] == theta) {
        return torque[hi];
    }
    const std::size_t lo = hi - 1;
    const double t = (theta - theta_deg[lo]) / (theta_deg[hi] - theta_deg[lo]);
    return torque[lo] + t * (torque[hi] - torque[lo]);
}

PassiveCurve estimate_passive_curve(const TrialRecord& baseline, double spacing_deg) {
    for (const auto& u : baseline.config.units) {
        if (u.reflex.any_gain()) {
            throw std::invalid_argument("passive baseline must have all reflex gains at 0");
        }
    }
    const auto& prof = baseline.config.profile;
    auto samples = collect(baseline, full_ramp(prof, baseline.config.dt),
                           [](const TrialRow& r) { return r.torque_robot; });
    if (samples.empty()) {
        throw std::invalid_argument("baseline record has no ramp samples");
    }
    const double lo = prof.theta_init * kRadToDeg;
    const double hi = prof.theta_final * kRadToDeg;
    auto nodes = grid_nodes(lo, hi, lo, spacing_deg);
    if (nodes.empty() || nodes.back() < hi - kEps) {
        nodes.push_back(hi);
    }
    return bin_onto_grid(samples, nodes, spacing_deg);
}

namespace {

SampledCurve windowed_curve(const TrialRecord& trial,
                            const std::function<double(const TrialRow&)>& get,
                            double spacing_deg) {
    const auto& prof = trial.config.profile;
    RampWindow w = constant_velocity_window(prof);
    if (trial.diverged) {
        w.t_hi = std::min(w.t_hi, trial.diverged_t); // truncate at divergence
    }
    auto samples = collect(trial, w, get);
    SampledCurve curve;
    if (samples.empty()) {
        return curve;
    }
    auto [mn, mx] = std::minmax_element(samples.begin(), samples.end(),
                                        [](const ThetaTorque& a, const ThetaTorque& b) {
                                            return a.theta_deg < b.theta_deg;
                                        });
    const double anchor = prof.theta_init * kRadToDeg;
    const auto nodes = grid_nodes(mn->theta_deg, mx->theta_deg, anchor, spacing_deg);
    if (nodes.empty()) {
        return curve;
    }
    return bin_onto_grid(samples, nodes, spacing_deg);
}

} // namespace

ReflexTorqueCurve reflex_torque_curve(const TrialRecord& trial, const PassiveCurve& passive,
                                      double spacing_deg) {
    if (passive.empty()) {
        throw std::invalid_argument("passive curve is empty");
    }
    const auto& prof = trial.config.profile;
    if (prof.theta_init * kRadToDeg < passive.front_theta() - kEps ||
        prof.theta_final * kRadToDeg > passive.back_theta() + kEps) {
        throw std::invalid_argument("trial and passive curve cover different joint ranges");
    }
    ReflexTorqueCurve out;
    out.curve = windowed_curve(trial, [](const TrialRow& r) { return r.torque_robot; },
                               spacing_deg);
    for (std::size_t i = 0; i < out.curve.theta_deg.size(); ++i) {
        out.curve.torque[i] -= passive.value_at(out.curve.theta_deg[i]);
    }
    out.omega_dps = prof.omega * kRadToDeg;
    if (!trial.config.units.empty()) {
        out.params = trial.config.units.front().reflex;
        out.model_label = infer_model_label(out.params);
    }
    out.saturated = trial.saturated;
    out.diverged = trial.diverged;
    return out;
}

SampledCurve reflex_torque_ground_truth(const TrialRecord& trial, double spacing_deg) {
    return windowed_curve(trial, [](const TrialRow& r) { return r.reflex_torque_gt; },
                          spacing_deg);
}

SpasticityMetrics compute_metrics(const ReflexTorqueCurve& rc) {
    SpasticityMetrics m;
    m.saturated = rc.saturated;
    m.diverged = rc.diverged;
    const auto& c = rc.curve;
    if (c.empty()) {
        return m;
    }
    const auto peak_it = std::max_element(c.torque.begin(), c.torque.end());
    const std::size_t peak_idx = static_cast<std::size_t>(peak_it - c.torque.begin());
    m.peak_torque = std::max(0.0, *peak_it);

    const double threshold = std::max(0.5, 0.05 * m.peak_torque);
    std::optional<std::size_t> catch_idx;
    for (std::size_t i = 0; i < c.torque.size(); ++i) {
        if (c.torque[i] < threshold) {
            continue;
        }
        bool sustained = true;
        for (std::size_t j = i; j < c.torque.size() && c.theta_deg[j] <= c.theta_deg[i] + 5.0 + kEps;
             ++j) {
            if (c.torque[j] < threshold) {
                sustained = false;
                break;
            }
        }
        if (sustained) {
            catch_idx = i;
            break;
        }
    }
    if (!catch_idx) {
        return m;
    }
    m.catch_angle_deg = c.theta_deg[*catch_idx];

    // least-squares slope of the rising region, catch to peak
    const std::size_t i0 = *catch_idx;
    const std::size_t i1 = std::max(peak_idx, i0);
    if (i1 > i0) {
        double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = i0; i <= i1; ++i) {
            sw += 1.0;
            sx += c.theta_deg[i];
            sy += c.torque[i];
            sxx += c.theta_deg[i] * c.theta_deg[i];
            sxy += c.theta_deg[i] * c.torque[i];
        }
        const double det = sw * sxx - sx * sx;
        if (det > 1e-12) {
            m.reflex_stiffness = (sw * sxy - sx * sy) / det;
        }
    }
    return m;
}

double curve_rmse(const SampledCurve& a, const SampledCurve& b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("curve_rmse: empty curve");
    }
    const double lo = std::max(a.front_theta(), b.front_theta());
    const double hi = std::min(a.back_theta(), b.back_theta());
    if (lo > hi + kEps) {
        throw std::invalid_argument("curve_rmse: curve supports are disjoint");
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.theta_deg.size(); ++i) {
        const double th = a.theta_deg[i];
        if (th < lo - kEps || th > hi + kEps) {
            continue;
        }
        const double d = a.torque[i] - b.value_at(th);
        sum += d * d;
        ++n;
    }
    if (n == 0) {
        throw std::invalid_argument("curve_rmse: no grid nodes in the shared support");
    }
    return std::sqrt(sum / static_cast<double>(n));
}

SampledCurve bin_samples(const std::vector<std::pair<double, double>>& samples,
                         double anchor_deg, double spacing_deg) {
    if (samples.empty()) {
        return {};
    }
    std::vector<ThetaTorque> pts;
    pts.reserve(samples.size());
    double lo = samples.front().first, hi = lo;
    for (const auto& [theta, value] : samples) {
        pts.push_back({theta, value});
        lo = std::min(lo, theta);
        hi = std::max(hi, theta);
    }
    return bin_onto_grid(pts, grid_nodes(lo, hi, anchor_deg, spacing_deg), spacing_deg);
}

// ---------------------------------------------------------------------------
// parameter fitting

namespace {

struct Candidate {
    double gain;
    double lambda;
};

bool lex_less(const Candidate& a, const Candidate& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.lambda < b.lambda;
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n <= 1 || hi <= lo) {
        return {lo};
    }
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) /
                                                  static_cast<double>(n - 1);
    }
    return v;
}

} // namespace

FitResult fit_parameters(const std::map<double, SampledCurve>& targets_by_velocity,
                         ModelClass model, const SimConfig& base_config,
                         const FitBounds& bounds, const FitOptions& options) {
    if (targets_by_velocity.empty()) {
        throw std::invalid_argument("fit: no target curves");
    }
    for (const auto& [vel, curve] : targets_by_velocity) {
        if (!(vel > 0.0) || curve.empty()) {
            throw std::invalid_argument("fit: invalid target velocity or empty curve");
        }
    }
    if (!(bounds.gain_max > 0.0)) {
        throw std::invalid_argument("fit: model has all gains forced to 0");
    }
    if (bounds.gain_min > bounds.gain_max || bounds.lambda_min > bounds.lambda_max) {
        throw std::invalid_argument("fit: inverted bounds");
    }

    int simulations = 0;
    const int budget = options.max_simulations;
    const int cost_per_eval = static_cast<int>(targets_by_velocity.size());

    // passive curve from the gains-zero slowest stretch, shared by all evals
    SimConfig base_cfg = base_config;
    SimConfig passive_cfg = base_cfg;
    passive_cfg.profile.omega = 10.0 * std::numbers::pi / 180.0;
    for (auto& u : passive_cfg.units) {
        u.reflex = ReflexParams{};
    }
    ++simulations;
    const TrialRecord passive_rec = run_trial(passive_cfg);
    if (passive_rec.diverged) {
        throw std::invalid_argument("fit: the passive baseline trial diverged; "
                                    "the configuration cannot be analyzed");
    }
    const PassiveCurve passive = estimate_passive_curve(passive_rec);

    std::map<std::pair<double, double>, double> cache;
    std::mutex cache_mutex;

    auto objective = [&](const Candidate& c) -> double {
        {
            std::lock_guard lock(cache_mutex);
            if (auto it = cache.find({c.gain, c.lambda}); it != cache.end()) {
                return it->second;
            }
        }
        double total = 0.0;
        for (const auto& [vel, target] : targets_by_velocity) {
            SimConfig cfg = base_cfg;
            cfg.profile.omega = vel * std::numbers::pi / 180.0;
            const ReflexParams reflex =
                make_reflex(model, c.gain, c.lambda,
                            base_cfg.units.empty() ? ReflexParams{}
                                                   : base_cfg.units.front().reflex);
            for (auto& u : cfg.units) {
                u.reflex = reflex;
            }
            const TrialRecord rec = run_trial(cfg);
            const ReflexTorqueCurve rcurve = reflex_torque_curve(rec, passive);
            if (rec.diverged || rcurve.curve.empty()) {
                // penalty objective instead of aborting the search
                const double peak = rcurve.curve.empty()
                                        ? 0.0
                                        : *std::max_element(rcurve.curve.torque.begin(),
                                                            rcurve.curve.torque.end());
                total += 100.0 + std::clamp(peak, 0.0, 100.0);
            } else {
                total += curve_rmse(rcurve.curve, target);
            }
        }
        const double value = total / static_cast<double>(targets_by_velocity.size());
        std::lock_guard lock(cache_mutex);
        cache.emplace(std::pair{c.gain, c.lambda}, value);
        return value;
    };

    // stage 1: coarse grid
    const auto gain_grid = linspace(bounds.gain_min, bounds.gain_max, options.grid_points);
    const auto lambda_grid = linspace(bounds.lambda_min, bounds.lambda_max, options.grid_points);
    std::vector<Candidate> cells;
    for (double g : gain_grid) {
        for (double l : lambda_grid) {
            cells.push_back({g, l});
        }
    }
    std::vector<double> cell_obj(cells.size(), std::numeric_limits<double>::infinity());
    std::size_t evaluable = cells.size();
    if (budget > 0) {
        const std::size_t affordable =
            static_cast<std::size_t>(std::max(0, (budget - simulations) / cost_per_eval));
        evaluable = std::min(evaluable, affordable);
    }
    parallel_for(evaluable, options.threads,
                 [&](std::size_t i) { cell_obj[i] = objective(cells[i]); });
    simulations += static_cast<int>(evaluable) * cost_per_eval;

    std::size_t best_idx = 0;
    for (std::size_t i = 1; i < evaluable; ++i) {
        if (cell_obj[i] < cell_obj[best_idx] ||
            (cell_obj[i] == cell_obj[best_idx] && lex_less(cells[i], cells[best_idx]))) {
            best_idx = i;
        }
    }
    Candidate best = cells.empty() ? Candidate{bounds.gain_min, bounds.lambda_min}
                                   : cells[best_idx];
    double best_obj = cell_obj.empty() ? objective(best) : cell_obj[best_idx];

    // stage 2: coordinate descent with shrinking steps
    const double gain_span = bounds.gain_max - bounds.gain_min;
    const double lambda_span = bounds.lambda_max - bounds.lambda_min;
    double step_g = options.grid_points > 1 && gain_span > 0.0
                        ? gain_span / static_cast<double>(options.grid_points - 1) / 2.0
                        : 0.0;
    double step_l = options.grid_points > 1 && lambda_span > 0.0
                        ? lambda_span / static_cast<double>(options.grid_points - 1) / 2.0
                        : 0.0;

    auto try_candidate = [&](Candidate c) -> bool {
        c.gain = std::clamp(c.gain, bounds.gain_min, bounds.gain_max);
        c.lambda = std::clamp(c.lambda, bounds.lambda_min, bounds.lambda_max);
        bool cached;
        {
            std::lock_guard lock(cache_mutex);
            cached = cache.count({c.gain, c.lambda}) > 0;
        }
        if (!cached) {
            if (simulations + cost_per_eval > budget) {
                return false;
            }
            simulations += cost_per_eval;
        }
        const double obj = objective(c);
        if (obj < best_obj || (obj == best_obj && lex_less(c, best))) {
            best = c;
            best_obj = obj;
            return true;
        }
        return false;
    };

    while ((step_g >= options.step_tol || step_l >= options.step_tol) &&
           simulations + cost_per_eval <= budget) {
        bool moved = false;
        if (step_g >= options.step_tol) {
            moved |= try_candidate({best.gain + step_g, best.lambda});
            moved |= try_candidate({best.gain - step_g, best.lambda});
        }
        if (step_l >= options.step_tol) {
            moved |= try_candidate({best.gain, best.lambda + step_l});
            moved |= try_candidate({best.gain, best.lambda - step_l});
        }
        if (!moved && step_g >= options.step_tol && step_l >= options.step_tol) {
            // gain and threshold trade off against each other, so the RMSE
            // valley runs diagonally; axis moves alone stall on its wall
            moved |= try_candidate({best.gain + step_g, best.lambda + step_l});
            moved |= try_candidate({best.gain + step_g, best.lambda - step_l});
            moved |= try_candidate({best.gain - step_g, best.lambda + step_l});
            moved |= try_candidate({best.gain - step_g, best.lambda - step_l});
        }
        if (!moved) {
            step_g /= 2.0;
            step_l /= 2.0;
        }
    }

    FitResult result;
    result.model = model;
    result.gain = best.gain;
    result.lambda = best.lambda;
    result.params = make_reflex(model, best.gain, best.lambda);
    result.rmse = best_obj;
    result.simulations = simulations;
    return result;
}

} // namespace elbowsim
