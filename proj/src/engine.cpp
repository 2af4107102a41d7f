#include "elbowsim/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace elbowsim {

void SimConfig::validate() const {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("sim: dt must be positive");
    }
    if (record_decimation < 1) {
        throw std::invalid_argument("sim: record_decimation must be >= 1");
    }
    profile.validate();
    joint.validate();
    gains.validate();
    for (const auto& u : units) {
        u.muscle.validate();
        u.reflex.validate();
        if (!(u.path.a > 0.0) || u.path.b < 0.0) {
            throw std::invalid_argument("sim: muscle path needs a > 0, b >= 0");
        }
        if (u.reflex.any_gain() && std::llround(u.reflex.tau / dt) < 1) {
            throw std::invalid_argument("sim: reflex delay must span at least one step "
                                        "when any gain is active");
        }
    }
}

Engine::Engine(SimConfig config) : config_(std::move(config)) {
    config_.validate();
    controllers_.reserve(config_.units.size());
    for (const auto& u : config_.units) {
        controllers_.emplace_back(u.muscle, u.reflex, config_.dt);
    }
    muscle_state_.resize(config_.units.size());
    for (std::size_t i = 0; i < config_.units.size(); ++i) {
        muscle_state_[i].l_mtu = config_.units[i].muscle.l0;
    }
    scratch_.resize(config_.units.size());
    theta_ = config_.profile.theta_init;
    theta_dot_ = 0.0;
    total_steps_ = std::llround(config_.profile.total_duration() / config_.dt);
    record_.config = config_;
    record_.rows.reserve(static_cast<std::size_t>(total_steps_ / config_.record_decimation) + 2);
}

Engine::StepOutputs Engine::compute_controls() {
    StepOutputs out;
    const auto ref = reference(t_, config_.profile);
    const auto pid = pid_step(theta_, theta_dot_, ref.theta, ref.omega,
                              integral_, config_.gains, config_.dt);
    integral_ = pid.integral;
    out.torque_robot = pid.torque;

    double torque_muscle = 0.0;
    scratch_gt_ = 0.0;
    for (std::size_t i = 0; i < config_.units.size(); ++i) {
        const auto& u = config_.units[i];
        MuscleState& s = muscle_state_[i];
        const double r = moment_arm(theta_, u.path);
        s.l_mtu = muscle_length(theta_, u.path, u.muscle);
        s.v_mtu = r * theta_dot_;
        // force feedback is the previous step's force: physical feedback is
        // causal and this breaks the algebraic loop of the force model
        const double e = controllers_[i].step({s.l_mtu, s.v_mtu, s.force, t_}, config_.dt);
        s.activation = activation_step(s.activation, e, config_.dt, u.muscle);
        const double f = muscle_force(s.activation, s.l_mtu, s.v_mtu, u.muscle);
        const double f_passive = muscle_force(0.0, s.l_mtu, s.v_mtu, u.muscle);
        s.force = f;
        scratch_[i] = {s.l_mtu, s.v_mtu, f, e, s.activation};
        scratch_gt_ += r * (f - f_passive);
        torque_muscle -= r * f;
        if (e >= 1.0) {
            record_.saturated = true;
        }
    }
    out.torque_muscle = torque_muscle;
    out.theta_ddot = angular_acceleration(theta_, theta_dot_, out.torque_robot,
                                          torque_muscle, config_.joint);
    out.finite = std::isfinite(out.theta_ddot);
    return out;
}

void Engine::record_row(const StepOutputs& out) {
    TrialRow row;
    row.t = t_;
    row.theta = theta_;
    row.theta_dot = theta_dot_;
    row.torque_robot = out.torque_robot;
    row.m = scratch_;
    row.reflex_torque_gt = scratch_gt_;
    record_.rows.push_back(std::move(row));
}

bool Engine::step() {
    if (done_) {
        return false;
    }
    // state sanity before touching the geometry, which has a hard range
    const bool state_ok = std::isfinite(theta_) && std::isfinite(theta_dot_) &&
                          theta_ > config_.profile.theta_init - 0.05 &&
                          theta_ < config_.joint.theta_full_ext + 0.05;
    if (!state_ok) {
        record_.diverged = true;
        record_.diverged_t = t_;
        done_ = true;
        return false;
    }
    const StepOutputs out = compute_controls();
    if (!out.finite || std::abs(out.theta_ddot) > kMaxAbsAccel) {
        record_.diverged = true;
        record_.diverged_t = t_;
        record_row(out);
        done_ = true;
        return false;
    }
    if (step_index_ % config_.record_decimation == 0) {
        record_row(out);
    }
    if (step_index_ >= total_steps_) {
        done_ = true;
        return false;
    }
    // semi-implicit Euler
    theta_dot_ += out.theta_ddot * config_.dt;
    theta_ += theta_dot_ * config_.dt;
    ++step_index_;
    t_ = static_cast<double>(step_index_) * config_.dt;
    return true;
}

TrialRecord run_trial(const SimConfig& config) {
    Engine engine(config);
    while (engine.step()) {
    }
    return engine.take_record();
}

} // namespace elbowsim
