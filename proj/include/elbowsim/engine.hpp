#pragma once

#include <optional>
#include <vector>

#include "elbowsim/muscle.hpp"
#include "elbowsim/plant.hpp"
#include "elbowsim/reflex.hpp"
#include "elbowsim/robot.hpp"

namespace elbowsim {

/// One simulated musculotendon actuator: Hill muscle + path geometry +
/// its own stretch reflex controller parameters.
struct MuscleUnitConfig {
    MuscleParams muscle;
    MusclePath path;
    ReflexParams reflex;
};

struct SimConfig {
    double dt = 1e-3;            // control/integration step [s]
    StretchProfile profile{};
    JointParams joint{};
    PidGains gains{};
    std::vector<MuscleUnitConfig> units; // LHB, SHB, BRD in the stock setup
    int record_decimation = 1;   // steps per recorded row

    void validate() const;
};

struct MuscleRow {
    double l = 0.0; // MTU length [m]
    double v = 0.0; // lengthening velocity [m/s]
    double f = 0.0; // force [N]
    double E = 0.0; // reflex excitation
    double a = 0.0; // activation
};

struct TrialRow {
    double t = 0.0;
    double theta = 0.0;
    double theta_dot = 0.0;
    double torque_robot = 0.0; // driving torque = stretch resistance [N m]
    std::vector<MuscleRow> m;
    // Ground-truth reflex torque sum r_i*(F_i - F_i at zero activation),
    // resistance-positive. Not part of the CSV schema; kept for the
    // decomposition oracle.
    double reflex_torque_gt = 0.0;
};

struct TrialRecord {
    SimConfig config;
    std::vector<TrialRow> rows;
    bool diverged = false;
    double diverged_t = 0.0; // valid when diverged
    bool saturated = false;  // any muscle excitation hit 1.0

    const TrialRow& back() const { return rows.back(); }
};

/// Fixed-step closed-loop simulation of one ramp-and-hold trial.
/// Deterministic: identical SimConfig gives a bit-identical record.
class Engine {
public:
    explicit Engine(SimConfig config);

    /// Advances one control cycle: reference -> PID -> delayed reflex ->
    /// activation -> muscle forces -> joint dynamics -> semi-implicit Euler.
    /// Returns false once the trial duration is covered or on divergence.
    bool step();

    /// Observation of the current state (recomputes controls; mutates
    /// controller state, so use either step() or the run loop, not both).
    const TrialRecord& record() const { return record_; }
    TrialRecord take_record() { return std::move(record_); }

    double t() const { return t_; }
    double theta() const { return theta_; }
    double theta_dot() const { return theta_dot_; }
    bool diverged() const { return record_.diverged; }
    bool done() const { return done_; }

    /// Divergence guard on the computed acceleration.
    static constexpr double kMaxAbsAccel = 1e4; // [rad/s^2]

private:
    struct StepOutputs {
        double torque_robot = 0.0;
        double torque_muscle = 0.0;
        double theta_ddot = 0.0;
        bool finite = true;
    };
    StepOutputs compute_controls();
    void record_row(const StepOutputs& out);

    SimConfig config_;
    std::vector<ReflexController> controllers_;
    // per-muscle state; `force` holds the previous step's output, which is
    // the one-step-lag feedback fed to the reflex controller
    std::vector<MuscleState> muscle_state_;
    std::vector<MuscleRow> scratch_;
    double scratch_gt_ = 0.0;

    double t_ = 0.0;
    double theta_ = 0.0;
    double theta_dot_ = 0.0;
    double integral_ = 0.0;
    long step_index_ = 0;
    long total_steps_ = 0;
    bool done_ = false;
    TrialRecord record_;
};

/// Runs a complete trial (start + ramp + hold). The record is flagged and
/// truncated instead of throwing if the dynamics diverge.
TrialRecord run_trial(const SimConfig& config);

} // namespace elbowsim
