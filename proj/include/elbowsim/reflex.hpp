#pragma once

#include <cstddef>
#include <vector>

#include "elbowsim/muscle.hpp"

namespace elbowsim {

/// Stretch-reflex model parameters. Gains of 0 disable the corresponding
/// feedback channel; C is the constant supraspinal drive (0 = relaxed limb).
struct ReflexParams {
    double C = 0.0;
    double G_l = 0.0;
    double G_v = 0.0;
    double G_f = 0.0;
    double lambda_l = 0.0; // threshold factors, in [0, 1]
    double lambda_v = 0.0;
    double lambda_f = 0.0;
    double tau = 0.030; // reflex conduction delay [s]

    bool any_gain() const { return G_l > 0.0 || G_v > 0.0 || G_f > 0.0; }
    void validate() const;
};

/// Proprioceptive feedback at one control step.
struct FeedbackSample {
    double l = 0.0; // fibre/MTU length [m]
    double v = 0.0; // lengthening velocity [m/s]
    double f = 0.0; // tension force [N], >= 0
    double t = 0.0; // sample time [s]
};

/// Scaling factor A = 3*lr/(l0+lr) balancing reflex magnitudes across models.
double scaling_factor(const MuscleParams& m);

/// Length reflex term: (l - l_t)/(l0 + lr) above the threshold
/// l_t = l0 + lambda_l*lr, else 0.
double reflex_length(double l, const MuscleParams& m, const ReflexParams& p);

/// Velocity reflex term: A*(v - v_t)/v_max above v_t = lambda_v*v_max, else 0.
double reflex_velocity(double v, const MuscleParams& m, const ReflexParams& p);

/// Force reflex term: A*(f - f_t)/f_max above f_t = lambda_f*f_max, else 0.
double reflex_force(double f, const MuscleParams& m, const ReflexParams& p);

/// Motoneuron excitation E = C + G_l*R_l + G_v*R_v + G_f*R_f, clamped to [0, 1].
double excitation(double C, double G_l, double G_v, double G_f,
                  double R_l, double R_v, double R_f);

/// Per-muscle stretch reflex controller. Holds a ring buffer realizing the
/// conduction delay as round(tau/dt) steps; prefilled with the neutral
/// sample (l = l0, v = 0, f = 0) so there is no transient at t = 0.
class ReflexController {
public:
    ReflexController(MuscleParams muscle, ReflexParams params, double dt);

    /// Pushes the current sample, pops the one from tau seconds ago and
    /// returns the excitation computed from the delayed sample.
    /// Throws std::logic_error if dt differs from the construction dt.
    double step(const FeedbackSample& sample, double dt);

    int delay_steps() const { return static_cast<int>(ring_.size()); }
    const MuscleParams& muscle() const { return muscle_; }
    const ReflexParams& params() const { return params_; }

private:
    double excitation_from(const FeedbackSample& s) const;

    MuscleParams muscle_;
    ReflexParams params_;
    double dt_;
    std::vector<FeedbackSample> ring_; // empty when the delay rounds to 0 steps
    std::size_t head_ = 0;
};

} // namespace elbowsim
