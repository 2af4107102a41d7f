#include "elbowsim/reflex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace elbowsim {

void ReflexParams::validate() const {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(lambda_l) || !in_unit(lambda_v) || !in_unit(lambda_f)) {
        throw std::invalid_argument("reflex threshold factors must lie in [0, 1]");
    }
    if (G_l < 0.0 || G_v < 0.0 || G_f < 0.0) {
        throw std::invalid_argument("reflex gains must be non-negative");
    }
    if (tau < 0.0) {
        throw std::invalid_argument("reflex delay must be non-negative");
    }
    if (!std::isfinite(C)) {
        throw std::invalid_argument("supraspinal drive must be finite");
    }
}

double scaling_factor(const MuscleParams& m) {
    return 3.0 * m.lr / (m.l0 + m.lr);
}

double reflex_length(double l, const MuscleParams& m, const ReflexParams& p) {
    if (!(l > 0.0)) {
        throw std::invalid_argument("muscle length feedback must be positive");
    }
    const double l_t = m.l0 + p.lambda_l * m.lr;
    return l >= l_t ? (l - l_t) / (m.l0 + m.lr) : 0.0;
}

double reflex_velocity(double v, const MuscleParams& m, const ReflexParams& p) {
    const double v_t = p.lambda_v * m.v_max;
    return v >= v_t ? scaling_factor(m) * (v - v_t) / m.v_max : 0.0;
}

double reflex_force(double f, const MuscleParams& m, const ReflexParams& p) {
    const double f_t = p.lambda_f * m.f_max;
    return f >= f_t ? scaling_factor(m) * (f - f_t) / m.f_max : 0.0;
}

double excitation(double C, double G_l, double G_v, double G_f,
                  double R_l, double R_v, double R_f) {
    // E <= 1 per the model; clamped below at 0 since negative excitation
    // is physiologically meaningless
    return std::clamp(C + G_l * R_l + G_v * R_v + G_f * R_f, 0.0, 1.0);
}

ReflexController::ReflexController(MuscleParams muscle, ReflexParams params, double dt)
    : muscle_(std::move(muscle)), params_(params), dt_(dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("reflex controller: dt must be positive");
    }
    muscle_.validate();
    params_.validate();
    const auto steps = static_cast<std::size_t>(std::llround(params_.tau / dt));
    // neutral prefill: resting length, no motion, no tension
    ring_.assign(steps, FeedbackSample{muscle_.l0, 0.0, 0.0, 0.0});
}

double ReflexController::excitation_from(const FeedbackSample& s) const {
    return excitation(params_.C, params_.G_l, params_.G_v, params_.G_f,
                      reflex_length(s.l, muscle_, params_),
                      reflex_velocity(s.v, muscle_, params_),
                      reflex_force(s.f, muscle_, params_));
}

double ReflexController::step(const FeedbackSample& sample, double dt) {
    if (std::abs(dt - dt_) > 1e-15) {
        throw std::logic_error("reflex controller: dt changed mid-run");
    }
    if (ring_.empty()) {
        return excitation_from(sample); // delay rounds to zero steps
    }
    FeedbackSample delayed = ring_[head_];
    ring_[head_] = sample;
    head_ = (head_ + 1) % ring_.size();
    return excitation_from(delayed);
}

} // namespace elbowsim
