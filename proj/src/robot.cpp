#include "elbowsim/robot.hpp"

#include <algorithm>
#include <stdexcept>

namespace elbowsim {

void StretchProfile::validate() const {
    if (!(theta_init < theta_final) || !(theta_final <= std::numbers::pi)) {
        throw std::invalid_argument("profile: need theta_init < theta_final <= pi");
    }
    if (!(omega > 0.0)) {
        throw std::invalid_argument("profile: ramp velocity must be positive");
    }
    if (t_start < 0.0 || t_hold < 0.0) {
        throw std::invalid_argument("profile: phase durations must be non-negative");
    }
}

void PidGains::validate() const {
    if (kp < 0.0 || ki < 0.0 || kd < 0.0) {
        throw std::invalid_argument("PID gains must be non-negative");
    }
    if (!(integral_limit > 0.0)) {
        throw std::invalid_argument("PID integral limit must be positive");
    }
}

Reference reference(double t, const StretchProfile& profile) {
    const double ramp_end = profile.t_start + profile.ramp_duration();
    if (t <= profile.t_start) {
        return {profile.theta_init, 0.0};
    }
    if (t < ramp_end) {
        return {profile.theta_init + profile.omega * (t - profile.t_start), profile.omega};
    }
    return {profile.theta_final, 0.0};
}

PidResult pid_step(double theta, double theta_dot, double theta_ref, double omega_ref,
                   double integral, const PidGains& gains, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("pid_step: dt must be positive");
    }
    const double e = theta_ref - theta;
    const double e_dot = omega_ref - theta_dot;
    double integ = integral + e * dt;
    if (gains.ki > 0.0) {
        const double bound = gains.integral_limit / gains.ki;
        integ = std::clamp(integ, -bound, bound);
    }
    const double torque = gains.kp * e + gains.ki * integ + gains.kd * e_dot;
    return {torque, integ};
}

} // namespace elbowsim
