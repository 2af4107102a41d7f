#pragma once

#include <numbers>

namespace elbowsim {

/// Ramp-and-hold stretch trajectory: hold at theta_init for t_start, ramp to
/// theta_final at constant omega, hold for t_hold.
struct StretchProfile {
    double theta_init = std::numbers::pi / 2;  // [rad]
    double theta_final = std::numbers::pi;     // [rad]
    double omega = std::numbers::pi / 2;       // ramp velocity [rad/s], default 90 deg/s
    double t_start = 0.5;                      // [s]
    double t_hold = 1.0;                       // [s]

    double ramp_duration() const { return (theta_final - theta_init) / omega; }
    double total_duration() const { return t_start + ramp_duration() + t_hold; }
    void validate() const;
};

struct PidGains {
    double kp = 1200.0;          // [N m/rad]
    double ki = 7500.0;          // [N m/(rad s)]
    double kd = 50.0;            // [N m s/rad]
    double integral_limit = 30.0; // cap on the integral torque contribution [N m]

    void validate() const;
};

struct Reference {
    double theta = 0.0;
    double omega = 0.0;
};

/// Piecewise reference: continuous in t, theta monotone non-decreasing.
Reference reference(double t, const StretchProfile& profile);

struct PidResult {
    double torque = 0.0;   // [N m]
    double integral = 0.0; // updated integral state [rad s]
};

/// One PID update with anti-windup: the integral state is clamped so its
/// torque contribution never exceeds integral_limit. Throws on dt <= 0.
PidResult pid_step(double theta, double theta_dot, double theta_ref, double omega_ref,
                   double integral, const PidGains& gains, double dt);

} // namespace elbowsim
