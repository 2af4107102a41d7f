#pragma once

#include <numbers>
#include <span>

#include "elbowsim/muscle.hpp"

namespace elbowsim {

/// Single-DoF elbow skeletal parameters. Angle convention: theta is the
/// elbow angle, extension-positive, full extension at pi (180 deg).
struct JointParams {
    double inertia = 0.05;  // forearm + hand about the elbow [kg m^2]
    double damping = 0.2;   // passive viscous coefficient [N m s/rad]
    double k_elastic_1 = 0.3;   // elastic scale [N m]
    double k_elastic_2 = 1.5;   // elastic exponent [1/rad]
    double theta_elastic_ref = std::numbers::pi / 2; // elastic onset angle [rad]
    double theta_full_ext = std::numbers::pi;        // [rad]

    void validate() const;
};

/// Moment-arm profile r(theta) = a + b*sin(pi - theta), anchored so that
/// the owning muscle is at length l0 at theta_init_ref.
struct MusclePath {
    double a = 0.0; // [m]
    double b = 0.0; // [m]
    double theta_init_ref = std::numbers::pi / 2; // angle where l_mtu = l0 [rad]
};

/// Solves a = b from the excursion constraint
/// integral_{theta_init_ref}^{pi} r(u) du = lr.
MusclePath solve_equal_coefficient_path(double lr, double theta_init_ref);

/// The closed form extends smoothly a little past the anchors; the
/// controller keeps theta within ~2 deg of [theta_init, pi].
inline constexpr double kPathThetaMargin = 0.06; // [rad]

double moment_arm(double theta, const MusclePath& path);

/// MTU length l0 + integral of r from theta_init_ref to theta, closed form.
double muscle_length(double theta, const MusclePath& path, const MuscleParams& m);

/// Lengthening velocity r(theta) * theta_dot, positive when extending.
double muscle_velocity(double theta, double theta_dot, const MusclePath& path);

/// Net flexor torque -sum r_i * F_i (negative = resists extension).
double joint_torque_from_muscles(std::span<const double> forces,
                                 std::span<const MusclePath> paths, double theta);

/// Joint-level passive torque: exponential elastic stiffening past
/// theta_elastic_ref plus linear viscosity. Negative = resists extension.
double passive_joint_torque(double theta, double theta_dot, const JointParams& p);

double angular_acceleration(double theta, double theta_dot, double torque_robot,
                            double torque_muscle, const JointParams& p);

} // namespace elbowsim
