#include "elbowsim/plant.hpp"

#include <cmath>
#include <stdexcept>

namespace elbowsim {

namespace {

constexpr double kPi = std::numbers::pi;

void check_theta_range(double theta, const MusclePath& path) {
    if (!std::isfinite(theta)) {
        throw std::domain_error("joint angle is not finite");
    }
    if (theta < path.theta_init_ref - kPathThetaMargin || theta > kPi + kPathThetaMargin) {
        throw std::domain_error("joint angle " + std::to_string(theta) +
                                " rad outside the modelled range");
    }
}

// integral of r(u) = a + b*sin(pi - u) from theta_init_ref to theta
double path_excursion(double theta, const MusclePath& path) {
    const double t0 = path.theta_init_ref;
    return path.a * (theta - t0) + path.b * (std::cos(kPi - theta) - std::cos(kPi - t0));
}

} // namespace

void JointParams::validate() const {
    if (!(inertia > 0.0)) {
        throw std::invalid_argument("joint inertia must be positive");
    }
    if (damping < 0.0 || k_elastic_1 < 0.0 || k_elastic_2 < 0.0) {
        throw std::invalid_argument("joint damping/elastic coefficients must be non-negative");
    }
    if (!(theta_elastic_ref < theta_full_ext)) {
        throw std::invalid_argument("theta_elastic_ref must lie below full extension");
    }
}

MusclePath solve_equal_coefficient_path(double lr, double theta_init_ref) {
    if (!(lr > 0.0) || !(theta_init_ref > 0.0) || !(theta_init_ref < kPi)) {
        throw std::invalid_argument("invalid excursion or anchor angle for muscle path");
    }
    // a * [(pi - t0) + (1 - cos(pi - t0))] = lr with a = b
    const double span = (kPi - theta_init_ref) + (1.0 - std::cos(kPi - theta_init_ref));
    MusclePath path;
    path.a = lr / span;
    path.b = path.a;
    path.theta_init_ref = theta_init_ref;
    return path;
}

double moment_arm(double theta, const MusclePath& path) {
    check_theta_range(theta, path);
    return path.a + path.b * std::sin(kPi - theta);
}

double muscle_length(double theta, const MusclePath& path, const MuscleParams& m) {
    check_theta_range(theta, path);
    return m.l0 + path_excursion(theta, path);
}

double muscle_velocity(double theta, double theta_dot, const MusclePath& path) {
    return moment_arm(theta, path) * theta_dot;
}

double joint_torque_from_muscles(std::span<const double> forces,
                                 std::span<const MusclePath> paths, double theta) {
    if (forces.size() != paths.size()) {
        throw std::invalid_argument("forces/paths size mismatch");
    }
    double torque = 0.0;
    for (std::size_t i = 0; i < forces.size(); ++i) {
        torque -= moment_arm(theta, paths[i]) * forces[i]; // flexors resist extension
    }
    return torque;
}

double passive_joint_torque(double theta, double theta_dot, const JointParams& p) {
    double elastic = 0.0;
    if (theta > p.theta_elastic_ref) {
        elastic = p.k_elastic_1 * std::expm1(p.k_elastic_2 * (theta - p.theta_elastic_ref));
    }
    return -elastic - p.damping * theta_dot;
}

double angular_acceleration(double theta, double theta_dot, double torque_robot,
                            double torque_muscle, const JointParams& p) {
    return (torque_robot + torque_muscle + passive_joint_torque(theta, theta_dot, p)) / p.inertia;
}

} // namespace elbowsim
