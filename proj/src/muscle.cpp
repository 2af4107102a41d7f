#include "elbowsim/muscle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace elbowsim {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string("non-finite ") + what);
    }
}

} // namespace

void MuscleParams::validate() const {
    if (!(l0 > 0.0) || !(lr > 0.0) || !(v_max > 0.0) || !(f_max > 0.0)) {
        throw std::invalid_argument("muscle '" + name + "': l0, lr, v_max, f_max must be positive");
    }
    if (std::abs(l_opt - v_max / 1.5) > 1e-12 * v_max) {
        throw std::invalid_argument("muscle '" + name + "': l_opt must equal v_max / 1.5");
    }
    if (!(tau_act > 0.0) || !(tau_deact > 0.0) || !(tau_act < tau_deact)) {
        throw std::invalid_argument("muscle '" + name + "': need 0 < tau_act < tau_deact");
    }
    if (!(curves.fl_width > 0.0) || !(curves.fv_ecc_max > 1.0) ||
        !(curves.fv_cc_curvature > 0.0) || !(curves.k_pe > 0.0) || curves.f_pe_scale < 0.0) {
        throw std::invalid_argument("muscle '" + name + "': invalid Hill curve constants");
    }
}

MuscleParams make_muscle(std::string name, double l0, double lr, double v_max,
                         double f_max, HillCurveConstants curves) {
    MuscleParams m;
    m.name = std::move(name);
    m.l0 = l0;
    m.lr = lr;
    m.v_max = v_max;
    m.f_max = f_max;
    m.l_opt = v_max / 1.5;
    m.tendon_slack = l0 - m.l_opt; // normalized fiber length 1 at the stretch start
    m.curves = curves;
    m.validate();
    return m;
}

double static_max_force(const MuscleParams& m) {
    return m.f_max / 1.2;
}

double norm_fiber_length(double l_mtu, const MuscleParams& m) {
    if (!(l_mtu > m.tendon_slack)) {
        throw std::invalid_argument("muscle '" + m.name + "': MTU length " +
                                    std::to_string(l_mtu) + " gives non-positive fiber length");
    }
    return (l_mtu - m.tendon_slack) / m.l_opt;
}

double force_length(double l_norm, const HillCurveConstants& c) {
    require_finite(l_norm, "normalized length");
    if (!(l_norm > 0.0)) {
        throw std::invalid_argument("normalized fiber length must be positive");
    }
    const double d = l_norm - 1.0;
    return std::exp(-d * d / c.fl_width);
}

double force_velocity(double v_norm, const HillCurveConstants& c) {
    require_finite(v_norm, "normalized velocity");
    if (v_norm <= -1.0) {
        return 0.0; // at or beyond maximal shortening velocity
    }
    if (v_norm < 0.0) {
        // concentric hyperbola, 0 at -1 and 1 at 0
        return (1.0 + v_norm) / (1.0 - v_norm / c.fv_cc_curvature);
    }
    // eccentric branch rising to the fv_ecc_max asymptote; the shape constant
    // matches the concentric slope 1 + 1/curvature at v = 0, keeping C1 continuity
    const double k_ecc = (c.fv_ecc_max - 1.0) / (1.0 + 1.0 / c.fv_cc_curvature);
    return c.fv_ecc_max - (c.fv_ecc_max - 1.0) * k_ecc / (k_ecc + v_norm);
}

double passive_force(double l_norm, const HillCurveConstants& c) {
    require_finite(l_norm, "normalized length");
    if (!(l_norm > 0.0)) {
        throw std::invalid_argument("normalized fiber length must be positive");
    }
    if (l_norm <= 1.0) {
        return 0.0;
    }
    // normalized to 1 at l_norm = 1.5
    return std::expm1(c.k_pe * (l_norm - 1.0)) / std::expm1(c.k_pe * 0.5);
}

double muscle_force(double activation, double l_mtu, double v_mtu, const MuscleParams& m) {
    require_finite(activation, "activation");
    require_finite(v_mtu, "MTU velocity");
    const double l_norm = norm_fiber_length(l_mtu, m);
    const double a = std::clamp(activation, 0.0, 1.0);
    const double active = a * force_length(l_norm, m.curves)
                            * force_velocity(v_mtu / m.v_max, m.curves);
    const double passive = m.curves.f_pe_scale * passive_force(l_norm, m.curves);
    const double f = static_max_force(m) * (active + passive);
    return std::clamp(f, 0.0, m.f_max);
}

double activation_step(double a, double excitation, double dt, const MuscleParams& m) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("activation_step: dt must be positive");
    }
    const double tau = excitation >= a ? m.tau_act : m.tau_deact;
    const double next = a + dt * (excitation - a) / tau;
    return std::clamp(next, 0.0, 1.0);
}

} // namespace elbowsim
