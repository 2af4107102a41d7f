#pragma once

#include <string>

namespace elbowsim {

/// Shape constants of the normalized Hill curves. Defaults are standard
/// literature values; all overridable per muscle.
struct HillCurveConstants {
    double fl_width = 0.45;        // gaussian width of the active force-length curve
    double fv_ecc_max = 1.4;       // eccentric force asymptote
    double fv_cc_curvature = 0.25; // concentric (Katz/Hill) curvature
    double k_pe = 4.0;             // passive exponential stiffness
    double f_pe_scale = 0.5;       // passive force scale relative to static max force
};

/// Per-muscle constants of a musculotendon unit. Lengths are MTU scale;
/// the tendon is rigid, so fiber length = l_mtu - tendon_slack.
struct MuscleParams {
    std::string name;     // LHB, SHB or BRD in the stock setup
    double l0 = 0.0;      // MTU length at the start of the stretch [m]
    double lr = 0.0;      // stretch excursion range [m]
    double v_max = 0.0;   // maximal contraction velocity [m/s]
    double f_max = 0.0;   // maximal muscle force [N]
    double l_opt = 0.0;   // optimal fiber length, v_max / 1.5 [m]
    double tendon_slack = 0.0; // constant tendon length, l0 - l_opt [m]
    double tau_act = 0.015;    // activation rise time constant [s]
    double tau_deact = 0.050;  // activation fall time constant [s]
    HillCurveConstants curves{};

    void validate() const; // throws std::invalid_argument on violated invariants
};

/// Builds MuscleParams with the derived quantities (l_opt, tendon_slack)
/// filled in from the rigid-tendon convention.
MuscleParams make_muscle(std::string name, double l0, double lr, double v_max,
                         double f_max, HillCurveConstants curves = {});

struct MuscleState {
    double activation = 0.0; // [0, 1]
    double l_mtu = 0.0;      // [m]
    double v_mtu = 0.0;      // [m/s], positive = lengthening
    double force = 0.0;      // [N]
};

/// Peak isometric (static maximal) force; f_max is defined as 1.2 times it.
double static_max_force(const MuscleParams& m);

/// Normalized fiber length (l_mtu - tendon_slack) / l_opt.
/// Throws if the fiber length would be non-positive.
double norm_fiber_length(double l_mtu, const MuscleParams& m);

/// Active force-length multiplier, exp(-(l_norm-1)^2 / width). Peak 1 at l_norm = 1.
double force_length(double l_norm, const HillCurveConstants& c = {});

/// Force-velocity multiplier over normalized velocity v_mtu / v_max
/// (positive = lengthening). 0 at -1, 1 at 0, asymptote fv_ecc_max for
/// fast lengthening; continuous and monotone non-decreasing.
double force_velocity(double v_norm, const HillCurveConstants& c = {});

/// Passive force multiplier: 0 up to slack (l_norm <= 1), exponential rise
/// normalized to 1 at l_norm = 1.5.
double passive_force(double l_norm, const HillCurveConstants& c = {});

/// Total musculotendon force [N], clamped to [0, f_max].
double muscle_force(double activation, double l_mtu, double v_mtu, const MuscleParams& m);

/// One first-order activation update: da/dt = (E - a)/tau with tau_act on
/// rising drive and tau_deact on falling drive; explicit Euler, clamped to [0, 1].
double activation_step(double a, double excitation, double dt, const MuscleParams& m);

} // namespace elbowsim
