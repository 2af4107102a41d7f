#include "elbowsim/presets.hpp"

#include <stdexcept>

namespace elbowsim {

std::string to_string(ModelClass m) {
    switch (m) {
    case ModelClass::length: return "length";
    case ModelClass::velocity: return "velocity";
    case ModelClass::force: return "force";
    case ModelClass::hybrid: return "hybrid";
    }
    throw std::logic_error("unknown model class");
}

ModelClass model_class_from_string(const std::string& s) {
    if (s == "length") return ModelClass::length;
    if (s == "velocity") return ModelClass::velocity;
    if (s == "force") return ModelClass::force;
    if (s == "hybrid") return ModelClass::hybrid;
    throw std::invalid_argument("unknown model class '" + s +
                                "' (expected length|velocity|force|hybrid)");
}

ReflexParams make_reflex(ModelClass model, double gain, double lambda,
                         const ReflexParams& base) {
    ReflexParams p;
    p.C = base.C;
    p.tau = base.tau;
    switch (model) {
    case ModelClass::length:
        p.G_l = gain;
        p.lambda_l = lambda;
        break;
    case ModelClass::velocity:
        p.G_v = gain;
        p.lambda_v = lambda;
        break;
    case ModelClass::force:
        p.G_f = gain;
        p.lambda_f = lambda;
        break;
    case ModelClass::hybrid:
        // length and velocity channels share gain and threshold
        p.G_l = p.G_v = gain;
        p.lambda_l = p.lambda_v = lambda;
        break;
    }
    p.validate();
    return p;
}

namespace presets {

MuscleParams lhb() { return make_muscle("lhb", 0.36, 0.054, 0.18, 729.0); }
MuscleParams shb() { return make_muscle("shb", 0.28, 0.054, 0.20, 508.0); }
MuscleParams brd() { return make_muscle("brd", 0.12, 0.024, 0.13, 1171.0); }

MusclePath path_for(const MuscleParams& m, double theta_init_ref) {
    return solve_equal_coefficient_path(m.lr, theta_init_ref);
}

SimConfig default_config() {
    SimConfig c;
    for (auto muscle : {lhb(), shb(), brd()}) {
        MuscleUnitConfig u;
        u.path = path_for(muscle, c.profile.theta_init);
        u.muscle = std::move(muscle);
        u.reflex = ReflexParams{}; // all gains zero
        c.units.push_back(std::move(u));
    }
    return c;
}

SimConfig config_for(ModelClass model, double gain, double lambda, double omega_dps) {
    SimConfig c = default_config();
    c.profile.omega = omega_dps * std::numbers::pi / 180.0;
    const ReflexParams reflex = make_reflex(model, gain, lambda);
    for (auto& u : c.units) {
        u.reflex = reflex;
    }
    return c;
}

SimConfig baseline_config() {
    SimConfig c = default_config();
    c.profile.omega = 10.0 * std::numbers::pi / 180.0;
    return c;
}

} // namespace presets
} // namespace elbowsim
