#pragma once

#include <string>

#include "elbowsim/engine.hpp"

namespace elbowsim {

/// The four stretch-reflex model classes. Length/velocity/force use one
/// gain and one threshold factor on their own channel; hybrid drives the
/// length and velocity channels with identical gain and threshold.
enum class ModelClass { length, velocity, force, hybrid };

std::string to_string(ModelClass m);
ModelClass model_class_from_string(const std::string& s); // throws on unknown name

/// ReflexParams for a model class with scalar gain G and threshold factor
/// lambda. C and tau are taken from `base` (defaults: C = 0, tau = 30 ms);
/// gains of the other channels are zeroed.
ReflexParams make_reflex(ModelClass model, double gain, double lambda,
                         const ReflexParams& base = {});

namespace presets {

/// Stock elbow flexor parameter sets.
MuscleParams lhb();
MuscleParams shb();
MuscleParams brd();

/// Path solved from the excursion constraint with a = b.
MusclePath path_for(const MuscleParams& m, double theta_init_ref);

/// Default simulation: three flexors anchored at 90 deg, zero reflex gains,
/// default joint, PID and 90 deg/s ramp-and-hold profile.
SimConfig default_config();

/// default_config() with the reflex model applied to all muscles.
SimConfig config_for(ModelClass model, double gain, double lambda, double omega_dps);

/// Gains-zero baseline at the lowest protocol velocity (10 deg/s), used to
/// estimate the passive torque curve.
SimConfig baseline_config();

} // namespace presets
} // namespace elbowsim
