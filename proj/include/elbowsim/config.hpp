#pragma once

#include <string>

#include "elbowsim/protocol.hpp"

namespace elbowsim {

/// Everything configurable from a flat `key = value` file with [section]
/// headers. Unknown keys are rejected.
struct AppConfig {
    SimConfig sim = presets::default_config();
    ProtocolSpec protocol{};
    FitBounds fit_bounds{};
    FitOptions fit_options{};
};

/// Canonical configuration document with every default value spelled out.
std::string default_config_text();

AppConfig parse_config_text(const std::string& text);
AppConfig load_config_file(const std::string& path);

} // namespace elbowsim
