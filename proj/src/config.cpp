#include "elbowsim/config.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "elbowsim/csv.hpp"

namespace elbowsim {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double to_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (trim(v.substr(pos)).empty()) {
            return d;
        }
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("config: bad numeric value '" + v + "' for " + key);
}

int to_int(const std::string& v, const std::string& key) {
    const double d = to_double(v, key);
    const int i = static_cast<int>(d);
    if (static_cast<double>(i) != d) {
        throw std::invalid_argument("config: expected integer value for " + key);
    }
    return i;
}

std::vector<double> to_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(to_double(item, key));
        }
    }
    if (out.empty()) {
        throw std::invalid_argument("config: empty list for " + key);
    }
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_number(v[i]);
    }
    return out;
}

// per-muscle settings gathered during the parse; paths and derived muscle
// fields are rebuilt afterwards
struct MuscleDraft {
    double l0, lr, v_max, f_max, tau_act, tau_deact;
    double theta_init_ref;
    HillCurveConstants curves;
    ReflexParams reflex;
    bool reflex_overridden = false;

    explicit MuscleDraft(const MuscleUnitConfig& u)
        : l0(u.muscle.l0), lr(u.muscle.lr), v_max(u.muscle.v_max), f_max(u.muscle.f_max),
          tau_act(u.muscle.tau_act), tau_deact(u.muscle.tau_deact),
          theta_init_ref(u.path.theta_init_ref), curves(u.muscle.curves), reflex(u.reflex) {}
};

} // namespace

AppConfig parse_config_text(const std::string& text) {
    AppConfig cfg;
    ReflexParams shared_reflex{};
    std::vector<std::string> names;
    std::vector<MuscleDraft> drafts;
    for (const auto& u : cfg.sim.units) {
        names.push_back(u.muscle.name);
        drafts.emplace_back(u);
    }
    auto muscle_index = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) {
                return i;
            }
        }
        throw std::invalid_argument("config: unknown muscle '" + name + "'");
    };

    using Handler = std::function<void(const std::string&, const std::string&)>;
    std::map<std::string, Handler> handlers;
    auto num = [&](const std::string& sk, double* target) {
        handlers[sk] = [target](const std::string& key, const std::string& v) {
            *target = to_double(v, key);
        };
    };
    auto deg = [&](const std::string& sk, double* target) {
        handlers[sk] = [target](const std::string& key, const std::string& v) {
            *target = to_double(v, key) * kDegToRad;
        };
    };

    num("simulation.dt", &cfg.sim.dt);
    handlers["simulation.record_decimation"] = [&](const std::string& key, const std::string& v) {
        cfg.sim.record_decimation = to_int(v, key);
    };

    deg("profile.theta_init_deg", &cfg.sim.profile.theta_init);
    deg("profile.theta_final_deg", &cfg.sim.profile.theta_final);
    deg("profile.omega_dps", &cfg.sim.profile.omega);
    num("profile.t_start_s", &cfg.sim.profile.t_start);
    num("profile.t_hold_s", &cfg.sim.profile.t_hold);

    num("joint.inertia", &cfg.sim.joint.inertia);
    num("joint.damping", &cfg.sim.joint.damping);
    num("joint.k_elastic_1", &cfg.sim.joint.k_elastic_1);
    num("joint.k_elastic_2", &cfg.sim.joint.k_elastic_2);
    deg("joint.theta_elastic_ref_deg", &cfg.sim.joint.theta_elastic_ref);
    deg("joint.theta_full_ext_deg", &cfg.sim.joint.theta_full_ext);

    num("pid.kp", &cfg.sim.gains.kp);
    num("pid.ki", &cfg.sim.gains.ki);
    num("pid.kd", &cfg.sim.gains.kd);
    num("pid.integral_limit", &cfg.sim.gains.integral_limit);

    num("reflex.C", &shared_reflex.C);
    num("reflex.G_l", &shared_reflex.G_l);
    num("reflex.G_v", &shared_reflex.G_v);
    num("reflex.G_f", &shared_reflex.G_f);
    num("reflex.lambda_l", &shared_reflex.lambda_l);
    num("reflex.lambda_v", &shared_reflex.lambda_v);
    num("reflex.lambda_f", &shared_reflex.lambda_f);
    num("reflex.tau_s", &shared_reflex.tau);

    for (std::size_t i = 0; i < names.size(); ++i) {
        const std::string p = "muscle." + names[i] + ".";
        MuscleDraft* d = &drafts[i];
        num(p + "l0_m", &d->l0);
        num(p + "lr_m", &d->lr);
        num(p + "v_max_mps", &d->v_max);
        num(p + "f_max_N", &d->f_max);
        num(p + "tau_act_s", &d->tau_act);
        num(p + "tau_deact_s", &d->tau_deact);
        deg(p + "theta_init_ref_deg", &d->theta_init_ref);
        num(p + "fl_width", &d->curves.fl_width);
        num(p + "fv_ecc_max", &d->curves.fv_ecc_max);
        num(p + "fv_cc_curvature", &d->curves.fv_cc_curvature);
        num(p + "k_pe", &d->curves.k_pe);
        num(p + "f_pe_scale", &d->curves.f_pe_scale);
        // optional per-muscle reflex override
        const std::string rp = "reflex." + names[i] + ".";
        for (const std::string field : {"C", "G_l", "G_v", "G_f", "lambda_l", "lambda_v",
                                        "lambda_f", "tau_s"}) {
            handlers[rp + field] = [d, field](const std::string& key, const std::string& v) {
                d->reflex_overridden = true;
                double* t = nullptr;
                if (field == "C") t = &d->reflex.C;
                else if (field == "G_l") t = &d->reflex.G_l;
                else if (field == "G_v") t = &d->reflex.G_v;
                else if (field == "G_f") t = &d->reflex.G_f;
                else if (field == "lambda_l") t = &d->reflex.lambda_l;
                else if (field == "lambda_v") t = &d->reflex.lambda_v;
                else if (field == "lambda_f") t = &d->reflex.lambda_f;
                else t = &d->reflex.tau;
                *t = to_double(v, key);
            };
        }
    }

    handlers["protocol.model"] = [&](const std::string&, const std::string& v) {
        cfg.protocol.model = model_class_from_string(trim(v));
    };
    handlers["protocol.gains"] = [&](const std::string& key, const std::string& v) {
        cfg.protocol.gains = to_list(v, key);
    };
    handlers["protocol.lambdas"] = [&](const std::string& key, const std::string& v) {
        cfg.protocol.lambdas = to_list(v, key);
    };
    handlers["protocol.velocities_dps"] = [&](const std::string& key, const std::string& v) {
        cfg.protocol.velocities_dps = to_list(v, key);
    };
    handlers["protocol.output_dir"] = [&](const std::string&, const std::string& v) {
        cfg.protocol.output_dir = trim(v);
    };
    handlers["protocol.threads"] = [&](const std::string& key, const std::string& v) {
        cfg.protocol.threads = to_int(v, key);
    };

    num("fit.gain_min", &cfg.fit_bounds.gain_min);
    num("fit.gain_max", &cfg.fit_bounds.gain_max);
    num("fit.lambda_min", &cfg.fit_bounds.lambda_min);
    num("fit.lambda_max", &cfg.fit_bounds.lambda_max);
    handlers["fit.grid_points"] = [&](const std::string& key, const std::string& v) {
        cfg.fit_options.grid_points = to_int(v, key);
    };
    handlers["fit.max_simulations"] = [&](const std::string& key, const std::string& v) {
        cfg.fit_options.max_simulations = to_int(v, key);
    };
    num("fit.step_tol", &cfg.fit_options.step_tol);

    bool shared_reflex_set = false;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.rfind("muscle.", 0) == 0) {
                muscle_index(section.substr(7)); // validates the name
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string full_key = section.empty() ? key : section + "." + key;
        const auto it = handlers.find(full_key);
        if (it == handlers.end()) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": unknown key '" + full_key + "'");
        }
        if (full_key.rfind("reflex.", 0) == 0 && full_key.find('.', 7) == std::string::npos) {
            shared_reflex_set = true;
        }
        it->second(full_key, value);
    }

    // rebuild units with derived quantities
    for (std::size_t i = 0; i < drafts.size(); ++i) {
        const MuscleDraft& d = drafts[i];
        MuscleParams m = make_muscle(names[i], d.l0, d.lr, d.v_max, d.f_max, d.curves);
        m.tau_act = d.tau_act;
        m.tau_deact = d.tau_deact;
        m.validate();
        cfg.sim.units[i].muscle = std::move(m);
        cfg.sim.units[i].path = solve_equal_coefficient_path(d.lr, d.theta_init_ref);
        cfg.sim.units[i].reflex = d.reflex_overridden ? d.reflex
                                  : shared_reflex_set ? shared_reflex
                                                      : cfg.sim.units[i].reflex;
        cfg.sim.units[i].reflex.validate();
    }
    cfg.sim.validate();
    return cfg;
}

AppConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string default_config_text() {
    const AppConfig cfg;
    const auto& sim = cfg.sim;
    std::string out;
    auto line = [&](const std::string& key, const std::string& value) {
        out += key + " = " + value + "\n";
    };
    auto numline = [&](const std::string& key, double v) { line(key, format_number(v)); };

    out += "# elbowsim configuration (defaults)\n\n[simulation]\n";
    numline("dt", sim.dt);
    numline("record_decimation", sim.record_decimation);

    out += "\n[profile]\n";
    numline("theta_init_deg", sim.profile.theta_init * kRadToDeg);
    numline("theta_final_deg", sim.profile.theta_final * kRadToDeg);
    numline("omega_dps", sim.profile.omega * kRadToDeg);
    numline("t_start_s", sim.profile.t_start);
    numline("t_hold_s", sim.profile.t_hold);

    out += "\n[joint]\n";
    numline("inertia", sim.joint.inertia);
    numline("damping", sim.joint.damping);
    numline("k_elastic_1", sim.joint.k_elastic_1);
    numline("k_elastic_2", sim.joint.k_elastic_2);
    numline("theta_elastic_ref_deg", sim.joint.theta_elastic_ref * kRadToDeg);
    numline("theta_full_ext_deg", sim.joint.theta_full_ext * kRadToDeg);

    out += "\n[pid]\n";
    numline("kp", sim.gains.kp);
    numline("ki", sim.gains.ki);
    numline("kd", sim.gains.kd);
    numline("integral_limit", sim.gains.integral_limit);

    out += "\n# shared stretch-reflex parameters; override per muscle in\n"
           "# [reflex.lhb] / [reflex.shb] / [reflex.brd]\n[reflex]\n";
    const auto& r = sim.units.front().reflex;
    numline("C", r.C);
    numline("G_l", r.G_l);
    numline("G_v", r.G_v);
    numline("G_f", r.G_f);
    numline("lambda_l", r.lambda_l);
    numline("lambda_v", r.lambda_v);
    numline("lambda_f", r.lambda_f);
    numline("tau_s", r.tau);

    for (const auto& u : sim.units) {
        out += "\n[muscle." + u.muscle.name + "]\n";
        numline("l0_m", u.muscle.l0);
        numline("lr_m", u.muscle.lr);
        numline("v_max_mps", u.muscle.v_max);
        numline("f_max_N", u.muscle.f_max);
        numline("tau_act_s", u.muscle.tau_act);
        numline("tau_deact_s", u.muscle.tau_deact);
        numline("theta_init_ref_deg", u.path.theta_init_ref * kRadToDeg);
        numline("fl_width", u.muscle.curves.fl_width);
        numline("fv_ecc_max", u.muscle.curves.fv_ecc_max);
        numline("fv_cc_curvature", u.muscle.curves.fv_cc_curvature);
        numline("k_pe", u.muscle.curves.k_pe);
        numline("f_pe_scale", u.muscle.curves.f_pe_scale);
    }

    out += "\n[protocol]\n";
    line("model", to_string(cfg.protocol.model));
    line("gains", join(cfg.protocol.gains));
    line("lambdas", join(cfg.protocol.lambdas));
    line("velocities_dps", join(cfg.protocol.velocities_dps));
    line("output_dir", cfg.protocol.output_dir);
    numline("threads", cfg.protocol.threads);

    out += "\n[fit]\n";
    numline("gain_min", cfg.fit_bounds.gain_min);
    numline("gain_max", cfg.fit_bounds.gain_max);
    numline("lambda_min", cfg.fit_bounds.lambda_min);
    numline("lambda_max", cfg.fit_bounds.lambda_max);
    numline("grid_points", cfg.fit_options.grid_points);
    numline("max_simulations", cfg.fit_options.max_simulations);
    numline("step_tol", cfg.fit_options.step_tol);
    return out;
}

} // namespace elbowsim
