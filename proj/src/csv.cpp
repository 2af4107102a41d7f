#include "elbowsim/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace elbowsim {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, sep)) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

double parse_double(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) {
            ++pos;
        }
        if (pos != s.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("bad numeric field '" + s + "' in " + context);
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write failed for '" + path + "'");
    }
}

} // namespace

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string trial_csv_header(const TrialRecord& record) {
    std::string header = "t_s,theta_rad,theta_dot_rps,torque_robot_Nm";
    for (const auto& u : record.config.units) {
        const std::string& n = u.muscle.name;
        header += "," + n + "_l_m," + n + "_v_mps," + n + "_f_N," + n + "_E," + n + "_a";
    }
    return header;
}

std::string trial_csv_string(const TrialRecord& record) {
    std::string out = trial_csv_header(record);
    out += '\n';
    for (const auto& row : record.rows) {
        out += format_number(row.t);
        out += ',';
        out += format_number(row.theta);
        out += ',';
        out += format_number(row.theta_dot);
        out += ',';
        out += format_number(row.torque_robot);
        for (const auto& m : row.m) {
            out += ',';
            out += format_number(m.l);
            out += ',';
            out += format_number(m.v);
            out += ',';
            out += format_number(m.f);
            out += ',';
            out += format_number(m.E);
            out += ',';
            out += format_number(m.a);
        }
        out += '\n';
    }
    return out;
}

void write_trial_csv(const TrialRecord& record, const std::string& path) {
    write_file(path, trial_csv_string(record));
}

TrialCsvData read_trial_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open trial CSV '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty trial CSV '" + path + "'");
    }
    const auto cols = split(line, ',');
    if (cols.size() < 4 || cols[0] != "t_s" || cols[1] != "theta_rad") {
        throw std::runtime_error("unrecognized trial CSV header in '" + path + "'");
    }
    if ((cols.size() - 4) % 5 != 0) {
        throw std::runtime_error("trial CSV '" + path + "' has a malformed muscle column group");
    }
    TrialCsvData data;
    for (std::size_t i = 4; i + 5 <= cols.size(); i += 5) {
        const std::string& c = cols[i];
        const auto pos = c.rfind("_l_m");
        if (pos == std::string::npos || pos + 4 != c.size()) {
            throw std::runtime_error("unexpected muscle column '" + c + "' in '" + path + "'");
        }
        data.muscle_names.push_back(c.substr(0, pos));
    }
    data.E.resize(data.muscle_names.size());
    data.a.resize(data.muscle_names.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != cols.size()) {
            throw std::runtime_error("row " + std::to_string(line_no) + " of '" + path +
                                     "' has " + std::to_string(fields.size()) + " fields");
        }
        const std::string ctx = path + ":" + std::to_string(line_no);
        data.t.push_back(parse_double(fields[0], ctx));
        data.theta.push_back(parse_double(fields[1], ctx));
        data.theta_dot.push_back(parse_double(fields[2], ctx));
        data.torque_robot.push_back(parse_double(fields[3], ctx));
        for (std::size_t mi = 0; mi < data.muscle_names.size(); ++mi) {
            data.E[mi].push_back(parse_double(fields[4 + 5 * mi + 3], ctx));
            data.a[mi].push_back(parse_double(fields[4 + 5 * mi + 4], ctx));
        }
    }
    return data;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
    std::string out = "model,G_l,G_v,G_f,lambda_l,lambda_v,lambda_f,velocity_dps,"
                      "catch_angle_deg,peak_torque_Nm,reflex_stiffness,saturated,diverged\n";
    for (const auto& r : rows) {
        out += r.model;
        for (double v : {r.G_l, r.G_v, r.G_f, r.lambda_l, r.lambda_v, r.lambda_f,
                         r.velocity_dps}) {
            out += ',';
            out += format_number(v);
        }
        out += ',';
        if (r.catch_angle_deg) {
            out += format_number(*r.catch_angle_deg);
        }
        out += ',';
        out += format_number(r.peak_torque_Nm);
        out += ',';
        if (r.reflex_stiffness) {
            out += format_number(*r.reflex_stiffness);
        }
        out += r.saturated ? ",1" : ",0";
        out += r.diverged ? ",1\n" : ",0\n";
    }
    write_file(path, out);
}

SampledCurve read_reference_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open reference CSV '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty reference CSV '" + path + "'");
    }
    std::vector<std::pair<double, double>> points;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 2) {
            throw std::runtime_error("reference CSV '" + path + "' row " +
                                     std::to_string(line_no) + " needs two columns");
        }
        const std::string ctx = path + ":" + std::to_string(line_no);
        points.emplace_back(parse_double(fields[0], ctx), parse_double(fields[1], ctx));
    }
    if (points.empty()) {
        throw std::runtime_error("reference CSV '" + path + "' has no data rows");
    }
    std::sort(points.begin(), points.end());
    SampledCurve curve;
    for (const auto& [theta, torque] : points) {
        if (!curve.theta_deg.empty() && theta <= curve.theta_deg.back()) {
            throw std::runtime_error("reference CSV '" + path + "' has duplicate angle " +
                                     format_number(theta));
        }
        curve.theta_deg.push_back(theta);
        curve.torque.push_back(torque);
    }
    return curve;
}

void write_reference_csv(const SampledCurve& curve, const std::string& path) {
    std::string out = "theta_deg,torque_Nm\n";
    for (std::size_t i = 0; i < curve.theta_deg.size(); ++i) {
        out += format_number(curve.theta_deg[i]);
        out += ',';
        out += format_number(curve.torque[i]);
        out += '\n';
    }
    write_file(path, out);
}

} // namespace elbowsim
