#include "dcavity/device.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace dcavity {

std::string ValidationReport::to_string() const {
    if (issues.empty()) {
        return "ok";
    }
    std::ostringstream os;
    for (const auto& issue : issues) {
        os << issue.field << ": " << issue.message << "\n";
    }
    return os.str();
}

namespace {

void check_beam_splitter(const BeamSplitterSpec& bs, const std::string& name,
                         std::vector<ValidationIssue>& issues) {
    const double sum = bs.R + bs.T + bs.A;
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "R+T+A=1 violated (sum = " << sum << ")";
        issues.push_back({name, os.str()});
    }
    auto in_unit = [&](double v, const char* f) {
        if (!(v >= 0.0 && v <= 1.0)) {
            std::ostringstream os;
            os << f << " outside [0,1] (value " << v << ")";
            issues.push_back({name, os.str()});
        }
    };
    in_unit(bs.R, "R");
    in_unit(bs.T, "T");
    in_unit(bs.A, "A");
}

void check_mirror(const MirrorSpec& m, const std::string& name,
                  std::vector<ValidationIssue>& issues) {
    if (!(m.A >= 0.0 && m.A <= 1.0)) {
        std::ostringstream os;
        os << "A outside [0,1] (value " << m.A << ")";
        issues.push_back({name, os.str()});
    }
}

// Distance of x from the nearest integer, relative to x.
double relative_mode_mismatch(double x) {
    const double r = std::round(x);
    if (r == 0.0) {
        return 1.0;
    }
    return std::abs(x - r) / std::abs(x);
}

} // namespace

ValidationReport validate(const DeviceParams& p, bool require_resonance) {
    ValidationReport report;
    check_beam_splitter(p.bs1, "bs1", report.issues);
    check_beam_splitter(p.bs2, "bs2", report.issues);
    check_mirror(p.m1, "mirror1", report.issues);
    check_mirror(p.m2, "mirror2", report.issues);
    check_mirror(p.m3, "mirror3", report.issues);
    check_mirror(p.m4, "mirror4", report.issues);

    const auto segs = p.geometry.segments();
    static const char* seg_names[5] = {"geometry.L1_m", "geometry.L2_m", "geometry.L3_m",
                                       "geometry.L4_m", "geometry.L5_m"};
    for (int i = 0; i < 5; ++i) {
        if (!(segs[static_cast<std::size_t>(i)] > 0.0)) {
            std::ostringstream os;
            os << "lengths > 0 violated (value " << segs[static_cast<std::size_t>(i)] << ")";
            report.issues.push_back({seg_names[i], os.str()});
        }
    }
    if (!(p.geometry.lambda0 > 0.0)) {
        report.issues.push_back({"geometry.lambda0_m", "lambda0 must be > 0"});
    }

    if (require_resonance && report.ok()) {
        const double k0 = p.geometry.k0();
        const double nv = k0 * p.geometry.vertical_length() / pi;
        const double nh = k0 * p.geometry.horizontal_length() / pi;
        if (relative_mode_mismatch(nv) > 1e-9) {
            report.issues.push_back({"geometry", "k0*L_V is not an integer multiple of pi"});
        }
        if (relative_mode_mismatch(nh) > 1e-9) {
            report.issues.push_back({"geometry", "k0*L_H is not an integer multiple of pi"});
        }
    }
    return report;
}

namespace {

// Builds the published cavity from half-wave counts, L_i = m_i * lambda0/2,
// so the resonance condition holds without rounding drift.
DeviceParams cavity_from_halfwaves(double lambda0, const std::array<long, 5>& m) {
    DeviceParams p;
    p.geometry.lambda0 = lambda0;
    p.geometry.L1 = static_cast<double>(m[0]) * lambda0 / 2.0;
    p.geometry.L2 = static_cast<double>(m[1]) * lambda0 / 2.0;
    p.geometry.L3 = static_cast<double>(m[2]) * lambda0 / 2.0;
    p.geometry.L4 = static_cast<double>(m[3]) * lambda0 / 2.0;
    p.geometry.L5 = static_cast<double>(m[4]) * lambda0 / 2.0;
    return p;
}

// L_V = 120 lambda0 (n_V = 240 half waves), L_H = 30 lambda0 (n_H = 60),
// split L1 = L4 = L5 = 40 lambda0, L2 = L3 = 15 lambda0.
constexpr std::array<long, 5> kFigureHalfwaves = {80, 30, 30, 80, 80};

DeviceParams figure_cavity(double R1, double R2, double mirror_absorption) {
    DeviceParams p = cavity_from_halfwaves(795e-9, kFigureHalfwaves);
    p.bs1 = {R1, 1.0 - R1, 0.0};
    p.bs2 = {R2, 1.0 - R2, 0.0};
    p.m1.A = p.m2.A = p.m3.A = p.m4.A = mirror_absorption;
    return p;
}

EitMediumParams rubidium_medium(const DeviceParams& device) {
    EitMediumParams m;
    m.density = 1e14 * 1e6; // 1e14 cm^-3 in m^-3
    m.mu13 = 1e-29;
    m.mu24 = 1e-29;
    m.gamma3 = 1e6;
    m.gamma4 = 1e6;
    m.rabi = 1e9;
    m.signal_detuning = 1e8;
    m.probe_detuning = 1e9;
    m.lambda = 795e-9;
    m.length = device.geometry.horizontal_length();
    m.cross_section = 1e-10;
    m.probe_duration = 1.0 / m.probe_detuning;
    return m;
}

} // namespace

Preset preset(const std::string& name) {
    Preset out;
    if (name == "fig2a") {
        out.device = figure_cavity(0.1, 1e-6, 1e-6);
    } else if (name == "fig2b") {
        out.device = figure_cavity(0.1, 1e-5, 1e-6);
    } else if (name == "fig3" || name == "fig4") {
        out.device = figure_cavity(0.1, 1e-6, 0.0);
    } else if (name == "rubidium-xpm") {
        out.device = figure_cavity(0.1, 1e-6, 0.0);
        out.medium = rubidium_medium(out.device);
    } else {
        throw std::invalid_argument("unknown preset name: " + name);
    }
    return out;
}

std::vector<std::string> preset_names() {
    return {"fig2a", "fig2b", "fig3", "fig4", "rubidium-xpm"};
}

ThinPlateResult thin_plate_reflectivity(double n, double d, double k) {
    if (d < 0.0) {
        throw std::invalid_argument("thin_plate_reflectivity: d must be >= 0");
    }
    if (n < 1.0) {
        throw std::invalid_argument("thin_plate_reflectivity: n must be >= 1");
    }
    if (!(k > 0.0)) {
        throw std::invalid_argument("thin_plate_reflectivity: k must be > 0");
    }
    ThinPlateResult res;
    // d / lambda; the printed k d with the estimate's k = 1/lambda.
    const double d_over_lambda = k * d / (2.0 * pi);
    const double amp = (n * n - 1.0) / std::sqrt(2.0) * d_over_lambda;
    res.R2 = amp * amp;
    res.thin_film_warning = (k * d > 0.1);
    return res;
}

namespace {

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct ConfigMap {
    std::map<std::string, double> values;

    double take(const std::string& key) {
        auto it = values.find(key);
        if (it == values.end()) {
            throw config_error("config missing key: " + key);
        }
        const double v = it->second;
        values.erase(it);
        return v;
    }
};

} // namespace

std::string config_text(const DeviceParams& p) {
    std::ostringstream os;
    os << "# double-cavity device configuration (SI units)\n";
    os << "geometry.L1_m = " << format_full(p.geometry.L1) << "\n";
    os << "geometry.L2_m = " << format_full(p.geometry.L2) << "\n";
    os << "geometry.L3_m = " << format_full(p.geometry.L3) << "\n";
    os << "geometry.L4_m = " << format_full(p.geometry.L4) << "\n";
    os << "geometry.L5_m = " << format_full(p.geometry.L5) << "\n";
    os << "geometry.lambda0_m = " << format_full(p.geometry.lambda0) << "\n";
    os << "bs1.R = " << format_full(p.bs1.R) << "\n";
    os << "bs1.T = " << format_full(p.bs1.T) << "\n";
    os << "bs1.A = " << format_full(p.bs1.A) << "\n";
    os << "bs2.R = " << format_full(p.bs2.R) << "\n";
    os << "bs2.T = " << format_full(p.bs2.T) << "\n";
    os << "bs2.A = " << format_full(p.bs2.A) << "\n";
    os << "mirror1.A = " << format_full(p.m1.A) << "\n";
    os << "mirror2.A = " << format_full(p.m2.A) << "\n";
    os << "mirror3.A = " << format_full(p.m3.A) << "\n";
    os << "mirror4.A = " << format_full(p.m4.A) << "\n";
    return os.str();
}

DeviceParams parse_config_text(const std::string& text) {
    ConfigMap cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        // trim
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error("config line " + std::to_string(lineno) +
                               ": expected key = value, got '" + line + "'");
        }
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(value);
        if (key.empty()) {
            throw config_error("config line " + std::to_string(lineno) + ": empty key");
        }
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(value, &pos);
        } catch (const std::exception&) {
            throw config_error("config key " + key + ": malformed number '" + value + "'");
        }
        if (pos != value.size()) {
            throw config_error("config key " + key + ": malformed number '" + value + "'");
        }
        if (cfg.values.count(key)) {
            throw config_error("config key " + key + ": duplicate entry");
        }
        cfg.values[key] = v;
    }

    DeviceParams p;
    p.geometry.L1 = cfg.take("geometry.L1_m");
    p.geometry.L2 = cfg.take("geometry.L2_m");
    p.geometry.L3 = cfg.take("geometry.L3_m");
    p.geometry.L4 = cfg.take("geometry.L4_m");
    p.geometry.L5 = cfg.take("geometry.L5_m");
    p.geometry.lambda0 = cfg.take("geometry.lambda0_m");
    p.bs1.R = cfg.take("bs1.R");
    p.bs1.T = cfg.take("bs1.T");
    p.bs1.A = cfg.take("bs1.A");
    p.bs2.R = cfg.take("bs2.R");
    p.bs2.T = cfg.take("bs2.T");
    p.bs2.A = cfg.take("bs2.A");
    p.m1.A = cfg.take("mirror1.A");
    p.m2.A = cfg.take("mirror2.A");
    p.m3.A = cfg.take("mirror3.A");
    p.m4.A = cfg.take("mirror4.A");
    if (!cfg.values.empty()) {
        throw config_error("config has unknown key: " + cfg.values.begin()->first);
    }

    const ValidationReport report = validate(p);
    if (!report.ok()) {
        throw config_error("config validation failed: " + report.issues.front().field + ": " +
                           report.issues.front().message);
    }
    return p;
}

DeviceParams load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open config file: " + path);
    }
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config_text(os.str());
}

void save_config(const DeviceParams& params, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw config_error("cannot write config file: " + path);
    }
    out << config_text(params);
}

} // namespace dcavity
