// Command-line front end: frequency response sweeps, pulse dynamics,
// intracavity fields, loss budgets, interaction-free-measurement fractions,
// and the EIT cross-phase-modulation feasibility report, emitted as CSV or
// JSON with a reproducibility manifest.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcavity/device.hpp"
#include "dcavity/errors.hpp"
#include "dcavity/intracavity.hpp"
#include "dcavity/loss.hpp"
#include "dcavity/oracle.hpp"
#include "dcavity/pulse.hpp"
#include "dcavity/spectral.hpp"
#include "dcavity/xpm.hpp"

namespace {

constexpr const char* kToolVersion = "dcavity 1.0.0";

// Worker count for sweeps; output ordering is by grid index either way.
unsigned sweep_threads() {
    const char* env = std::getenv("DCAVITY_THREADS");
    if (env == nullptr) {
        return 1;
    }
    const long v = std::strtol(env, nullptr, 10);
    return (v > 0 && v <= 256) ? static_cast<unsigned>(v) : 1;
}

using dcavity::DeviceParams;
using dcavity::EitMediumParams;
using json = nlohmann::json;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17e", v);
    return buf;
}

struct CommonOptions {
    std::string preset_name;
    std::string config_path;
    std::string out_path;
    std::string format = "csv";

    void add_to(CLI::App* cmd, bool with_format = true) {
        cmd->add_option("--preset", preset_name, "preset name (fig2a, fig2b, fig3, fig4, rubidium-xpm)");
        cmd->add_option("--config", config_path, "device configuration file");
        cmd->add_option("--out", out_path, "output path (default: stdout)");
        if (with_format) {
            cmd->add_option("--format", format, "csv or json")
                ->check(CLI::IsMember({"csv", "json"}));
        }
    }

    dcavity::Preset resolve() const {
        if (!preset_name.empty() && !config_path.empty()) {
            throw dcavity::config_error("--preset and --config are mutually exclusive");
        }
        if (!preset_name.empty()) {
            return dcavity::preset(preset_name);
        }
        if (!config_path.empty()) {
            dcavity::Preset p;
            p.device = dcavity::load_config(config_path);
            return p;
        }
        throw dcavity::config_error("one of --preset or --config is required");
    }
};

void write_output(const CommonOptions& opts, const std::string& command,
                  const json& resolved_params, const std::string& payload) {
    if (opts.out_path.empty()) {
        std::cout << payload;
        return;
    }
    {
        std::ofstream out(opts.out_path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write output file: " + opts.out_path);
        }
        out << payload;
    }
    json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["command"] = command;
    manifest["parameters"] = resolved_params;
    manifest["outputs"] = {opts.out_path};
    manifest["determinism"] = "seed-free unless --seed is given; identical manifests "
                              "produce byte-identical outputs";
    std::ofstream mout(opts.out_path + ".manifest.json", std::ios::binary);
    mout << manifest.dump(2) << "\n";
}

json device_json(const DeviceParams& p) {
    json j;
    j["bs1"] = {{"R", p.bs1.R}, {"T", p.bs1.T}, {"A", p.bs1.A}};
    j["bs2"] = {{"R", p.bs2.R}, {"T", p.bs2.T}, {"A", p.bs2.A}};
    j["mirrors"] = {{"A_M1", p.m1.A}, {"A_M2", p.m2.A}, {"A_M3", p.m3.A}, {"A_M4", p.m4.A}};
    j["geometry"] = {{"L1_m", p.geometry.L1}, {"L2_m", p.geometry.L2},
                     {"L3_m", p.geometry.L3}, {"L4_m", p.geometry.L4},
                     {"L5_m", p.geometry.L5}, {"lambda0_m", p.geometry.lambda0}};
    return j;
}

void require_valid(const DeviceParams& p) {
    const auto report = dcavity::validate(p);
    if (!report.ok()) {
        throw dcavity::config_error("device validation failed:\n" + report.to_string());
    }
}

double resolve_tau_s(const DeviceParams& device, double tau_s, double tau_s_rel) {
    if (tau_s > 0.0 && tau_s_rel > 0.0) {
        throw dcavity::config_error("--tau-s and --tau-s-rel are mutually exclusive");
    }
    if (tau_s > 0.0) {
        return tau_s;
    }
    const auto d = dcavity::device_delay(device);
    if (d.infinite) {
        throw dcavity::config_error("tau_D is infinite (R2 = 0); give --tau-s explicitly");
    }
    return (tau_s_rel > 0.0 ? tau_s_rel : 1.0) * d.tau_D;
}

json margins_json(const std::vector<dcavity::ConditionMargin>& conditions) {
    json arr = json::array();
    for (const auto& c : conditions) {
        arr.push_back({{"condition", c.label},
                       {"relation", c.relation},
                       {"lhs", c.lhs},
                       {"rhs", c.rhs},
                       {"margin_ratio", c.ratio},
                       {"status", dcavity::to_string(c.status)}});
    }
    return arr;
}

json xpm_json(const dcavity::XpmReport& r) {
    json j;
    j["dphi_rad"] = r.dphi;
    j["dphi_numeric_rad"] = r.dphi_numeric;
    j["v_g_m_per_s"] = r.v_g;
    j["alpha1_per_m"] = r.alpha1;
    j["alpha1_L"] = r.alpha1_L;
    j["P2"] = r.P2;
    j["P2_over_dphi"] = r.P2_over_dphi;
    j["energy_integral_V2m2s"] = r.energy_integral;
    j["tau_D_s"] = r.tau_D;
    j["tau_s_s"] = r.tau_s;
    j["broadening_factor"] = r.broadening;
    j["pi_over_dphi"] = r.gap_to_pi;
    j["required_R1_over_R2_for_pi"] = r.required_R1_over_R2;
    j["g11_resonant_approx"] = r.g11_resonant_approx;
    j["g21_resonant_approx"] = r.g21_resonant_approx;
    j["resonant_reflection_probability"] = r.resonant_reflection_probability;
    j["conditions"] = margins_json(r.conditions);
    j["free_medium"] = {{"n_K", r.free_medium.n_K},
                        {"length_for_pi_m", r.free_medium.length_for_pi},
                        {"switching_time_s", r.free_medium.switching_time},
                        {"cavity_switching_time_s", r.free_medium.cavity_switching_time},
                        {"rayleigh_length_m", r.free_medium.rayleigh_length}};
    return j;
}

std::string xpm_text(const dcavity::XpmReport& r) {
    std::ostringstream os;
    os << "conditional cross-phase-modulation report\n";
    os << "  dphi                = " << fmt(r.dphi) << " rad\n";
    if (r.dphi_numeric != 0.0) {
        os << "  dphi (numeric)      = " << fmt(r.dphi_numeric) << " rad\n";
    }
    os << "  pi / dphi           = " << fmt(r.gap_to_pi)
       << "  (R1/R2 needed for pi: " << fmt(r.required_R1_over_R2) << ")\n";
    os << "  v_g                 = " << fmt(r.v_g) << " m/s\n";
    os << "  alpha1              = " << fmt(r.alpha1) << " 1/m  (alpha1 L = " << fmt(r.alpha1_L)
       << ")\n";
    os << "  P2                  = " << fmt(r.P2) << "\n";
    os << "  P2/dphi             = " << fmt(r.P2_over_dphi) << "\n";
    os << "  energy integral     = " << fmt(r.energy_integral) << " V^2 m^-2 s\n";
    os << "  tau_D               = " << fmt(r.tau_D) << " s, tau_s = " << fmt(r.tau_s) << " s\n";
    os << "  broadening factor   = " << fmt(r.broadening) << "\n";
    os << "  resonant G11 ~ 1-R1^2/8 = " << fmt(r.g11_resonant_approx)
       << ", G21 ~ R1/2 = " << fmt(r.g21_resonant_approx)
       << ", reflection ~ R1^2/4 = " << fmt(r.resonant_reflection_probability) << "\n";
    os << "conditions:\n";
    for (const auto& c : r.conditions) {
        os << "  [" << dcavity::to_string(c.status) << "] " << c.label << ": lhs = " << fmt(c.lhs)
           << ", rhs = " << fmt(c.rhs) << ", ratio = " << fmt(c.ratio) << "\n";
    }
    const auto& f = r.free_medium;
    os << "free-medium comparison:\n";
    os << "  n_K = " << fmt(f.n_K) << ", l_0(pi) = " << fmt(f.length_for_pi)
       << " m, switching = " << fmt(f.switching_time)
       << " s (cavity: " << fmt(f.cavity_switching_time)
       << " s), Rayleigh length = " << fmt(f.rayleigh_length) << " m\n";
    return os.str();
}

EitMediumParams resolve_medium(const dcavity::Preset& preset) {
    if (preset.medium) {
        return *preset.medium;
    }
    // Config-driven runs fall back to the rubidium medium sized to this
    // device's horizontal cavity.
    EitMediumParams m = dcavity::preset("rubidium-xpm").medium.value();
    m.length = preset.device.geometry.horizontal_length();
    return m;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"double-cavity EIT-like resonator simulator"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    // response
    auto* response = app.add_subcommand("response", "frequency response sweep (CSV)");
    CommonOptions response_opts;
    response_opts.add_to(response, false);
    double kmin = 0.0, kmax = 0.0;
    std::size_t points = 2001;
    response->add_option("--kmin", kmin, "sweep start, rad/m");
    response->add_option("--kmax", kmax, "sweep end, rad/m");
    response->add_option("--points", points, "number of grid points");

    // pulse
    auto* pulse_cmd = app.add_subcommand("pulse", "time-domain pulse propagation (CSV)");
    CommonOptions pulse_opts;
    pulse_opts.add_to(pulse_cmd, false);
    double tau_s = 0.0, tau_s_rel = 0.0;
    std::size_t samples = std::size_t(1) << 16;
    pulse_cmd->add_option("--tau-s", tau_s, "pulse amplitude half-width, s");
    pulse_cmd->add_option("--tau-s-rel", tau_s_rel, "pulse half-width in units of tau_D");
    pulse_cmd->add_option("--samples", samples, "time grid samples (power of two)");

    // intracavity
    auto* intra = app.add_subcommand("intracavity", "per-segment amplitudes (CSV)");
    CommonOptions intra_opts;
    intra_opts.add_to(intra, false);
    double k_eval = 0.0;
    intra->add_option("--k", k_eval, "wavenumber, rad/m (default: k0)");

    // loss
    auto* loss_cmd = app.add_subcommand("loss", "wave-packet absorption sweep (CSV)");
    CommonOptions loss_opts;
    loss_opts.add_to(loss_cmd, false);
    std::string sweep = "horizontal";
    double amin = 1e-8, amax = 1.0;
    std::size_t loss_points = 33;
    double loss_tau_rel = 1.0;
    loss_cmd->add_option("--sweep", sweep, "mirror set: horizontal (M1,M3) or vertical (M2,M4)")
        ->check(CLI::IsMember({"horizontal", "vertical"}));
    loss_cmd->add_option("--amin", amin, "smallest absorption coefficient");
    loss_cmd->add_option("--amax", amax, "largest absorption coefficient");
    loss_cmd->add_option("--points", loss_points, "sweep points (log-spaced)");
    loss_cmd->add_option("--tau-s-rel", loss_tau_rel, "packet half-width in units of tau_D");

    // ifm
    auto* ifm_cmd = app.add_subcommand("ifm", "interaction-free-measurement fractions");
    CommonOptions ifm_opts;
    ifm_opts.add_to(ifm_cmd);
    std::string absorber = "m1";
    ifm_cmd->add_option("--absorber", absorber, "which horizontal mirror absorbs: m1, m3, both")
        ->check(CLI::IsMember({"m1", "m3", "both"}));

    // xpm / feasibility
    auto* xpm_cmd = app.add_subcommand("xpm", "conditional phase-shift report");
    CommonOptions xpm_opts;
    xpm_opts.add_to(xpm_cmd);
    double xpm_tau_s = 0.0, xpm_tau_rel = 0.0;
    bool xpm_numeric = false;
    xpm_cmd->add_option("--tau-s", xpm_tau_s, "signal half-width, s (default tau_D/sqrt(6))");
    xpm_cmd->add_option("--tau-s-rel", xpm_tau_rel, "signal half-width in units of tau_D");
    xpm_cmd->add_flag("--numeric", xpm_numeric, "also evaluate the spectral-synthesis phase shift");

    auto* feas = app.add_subcommand("feasibility", "full parameter-condition report");
    CommonOptions feas_opts;
    feas_opts.add_to(feas);
    double feas_tau_s = 0.0, feas_tau_rel = 0.0;
    feas->add_option("--tau-s", feas_tau_s, "signal half-width, s (default tau_D/sqrt(6))");
    feas->add_option("--tau-s-rel", feas_tau_rel, "signal half-width in units of tau_D");

    // oracle-check
    auto* oracle_cmd = app.add_subcommand("oracle-check",
                                          "compare the scattering matrix with the round-trip oracle");
    CommonOptions oracle_opts;
    oracle_opts.add_to(oracle_cmd, false);
    std::size_t oracle_draws = 5;
    unsigned oracle_seed = 12345;
    double oracle_k = 0.0;
    oracle_cmd->add_option("--draws", oracle_draws, "random wavenumber draws");
    oracle_cmd->add_option("--seed", oracle_seed, "random seed");
    oracle_cmd->add_option("--k", oracle_k, "check one wavenumber only, rad/m");

    try {
        app.parse(argc, argv);

        if (response->parsed()) {
            const auto preset = response_opts.resolve();
            require_valid(preset.device);
            const double k0 = preset.device.geometry.k0();
            if (kmin == 0.0 || kmax == 0.0) {
                const auto est = dcavity::splitting_estimate(preset.device);
                const double span = est.degenerate ? 1e-4 * k0 : 5.0 * est.delta_k;
                kmin = k0 - span;
                kmax = k0 + span;
            }
            const auto rows =
                dcavity::response_sweep(preset.device, {kmin, kmax, points}, sweep_threads());
            std::ostringstream os;
            os << "k_rad_per_m, delta_k_over_k0, re_g11, im_g11, abs_g11, abs_g12, abs_g21, "
                  "p_absorb_a\n";
            for (const auto& row : rows) {
                os << fmt(row.k) << ", " << fmt((row.k - k0) / k0) << ", "
                   << fmt(row.G.g11.real()) << ", " << fmt(row.G.g11.imag()) << ", "
                   << fmt(std::abs(row.G.g11)) << ", " << fmt(std::abs(row.G.g12)) << ", "
                   << fmt(std::abs(row.G.g21)) << ", " << fmt(row.p_absorb_a) << "\n";
            }
            json params = device_json(preset.device);
            params["kmin"] = kmin;
            params["kmax"] = kmax;
            params["points"] = points;
            write_output(response_opts, "response", params, os.str());
        } else if (pulse_cmd->parsed()) {
            const auto preset = pulse_opts.resolve();
            require_valid(preset.device);
            const double ts = resolve_tau_s(preset.device, tau_s, tau_s_rel);
            dcavity::PulseSpec spec{preset.device.geometry.k0(), ts, 1.0};
            dcavity::TimeGrid grid = dcavity::default_time_grid(preset.device, spec);
            grid.samples = samples;
            const auto rec = dcavity::propagate_pulse(preset.device, spec, grid);
            std::ostringstream os;
            os << "t_s, abs2_in, abs2_out_a, abs2_out_b, frac_front, frac_H, frac_V, "
                  "frac_behind\n";
            for (std::size_t j = 0; j < rec.t.size(); ++j) {
                os << fmt(rec.t[j]) << ", " << fmt(std::norm(rec.input[j])) << ", "
                   << fmt(std::norm(rec.out_a[j])) << ", " << fmt(std::norm(rec.out_b[j]))
                   << ", " << fmt(rec.frac_front[j]) << ", " << fmt(rec.frac_inside_h[j]) << ", "
                   << fmt(rec.frac_inside_v[j]) << ", " << fmt(rec.frac_behind[j]) << "\n";
            }
            json params = device_json(preset.device);
            params["tau_s"] = ts;
            params["samples"] = samples;
            write_output(pulse_opts, "pulse", params, os.str());
        } else if (intra->parsed()) {
            const auto preset = intra_opts.resolve();
            require_valid(preset.device);
            const double k = (k_eval > 0.0) ? k_eval : preset.device.geometry.k0();
            const auto s = dcavity::segment_amplitudes(preset.device, k, 1.0, 0.0);
            std::ostringstream os;
            os << "segment, re, im, abs2_ratio_to_input\n";
            const std::pair<const char*, dcavity::cdouble> rows[] = {
                {"a12", s.a12},   {"a21", s.a21},   {"a1M4", s.a1M4}, {"aM41", s.aM41},
                {"a2M1", s.a2M1}, {"aM12", s.aM12}, {"a2M2", s.a2M2}, {"aM22", s.aM22},
                {"a2M3", s.a2M3}, {"aM32", s.aM32}};
            for (const auto& [name, v] : rows) {
                os << name << ", " << fmt(v.real()) << ", " << fmt(v.imag()) << ", "
                   << fmt(std::norm(v)) << "\n";
            }
            json params = device_json(preset.device);
            params["k"] = k;
            write_output(intra_opts, "intracavity", params, os.str());
        } else if (loss_cmd->parsed()) {
            const auto preset = loss_opts.resolve();
            require_valid(preset.device);
            const auto delay = dcavity::device_delay(preset.device);
            if (delay.infinite) {
                throw dcavity::config_error("loss sweep needs R2 > 0");
            }
            const double lmin = std::log(amin), lmax = std::log(amax);
            std::vector<double> avals(loss_points), pbars(loss_points);
            for (std::size_t i = 0; i < loss_points; ++i) {
                avals[i] = std::exp(lmin + (lmax - lmin) * static_cast<double>(i) /
                                               static_cast<double>(loss_points - 1));
            }
            auto eval = [&](std::size_t begin, std::size_t end) {
                for (std::size_t i = begin; i < end; ++i) {
                    DeviceParams dev = preset.device;
                    if (sweep == "horizontal") {
                        dev.m1.A = dev.m3.A = avals[i];
                    } else {
                        dev.m2.A = dev.m4.A = avals[i];
                    }
                    const dcavity::PulseSpec packet{dev.geometry.k0(),
                                                    loss_tau_rel * delay.tau_D, 1.0};
                    pbars[i] = dcavity::wavepacket_absorption(dev, packet);
                }
            };
            const unsigned workers = std::max(
                1u, std::min<unsigned>(sweep_threads(), static_cast<unsigned>(loss_points)));
            if (workers == 1) {
                eval(0, loss_points);
            } else {
                std::vector<std::thread> pool;
                const std::size_t chunk = (loss_points + workers - 1) / workers;
                for (unsigned w = 0; w < workers; ++w) {
                    const std::size_t b = static_cast<std::size_t>(w) * chunk;
                    const std::size_t e = std::min(loss_points, b + chunk);
                    if (b < e) {
                        pool.emplace_back(eval, b, e);
                    }
                }
                for (auto& t : pool) {
                    t.join();
                }
            }
            std::ostringstream os;
            os << "A_value, which_mirrors, P_bar\n";
            for (std::size_t i = 0; i < loss_points; ++i) {
                os << fmt(avals[i]) << ", " << sweep << ", " << fmt(pbars[i]) << "\n";
            }
            json params = device_json(preset.device);
            params["sweep"] = sweep;
            params["amin"] = amin;
            params["amax"] = amax;
            params["points"] = loss_points;
            params["tau_s_rel"] = loss_tau_rel;
            write_output(loss_opts, "loss", params, os.str());
        } else if (ifm_cmd->parsed()) {
            const auto preset = ifm_opts.resolve();
            DeviceParams dev = preset.device;
            if (absorber == "m1" || absorber == "both") {
                dev.m1.A = 1.0;
            }
            if (absorber == "m3" || absorber == "both") {
                dev.m3.A = 1.0;
            }
            require_valid(dev);
            const auto f = dcavity::ifm_fractions(dev);
            std::ostringstream os;
            if (ifm_opts.format == "json") {
                json j = {{"transmitted_closed", f.transmitted_closed},
                          {"reflected_closed", f.reflected_closed},
                          {"lost_closed", f.lost_closed},
                          {"transmitted_exact", f.transmitted_exact},
                          {"reflected_exact", f.reflected_exact},
                          {"lost_exact", f.lost_exact}};
                os << j.dump(2) << "\n";
            } else {
                os << "fraction, closed_form, exact\n";
                os << "transmitted, " << fmt(f.transmitted_closed) << ", "
                   << fmt(f.transmitted_exact) << "\n";
                os << "reflected, " << fmt(f.reflected_closed) << ", " << fmt(f.reflected_exact)
                   << "\n";
                os << "lost, " << fmt(f.lost_closed) << ", " << fmt(f.lost_exact) << "\n";
            }
            json params = device_json(dev);
            params["absorber"] = absorber;
            write_output(ifm_opts, "ifm", params, os.str());
        } else if (xpm_cmd->parsed() || feas->parsed()) {
            const bool is_xpm = xpm_cmd->parsed();
            const CommonOptions& opts = is_xpm ? xpm_opts : feas_opts;
            const auto preset = opts.resolve();
            require_valid(preset.device);
            const EitMediumParams medium = resolve_medium(preset);
            const auto mrep = dcavity::validate(medium);
            if (!mrep.ok()) {
                throw dcavity::config_error("medium validation failed:\n" + mrep.to_string());
            }
            const auto delay = dcavity::device_delay(preset.device);
            double ts = is_xpm ? xpm_tau_s : feas_tau_s;
            const double ts_rel = is_xpm ? xpm_tau_rel : feas_tau_rel;
            if (ts <= 0.0) {
                ts = (ts_rel > 0.0 ? ts_rel : 1.0 / std::sqrt(6.0)) * delay.tau_D;
            }
            dcavity::XpmReport rep = dcavity::feasibility_report(preset.device, medium, ts);
            if (is_xpm && xpm_numeric) {
                rep.dphi_numeric = dcavity::phase_shift_numeric(
                    preset.device, medium, {preset.device.geometry.k0(), ts, 1.0});
            }
            std::ostringstream os;
            if (opts.format == "json") {
                os << xpm_json(rep).dump(2) << "\n";
            } else {
                os << xpm_text(rep);
            }
            json params = device_json(preset.device);
            params["tau_s"] = ts;
            write_output(opts, is_xpm ? "xpm" : "feasibility", params, os.str());
        } else if (oracle_cmd->parsed()) {
            const auto preset = oracle_opts.resolve();
            require_valid(preset.device);
            const double k0 = preset.device.geometry.k0();
            std::mt19937 rng(oracle_seed);
            std::uniform_real_distribution<double> dk(-2e3, 2e3);
            std::ostringstream os;
            os << "k_rad_per_m, abs_err_g11, abs_err_g21, iterations\n";
            double worst = 0.0;
            const std::size_t n = (oracle_k > 0.0) ? 1 : oracle_draws;
            for (std::size_t i = 0; i < n; ++i) {
                const double k = (oracle_k > 0.0) ? oracle_k : k0 + dk(rng);
                const auto g = dcavity::g_matrix(preset.device, k);
                const auto o = dcavity::oracle_steady_state(preset.device, k, 1.0, 0.0);
                const double e11 = std::abs(o.out_a - g.g11);
                const double e21 = std::abs(o.out_b - g.g21);
                worst = std::max(worst, std::max(e11, e21));
                os << fmt(k) << ", " << fmt(e11) << ", " << fmt(e21) << ", " << o.iterations
                   << "\n";
            }
            os << "# worst deviation: " << fmt(worst) << "\n";
            json params = device_json(preset.device);
            params["draws"] = oracle_draws;
            params["seed"] = oracle_seed;
            write_output(oracle_opts, "oracle-check", params, os.str());
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const dcavity::numerical_guard_error& e) {
        std::cerr << "numerical guard: " << e.what() << "\n";
        return 3;
    } catch (const dcavity::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
