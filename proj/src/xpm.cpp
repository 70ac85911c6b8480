#include "dcavity/xpm.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dcavity/spectral.hpp"

namespace dcavity {

ValidationReport validate(const EitMediumParams& m) {
    ValidationReport rep;
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0)) {
            std::ostringstream os;
            os << "must be > 0 (value " << v << ")";
            rep.issues.push_back({name, os.str()});
        }
    };
    positive(m.density, "medium.N");
    positive(m.mu13, "medium.mu13");
    positive(m.mu24, "medium.mu24");
    positive(m.gamma3, "medium.gamma3");
    positive(m.gamma4, "medium.gamma4");
    positive(m.rabi, "medium.Omega");
    positive(m.signal_detuning, "medium.Delta");
    positive(m.probe_detuning, "medium.delta");
    positive(m.lambda, "medium.lambda");
    positive(m.length, "medium.L");
    positive(m.cross_section, "medium.S");
    positive(m.probe_duration, "medium.tau_p");
    if (rep.ok() && m.signal_detuning <= m.gamma4) {
        rep.issues.push_back({"medium.Delta", "Delta <= gamma4: outside the dispersive regime"});
    }
    return rep;
}

double kerr_index(const EitMediumParams& m, double Es2) {
    return m.density * m.mu13 * m.mu13 * m.mu24 * m.mu24 * Es2 /
           (8.0 * vacuum_permittivity * hbar * hbar * hbar * m.rabi * m.rabi * m.signal_detuning);
}

double group_velocity(const EitMediumParams& m) {
    return vacuum_permittivity * hbar * m.lambda * m.rabi * m.rabi /
           (4.0 * pi * m.density * m.mu13 * m.mu13);
}

double alpha1(const EitMediumParams& m) {
    return 32.0 * pi * pi * m.density * m.mu13 * m.mu13 * m.gamma3 * m.probe_detuning *
           m.probe_detuning /
           (vacuum_permittivity * hbar * m.lambda * std::pow(m.rabi, 4));
}

double alpha2(const EitMediumParams& m, double Es2) {
    return pi * pi * m.density * m.mu13 * m.mu13 * m.mu24 * m.mu24 * m.gamma4 * Es2 /
           (2.0 * vacuum_permittivity * std::pow(hbar, 3) * m.lambda * m.rabi * m.rabi *
            m.signal_detuning * m.signal_detuning);
}

double broadening_factor(const DeviceParams& device, double tau_s) {
    const DelayResult d = device_delay(device);
    if (d.infinite) {
        throw std::invalid_argument("broadening_factor: R2 must be > 0");
    }
    return 1.0 / std::sqrt(1.0 + d.tau_D * d.tau_D / (2.0 * tau_s * tau_s));
}

double signal_energy_integral(const DeviceParams& device, double tau_s,
                              const EitMediumParams& m) {
    const double ratio = device.bs1.R / device.bs2.R;
    return ratio * 2.0 * pi * hbar / (vacuum_permittivity * m.lambda * m.cross_section) *
           broadening_factor(device, tau_s);
}

double single_photon_field_squared(const DeviceParams& device, double tau_s,
                                   const EitMediumParams& m) {
    const double omega0 = device.geometry.omega0();
    return std::sqrt(2.0 / pi) * hbar * omega0 /
           (speed_of_light * vacuum_permittivity * m.cross_section * tau_s);
}

PhaseShiftResult phase_shift(const DeviceParams& device, const EitMediumParams& m, double tau_s) {
    PhaseShiftResult res{};
    res.dphi = pi / 8.0 * device.bs1.R / device.bs2.R * m.mu24 * m.mu24 /
               (vacuum_permittivity * hbar * m.lambda * m.cross_section * m.signal_detuning) *
               broadening_factor(device, tau_s);
    const DelayResult d = device_delay(device);
    const double dwell = 4.0 * std::sqrt(tau_s * tau_s + d.tau_D * d.tau_D / 2.0);
    res.dwell_condition_ok = m.length / group_velocity(m) >= dwell;
    return res;
}

double phase_shift_numeric(const DeviceParams& device, const EitMediumParams& m,
                           const PulseSpec& pulse) {
    // dphi = mu24^2/(16 hbar^2 Delta) * Int |E_s(t)|^2 dt with |E_s|^2 =
    // 2 |E_sH|^2 and E_sH = E0 * (exact intracavity envelope).
    const TimeGrid grid = default_time_grid(device, pulse);
    const FieldRecord rec = propagate_pulse(device, pulse, grid);
    const double dt = grid.dt();
    double envelope_integral = 0.0; // Int |a_H(t)|^2 dt for a unit input
    for (const cdouble& v : rec.a_H) {
        envelope_integral += std::norm(v);
    }
    envelope_integral *= dt;
    const double E0sq = single_photon_field_squared(device, pulse.tau_s, m);
    const double Es_integral = 2.0 * E0sq * envelope_integral;
    return m.mu24 * m.mu24 / (16.0 * hbar * hbar * m.signal_detuning) * Es_integral;
}

double two_photon_probability(const DeviceParams& device, const EitMediumParams& m,
                              double tau_s) {
    return pi * pi / 4.0 * m.mu24 * m.mu24 * m.gamma4 /
           (vacuum_permittivity * hbar * m.cross_section * m.lambda * m.signal_detuning *
            m.signal_detuning) *
           device.bs1.R / device.bs2.R * broadening_factor(device, tau_s);
}

namespace {

ConditionMargin much_less(const std::string& label, double lhs, double rhs) {
    const double ratio = (rhs > 0.0) ? lhs / rhs : std::numeric_limits<double>::infinity();
    return {label, "<<", lhs, rhs, ratio, grade_much_less(ratio)};
}

ConditionMargin much_greater(const std::string& label, double lhs, double rhs) {
    const double ratio = (lhs > 0.0) ? rhs / lhs : std::numeric_limits<double>::infinity();
    return {label, ">>", lhs, rhs, ratio, grade_much_less(ratio)};
}

// "at least about": satisfied when the bound holds outright; an overshoot
// up to 5x counts as marginal, beyond that violated.
MarginStatus grade_about(double overshoot) {
    if (overshoot <= 1.0) {
        return MarginStatus::satisfied;
    }
    if (overshoot <= 5.0) {
        return MarginStatus::marginal;
    }
    return MarginStatus::violated;
}

ConditionMargin at_least(const std::string& label, double lhs, double rhs) {
    const double ratio = (lhs > 0.0) ? rhs / lhs : std::numeric_limits<double>::infinity();
    return {label, ">~", lhs, rhs, ratio, grade_about(ratio)};
}

ConditionMargin at_most(const std::string& label, double lhs, double rhs) {
    const double ratio = (rhs > 0.0) ? lhs / rhs : std::numeric_limits<double>::infinity();
    return {label, "<~", lhs, rhs, ratio, grade_about(ratio)};
}

} // namespace

XpmReport feasibility_report(const DeviceParams& device, const EitMediumParams& m,
                             double tau_s) {
    XpmReport rep;
    const DelayResult d = device_delay(device);
    rep.tau_D = d.tau_D;
    rep.tau_s = tau_s;
    rep.broadening = broadening_factor(device, tau_s);
    rep.v_g = group_velocity(m);
    rep.alpha1 = alpha1(m);
    rep.alpha1_L = rep.alpha1 * m.length;
    rep.energy_integral = signal_energy_integral(device, tau_s, m);
    const PhaseShiftResult ps = phase_shift(device, m, tau_s);
    rep.dphi = ps.dphi;
    rep.P2 = two_photon_probability(device, m, tau_s);
    rep.P2_over_dphi = rep.P2 / rep.dphi;
    rep.gap_to_pi = pi / rep.dphi;
    rep.required_R1_over_R2 = device.bs1.R / device.bs2.R * rep.gap_to_pi;
    const double R1 = device.bs1.R;
    rep.g11_resonant_approx = 1.0 - R1 * R1 / 8.0;
    rep.g21_resonant_approx = R1 / 2.0;
    rep.resonant_reflection_probability = R1 * R1 / 4.0;

    const double R2_over_R1 = device.bs2.R / device.bs1.R;
    const double dwell_rhs = 4.0 * std::sqrt(tau_s * tau_s + d.tau_D * d.tau_D / 2.0);
    rep.conditions.push_back(
        at_least("probe dwell: L/v_g >~ 4 sqrt(tau_s^2 + tau_D^2/2)", m.length / rep.v_g,
                 dwell_rhs));
    rep.conditions.push_back(at_most("group velocity: v_g <~ (sqrt6/8)(R2/R1) c", rep.v_g,
                                     std::sqrt(6.0) / 8.0 * R2_over_R1 * speed_of_light));
    rep.conditions.push_back(
        at_most("drive: |Omega|^2 <~ (sqrt6 pi/2)(R2/R1) c mu13^2 N/(eps0 hbar lambda)",
                m.rabi * m.rabi,
                std::sqrt(6.0) * pi / 2.0 * R2_over_R1 * speed_of_light * m.mu13 * m.mu13 *
                    m.density / (vacuum_permittivity * hbar * m.lambda)));
    rep.conditions.push_back(much_less("two-photon absorption: P2 << 1", rep.P2, 1.0));
    rep.conditions.push_back(
        much_less("loss-to-shift: P2/dphi = 2 pi gamma4/Delta << 1", rep.P2_over_dphi, 1.0));
    rep.conditions.push_back(
        much_less("probe absorption: alpha1 L << 1", rep.alpha1_L, 1.0));
    rep.conditions.push_back(
        much_less("probe inside medium: 1/delta << L/v_g", 1.0 / m.probe_detuning,
                  m.length / rep.v_g));
    rep.conditions.push_back(
        much_greater("density: N >> 2 eps0 hbar lambda gamma3/(mu13^2 L)", m.density,
                     2.0 * vacuum_permittivity * hbar * m.lambda * m.gamma3 /
                         (m.mu13 * m.mu13 * m.length)));
    rep.conditions.push_back(
        much_less("probe linewidth: delta << |Omega|^2/(8 pi gamma3)", m.probe_detuning,
                  m.rabi * m.rabi / (8.0 * pi * m.gamma3)));

    // Free-medium comparison: copropagating signal and probe in the bare
    // medium. The single-photon signal field is compressed by c/v_g; the
    // pulse duration is taken as 1/(linewidth) with a 1 MHz linewidth scale
    // set by the beam diameter l_D ~ 10 um examples.
    {
        FreeMediumComparison& f = rep.free_medium;
        const double linewidth = 1e6; // s^-1
        const double tau_free = 1.0 / linewidth;
        const double E0sq = single_photon_field_squared(device, tau_free, m);
        const double compressed = E0sq * speed_of_light / rep.v_g;
        f.n_K = kerr_index(m, compressed);
        const double k_p = 2.0 * pi / m.lambda;
        f.length_for_pi = pi / (f.n_K * k_p);
        f.switching_time = f.length_for_pi / rep.v_g;
        f.cavity_switching_time = device.geometry.horizontal_length() / rep.v_g;
        const double beam_diameter = std::sqrt(m.cross_section);
        f.rayleigh_length = beam_diameter * beam_diameter / m.lambda;
    }
    return rep;
}

} // namespace dcavity
