#ifndef DCAVITY_XPM_HPP
#define DCAVITY_XPM_HPP

#include <string>
#include <vector>

#include "dcavity/constants.hpp"
#include "dcavity/device.hpp"
#include "dcavity/loss.hpp"
#include "dcavity/medium.hpp"
#include "dcavity/pulse.hpp"

namespace dcavity {

ValidationReport validate(const EitMediumParams& medium);

// Kerr index felt by the probe for a signal intensity |E_s|^2 (V^2/m^2),
// n_K = N mu13^2 mu24^2 |E_s|^2 / (8 eps0 hbar^3 |Omega|^2 Delta).
double kerr_index(const EitMediumParams& medium, double Es2);

// Probe group velocity, v_g = eps0 hbar lambda |Omega|^2 / (4 pi N mu13^2).
double group_velocity(const EitMediumParams& medium);

// Inverse absorption length of the probe,
// alpha1 = 32 pi^2 N mu13^2 gamma3 delta^2 / (eps0 hbar lambda |Omega|^4).
double alpha1(const EitMediumParams& medium);

// Two-photon absorption coefficient,
// alpha2 = pi^2 N mu13^2 mu24^2 gamma4 |E_s|^2 / (2 eps0 hbar^3 lambda
// |Omega|^2 Delta^2).
double alpha2(const EitMediumParams& medium, double Es2);

// Pulse-broadening factor (1 + tau_D^2 / 2 tau_s^2)^(-1/2).
double broadening_factor(const DeviceParams& device, double tau_s);

// Closed-form signal energy integral of the standing-wave intensity in the
// horizontal cavity, (R1/R2) (2 pi hbar / (eps0 lambda S)) * broadening
// factor, in V^2 m^-2 s.
double signal_energy_integral(const DeviceParams& device, double tau_s,
                              const EitMediumParams& medium);

// Single-photon peak field of the input Gaussian, E0^2 = sqrt(2/pi) hbar
// omega0 / (c eps0 S tau_s).
double single_photon_field_squared(const DeviceParams& device, double tau_s,
                                   const EitMediumParams& medium);

// Conditional phase shift of the probe,
// dphi = (pi/8)(R1/R2) mu24^2/(eps0 hbar lambda S Delta) * broadening factor.
// dwell_condition_ok reports L/v_g >= 4 sqrt(tau_s^2 + tau_D^2/2).
struct PhaseShiftResult {
    double dphi;
    bool dwell_condition_ok;
};

PhaseShiftResult phase_shift(const DeviceParams& device, const EitMediumParams& medium,
                             double tau_s);

// Same phase shift, but with the time integral evaluated from the exact
// spectral synthesis of the intracavity envelope instead of the Gaussian
// model. Authoritative for broadband pulses.
double phase_shift_numeric(const DeviceParams& device, const EitMediumParams& medium,
                           const PulseSpec& pulse);

// Two-photon absorption probability,
// P2 = (pi^2/4) mu24^2 gamma4/(eps0 hbar S lambda Delta^2) (R1/R2) *
// broadening factor.
double two_photon_probability(const DeviceParams& device, const EitMediumParams& medium,
                              double tau_s);

struct ConditionMargin {
    std::string label;
    std::string relation; // "<<", "<~", ">~", ">>"
    double lhs;
    double rhs;
    double ratio; // lhs/rhs (for << and <~) or rhs/lhs (for >> and >~)
    MarginStatus status;
};

// Free-medium comparison block: the same medium without the cavity.
struct FreeMediumComparison {
    double n_K;            // Kerr index with the compressed single-photon field
    double length_for_pi;  // l_0 = pi / (n_K k_p)
    double switching_time; // l_0 / v_g
    double cavity_switching_time; // L_H / v_g
    double rayleigh_length;       // l_D^2 / lambda
};

struct XpmReport {
    double dphi = 0.0;
    double dphi_numeric = 0.0;
    double v_g = 0.0;
    double alpha1 = 0.0;
    double alpha1_L = 0.0;
    double P2 = 0.0;
    double P2_over_dphi = 0.0;
    double energy_integral = 0.0;
    double tau_D = 0.0;
    double tau_s = 0.0;
    double broadening = 0.0;
    double gap_to_pi = 0.0;          // pi / dphi
    double required_R1_over_R2 = 0.0; // ratio reaching dphi = pi at fixed rest
    double g11_resonant_approx = 0.0; // 1 - R1^2/8
    double g21_resonant_approx = 0.0; // R1/2
    double resonant_reflection_probability = 0.0; // R1^2/4
    std::vector<ConditionMargin> conditions;
    FreeMediumComparison free_medium{};
};

// Evaluates every design inequality with numeric sides and margins.
XpmReport feasibility_report(const DeviceParams& device, const EitMediumParams& medium,
                             double tau_s);

} // namespace dcavity

#endif
