#ifndef DCAVITY_SPECTRAL_HPP
#define DCAVITY_SPECTRAL_HPP

#include <array>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "dcavity/constants.hpp"
#include "dcavity/device.hpp"

namespace dcavity {

// Propagation-phase evaluator. When every segment is an integer number of
// half waves of lambda0 (the resonant presets by construction), phases are
// split as e^{i k L} = e^{i k0 L} e^{i (k-k0) L} with the carrier factor an
// exact +-1. Raw evaluation of k*L at ~10^3 rad carries ~4e-14 of argument
// rounding, which the resonant denominators (|B4| ~ 2 R2) amplify far above
// the certified tolerances.
class PhaseModel {
public:
    explicit PhaseModel(const GeometrySpec& geometry);

    // e^{i k L_i}, segment index 0..4 for L1..L5
    cdouble one_way(double k, int segment) const;
    // e^{i 2 k (L_i + L_j + ...)}
    cdouble round_trip(double k, std::initializer_list<int> segments) const;

    bool reduced() const { return reduced_; }
    double k0() const { return k0_; }

private:
    std::array<double, 5> lengths_;
    std::array<long, 5> halfwaves_{};
    double k0_ = 0.0;
    bool reduced_ = false;
};

// Reflection response seen from BS1 looking into the BS2/horizontal-cavity
// section, B = (B1 + B2 + B3)/B4. limit_branch is set when |B4| < 1e-14
// (R2 = 0 on horizontal resonance); B then takes the algebraic limit
// -(1-A2) sqrt(1-A_M2) e^{i 2 k (L1+L4)}, exact for T2 -> 1.
struct BFactors {
    cdouble B;
    cdouble B1, B2, B3, B4;
    bool limit_branch = false;
};

BFactors b_factor(const DeviceParams& params, double k);

// Frequency-domain scattering matrix, (a'; b') = G (a; b). g22 = g11 by
// construction. singular_flag propagates the B-factor limit branch or a
// vanishing BS1 denominator.
struct GMatrix {
    cdouble g11, g12, g21, g22;
    bool singular_flag = false;
};

GMatrix g_matrix(const DeviceParams& params, double k);

// Absorption probabilities of monochromatic photons,
// P_a = 1 - |G11|^2 - |G12|^2 and P_b = 1 - |G22|^2 - |G21|^2. Since
// G22 = G11, P_b equals the port-a energy deficit 1 - |G11|^2 - |G21|^2.
struct AbsorptionProbabilities {
    double P_a;
    double P_b;
};

AbsorptionProbabilities monochromatic_absorption(const DeviceParams& params, double k);

struct SpectralGrid {
    double k_min;
    double k_max;
    std::size_t points;
};

struct SweepRow {
    double k;
    GMatrix G;
    double p_absorb_a;
};

// Rows are ordered by grid index regardless of the worker count.
std::vector<SweepRow> response_sweep(const DeviceParams& params, const SpectralGrid& grid,
                                     unsigned threads = 1);

// Quasi-Rabi splitting estimate, delta_k = sqrt(R2/(L_H L_V)).
struct SplittingEstimate {
    double delta_k = 0.0;
    bool degenerate = false; // R2 = 0
};

SplittingEstimate splitting_estimate(const DeviceParams& params);

class no_split_resonance : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Locates the two |g11| minima nearest k0 by a coarse scan over
// k0 +- 5*delta_k_est followed by golden-section refinement to a bracket
// width of 1e-12 * k0.
struct TransmissionZeros {
    double k_minus;
    double k_plus;
    double abs_g11_minus;
    double abs_g11_plus;
};

TransmissionZeros find_transmission_zeros(const DeviceParams& params);

// Delay length L_D = R1 L_H / (2 R2) and delay time tau_D = L_D / c.
struct DelayResult {
    double L_D = 0.0;
    double tau_D = 0.0;
    bool infinite = false; // R2 = 0
};

DelayResult device_delay(const DeviceParams& params);

// Second-order resonance expansion of the transmission,
// g11 ~ exp(i L_D dk - L_D^2 dk^2 / 2), valid for |dk| << 1/L_D and a
// lossless weakly-reflecting device.
struct QuadraticApprox {
    cdouble g11;
    bool outside_validity = false; // |dk| >= 1/L_D
};

QuadraticApprox g11_quadratic_approx(const DeviceParams& params, double delta_k);

// Two-mirror cavity (mirror convention (it, -r; -r, it)): amplitudes of the
// reflected (q) and transmitted (p) output for a unit input, plus the
// resonant transmission T^2/(T+A)^2, resonant reflection A^2 R/(T+A)^2 and
// the linewidth (T+A)/(2 sqrt(R) L).
struct SingleCavityResponse {
    cdouble q;
    cdouble p;
    double resonant_transmission;
    double resonant_reflection;
    double linewidth;
};

SingleCavityResponse single_cavity_response(double R, double T, double A, double L, double k);

// Phase shift picked up when the device moves at velocity v along the
// signal, dphi = omega0 tau_D v / c.
double moving_phase_shift(const DeviceParams& params, double v);

} // namespace dcavity

#endif
