#ifndef DCAVITY_PULSE_HPP
#define DCAVITY_PULSE_HPP

#include <cstddef>
#include <vector>

#include "dcavity/constants.hpp"
#include "dcavity/device.hpp"
#include "dcavity/errors.hpp"
#include "dcavity/spectral.hpp"

namespace dcavity {

// Gaussian input pulse, field envelope exp(-t^2 / 4 tau_s^2) around the
// carrier (tau_s is the amplitude half-width).
struct PulseSpec {
    double carrier_k;      // rad/m
    double tau_s;          // s
    double amplitude = 1.0;
};

// Uniform time grid; samples must be a power of two. The pulse peak sits at
// t = 0.
struct TimeGrid {
    double start;
    double stop;
    std::size_t samples;

    double dt() const { return (stop - start) / static_cast<double>(samples); }
};

TimeGrid default_time_grid(const DeviceParams& params, const PulseSpec& pulse);

// Time-domain response via spectral synthesis with the exact per-frequency
// transfer functions. Fractions are energies normalized by the total input
// energy; "inside" energies use dwell weighting |u|^2 * (segment length)/c
// summed over both directions of every internal segment.
struct FieldRecord {
    std::vector<double> t;
    std::vector<cdouble> input;  // envelope at BS1
    std::vector<cdouble> out_a;  // transmitted envelope a'
    std::vector<cdouble> out_b;  // reflected envelope b'
    std::vector<cdouble> a_H;    // horizontal-cavity envelope (arriving at BS2 from M1)

    std::vector<double> frac_front;
    std::vector<double> frac_inside_h;
    std::vector<double> frac_inside_v;
    std::vector<double> frac_behind;
    std::vector<double> intensity_in;  // |input|^2 / peak
    std::vector<double> intensity_out; // |out_a|^2 / peak

    double input_energy = 0.0;
    double transmitted_energy = 0.0;
    double reflected_energy = 0.0;
};

FieldRecord propagate_pulse(const DeviceParams& params, const PulseSpec& pulse,
                            const TimeGrid& grid);

// Gaussian response kernel G(tau) = exp(-(tau-tau_D)^2/(2 tau_D^2)) /
// (sqrt(2 pi) tau_D).
double gaussian_response_kernel(double tau, const DeviceParams& params);

// Energy-weighted centroid of |out_a|^2 minus that of |input|^2.
double output_centroid_delay(const FieldRecord& record);

// Growth of the amplitude-envelope second moment, Var_{|out_a|}(t) -
// Var_{|input|}(t). For the Gaussian response model this equals tau_D^2
// exactly (the intensity-weighted variance would grow by tau_D^2/2).
double output_broadening(const FieldRecord& record);

} // namespace dcavity

#endif
