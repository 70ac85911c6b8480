#ifndef DCAVITY_INTRACAVITY_HPP
#define DCAVITY_INTRACAVITY_HPP

#include "dcavity/constants.hpp"
#include "dcavity/device.hpp"
#include "dcavity/spectral.hpp"

namespace dcavity {

// Complex amplitudes on every directed internal segment, referenced at the
// departure face of each element. Naming: a12 runs BS1 -> BS2, a1M4 runs
// BS1 -> M4, a2M1 runs BS2 -> M1, and the mirrored names run back.
struct SegmentAmplitudes {
    cdouble a12, a21;
    cdouble a1M4, aM41;
    cdouble a2M1, aM12;
    cdouble a2M2, aM22;
    cdouble a2M3, aM32;
    cdouble B5;
    bool singular_flag = false; // |B5| or the BS1 denominator below 1e-14
};

SegmentAmplitudes segment_amplitudes(const DeviceParams& params, double k, cdouble a, cdouble b);

// Resonance expansion of the horizontal-cavity field,
// a_H = (1/2) sqrt(R1/R2) (1 + i dk L_D - dk^2 L_D^2) a. outside_validity
// set for |dk| >= 1/L_D.
struct HorizontalFieldApprox {
    cdouble a_H;
    bool outside_validity = false;
};

HorizontalFieldApprox horizontal_field_approx(const DeviceParams& params, double delta_k,
                                              cdouble a);

// Leading resonant vertical-cavity amplitude, a_V = i sqrt(R1)/2 * a.
cdouble vertical_field_approx(const DeviceParams& params, cdouble a);

// Resonant horizontal intensity enhancement R1/(4 R2).
struct Enhancement {
    double value = 0.0;
    bool degenerate = false; // R2 = 0
};

Enhancement enhancement_factor(const DeviceParams& params);

} // namespace dcavity

#endif
