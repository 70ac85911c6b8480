#ifndef DCAVITY_LOSS_HPP
#define DCAVITY_LOSS_HPP

#include <string>
#include <vector>

#include "dcavity/constants.hpp"
#include "dcavity/device.hpp"
#include "dcavity/pulse.hpp"
#include "dcavity/spectral.hpp"

namespace dcavity {

// Second-order small-loss expansion of the absorption probability around
// the resonance. outside_validity set when |dk| L_D >= 0.3.
struct ExpansionResult {
    double P;
    bool outside_validity = false;
};

ExpansionResult absorption_expansion(const DeviceParams& params, double delta_k);

// Wave-packet-averaged absorption probability: spectral quadrature of the
// port-a energy deficit 1 - |g11|^2 - |g21|^2 over the Gaussian packet.
double wavepacket_absorption(const DeviceParams& params, const PulseSpec& pulse);

enum class MarginStatus { satisfied, marginal, violated };

// "much less than" graded as ratio < 0.1 satisfied, [0.1, 1) marginal,
// >= 1 violated (and the mirror convention for "at least about").
MarginStatus grade_much_less(double ratio);
const char* to_string(MarginStatus status);

struct NegligibilityEntry {
    std::string name;   // coefficient, e.g. "A_M1"
    double value;       // the absorption coefficient
    double bound;       // R1 or R2/R1
    double ratio;       // value / bound
    MarginStatus status;
};

struct NegligibilityReport {
    std::vector<NegligibilityEntry> entries;
    bool all_satisfied() const;
};

// Conditions A1, A_M2, A_M4 << R1 and A2, A_M1, A_M3 << R2/R1.
NegligibilityReport loss_negligibility(const DeviceParams& params);

// Interaction-free-measurement fractions with a fully absorbing horizontal
// mirror: closed forms 4 T1 R2^2/R1^2 (transmitted), 1 - 4 T1 R2/R1
// (reflected), 4 T1 R2 (R1-R2)/R1^2 (lost), next to the exact resonant
// values from the scattering matrix.
struct IfmFractions {
    double transmitted_closed;
    double reflected_closed;
    double lost_closed;
    double transmitted_exact;
    double reflected_exact;
    double lost_exact;
    bool absorber_present; // A_M1 = 1 and/or A_M3 = 1
};

IfmFractions ifm_fractions(const DeviceParams& params);

} // namespace dcavity

#endif
