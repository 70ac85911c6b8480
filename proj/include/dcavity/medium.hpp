#ifndef DCAVITY_MEDIUM_HPP
#define DCAVITY_MEDIUM_HPP

namespace dcavity {

// Four-level EIT medium filling the horizontal cavity. SI units throughout;
// Omega and the detunings are angular rates (s^-1).
struct EitMediumParams {
    double density = 0.0;        // N, atoms per m^3
    double mu13 = 0.0;           // dipole moment |1>-|3>, C m
    double mu24 = 0.0;           // dipole moment |2>-|4>, C m
    double gamma3 = 0.0;         // decay rate of |3>, s^-1
    double gamma4 = 0.0;         // decay rate of |4>, s^-1
    double rabi = 0.0;           // |Omega| of the driven |2>-|3> transition, s^-1
    double signal_detuning = 0.0; // Delta from |2>-|4>, s^-1
    double probe_detuning = 0.0;  // delta from |1>-|3>, s^-1
    double lambda = 795e-9;      // probe/signal wavelength, m
    double length = 0.0;         // medium length L (defaults to L_H), m
    double cross_section = 0.0;  // beam cross-section S, m^2
    double probe_duration = 0.0; // tau_p ~ 1/delta, s
};

} // namespace dcavity

#endif
