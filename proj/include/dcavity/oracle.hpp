#ifndef DCAVITY_ORACLE_HPP
#define DCAVITY_ORACLE_HPP

#include <cstddef>
#include <vector>

#include "dcavity/constants.hpp"
#include "dcavity/device.hpp"
#include "dcavity/errors.hpp"
#include "dcavity/intracavity.hpp"
#include "dcavity/pulse.hpp"

namespace dcavity {

// Brute-force validator. Fields are relaxed through the literal network
// (local beam-splitter/mirror rules plus propagation phases) with no closed
// forms; used to certify the scattering matrix and the intracavity
// amplitudes.
struct OracleSteadyState {
    cdouble out_a;
    cdouble out_b;
    SegmentAmplitudes segments;
    std::size_t iterations = 0;
    double error_bound = 0.0; // geometric tail estimate at exit
};

OracleSteadyState oracle_steady_state(const DeviceParams& params, double k, cdouble a, cdouble b,
                                      double tol = 1e-12, std::size_t max_iter = 10'000'000);

// Explicit delay-line simulation on a dt lattice (segment lengths snapped to
// integer multiples of c dt; snapping beyond 1e-3 relative is an error).
// Samples are emitted every `stride` lattice steps. stride == 1 advances the
// recursion literally; stride > 1 evaluates the same linear recursion with
// precomputed propagator powers (the drive is linearly interpolated across a
// stride, which is exact to ~(stride*dt/tau_s)^2).
struct TimeSteppingResult {
    std::vector<double> t;
    std::vector<cdouble> out_a;
    std::vector<cdouble> out_b;
    double max_snap_rel = 0.0;
    double dt = 0.0;
    std::size_t stride = 1;
};

TimeSteppingResult oracle_time_stepping(const DeviceParams& params, const PulseSpec& pulse,
                                        double dt, double t_start, double duration,
                                        std::size_t stride = 1);

// Largest dt that divides every segment delay (presets: 5 lambda0 / c).
double lattice_time_step(const DeviceParams& params);

} // namespace dcavity

#endif
