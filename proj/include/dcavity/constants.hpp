#ifndef DCAVITY_CONSTANTS_HPP
#define DCAVITY_CONSTANTS_HPP

#include <complex>

namespace dcavity {

using cdouble = std::complex<double>;

// CODATA-2018 values; c is exact by definition.
inline constexpr double speed_of_light = 299792458.0;          // m/s
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m
inline constexpr double hbar = 1.054571817e-34;                 // J s

inline constexpr double pi = 3.141592653589793238462643383279502884;

} // namespace dcavity

#endif
