#ifndef DCAVITY_FFT_HPP
#define DCAVITY_FFT_HPP

#include <cstddef>
#include <vector>

#include "dcavity/constants.hpp"

namespace dcavity {

// In-place radix-2 transforms. Convention:
//   forward:  X[m] = sum_j x[j] e^{-i 2 pi m j / N}
//   inverse:  x[j] = (1/N) sum_m X[m] e^{+i 2 pi m j / N}
// Sizes must be powers of two.
void fft(std::vector<cdouble>& data);
void ifft(std::vector<cdouble>& data);

// Angular frequency of FFT bin m for sample spacing dt (positive
// frequencies first, then negative), matching the conventions above with
// spectra defined through a_hat(w) = int a(t) e^{+i w t} dt.
double fft_bin_angular_frequency(std::size_t m, std::size_t n, double dt);

} // namespace dcavity

#endif
