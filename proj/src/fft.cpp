#include "dcavity/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace dcavity {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void transform(std::vector<cdouble>& a, int sign) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) {
        throw std::invalid_argument("fft: size must be a power of two");
    }
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(a[i], a[j]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * pi / static_cast<double>(len);
        const cdouble wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cdouble w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cdouble u = a[i + j];
                const cdouble v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

} // namespace

void fft(std::vector<cdouble>& data) { transform(data, -1); }

void ifft(std::vector<cdouble>& data) {
    transform(data, +1);
    const double inv = 1.0 / static_cast<double>(data.size());
    for (auto& v : data) {
        v *= inv;
    }
}

double fft_bin_angular_frequency(std::size_t m, std::size_t n, double dt) {
    const auto half = n / 2;
    const double f = (m < half) ? static_cast<double>(m)
                                : static_cast<double>(m) - static_cast<double>(n);
    return 2.0 * pi * f / (static_cast<double>(n) * dt);
}

} // namespace dcavity
