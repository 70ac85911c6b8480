#include "dcavity/intracavity.hpp"

#include <cmath>

namespace dcavity {

namespace {
constexpr double kSingularTol = 1e-14;
}

SegmentAmplitudes segment_amplitudes(const DeviceParams& p, double k, cdouble a, cdouble b) {
    const PhaseModel ph(p.geometry);
    const double s1 = p.m1.amplitude();
    const double s2 = p.m2.amplitude();
    const double s3 = p.m3.amplitude();
    const double s4 = p.m4.amplitude();
    const double r1 = p.bs1.r();
    const double t1 = p.bs1.t();
    const double r2 = p.bs2.r();
    const double t2 = p.bs2.t();
    const cdouble I(0.0, 1.0);

    const BFactors f = b_factor(p, k);
    SegmentAmplitudes s{};
    s.singular_flag = f.limit_branch;

    const cdouble leg5 = s4 * ph.round_trip(k, {4});
    const cdouble denom1 = 1.0 + p.bs1.T * leg5 * f.B;
    if (std::abs(denom1) < kSingularTol) {
        s.singular_flag = true;
        return s;
    }

    s.a12 = I * r1 * (-t1 * leg5 * a + b) / denom1;
    s.a21 = f.B * s.a12;
    s.a1M4 = I * r1 * (a + t1 * f.B * b) / denom1;
    s.aM41 = -leg5 * s.a1M4;

    // B5 equals B4 written with the individual horizontal phases.
    s.B5 = 1.0 - s1 * ph.round_trip(k, {2}) *
                     (p.bs2.T * s3 * ph.round_trip(k, {1}) - p.bs2.R * s2 * ph.round_trip(k, {3}));
    if (std::abs(s.B5) < kSingularTol) {
        s.singular_flag = true;
        return s;
    }
    const cdouble feed = ph.one_way(k, 0) * s.a12 / s.B5;

    s.a2M1 = -I * r2 * t2 * (s3 * ph.round_trip(k, {1}) + s2 * ph.round_trip(k, {3})) * feed;
    s.aM12 = -s1 * ph.round_trip(k, {2}) * s.a2M1;
    s.a2M2 = t2 *
             (1.0 - s1 * s3 * (1.0 - p.bs2.A) * ph.round_trip(k, {1, 2})) * feed;
    s.aM22 = -s2 * ph.round_trip(k, {3}) * s.a2M2;
    s.a2M3 = -I * r2 *
             (1.0 + s1 * s2 * (1.0 - p.bs2.A) * ph.round_trip(k, {2, 3})) * feed;
    s.aM32 = -s3 * ph.round_trip(k, {1}) * s.a2M3;
    return s;
}

HorizontalFieldApprox horizontal_field_approx(const DeviceParams& p, double delta_k, cdouble a) {
    if (p.bs2.R <= 0.0) {
        throw std::invalid_argument("horizontal_field_approx: R2 must be > 0");
    }
    const DelayResult d = device_delay(p);
    const double x = delta_k * d.L_D;
    HorizontalFieldApprox h;
    h.outside_validity = std::abs(x) >= 1.0;
    h.a_H = 0.5 * std::sqrt(p.bs1.R / p.bs2.R) * cdouble(1.0 - x * x, x) * a;
    return h;
}

cdouble vertical_field_approx(const DeviceParams& p, cdouble a) {
    return cdouble(0.0, 0.5 * std::sqrt(p.bs1.R)) * a;
}

Enhancement enhancement_factor(const DeviceParams& p) {
    Enhancement e;
    if (p.bs2.R <= 0.0) {
        e.degenerate = true;
        return e;
    }
    e.value = p.bs1.R / (4.0 * p.bs2.R);
    return e;
}

} // namespace dcavity
