#include "dcavity/loss.hpp"

#include <cmath>
#include <limits>

namespace dcavity {

ExpansionResult absorption_expansion(const DeviceParams& p, double delta_k) {
    const DelayResult d = device_delay(p);
    if (d.infinite) {
        throw std::invalid_argument("absorption_expansion: R2 must be > 0");
    }
    const double R1 = p.bs1.R;
    const double R2 = p.bs2.R;
    const double A1 = p.bs1.A;
    const double A2 = p.bs2.A;
    const double horizontal = p.m1.A + p.m3.A + A2;
    const double x2 = delta_k * delta_k * d.L_D * d.L_D;

    ExpansionResult res;
    res.outside_validity = std::abs(delta_k) * d.L_D >= 0.3;
    res.P = A1 + p.m4.A * R1 / 4.0 + horizontal * R1 / (4.0 * R2) * (1.0 - R1 * R1 / 4.0) +
            x2 * ((2.0 * A1 + p.m2.A + p.m4.A) / R1 -
                  horizontal * R1 / (4.0 * R2) * (1.0 + R1));
    return res;
}

double wavepacket_absorption(const DeviceParams& p, const PulseSpec& pulse) {
    if (!(pulse.tau_s > 0.0)) {
        throw std::invalid_argument("wavepacket_absorption: tau_s must be > 0");
    }
    // Gaussian envelope exp(-t^2/4 tau_s^2) has the power spectrum
    // exp(-2 (c tau_s dk)^2); integrate the deficit over +-8 sigma.
    const double sigma = 1.0 / (2.0 * speed_of_light * pulse.tau_s);
    const std::size_t n = 4097; // Simpson grid (odd)
    const double lo = -8.0 * sigma;
    const double hi = 8.0 * sigma;
    const double h = (hi - lo) / static_cast<double>(n - 1);
    const PhaseModel ph(p.geometry);

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dk = lo + h * static_cast<double>(i);
        const double w = std::exp(-2.0 * std::pow(speed_of_light * pulse.tau_s * dk, 2));
        const GMatrix g = g_matrix(p, pulse.carrier_k + dk);
        const double deficit = 1.0 - std::norm(g.g11) - std::norm(g.g21);
        const double simpson = (i == 0 || i + 1 == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        num += simpson * w * deficit;
        den += simpson * w;
    }
    return num / den;
}

MarginStatus grade_much_less(double ratio) {
    if (ratio < 0.1) {
        return MarginStatus::satisfied;
    }
    if (ratio < 1.0) {
        return MarginStatus::marginal;
    }
    return MarginStatus::violated;
}

const char* to_string(MarginStatus status) {
    switch (status) {
    case MarginStatus::satisfied:
        return "satisfied";
    case MarginStatus::marginal:
        return "marginal";
    default:
        return "violated";
    }
}

bool NegligibilityReport::all_satisfied() const {
    for (const auto& e : entries) {
        if (e.status != MarginStatus::satisfied) {
            return false;
        }
    }
    return true;
}

NegligibilityReport loss_negligibility(const DeviceParams& p) {
    NegligibilityReport rep;
    const double R1 = p.bs1.R;
    const double bound_v = R1;                              // A1, A_M2, A_M4 << R1
    const double bound_h = (R1 > 0.0) ? p.bs2.R / R1 : 0.0; // A2, A_M1, A_M3 << R2/R1
    auto add = [&](const char* name, double value, double bound) {
        const double ratio = (bound > 0.0) ? value / bound
                                           : (value > 0.0 ? std::numeric_limits<double>::infinity()
                                                          : 0.0);
        rep.entries.push_back({name, value, bound, ratio, grade_much_less(ratio)});
    };
    add("A1", p.bs1.A, bound_v);
    add("A_M2", p.m2.A, bound_v);
    add("A_M4", p.m4.A, bound_v);
    add("A2", p.bs2.A, bound_h);
    add("A_M1", p.m1.A, bound_h);
    add("A_M3", p.m3.A, bound_h);
    return rep;
}

IfmFractions ifm_fractions(const DeviceParams& p) {
    IfmFractions f{};
    const double R1 = p.bs1.R;
    const double R2 = p.bs2.R;
    const double T1 = p.bs1.T;
    if (!(R1 > 0.0)) {
        throw std::invalid_argument("ifm_fractions: R1 must be > 0");
    }
    f.absorber_present = (p.m1.A == 1.0) || (p.m3.A == 1.0);
    f.transmitted_closed = 4.0 * T1 * R2 * R2 / (R1 * R1);
    f.reflected_closed = 1.0 - 4.0 * T1 * R2 / R1;
    f.lost_closed = 4.0 * T1 * R2 * (R1 - R2) / (R1 * R1);

    const GMatrix g = g_matrix(p, p.geometry.k0());
    f.transmitted_exact = std::norm(g.g11);
    f.reflected_exact = std::norm(g.g21);
    f.lost_exact = 1.0 - f.transmitted_exact - f.reflected_exact;
    return f;
}

} // namespace dcavity
