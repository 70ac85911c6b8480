#include "dcavity/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace dcavity {

namespace {

constexpr double kSingularTol = 1e-14;

cdouble polar1(double phase) { return {std::cos(phase), std::sin(phase)}; }

} // namespace

PhaseModel::PhaseModel(const GeometrySpec& g) : lengths_(g.segments()), k0_(g.k0()) {
    reduced_ = true;
    for (int i = 0; i < 5; ++i) {
        const double m = 2.0 * lengths_[static_cast<std::size_t>(i)] / g.lambda0;
        const double r = std::round(m);
        if (r < 1.0 || std::abs(m - r) > 1e-9 * m) {
            reduced_ = false;
            break;
        }
        halfwaves_[static_cast<std::size_t>(i)] = static_cast<long>(r);
    }
}

cdouble PhaseModel::one_way(double k, int segment) const {
    const double L = lengths_[static_cast<std::size_t>(segment)];
    if (!reduced_) {
        return polar1(k * L);
    }
    // e^{i k0 L} = e^{i pi m} = +-1
    const double carrier = (halfwaves_[static_cast<std::size_t>(segment)] % 2 == 0) ? 1.0 : -1.0;
    return carrier * polar1((k - k0_) * L);
}

cdouble PhaseModel::round_trip(double k, std::initializer_list<int> segments) const {
    double L = 0.0;
    for (int i : segments) {
        L += lengths_[static_cast<std::size_t>(i)];
    }
    if (!reduced_) {
        return polar1(2.0 * k * L);
    }
    return polar1(2.0 * (k - k0_) * L); // e^{i 2 k0 L} = e^{i 2 pi m} = 1
}

namespace {

struct Amplitudes {
    double s1, s2, s3, s4; // mirror amplitude factors sqrt(1-A_Mm)
    double r1, t1, r2, t2;
};

Amplitudes amplitudes(const DeviceParams& p) {
    return {p.m1.amplitude(), p.m2.amplitude(), p.m3.amplitude(), p.m4.amplitude(),
            p.bs1.r(),        p.bs1.t(),        p.bs2.r(),        p.bs2.t()};
}

BFactors b_factor_impl(const DeviceParams& p, const PhaseModel& ph, double k) {
    const Amplitudes a = amplitudes(p);
    const double one_minus_A2 = 1.0 - p.bs2.A;

    BFactors f;
    // Path phases: segment indices 0..4 correspond to L1..L5; the horizontal
    // cavity is L2+L3.
    f.B1 = one_minus_A2 * one_minus_A2 * a.s1 * a.s2 * a.s3 * ph.round_trip(k, {0, 3, 1, 2});
    f.B2 = -p.bs2.T * a.s2 * ph.round_trip(k, {0, 3});
    f.B3 = p.bs2.R * a.s3 * ph.round_trip(k, {0, 1});
    f.B4 = 1.0 - a.s1 * (p.bs2.T * a.s3 * ph.round_trip(k, {1, 2}) -
                         p.bs2.R * a.s2 * ph.round_trip(k, {2, 3}));

    if (std::abs(f.B4) < kSingularTol) {
        f.limit_branch = true;
        f.B = -one_minus_A2 * a.s2 * ph.round_trip(k, {0, 3});
    } else {
        f.B = (f.B1 + f.B2 + f.B3) / f.B4;
    }
    return f;
}

GMatrix g_matrix_impl(const DeviceParams& p, const PhaseModel& ph, double k) {
    const Amplitudes a = amplitudes(p);
    GMatrix g;

    if (p.bs1.R == 0.0 && p.bs1.A == 0.0) {
        // Decoupled input: t1 = 1 and the numerator equals the denominator.
        g.g11 = g.g22 = 1.0;
        g.g12 = g.g21 = 0.0;
        return g;
    }

    const BFactors f = b_factor_impl(p, ph, k);
    const cdouble leg5 = a.s4 * ph.round_trip(k, {4});
    const cdouble w = leg5 * f.B;
    const cdouble denom = 1.0 + p.bs1.T * w;
    g.singular_flag = f.limit_branch;
    if (std::abs(denom) < kSingularTol) {
        g.singular_flag = true;
    }

    g.g11 = a.t1 * (1.0 + (1.0 - p.bs1.A) * w) / denom;
    g.g12 = -p.bs1.R * f.B / denom;
    g.g21 = p.bs1.R * leg5 / denom;
    g.g22 = g.g11;
    return g;
}

} // namespace

BFactors b_factor(const DeviceParams& params, double k) {
    const PhaseModel ph(params.geometry);
    return b_factor_impl(params, ph, k);
}

GMatrix g_matrix(const DeviceParams& params, double k) {
    const PhaseModel ph(params.geometry);
    return g_matrix_impl(params, ph, k);
}

AbsorptionProbabilities monochromatic_absorption(const DeviceParams& params, double k) {
    const GMatrix g = g_matrix(params, k);
    AbsorptionProbabilities p{};
    p.P_a = 1.0 - std::norm(g.g11) - std::norm(g.g12);
    p.P_b = 1.0 - std::norm(g.g22) - std::norm(g.g21);
    return p;
}

std::vector<SweepRow> response_sweep(const DeviceParams& params, const SpectralGrid& grid,
                                     unsigned threads) {
    if (grid.points == 0) {
        throw std::invalid_argument("response_sweep: grid needs at least one point");
    }
    if (grid.points >= 2 && !(grid.k_max > grid.k_min)) {
        throw std::invalid_argument("response_sweep: k_max must exceed k_min");
    }
    const PhaseModel ph(params.geometry);
    std::vector<SweepRow> rows(grid.points);
    auto fill = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double k =
                (grid.points == 1)
                    ? grid.k_min
                    : grid.k_min + (grid.k_max - grid.k_min) * static_cast<double>(i) /
                                       static_cast<double>(grid.points - 1);
            rows[i].k = k;
            rows[i].G = g_matrix_impl(params, ph, k);
            rows[i].p_absorb_a = 1.0 - std::norm(rows[i].G.g11) - std::norm(rows[i].G.g12);
        }
    };
    const unsigned workers =
        std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(grid.points)));
    if (workers == 1) {
        fill(0, grid.points);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (grid.points + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = static_cast<std::size_t>(w) * chunk;
            const std::size_t end = std::min(grid.points, begin + chunk);
            if (begin < end) {
                pool.emplace_back(fill, begin, end);
            }
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    return rows;
}

SplittingEstimate splitting_estimate(const DeviceParams& params) {
    SplittingEstimate est;
    if (params.bs2.R <= 0.0) {
        est.degenerate = true;
        return est;
    }
    est.delta_k = std::sqrt(params.bs2.R / (params.geometry.horizontal_length() *
                                            params.geometry.vertical_length()));
    return est;
}

namespace {

double abs_g11(const DeviceParams& p, const PhaseModel& ph, double k) {
    return std::abs(g_matrix_impl(p, ph, k).g11);
}

// Golden-section minimization on a bracketing triple.
double golden_minimize(const DeviceParams& p, const PhaseModel& ph, double lo, double hi,
                       double tol) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = abs_g11(p, ph, x1);
    double f2 = abs_g11(p, ph, x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = abs_g11(p, ph, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = abs_g11(p, ph, x2);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

TransmissionZeros find_transmission_zeros(const DeviceParams& params) {
    const SplittingEstimate est = splitting_estimate(params);
    if (est.degenerate) {
        throw no_split_resonance("no split resonance: R2 = 0");
    }
    const PhaseModel ph(params.geometry);
    const double k0 = params.geometry.k0();
    const double span = 5.0 * est.delta_k;
    constexpr std::size_t n_scan = 10000;

    std::vector<double> ks(n_scan), vals(n_scan);
    for (std::size_t i = 0; i < n_scan; ++i) {
        ks[i] = k0 - span + 2.0 * span * static_cast<double>(i) / static_cast<double>(n_scan - 1);
        vals[i] = abs_g11(params, ph, ks[i]);
    }

    std::vector<double> minima;
    const double tol = 1e-12 * k0;
    for (std::size_t i = 1; i + 1 < n_scan; ++i) {
        if (vals[i] < vals[i - 1] && vals[i] < vals[i + 1]) {
            minima.push_back(golden_minimize(params, ph, ks[i - 1], ks[i + 1], tol));
        }
    }
    std::vector<double> below, above;
    for (double m : minima) {
        (m < k0 ? below : above).push_back(m);
    }
    if (below.empty() || above.empty()) {
        throw no_split_resonance("no split resonance: |g11| has no bracketed minima around k0");
    }
    TransmissionZeros z{};
    z.k_minus = *std::max_element(below.begin(), below.end());
    z.k_plus = *std::min_element(above.begin(), above.end());
    z.abs_g11_minus = abs_g11(params, ph, z.k_minus);
    z.abs_g11_plus = abs_g11(params, ph, z.k_plus);
    return z;
}

DelayResult device_delay(const DeviceParams& params) {
    DelayResult d;
    if (params.bs2.R <= 0.0) {
        d.infinite = true;
        return d;
    }
    d.L_D = params.bs1.R * params.geometry.horizontal_length() / (2.0 * params.bs2.R);
    d.tau_D = d.L_D / speed_of_light;
    return d;
}

QuadraticApprox g11_quadratic_approx(const DeviceParams& params, double delta_k) {
    const DelayResult d = device_delay(params);
    if (d.infinite) {
        throw std::invalid_argument("g11_quadratic_approx: R2 = 0 gives an infinite delay");
    }
    QuadraticApprox q;
    const double x = d.L_D * delta_k;
    q.outside_validity = std::abs(x) >= 1.0;
    q.g11 = std::exp(cdouble(-0.5 * x * x, x));
    return q;
}

SingleCavityResponse single_cavity_response(double R, double T, double A, double L, double k) {
    if (std::abs(R + T + A - 1.0) > 1e-12) {
        throw std::invalid_argument("single_cavity_response: R+T+A must equal 1");
    }
    SingleCavityResponse res{};
    const double r = std::sqrt(R);
    const cdouble e2 = std::polar(1.0, 2.0 * k * L);
    const cdouble denom = 1.0 - R * e2;
    res.q = r * ((1.0 - A) * e2 - 1.0) / denom;
    res.p = -T * std::polar(1.0, k * L) / denom;
    const double ta = T + A;
    res.resonant_transmission = (ta > 0.0) ? T * T / (ta * ta) : 1.0;
    res.resonant_reflection = (ta > 0.0) ? A * A * R / (ta * ta) : 0.0;
    res.linewidth = (R > 0.0 && L > 0.0) ? ta / (2.0 * std::sqrt(R) * L) : 0.0;
    return res;
}

double moving_phase_shift(const DeviceParams& params, double v) {
    const DelayResult d = device_delay(params);
    if (d.infinite) {
        throw std::invalid_argument("moving_phase_shift: tau_D is infinite for R2 = 0");
    }
    return params.geometry.omega0() * d.tau_D * v / speed_of_light;
}

} // namespace dcavity
