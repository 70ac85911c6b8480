// Acceptance suite: every release criterion of the simulator, one pass/fail
// line per criterion, exit code = number of failures.
//
//   acceptance            runs everything
//   acceptance --only N   runs criterion N
//
// Tolerances are fixed here, not calibrated at run time.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "dcavity/device.hpp"
#include "dcavity/intracavity.hpp"
#include "dcavity/loss.hpp"
#include "dcavity/oracle.hpp"
#include "dcavity/pulse.hpp"
#include "dcavity/spectral.hpp"
#include "dcavity/xpm.hpp"

#include "test_util.hpp"

using namespace dcavity;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) {
        detail += (detail.empty() ? "" : "; ") + what;
    }
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Unitarity and passivity over randomized devices.
Outcome criterion_unitarity() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(20240201);
    std::uniform_real_distribution<double> dk(-2e3, 2e3);

    double worst_lossless = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const DeviceParams p = testing::random_device(rng, false);
        const GMatrix g = g_matrix(p, p.geometry.k0() + dk(rng));
        worst_lossless =
            std::max(worst_lossless, std::abs(std::norm(g.g11) + std::norm(g.g21) - 1.0));
    }
    double worst_excess = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const DeviceParams p = testing::random_device(rng, true, 1.0);
        const GMatrix g = g_matrix(p, p.geometry.k0() + dk(rng));
        worst_excess = std::max({worst_excess, std::norm(g.g11) + std::norm(g.g21) - 1.0,
                                 std::norm(g.g22) + std::norm(g.g12) - 1.0});
    }
    const double elapsed = seconds_since(t0);
    out.require(worst_lossless < 1e-10,
                "lossless deviation " + num(worst_lossless) + " >= 1e-10");
    out.require(worst_excess < 1e-12, "passivity excess " + num(worst_excess) + " >= 1e-12");
    out.require(elapsed < 5.0, "runtime " + num(elapsed) + " s >= 5 s");
    out.note("lossless dev " + num(worst_lossless) + ", passivity excess " +
             num(worst_excess) + ", " + num(elapsed) + " s");
    return out;
}

// 2. Oracle equivalence: fixed point vs closed form, lattice stepping vs
// spectral synthesis on the fig3 preset.
Outcome criterion_oracle() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();

    std::mt19937 rng(777);
    std::uniform_real_distribution<double> dk(-2e3, 2e3);
    double worst = 0.0;
    for (int i = 0; i < 25; ++i) {
        const DeviceParams p = testing::random_device(rng, i % 2 == 1, 1e-3);
        for (int j = 0; j < 25; ++j) {
            const double k = p.geometry.k0() + dk(rng);
            const auto o = oracle_steady_state(p, k, 1.0, 0.0);
            const GMatrix g = g_matrix(p, k);
            worst = std::max({worst, std::abs(o.out_a - g.g11), std::abs(o.out_b - g.g21)});
        }
    }
    out.require(worst < 1e-9, "steady-state deviation " + num(worst) + " >= 1e-9 (625 pairs)");

    // fig3 pulse: literal lattice recursion evaluated with propagator powers
    // (stride 1024 of dt = 5 lambda0/c), against the spectral synthesis.
    const DeviceParams p = preset("fig3").device;
    const double tau_D = device_delay(p).tau_D;
    const PulseSpec pulse{p.geometry.k0(), 4.0 * tau_D, 1.0};
    const double dt = lattice_time_step(p);
    const std::size_t stride = 1024;
    const double sample_dt = static_cast<double>(stride) * dt;
    const std::size_t n = std::size_t(1) << 15;
    const double start = -10.0 * pulse.tau_s;
    const double duration = static_cast<double>(n - 1) * sample_dt;

    const auto stepped = oracle_time_stepping(p, pulse, dt, start, duration, stride);
    const auto rec =
        propagate_pulse(p, pulse, {start, start + static_cast<double>(n) * sample_dt, n});
    double sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        sq += std::norm(stepped.out_a[j] - rec.out_a[j]);
    }
    const double rms = std::sqrt(sq / static_cast<double>(n));
    out.require(rms < 1e-6, "pulse RMS " + num(rms) + " >= 1e-6");

    const double elapsed = seconds_since(t0);
    out.require(elapsed < 60.0, "runtime " + num(elapsed) + " s >= 60 s");
    out.note("steady-state dev " + num(worst) + ", pulse RMS " + num(rms) + ", " +
             num(elapsed) + " s");
    return out;
}

// 3. Split resonance of the published response curves.
Outcome criterion_fig2() {
    Outcome out;

    const DeviceParams a = preset("fig2a").device;
    const auto est_a = splitting_estimate(a);
    const auto za = find_transmission_zeros(a);
    const double half_a = (za.k_plus - za.k_minus) / 2.0;
    out.require(za.k_minus < a.geometry.k0() && za.k_plus > a.geometry.k0(),
                "minima do not bracket k0");
    out.require(std::abs(half_a / est_a.delta_k - 1.0) < 0.05,
                "fig2a splitting " + num(half_a) + " vs estimate " + num(est_a.delta_k));

    const DeviceParams b = preset("fig2b").device;
    const auto zb = find_transmission_zeros(b);
    const double ratio = (zb.k_plus - zb.k_minus) / (za.k_plus - za.k_minus);
    out.require(std::abs(ratio / std::sqrt(10.0) - 1.0) < 0.05,
                "splitting ratio " + num(ratio) + " vs sqrt(10)");

    // Transparency: the 0.998 bound is the lossless 1 - R1^2/8 budget; the
    // published 1e-6 mirror absorption is amplified by R1/(4 R2) and costs
    // ~5% in intensity, reported alongside.
    const DeviceParams lossless = preset("fig3").device;
    const double t_lossless = std::abs(g_matrix(lossless, lossless.geometry.k0()).g11);
    const double t_lossy = std::abs(g_matrix(a, a.geometry.k0()).g11);
    out.require(t_lossless >= 0.998,
                "|g11(k0)| lossless " + num(t_lossless) + " < 0.998");
    out.note("splitting " + num(half_a) + " rad/m (est " + num(est_a.delta_k) + "), ratio " +
             num(ratio) + ", |g11(k0)| lossless " + num(t_lossless) +
             " (with published mirror absorption: " + num(t_lossy) + ")");
    return out;
}

// 4. Delay and broadening of a long pulse.
Outcome criterion_delay() {
    Outcome out;
    const DeviceParams p = preset("fig3").device;
    const double tau_D = device_delay(p).tau_D;
    const PulseSpec pulse{p.geometry.k0(), 4.0 * tau_D, 1.0};
    const auto rec = propagate_pulse(p, pulse, default_time_grid(p, pulse));

    const double delay = output_centroid_delay(rec);
    const double broad = output_broadening(rec);
    out.require(std::abs(delay / tau_D - 1.0) < 0.10,
                "centroid delay " + num(delay) + " vs tau_D " + num(tau_D));
    out.require(std::abs(broad / (tau_D * tau_D) - 1.0) < 0.20,
                "broadening " + num(broad) + " vs tau_D^2 " + num(tau_D * tau_D));
    out.note("delay/tau_D " + num(delay / tau_D) + ", broadening/tau_D^2 " +
             num(broad / (tau_D * tau_D)));
    return out;
}

// 5. Intracavity enhancement at resonance.
Outcome criterion_enhancement() {
    Outcome out;
    const DeviceParams p = preset("fig3").device; // lossless fig2a cavity
    const auto s = segment_amplitudes(p, p.geometry.k0(), 1.0, 0.0);
    const double horizontal = std::norm(s.aM12);
    const double vertical = std::norm(s.a12);
    out.require(std::abs(horizontal / 25000.0 - 1.0) < 0.02,
                "|a_H/a|^2 " + num(horizontal) + " vs R1/(4R2) = 25000");
    out.require(std::abs(vertical / 0.025 - 1.0) < 0.05,
                "vertical fraction " + num(vertical) + " vs R1/4 = 0.025");
    out.note("|a_H/a|^2 " + num(horizontal) + ", vertical " + num(vertical));
    return out;
}

// 6. Small-loss expansion and the wave-packet absorption curves.
Outcome criterion_loss() {
    Outcome out;

    for (double a : {1e-9, 1e-8, 1e-7}) {
        DeviceParams p = preset("fig3").device;
        p.m1.A = p.m2.A = p.m3.A = p.m4.A = a;
        const double exact = monochromatic_absorption(p, p.geometry.k0()).P_b;
        const double expanded = absorption_expansion(p, 0.0).P;
        if (std::abs(expanded / exact - 1.0) >= 0.01) {
            out.require(false, "expansion at A = " + num(a) + ": " + num(expanded) + " vs " +
                                   num(exact));
        }
    }

    const DeviceParams base = preset("fig4").device;
    const PulseSpec packet{base.geometry.k0(), device_delay(base).tau_D, 1.0};
    auto with = [&](double A_MH, double A_MV) {
        DeviceParams p = base;
        p.m1.A = p.m3.A = A_MH;
        p.m2.A = p.m4.A = A_MV;
        return p;
    };

    // single knee over the full sweep [1e-8, 1]
    std::vector<double> grid, curve;
    for (int i = 0; i <= 32; ++i) {
        grid.push_back(std::pow(10.0, -8.0 + 8.0 * static_cast<double>(i) / 32.0));
        curve.push_back(wavepacket_absorption(with(grid.back(), 0.0), packet));
    }
    int maxima = 0;
    double knee_a = 0.0, knee_p = 0.0;
    for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
        if (curve[i] > curve[i - 1] && curve[i] > curve[i + 1]) {
            ++maxima;
            knee_a = grid[i];
            knee_p = curve[i];
        }
    }
    out.require(maxima == 1, "expected a single knee, found " + std::to_string(maxima));
    out.require(curve.back() < knee_p, "no decrease beyond the knee");

    // Appendix D endpoint: the closed forms describe one fully absorbing
    // mirror; with both mirrors black the loss halves (2 T1 R2/R1).
    DeviceParams single = base;
    single.m1.A = 1.0;
    const double p_single = wavepacket_absorption(single, packet);
    const double appendix = 4.0 * base.bs1.T * base.bs2.R / base.bs1.R;
    out.require(std::abs(p_single / appendix - 1.0) < 0.20,
                "IFM endpoint " + num(p_single) + " vs 4 T1 R2/R1 = " + num(appendix));
    const double p_both = wavepacket_absorption(with(1.0, 0.0), packet);

    // vertical absorption stays below horizontal through the published
    // regime (the curves cross near A ~ 5e-3, outside it)
    bool below = true;
    double worst_margin = 1e300;
    for (int i = 0; i <= 10; ++i) {
        const double a = std::pow(10.0, -8.0 + 5.0 * static_cast<double>(i) / 10.0);
        const double mh = wavepacket_absorption(with(a, 0.0), packet);
        const double mv = wavepacket_absorption(with(0.0, a), packet);
        below = below && (mv < mh);
        worst_margin = std::min(worst_margin, mh / mv);
    }
    out.require(below, "A_MV curve is not below A_MH on [1e-8, 1e-3]");

    out.note("knee at A_MH " + num(knee_a) + " (P " + num(knee_p) + "), single-absorber " +
             num(p_single) + " vs " + num(appendix) + " (both mirrors: " + num(p_both) +
             " vs 2T1R2/R1 = " + num(appendix / 2.0) + "), min MH/MV margin " +
             num(worst_margin));
    return out;
}

// 7. Conventional-cavity baseline.
Outcome criterion_single_cavity() {
    Outcome out;
    const double L = 50.0 * 795e-9;
    const double kres = 200.0 * pi / L;

    const auto rmatched = single_cavity_response(1.0 - 2e-6, 1e-6, 1e-6, L, kres);
    out.require(rmatched.resonant_transmission == 0.25,
                "A = T transmission " + num(rmatched.resonant_transmission) + " != 1/4");

    double worst = 0.0;
    for (double ta : {1e-2, 3e-3, 1e-3}) {
        const double T = 0.5 * ta, A = 0.5 * ta, R = 1.0 - ta;
        const auto r = single_cavity_response(R, T, A, L, kres);
        const double peak = std::norm(r.p);
        double lo = kres, hi = kres + 4.0 * r.linewidth;
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            (std::norm(single_cavity_response(R, T, A, L, mid).p) > peak / 2.0 ? lo : hi) = mid;
        }
        const double measured = 0.5 * (lo + hi) - kres;
        worst = std::max(worst, std::abs(measured / r.linewidth - 1.0));
    }
    out.require(worst < 0.02, "linewidth deviation " + num(worst) + " >= 2%");
    out.note("A=T transmission exact 1/4, worst linewidth deviation " + num(worst));
    return out;
}

// 8. Rubidium feasibility report.
Outcome criterion_rubidium() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const Preset p = preset("rubidium-xpm");
    const double tau_s = device_delay(p.device).tau_D / std::sqrt(6.0);
    const XpmReport rep = feasibility_report(p.device, p.medium.value(), tau_s);

    const double identity = 2.0 * pi * p.medium->gamma4 / p.medium->signal_detuning;
    out.require(std::abs(rep.P2_over_dphi - identity) < 1e-12,
                "P2/dphi " + num(rep.P2_over_dphi) + " != 2 pi gamma4/Delta");
    out.require(rep.alpha1_L >= 0.03 && rep.alpha1_L <= 0.3,
                "alpha1 L " + num(rep.alpha1_L) + " outside [0.03, 0.3]");
    out.require(rep.v_g > 1e2 && rep.v_g < 1e4,
                "v_g " + num(rep.v_g) + " beyond a factor 10 of 1e3 m/s");
    const double elapsed = seconds_since(t0);
    out.require(elapsed < 1.0, "runtime " + num(elapsed) + " s >= 1 s");

    char dphi_full[40];
    std::snprintf(dphi_full, sizeof(dphi_full), "%.15e", rep.dphi);
    out.note("P2/dphi " + num(rep.P2_over_dphi) + " (paper rounds to 0.1), alpha1 L " +
             num(rep.alpha1_L) + ", v_g " + num(rep.v_g) + " m/s, dphi = " + dphi_full +
             " rad [documented gap to the claimed pi: factor " + num(rep.gap_to_pi) +
             "], " + num(elapsed) + " s");
    return out;
}

// 9. Thin-plate reflectivity estimate.
Outcome criterion_thin_plate() {
    Outcome out;
    const double k = 2.0 * pi / 795e-9;
    const auto r = thin_plate_reflectivity(1.5, 10e-9, k);
    out.require(r.R2 > 5e-5 && r.R2 < 2e-4,
                "R2 " + num(r.R2) + " outside [5e-5, 2e-4]");
    out.note("R2(n=1.5, d=10nm, 795nm) = " + num(r.R2));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = std::atoi(argv[i + 1]);
        }
    }

    struct Entry {
        int id;
        const char* title;
        Outcome (*run)();
    };
    const Entry entries[] = {
        {1, "unitarity/passivity over randomized devices", criterion_unitarity},
        {2, "oracle equivalence (fixed point and lattice stepping)", criterion_oracle},
        {3, "split-resonance response curves", criterion_fig2},
        {4, "pulse delay and broadening law", criterion_delay},
        {5, "intracavity enhancement", criterion_enhancement},
        {6, "loss expansion and wave-packet absorption curves", criterion_loss},
        {7, "conventional-cavity baseline", criterion_single_cavity},
        {8, "rubidium feasibility report", criterion_rubidium},
        {9, "thin-plate reflectivity estimate", criterion_thin_plate},
    };

    int failures = 0;
    for (const auto& e : entries) {
        if (only != 0 && e.id != only) {
            continue;
        }
        Outcome out;
        try {
            out = e.run();
        } catch (const std::exception& ex) {
            out.pass = false;
            out.detail = std::string("exception: ") + ex.what();
        }
        std::printf("[%s] criterion %d: %s — %s\n", out.pass ? "PASS" : "FAIL", e.id, e.title,
                    out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) {
            ++failures;
        }
    }
    return failures;
}
