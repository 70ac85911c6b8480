#ifndef DCAVITY_DEVICE_HPP
#define DCAVITY_DEVICE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcavity/constants.hpp"
#include "dcavity/medium.hpp"

namespace dcavity {

// Lossy beam splitter. Intensity coefficients are stored; the amplitude
// coefficients r = sqrt(R), t = sqrt(T) are always derived.
struct BeamSplitterSpec {
    double R = 0.0; // reflectivity
    double T = 1.0; // transmissivity
    double A = 0.0; // absorption, R + T + A = 1

    double r() const { return std::sqrt(R); }
    double t() const { return std::sqrt(T); }
};

// End mirror with a small absorption; reflectivity is 1 - A.
struct MirrorSpec {
    double A = 0.0;

    double reflectivity() const { return 1.0 - A; }
    // Amplitude retained per reflection, sqrt(1 - A).
    double amplitude() const { return std::sqrt(1.0 - A); }
};

// Segment lengths of the double cavity (meters) and the reference
// wavelength. The vertical cavity is M4 -L5- BS1 -L1- BS2 -L4- M2 and the
// horizontal cavity is M1 -L3- BS2 -L2- M3.
struct GeometrySpec {
    double L1 = 0.0;
    double L2 = 0.0;
    double L3 = 0.0;
    double L4 = 0.0;
    double L5 = 0.0;
    double lambda0 = 795e-9;

    double vertical_length() const { return L1 + L4 + L5; }
    double horizontal_length() const { return L2 + L3; }
    double k0() const { return 2.0 * pi / lambda0; }
    double omega0() const { return k0() * speed_of_light; }

    std::array<double, 5> segments() const { return {L1, L2, L3, L4, L5}; }
};

struct DeviceParams {
    BeamSplitterSpec bs1;
    BeamSplitterSpec bs2;
    MirrorSpec m1, m2, m3, m4;
    GeometrySpec geometry;
};

struct ValidationIssue {
    std::string field;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const { return issues.empty(); }
    std::string to_string() const;
};

// Checks the partition R+T+A = 1 (1e-12), coefficient ranges, positive
// lengths. With require_resonance also checks that k0*L_V and k0*L_H are
// integer multiples of pi to 1e-9 relative.
ValidationReport validate(const DeviceParams& params, bool require_resonance = false);

// Named parameter sets reproducing the published configurations. fig3/fig4
// share the fig2a cavity with all absorptions zero; rubidium-xpm couples the
// lossless cavity to the four-level medium.
struct Preset {
    DeviceParams device;
    std::optional<EitMediumParams> medium;
};

Preset preset(const std::string& name);
std::vector<std::string> preset_names();

// Reflectivity of a thin dielectric plate used as BS2,
// R2 = [(n^2-1)/sqrt(2) * d/lambda]^2 with d/lambda = k d/(2 pi).
// thin_film_warning is set when 2 pi d / lambda exceeds 0.1.
struct ThinPlateResult {
    double R2 = 0.0;
    bool thin_film_warning = false;
};
ThinPlateResult thin_plate_reflectivity(double n, double d, double k);

// Flat key=value configuration files, SI units, '#' comments. Errors name
// the offending key.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

DeviceParams load_config(const std::string& path);
void save_config(const DeviceParams& params, const std::string& path);
DeviceParams parse_config_text(const std::string& text);
std::string config_text(const DeviceParams& params);

} // namespace dcavity

#endif
