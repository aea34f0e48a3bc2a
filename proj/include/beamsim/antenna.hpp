// SPDX-License-Identifier: Apache-2.0
//
// Planar dipole array in front of an infinite PEC reflector.
//
// Angle convention: theta is measured from the +z axis (zenith), phi from the
// array boresight (+x, normal to the reflector). The reflector occupies the
// x = 0 plane, so every direction with |phi| > pi/2 is shadowed.
// Element spacings are expressed in wavelengths.

#pragma once

#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace beamsim
{

class ConvergenceError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct ArrayDesign
{
    int n_x = 1;  // columns (horizontal)
    int n_z = 1;  // rows (vertical)
    double d_x = 0.5;
    double d_z = 0.5;
    double alpha_x = 1.0;  // edge-to-center amplitude ratio
    double alpha_z = 1.0;

    double length_x() const { return (n_x - 1) * d_x; }
    double length_z() const { return (n_z - 1) * d_z; }

    ArrayDesign with_size(int nx, int nz) const
    {
        ArrayDesign d = *this;
        d.n_x = nx;
        d.n_z = nz;
        return d;
    }

    // Throws std::invalid_argument when any field is out of range.
    void validate(double d_x_max = 0.5, double d_z_max = 0.7) const;

    bool operator==(const ArrayDesign &) const = default;
};

struct SteeringAngles
{
    double theta_e = 1.5707963267948966;
    double phi_e = 0.0;

    bool operator==(const SteeringAngles &) const = default;
};

struct Direction
{
    double theta = 1.5707963267948966;
    double phi = 0.0;
};

struct PatternSample
{
    Direction direction;
    double normalized_gain = 0.0;
    double absolute_gain_db = 0.0;
};

struct TaperWeights
{
    std::vector<double> x;
    std::vector<double> z;
};

// Gaussian amplitude taper of a uniform line of n elements, normalized so the
// largest weight is 1. The edge-to-center ratio equals alpha.
std::vector<double> gaussian_taper(int n, double alpha);

TaperWeights taper_weights(const ArrayDesign &design);

std::complex<double> array_factor_x(const ArrayDesign &design, const SteeringAngles &steer, const Direction &dir);
std::complex<double> array_factor_z(const ArrayDesign &design, const SteeringAngles &steer, const Direction &dir);

// Two-element factor of a dipole and its PEC image a quarter wavelength apart.
double image_factor(const Direction &dir);

// sin^3(theta)
double dipole_gain(const Direction &dir);

double normalized_pattern(const ArrayDesign &design, const SteeringAngles &steer, const Direction &dir);

// Gain normalization G0 = 4 pi / integral(f sin(theta)) over the front
// half-space. Midpoint rule on a resolution x resolution (theta, phi) grid,
// checked against one refinement at twice the resolution.
double peak_gain_g0(const ArrayDesign &design, const SteeringAngles &steer, int resolution = 512);

// Same integral at a single resolution, no refinement check.
double pattern_solid_angle_integral(const ArrayDesign &design, const SteeringAngles &steer, int resolution);

// Depth in dB of the strongest secondary lobe below the main-lobe peak, searched
// on a uniform direction-cosine grid anchored at the steering direction.
// Returns nullopt when the pattern has no secondary lobe.
std::optional<double> sidelobe_level_db(const ArrayDesign &design, const SteeringAngles &steer,
                                        int grid_resolution = 512);

// Precomputed pattern of one beam. All the free functions above route through
// this class; hold on to one when evaluating many directions.
class BeamPattern
{
public:
    BeamPattern(const ArrayDesign &design, const SteeringAngles &steer);

    const ArrayDesign &design() const { return design_; }
    const SteeringAngles &steer() const { return steer_; }

    // Array factors as functions of the direction cosines
    // u = sin(theta) sin(phi) and w = cos(theta).
    std::complex<double> af_x(double u) const;
    std::complex<double> af_z(double w) const;
    double af_x_power(double u) const;
    double af_z_power(double w) const;

    double normalized(const Direction &dir) const;

    // f expressed through direction cosines; zero outside the visible front
    // half-space u^2 + w^2 <= 1.
    double normalized_uw(double u, double w) const;

    double u_e() const { return u_e_; }
    double w_e() const { return w_e_; }

private:
    ArrayDesign design_;
    SteeringAngles steer_;
    std::vector<double> wx_, wz_;
    double sum_wx_ = 1.0, sum_wz_ = 1.0;
    double u_e_ = 0.0, w_e_ = 0.0;
    // |AF|^2 as a cosine series: c0 + 2 sum_p c_p cos(p beta), normalized.
    std::vector<double> cx_, cz_;
};

// Gain pattern with its G0 cached; absolute gain G0 * f.
class BeamGain
{
public:
    BeamGain(const ArrayDesign &design, const SteeringAngles &steer, int resolution = 512);
    BeamGain(const ArrayDesign &design, const SteeringAngles &steer, double g0);

    double g0() const { return g0_; }
    double g0_db() const;
    double linear(const Direction &dir) const { return g0_ * pattern_.normalized(dir); }
    const BeamPattern &pattern() const { return pattern_; }

private:
    BeamPattern pattern_;
    double g0_;
};

// Pattern export rows.
std::vector<PatternSample> sample_pattern_grid(const BeamGain &beam, int n_theta, int n_phi);
// Elevation cut at phi = phi_e (angle = theta) or azimuth cut at theta = theta_e
// (angle = phi).
std::vector<std::pair<double, double>> principal_cut_db(const BeamGain &beam, bool elevation, int samples);

double to_db(double linear);
double from_db(double db);

} // namespace beamsim
