#pragma once

#include <exception>
#include <string>
#include <vector>

namespace thzqi::optics {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Physical parameters of the nonlinear interferometer. All lengths in
/// meters. Defaults describe the reference setup: a 1 mm crystal pumped at
/// a 0.885 mm waist, 662.2 nm signal photons paired with 200 um idlers.
struct OpticalConfig {
    double lambda_vis = 662.2e-9;    // detected (signal) wavelength
    double lambda_thz = 200e-6;      // undetected (idler) wavelength
    double crystal_length = 1e-3;
    double pump_waist = 0.885e-3;
    double mag_thz = 0.78;           // sample plane <-> crystal plane
    double mag_vis = 3.43;           // crystal plane -> camera plane
    double mag_image = 2.67;         // quoted sample -> camera magnification
    double na_limit = 0.447;         // limiting numerical aperture
};

/// Delay-scan acquisition parameters. The stage moves by step_length per
/// frame; the optical path changes by twice that (reflection geometry).
struct ScanConfig {
    double step_length = 10e-6;          // m per frame
    int n_steps = 150;
    int frames_averaged_per_step = 1000;
    double exposure = 1.0;               // s per frame
};

enum class SpectralShape { gaussian, sinc_squared };

/// Model of the idler spectral density around the phase-matched frequency.
struct SpectralModel {
    double center_frequency = 1.5e12;  // Hz
    double fwhm = 0.1e12;              // Hz
    int n_frequency_samples = 21;      // odd, so the center is sampled
    SpectralShape shape = SpectralShape::gaussian;
};

struct CameraConfig {
    double pixel_pitch = 5.04e-6;      // m, raw pixel
    int binning = 3;
    double quantum_efficiency = 0.55;
    double background_rate = 150.0;    // counts/s per raw pixel
    int sensor_rows = 192;
    int sensor_cols = 192;
};

struct ConfigBundle {
    OpticalConfig optics;
    ScanConfig scan;
    SpectralModel spectral;
    CameraConfig camera;
};

struct InvalidNA : std::exception {
    const char* what() const noexcept override
    {
        return "diffraction_resolution: numerical aperture outside (0, 1]";
    }
};

/// Illumination field of view in the sample plane:
/// sqrt(2 ln 2) * pump_waist / mag_thz.
double theoretical_fov(const OpticalConfig& cfg);

/// Aperture-limited resolution 0.51 * lambda / NA. Throws InvalidNA.
double diffraction_resolution(double lambda_thz, double na);

/// Optical delay per stage step: 2 * dx / c (round trip to the end mirror).
double delay_time_step(double step_length);

struct Violation {
    std::string field;
    std::string constraint;
};

/// Checks every type invariant of the bundle. Empty result means valid.
std::vector<Violation> validate(const ConfigBundle& bundle);

/// Throws std::invalid_argument naming the first violation, if any.
void require_valid(const ConfigBundle& bundle);

/// Delay times (s) for the scan, uniformly spaced and centered on zero.
std::vector<double> delay_axis(const ScanConfig& scan);

/// Parse a config bundle from JSON text (lengths in meters, times in
/// seconds, frequencies in hertz). Unknown fields are rejected.
ConfigBundle bundle_from_json(const std::string& text);
std::string bundle_to_json(const ConfigBundle& bundle);

}  // namespace thzqi::optics
