#pragma once

#include <string>
#include <utility>
#include <vector>

#include "thzqi/distill.hpp"
#include "thzqi/synth.hpp"

namespace thzqi::metrics {

struct MetrologyReport {
    double fov = 0.0;             // m, sample plane
    double fov_uncertainty = 0.0;
    double resolution = 0.0;      // m, sample plane
    double resolution_uncertainty = 0.0;
    double spatial_modes = 0.0;
    double noise_floor_median = 0.0;  // modulation depth
    std::string notes;

    std::string to_json() const;
};

struct ExtinctionCurve {
    std::vector<double> frequencies;
    std::vector<double> k_values;

    void save_csv(const std::string& path) const;
};

struct NoSignal : std::exception {
    const char* what() const noexcept override
    {
        return "measure_fov: no pixel exceeds floor + threshold";
    }
};
struct NonPositiveAmplitude : std::exception {
    const char* what() const noexcept override
    {
        return "extinction: amplitudes must be > 0";
    }
};
struct EmptyRegion : std::exception {
    const char* what() const noexcept override
    {
        return "align_tds_to_imaging: empty column region";
    }
};

/// Per-pixel maximum spectral amplitude inside the quiet band where no
/// interference is expected, in the same modulation-depth normalization as
/// the distilled amplitudes.
std::vector<double> noise_floor(const synth::WaveformCube& cube,
                                double quiet_lo, double quiet_hi);

/// Width of the region whose reference amplitude exceeds floor + threshold,
/// measured along the horizontal cross-section through the amplitude
/// centroid, with sub-pixel interpolation at the two crossings. The result
/// is in sample-plane meters; pixel_pitch_sample_plane converts image pixels
/// there. radial_average switches to an annular-mean profile around the
/// centroid instead of a single row.
double measure_fov(const distill::DistilledImage& reference,
                   const std::vector<double>& floor, double threshold,
                   double pixel_pitch_sample_plane,
                   bool radial_average = false);

/// Spread of measure_fov under +-20% threshold perturbation (half the
/// high-low difference), used as the FoV uncertainty.
double fov_threshold_spread(const distill::DistilledImage& reference,
                            const std::vector<double>& floor, double threshold,
                            double pixel_pitch_sample_plane,
                            bool radial_average = false);

struct EdgeFit {
    double offset = 0.0;      // a
    double amplitude = 0.0;   // b (sign follows the scan direction)
    double center = 0.0;      // x0, m
    double sigma = 0.0;       // m
    double sigma_uncertainty = 0.0;
    bool converged = false;
    bool monotonic_warning = false;  // raw data not monotone beyond noise
};

struct KnifeEdgeResult {
    double resolution = 0.0;  // FWHM of the derivative Gaussian, m
    double resolution_uncertainty = 0.0;
    EdgeFit fit;
};

/// Least-squares fit of a + b*erf((x - x0)/(sqrt(2) sigma)) to the edge
/// responses; resolution = 2 sqrt(2 ln 2) * sigma.
KnifeEdgeResult knife_edge_resolution(
    const std::vector<double>& edge_positions,
    const std::vector<double>& integrated_amplitudes);

double spatial_mode_count(double fov, double resolution);

/// Base-10 extinction 2*log10(a0/a).
double extinction(double a0, double a);

/// Shift both TDS values by one common offset so the left one matches the
/// mean of the imaging values over [left_begin, left_end). The left-right
/// difference is preserved exactly.
std::pair<double, double> align_tds_to_imaging(
    std::pair<double, double> tds_pair,
    const std::vector<double>& imaging_column_means, int left_begin,
    int left_end);

}  // namespace thzqi::metrics
