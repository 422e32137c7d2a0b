#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thzqi/synth.hpp"

namespace thzqi::distill {

struct PixelSpectrum {
    std::vector<double> frequencies;  // Hz, 0 .. Nyquist, uniform
    std::vector<double> amplitudes;   // same normalization as the waveform
};

/// Parameters of the waveform model
///   A * sin(nu t + phi) * exp(-(t - t_c)^2 / (2 w^2)) + y_0.
struct WaveformFitParams {
    double amplitude = 0.0;          // A, counts, >= 0
    double angular_frequency = 0.0;  // nu, rad/s
    double phase = 0.0;              // phi in (-pi, pi]
    double envelope_center = 0.0;    // t_c, s
    double envelope_width = 0.0;     // w, s, > 0
    double offset = 0.0;             // y_0, counts
};

/// The setup-wide subset of the model: everything except per-pixel A, phi.
struct SharedWaveformParams {
    double angular_frequency = 0.0;
    double envelope_center = 0.0;
    double envelope_width = 0.0;
    double offset = 0.0;
};

/// Per-pixel band-peak amplitude and fitted phase. Amplitudes are raw FFT
/// band peaks in count units (linear in the counts); mean_counts holds the
/// per-pixel mean so thresholds can be taken on the modulation-depth scale
/// amplitude / mean_counts.
struct DistilledImage {
    int rows = 0;
    int cols = 0;
    std::vector<double> amplitude;
    std::vector<double> mean_counts;
    std::vector<double> phase;        // radians, defined only where valid
    std::vector<std::uint8_t> valid;
    double band_lo = 0.0;
    double band_hi = 0.0;
    double pixel_pitch_effective = 0.0;  // crystal plane, m

    std::size_t index(int r, int c) const
    {
        return static_cast<std::size_t>(r) * cols + c;
    }
    /// amplitude over mean counts; 0 where the mean is not positive
    double modulation_depth(std::size_t i) const
    {
        return mean_counts[i] > 0.0 ? amplitude[i] / mean_counts[i] : 0.0;
    }
};

struct TooShort : std::exception {
    const char* what() const noexcept override
    {
        return "preprocess_waveform: need at least 8 samples";
    }
};
struct EmptyBand : std::exception {
    const char* what() const noexcept override
    {
        return "band_peak: no spectral bin inside the requested band";
    }
};
struct NoConvergence : std::exception {
    const char* what() const noexcept override
    {
        return "waveform fit did not converge";
    }
};
struct InsufficientSNR : std::exception {
    const char* what() const noexcept override
    {
        return "fit_shared_params: band peak below the noise floor";
    }
};
struct DegenerateEnvelope : std::exception {
    const char* what() const noexcept override
    {
        return "fit_pixel_phase: envelope support below 3 samples";
    }
};
struct ShapeMismatch : std::exception {
    const char* what() const noexcept override
    {
        return "reference_normalize: image shapes differ";
    }
};

/// Mean removal followed by cosine half-window ramps over the first and last
/// taper_fraction of the samples (exactly zero at both endpoints).
std::vector<double> preprocess_waveform(const std::vector<double>& w,
                                        double taper_fraction = 0.1);

/// Magnitude spectrum of the preprocessed waveform, zero-padded to the next
/// power of two >= 4N. Amplitudes are scaled by 2/N so an un-windowed unit
/// cosine spanning the scan reads as 1.
PixelSpectrum waveform_spectrum(const std::vector<double>& w, double dt);

struct BandPeak {
    double amplitude = 0.0;
    double frequency = 0.0;
};

/// Maximum spectral amplitude over bins inside [f_lo, f_hi].
BandPeak band_peak(const PixelSpectrum& s, double f_lo, double f_hi);
double band_peak_amplitude(const PixelSpectrum& s, double f_lo, double f_hi);

/// Per-pixel preprocess -> spectrum -> band peak. Parallel over pixels;
/// valid everywhere at this stage.
DistilledImage distill_image(const synth::WaveformCube& cube, double f_lo,
                             double f_hi);

/// Single-threaded counterpart kept as a reference for the parallel path.
DistilledImage distill_image_reference(const synth::WaveformCube& cube,
                                       double f_lo, double f_hi);

/// Fit the full waveform model to the mean waveform of the given pixels and
/// return the shared parameters. Seeds come from the band peak (frequency),
/// envelope centroid and second moment, and the mean. Requires the mean
/// waveform's band peak to exceed the quiet-band floor by min_snr.
SharedWaveformParams fit_shared_params(
    const synth::WaveformCube& cube,
    const std::vector<std::pair<int, int>>& roi, double f_lo, double f_hi,
    double quiet_lo = 0.6e12, double quiet_hi = 1.2e12, double min_snr = 3.0);

/// Closed-form per-pixel fit of (A, phi) with the shared parameters fixed:
/// linear least squares against the enveloped quadrature pair. A >= 0 and
/// phi in (-pi, pi].
std::pair<double, double> fit_pixel_phase(const std::vector<double>& w,
                                          const std::vector<double>& delays,
                                          const SharedWaveformParams& shared);

/// Run fit_pixel_phase over every pixel of the cube and store phases in the
/// image (parallel). Pixels whose fit degenerates are marked invalid.
void fill_phases(DistilledImage& image, const synth::WaveformCube& cube,
                 const SharedWaveformParams& shared);

/// Ratio amplitudes, difference phases (wrapped), and a validity mask that
/// keeps only pixels whose reference amplitude exceeds floor + threshold on
/// the modulation-depth scale ((amplitude - floor) / mean > threshold).
/// Pass floor = nullptr to threshold against zero.
DistilledImage reference_normalize(const DistilledImage& image,
                                   const DistilledImage& reference,
                                   double threshold,
                                   const std::vector<double>* floor = nullptr);

/// Pixels whose amplitude exceeds min_snr times their floor value; useful as
/// the ROI for the shared fit.
std::vector<std::pair<int, int>> select_roi(const DistilledImage& image,
                                            const std::vector<double>& floor,
                                            double min_snr = 3.0);

double wrap_phase(double phi);

}  // namespace thzqi::distill
