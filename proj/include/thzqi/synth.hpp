#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "thzqi/biphoton.hpp"
#include "thzqi/optics.hpp"
#include "thzqi/scene.hpp"

namespace thzqi::synth {

/// Detector counts over a delay scan: [row][col][delay_index], binned pixels.
struct WaveformCube {
    int rows = 0;
    int cols = 0;
    std::vector<double> counts;
    double pixel_pitch_effective = 0.0;  // binned pitch in the crystal plane, m
    std::vector<double> delay_times;     // s, strictly increasing, uniform

    int n_delays() const { return static_cast<int>(delay_times.size()); }
    double dt() const
    {
        return delay_times.size() > 1 ? delay_times[1] - delay_times[0] : 0.0;
    }
    std::size_t index(int r, int c, int d) const
    {
        return (static_cast<std::size_t>(r) * cols + c) * delay_times.size() +
               d;
    }
    double at(int r, int c, int d) const { return counts[index(r, c, d)]; }
    double& at(int r, int c, int d) { return counts[index(r, c, d)]; }
    std::vector<double> waveform(int r, int c) const;
};

struct NoiseSpec {
    double visibility_scale = 1.0;   // 1 = noiseless; 0.0015 emulates the bench
    bool shot_noise = false;
    double background_rate = 150.0;  // counts/s per raw pixel
    std::uint64_t rng_seed = 0;
};

/// Overall brightness of the pair source: total signal photons per second
/// reaching the detector plane, integrated over all pixels. The count-rate
/// law fixes only relative rates, so this scale is a free experimental knob.
struct SourceModel {
    double rate = 6.1e4;               // photons/s
    std::size_t qmc_samples = 65536;
    std::uint64_t sequence_offset = 0;
};

struct EmptyPixel : std::exception {
    const char* what() const noexcept override
    {
        return "pixel_count_rate: no pair samples fall inside the pixel "
               "footprint (increase the sample count)";
    }
};

/// Idler spectral quadrature: n equally spaced frequencies within
/// +-2 FWHM of the center, with normalized density weights.
void spectral_quadrature(const optics::SpectralModel& spectral,
                         std::vector<double>& frequencies,
                         std::vector<double>& weights);

/// Signal photon rate (photons/s, before quantum efficiency and background)
/// at the binned pixel centered at camera-plane position rho_d, for one
/// delay. Averages the object term over the idler spectrum and restricts the
/// pair samples to those whose signal position falls inside the pixel
/// footprint. Throws EmptyPixel when no sample lands there.
double pixel_count_rate(const biphoton::TransversePoint& rho_d, double delay,
                        const scene::SceneObject& obj,
                        const optics::ConfigBundle& bundle,
                        const SourceModel& source, double visibility_scale,
                        std::span<const biphoton::PairSample> samples);

/// Synthesize the full delay scan. Parallel over pixels; results are
/// independent of the thread count (each pixel's reduction runs in a fixed
/// order and the noise generator is counter-based).
WaveformCube synthesize_scan(const scene::SceneObject& obj,
                             const optics::ConfigBundle& bundle,
                             const NoiseSpec& noise, const SourceModel& source);

/// Slow single-threaded reference: sums the count-rate law directly per
/// (pixel, delay, sample, frequency) without the factored trig recurrence.
/// Kept for testing the fast path against.
WaveformCube synthesize_scan_reference(const scene::SceneObject& obj,
                                       const optics::ConfigBundle& bundle,
                                       const NoiseSpec& noise,
                                       const SourceModel& source);

/// A raw [row][col][depth] frame stack, for the standalone binning step.
struct Frames {
    int rows = 0;
    int cols = 0;
    int depth = 0;
    std::vector<double> data;
    double at(int r, int c, int d) const
    {
        return data[(static_cast<std::size_t>(r) * cols + c) * depth + d];
    }
};

/// Sum binning x binning blocks per frame; excess rows/cols are truncated.
Frames apply_binning(const Frames& raw, int binning);

/// Cube persistence. The directory layout is meta.json plus one CSV matrix
/// per delay frame; the raster form is a single file with a 64-byte header
/// (magic "THZWCUB1", dims, axis) and little-endian 32-bit float data.
void save_cube_csv(const WaveformCube& cube, const std::string& dir);
WaveformCube load_cube_csv(const std::string& dir);
void save_cube_binary(const WaveformCube& cube, const std::string& path);
WaveformCube load_cube_binary(const std::string& path);

}  // namespace thzqi::synth
