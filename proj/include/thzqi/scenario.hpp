#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "thzqi/distill.hpp"
#include "thzqi/metrics.hpp"
#include "thzqi/optics.hpp"
#include "thzqi/scene.hpp"
#include "thzqi/synth.hpp"

namespace thzqi::scenario {

/// Problem with a scenario file itself (maps to exit code 1).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Failure while executing a stage of a valid scenario (exit code 2).
struct StageError : std::runtime_error {
    std::string stage;
    StageError(std::string stage_name, const std::string& message)
        : std::runtime_error("stage '" + stage_name + "': " + message),
          stage(std::move(stage_name))
    {
    }
};

struct SceneSpec {
    std::string type = "plain_mirror";
    double line_width = 0.3e-3;        // cross_cutout
    scene::TapeSpec tape;              // tape_stripes
    double extinction_left = 0.0;      // half_absorber
    double extinction_right = 0.0;
    double edge_x = 0.0;               // knife_edge
    std::string raster_path;           // csv_raster

    scene::SceneObject build() const;
};

struct AnalysisSpec {
    double band_lo = 1.4e12;
    double band_hi = 1.6e12;
    double quiet_lo = 0.6e12;
    double quiet_hi = 1.2e12;
    double threshold = 1e-3;
    bool fov_radial_average = false;
    double shared_fit_min_snr = 3.0;
};

struct KnifeSweepSpec {
    int count = 12;
    double span = 0.55e-3;              // m, sample plane, centered on the ROI column
    std::vector<double> positions;      // explicit override
};

struct ExtinctionEvalSpec {
    double x_lo = -0.8e-3;     // evaluated box in sample-plane coordinates
    double x_hi = 0.8e-3;
    double edge_margin = 0.2e-3;  // keep clear of the absorber boundary
    int row_halfwidth = 4;
};

struct Scenario {
    std::string name;
    optics::ConfigBundle bundle;
    synth::NoiseSpec noise;
    synth::SourceModel source;
    SceneSpec scene_spec;
    AnalysisSpec analysis;
    std::optional<KnifeSweepSpec> knife;
    std::optional<std::pair<double, double>> tds_reference;  // squared field
    std::optional<ExtinctionEvalSpec> extinction_eval;
    std::vector<std::string> outputs;
    std::optional<std::pair<int, int>> waveform_pixel;  // default: brightest
};

/// Parse scenario JSON (comments allowed). Parse errors carry the source
/// line; semantic errors name the offending field.
Scenario parse_scenario(const std::string& text, const std::string& origin);

struct CatalogEntry {
    std::string name;
    std::string summary;
};

/// Bundled scenarios, in catalog order.
const std::vector<CatalogEntry>& catalog();

/// Raw JSON text of a bundled scenario (with its explanatory comments).
std::string bundled_scenario_text(const std::string& name);

/// Load either a bundled scenario by name or a scenario file by path.
Scenario load_scenario(const std::string& name_or_path);

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> qmc_samples;
    std::optional<std::string> noise_mode;  // "off" or "experimental"
};

struct RunResult {
    std::string manifest_json;
    metrics::MetrologyReport report;
    distill::DistilledImage reference_image;   // modulation-depth amplitudes
    distill::DistilledImage result_image;      // reference-normalized sample
    std::vector<double> floor;                 // per-pixel quiet-band level
    distill::SharedWaveformParams shared;
    double pixel_pitch_sample_plane = 0.0;     // m per binned pixel
    std::optional<double> fov;                 // m
    std::optional<metrics::KnifeEdgeResult> knife;
    std::vector<double> knife_positions;       // m, sample plane
    std::vector<double> knife_amplitudes;      // integrated column response
    std::optional<double> measured_extinction;
    std::optional<std::pair<double, double>> tds_lines;
};

/// Execute every stage of the scenario and write the requested artifacts
/// plus manifest.json under out_dir. Throws ValidationError / StageError.
RunResult run_scenario(const Scenario& s, const std::string& out_dir,
                       const RunOptions& opts = {});

/// FNV-1a 64-bit checksum, as used in the manifest.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace thzqi::scenario
