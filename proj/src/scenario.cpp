#include "thzqi/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "thzqi/qmc.hpp"
#include "thzqi/raster_io.hpp"

namespace thzqi::scenario {

using nlohmann::json;

scene::SceneObject SceneSpec::build() const
{
    if (type == "plain_mirror")
        return scene::plain_mirror();
    if (type == "cross_cutout")
        return scene::cross_cutout(line_width);
    if (type == "tape_stripes")
        return scene::tape_stripes(tape);
    if (type == "half_absorber")
        return scene::half_absorber(extinction_left, extinction_right);
    if (type == "knife_edge")
        return scene::knife_edge(edge_x);
    if (type == "csv_raster")
        return scene::from_csv_raster(raster_path);
    throw ValidationError("scene.type: unknown scene '" + type + "'");
}

namespace {

int line_of_byte(const std::string& text, std::size_t byte)
{
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n')
            ++line;
    return line;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin)
{
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ValidationError(origin + ":" +
                              std::to_string(line_of_byte(text, e.byte)) +
                              ": " + e.what());
    }

    Scenario s;
    try {
        s.name = j.value("name", std::string("unnamed"));
        s.bundle = optics::bundle_from_json(text);

        if (j.contains("noise")) {
            const auto& n = j.at("noise");
            s.noise.visibility_scale =
                n.value("visibility_scale", s.noise.visibility_scale);
            s.noise.shot_noise = n.value("shot_noise", s.noise.shot_noise);
            s.noise.background_rate =
                n.value("background_rate", s.bundle.camera.background_rate);
            s.noise.rng_seed = n.value("rng_seed", s.noise.rng_seed);
        } else {
            s.noise.background_rate = s.bundle.camera.background_rate;
        }
        if (j.contains("source")) {
            const auto& src = j.at("source");
            s.source.rate = src.value("rate", s.source.rate);
            s.source.qmc_samples =
                src.value("qmc_samples", s.source.qmc_samples);
            s.source.sequence_offset =
                src.value("sequence_offset", s.source.sequence_offset);
        }
        if (j.contains("scene")) {
            const auto& sc = j.at("scene");
            s.scene_spec.type = sc.value("type", s.scene_spec.type);
            s.scene_spec.line_width =
                sc.value("line_width", s.scene_spec.line_width);
            s.scene_spec.tape.refractive_index = sc.value(
                "refractive_index", s.scene_spec.tape.refractive_index);
            s.scene_spec.tape.thickness =
                sc.value("thickness", s.scene_spec.tape.thickness);
            s.scene_spec.tape.stripe_width =
                sc.value("stripe_width", s.scene_spec.tape.stripe_width);
            s.scene_spec.extinction_left =
                sc.value("extinction_left", s.scene_spec.extinction_left);
            s.scene_spec.extinction_right =
                sc.value("extinction_right", s.scene_spec.extinction_right);
            s.scene_spec.edge_x = sc.value("edge_x", s.scene_spec.edge_x);
            s.scene_spec.raster_path =
                sc.value("path", s.scene_spec.raster_path);
        }
        if (j.contains("analysis")) {
            const auto& a = j.at("analysis");
            if (a.contains("band")) {
                s.analysis.band_lo = a.at("band").at(0).get<double>();
                s.analysis.band_hi = a.at("band").at(1).get<double>();
            }
            if (a.contains("quiet_band")) {
                s.analysis.quiet_lo = a.at("quiet_band").at(0).get<double>();
                s.analysis.quiet_hi = a.at("quiet_band").at(1).get<double>();
            }
            s.analysis.threshold =
                a.value("threshold", s.analysis.threshold);
            s.analysis.fov_radial_average = a.value(
                "fov_radial_average", s.analysis.fov_radial_average);
            s.analysis.shared_fit_min_snr = a.value(
                "shared_fit_min_snr", s.analysis.shared_fit_min_snr);
        }
        if (j.contains("knife_edge_sweep")) {
            KnifeSweepSpec k;
            const auto& kj = j.at("knife_edge_sweep");
            k.count = kj.value("count", k.count);
            k.span = kj.value("span", k.span);
            if (kj.contains("positions"))
                k.positions = kj.at("positions").get<std::vector<double>>();
            s.knife = k;
        }
        if (j.contains("tds_reference")) {
            const auto& t = j.at("tds_reference");
            s.tds_reference = {t.at("left").get<double>(),
                               t.at("right").get<double>()};
        }
        if (j.contains("extinction_eval")) {
            ExtinctionEvalSpec e;
            const auto& ej = j.at("extinction_eval");
            e.x_lo = ej.value("x_lo", e.x_lo);
            e.x_hi = ej.value("x_hi", e.x_hi);
            e.edge_margin = ej.value("edge_margin", e.edge_margin);
            e.row_halfwidth = ej.value("row_halfwidth", e.row_halfwidth);
            s.extinction_eval = e;
        }
        if (j.contains("outputs"))
            s.outputs = j.at("outputs").get<std::vector<std::string>>();
        if (j.contains("waveform_pixel")) {
            const auto& p = j.at("waveform_pixel");
            s.waveform_pixel = {p.at(0).get<int>(), p.at(1).get<int>()};
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        throw ValidationError(origin + ": " + e.what());
    }

    // cross-checks beyond the per-field parses
    const auto violations = optics::validate(s.bundle);
    if (!violations.empty()) {
        std::string msg = origin + ": invalid configuration:";
        for (const auto& v : violations)
            msg += "\n  " + v.field + ": " + v.constraint;
        throw ValidationError(msg);
    }
    if (!(s.noise.visibility_scale >= 0.0 && s.noise.visibility_scale <= 1.0))
        throw ValidationError(origin +
                              ": visibility_scale: must be in [0, 1]");
    if (s.source.rate <= 0.0)
        throw ValidationError(origin + ": source.rate: must be > 0");
    if (s.source.qmc_samples < 1)
        throw ValidationError(origin + ": source.qmc_samples: must be >= 1");
    if (!(s.analysis.band_lo < s.analysis.band_hi))
        throw ValidationError(origin + ": analysis.band: lo must be < hi");
    if (!(s.analysis.quiet_lo < s.analysis.quiet_hi))
        throw ValidationError(origin +
                              ": analysis.quiet_band: lo must be < hi");
    return s;
}

Scenario load_scenario(const std::string& name_or_path)
{
    for (const auto& entry : catalog()) {
        if (entry.name == name_or_path)
            return parse_scenario(bundled_scenario_text(name_or_path),
                                  name_or_path);
    }
    std::ifstream in(name_or_path);
    if (!in)
        throw ValidationError("scenario '" + name_or_path +
                              "' is neither a bundled name nor a readable file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), name_or_path);
}

std::uint64_t fnv1a64(const void* data, std::size_t size)
{
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& bytes)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(
                      fnv1a64(bytes.data(), bytes.size())));
    return buf;
}

namespace {

struct ArtifactLog {
    std::filesystem::path root;
    json entries = json::array();

    void add(const std::string& name, const std::string& rel_path)
    {
        std::ifstream in(root / rel_path, std::ios::binary);
        if (!in)
            throw std::runtime_error("artifact missing after write: " +
                                     rel_path);
        std::stringstream ss;
        ss << in.rdbuf();
        const std::string bytes = ss.str();
        entries.push_back({{"name", name},
                           {"file", rel_path},
                           {"bytes", bytes.size()},
                           {"fnv64", fnv1a64_hex(bytes)}});
    }
};

bool wants(const Scenario& s, const std::string& output)
{
    return std::find(s.outputs.begin(), s.outputs.end(), output) !=
           s.outputs.end();
}

void write_xy_csv(const std::filesystem::path& path, const char* header,
                  const std::vector<std::pair<double, double>>& rows)
{
    std::ofstream out(path);
    out.precision(12);
    out << header << '\n';
    for (const auto& [a, b] : rows)
        out << a << ',' << b << '\n';
}

// sample-plane x coordinate of a binned pixel column center
double column_sample_x(const distill::DistilledImage& img, int col,
                       double mag_thz)
{
    const double pitch_crystal = img.pixel_pitch_effective;
    const double half = 0.5 * img.cols * pitch_crystal;
    return ((col + 0.5) * pitch_crystal - half) * mag_thz;
}

int column_of_sample_x(const distill::DistilledImage& img, double x_sample,
                       double mag_thz)
{
    const double pitch_crystal = img.pixel_pitch_effective;
    const double half = 0.5 * img.cols * pitch_crystal;
    const int c = static_cast<int>(
        std::floor((x_sample / mag_thz + half) / pitch_crystal));
    return std::clamp(c, 0, img.cols - 1);
}

}  // namespace

RunResult run_scenario(const Scenario& scenario_in, const std::string& out_dir,
                       const RunOptions& opts)
{
    Scenario s = scenario_in;
    if (opts.seed)
        s.noise.rng_seed = *opts.seed;
    if (opts.qmc_samples)
        s.source.qmc_samples = *opts.qmc_samples;
    if (opts.noise_mode) {
        if (*opts.noise_mode == "off") {
            s.noise.visibility_scale = 1.0;
            s.noise.shot_noise = false;
        } else if (*opts.noise_mode == "experimental") {
            s.noise.visibility_scale = 0.0015;
            s.noise.shot_noise = true;
        } else {
            throw ValidationError("noise mode must be 'off' or 'experimental'");
        }
    }

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    ArtifactLog log{fs::path(out_dir)};
    RunResult result;

    auto stage = [](const char* name, auto&& fn) {
        try {
            return fn();
        } catch (const std::exception& e) {
            throw StageError(name, e.what());
        }
    };

    const auto& an = s.analysis;
    const double mag_thz = s.bundle.optics.mag_thz;

    // reference acquisition: a plain mirror imaged with the same settings
    synth::WaveformCube ref_cube = stage("reference synthesis", [&] {
        return synth::synthesize_scan(scene::plain_mirror(), s.bundle, s.noise,
                                      s.source);
    });

    result.pixel_pitch_sample_plane =
        ref_cube.pixel_pitch_effective * mag_thz;

    stage("reference distillation", [&] {
        result.reference_image =
            distill::distill_image(ref_cube, an.band_lo, an.band_hi);
        result.floor =
            metrics::noise_floor(ref_cube, an.quiet_lo, an.quiet_hi);
        auto roi = distill::select_roi(result.reference_image, result.floor,
                                       an.shared_fit_min_snr);
        if (roi.empty()) {
            // low per-pixel visibility: average the brightest tenth of the
            // frame instead and let the mean-waveform SNR check decide
            const auto& ref = result.reference_image;
            std::vector<std::pair<double, std::pair<int, int>>> ranked;
            for (int r = 0; r < ref.rows; ++r)
                for (int c = 0; c < ref.cols; ++c)
                    if (ref.valid[ref.index(r, c)])
                        ranked.push_back(
                            {ref.mean_counts[ref.index(r, c)], {r, c}});
            std::sort(ranked.begin(), ranked.end(),
                      [](const auto& a, const auto& b) {
                          return a.first > b.first;
                      });
            const std::size_t keep =
                std::max<std::size_t>(1, ranked.size() / 10);
            for (std::size_t i = 0; i < keep; ++i)
                roi.push_back(ranked[i].second);
        }
        result.shared = distill::fit_shared_params(
            ref_cube, roi, an.band_lo, an.band_hi, an.quiet_lo, an.quiet_hi,
            an.shared_fit_min_snr);
        distill::fill_phases(result.reference_image, ref_cube, result.shared);
        return 0;
    });

    {
        double acc = 0.0;
        std::size_t n = 0;
        std::vector<double> sorted = result.floor;
        std::sort(sorted.begin(), sorted.end());
        result.report.noise_floor_median =
            sorted.empty() ? 0.0 : sorted[sorted.size() / 2];
        (void)acc;
        (void)n;
    }

    const bool is_mirror = s.scene_spec.type == "plain_mirror";
    std::optional<synth::WaveformCube> sample_cube;
    if (!is_mirror) {
        synth::NoiseSpec sample_noise = s.noise;
        sample_noise.rng_seed = qmc::hash_combine(s.noise.rng_seed, 1);
        sample_cube = stage("sample synthesis", [&] {
            return synth::synthesize_scan(s.scene_spec.build(), s.bundle,
                                          sample_noise, s.source);
        });
        stage("sample distillation", [&] {
            auto img =
                distill::distill_image(*sample_cube, an.band_lo, an.band_hi);
            distill::fill_phases(img, *sample_cube, result.shared);
            result.result_image = distill::reference_normalize(
                img, result.reference_image, an.threshold, &result.floor);
            return 0;
        });
    } else {
        // for mirror scenes the reference is the result
        result.result_image = result.reference_image;
    }

    if (wants(s, "fov_curve") || wants(s, "metrology") || is_mirror) {
        stage("fov measurement", [&] {
            try {
                result.fov = metrics::measure_fov(
                    result.reference_image, result.floor, an.threshold,
                    result.pixel_pitch_sample_plane, an.fov_radial_average);
                result.report.fov = *result.fov;
                result.report.fov_uncertainty = metrics::fov_threshold_spread(
                    result.reference_image, result.floor, an.threshold,
                    result.pixel_pitch_sample_plane, an.fov_radial_average);
            } catch (const metrics::NoSignal&) {
                // a dim or noisy reference can leave nothing above the
                // cutoff; record that instead of failing the run
                result.report.notes += "fov: no pixel above threshold; ";
            }
            return 0;
        });
    }

    if (s.knife) {
        stage("knife-edge sweep", [&] {
            // response column: through the reference amplitude centroid
            double wsum = 0.0, csum = 0.0;
            const auto& ref = result.reference_image;
            for (int r = 0; r < ref.rows; ++r)
                for (int c = 0; c < ref.cols; ++c) {
                    const std::size_t i = ref.index(r, c);
                    const double d = ref.modulation_depth(i);
                    const double fd = ref.mean_counts[i] > 0.0
                                          ? result.floor[i] / ref.mean_counts[i]
                                          : 0.0;
                    if (ref.valid[i] && d > fd + an.threshold) {
                        wsum += d;
                        csum += d * c;
                    }
                }
            if (wsum <= 0.0)
                throw std::runtime_error("empty reference image");
            const int col = static_cast<int>(std::llround(csum / wsum));
            const double x_col = column_sample_x(ref, col, mag_thz);

            std::vector<double> positions;
            if (!s.knife->positions.empty()) {
                positions = s.knife->positions;
            } else {
                for (int i = 0; i < s.knife->count; ++i)
                    positions.push_back(
                        x_col + s.knife->span *
                                    (static_cast<double>(i) /
                                         (s.knife->count - 1) -
                                     0.5));
            }

            std::vector<double> integrated;
            for (std::size_t i = 0; i < positions.size(); ++i) {
                synth::NoiseSpec edge_noise = s.noise;
                edge_noise.rng_seed =
                    qmc::hash_combine(s.noise.rng_seed, 100 + i);
                const auto cube = synth::synthesize_scan(
                    scene::knife_edge(positions[i]), s.bundle, edge_noise,
                    s.source);
                const auto img =
                    distill::distill_image(cube, an.band_lo, an.band_hi);
                const auto ratio = distill::reference_normalize(
                    img, ref, an.threshold, &result.floor);
                double sum = 0.0;
                for (int r = 0; r < ratio.rows; ++r) {
                    const std::size_t k = ratio.index(r, col);
                    if (ratio.valid[k])
                        sum += ratio.amplitude[k];
                }
                integrated.push_back(sum);
            }

            result.knife = metrics::knife_edge_resolution(positions,
                                                          integrated);
            result.knife_positions = positions;
            result.knife_amplitudes = integrated;
            result.report.resolution = result.knife->resolution;
            result.report.resolution_uncertainty =
                result.knife->resolution_uncertainty;

            if (wants(s, "knife_edge_sweep")) {
                std::vector<std::pair<double, double>> rows;
                for (std::size_t i = 0; i < positions.size(); ++i)
                    rows.emplace_back(positions[i], integrated[i]);
                write_xy_csv(log.root / "knife_edge_sweep.csv",
                             "edge_position_m,integrated_amplitude", rows);
                log.add("knife_edge_sweep", "knife_edge_sweep.csv");
            }
            return 0;
        });
    }

    if (result.fov && result.knife)
        result.report.spatial_modes = metrics::spatial_mode_count(
            *result.fov, result.knife->resolution);

    if (s.extinction_eval && !is_mirror) {
        stage("extinction evaluation", [&] {
            const auto& ev = *s.extinction_eval;
            const auto& img = result.result_image;
            double wsum = 0.0, rsum = 0.0;
            const auto& ref = result.reference_image;
            for (int r = 0; r < ref.rows; ++r)
                for (int c = 0; c < ref.cols; ++c) {
                    const std::size_t i = ref.index(r, c);
                    const double d = ref.modulation_depth(i);
                    const double fd = ref.mean_counts[i] > 0.0
                                          ? result.floor[i] / ref.mean_counts[i]
                                          : 0.0;
                    if (ref.valid[i] && d > fd + an.threshold) {
                        wsum += d;
                        rsum += d * r;
                    }
                }
            const int row0 = static_cast<int>(std::llround(rsum / wsum));

            const int c_lo = column_of_sample_x(img, ev.x_lo, mag_thz);
            const int c_hi = column_of_sample_x(img, ev.x_hi, mag_thz);
            std::vector<double> col_means;
            std::vector<double> col_x;
            for (int c = c_lo; c <= c_hi; ++c) {
                double sum = 0.0;
                int n = 0;
                for (int r = row0 - ev.row_halfwidth;
                     r <= row0 + ev.row_halfwidth; ++r) {
                    if (r < 0 || r >= img.rows)
                        continue;
                    const std::size_t i = img.index(r, c);
                    if (img.valid[i]) {
                        sum += img.amplitude[i];
                        ++n;
                    }
                }
                col_means.push_back(n > 0 ? sum / n : 0.0);
                col_x.push_back(column_sample_x(img, c, mag_thz));
            }

            double left = 0.0, right = 0.0;
            int nl = 0, nr = 0;
            int left_begin = -1, left_end = -1;
            for (std::size_t i = 0; i < col_means.size(); ++i) {
                if (col_means[i] <= 0.0)
                    continue;
                if (col_x[i] < -ev.edge_margin) {
                    if (left_begin < 0)
                        left_begin = static_cast<int>(i);
                    left_end = static_cast<int>(i) + 1;
                    left += col_means[i];
                    ++nl;
                } else if (col_x[i] > ev.edge_margin) {
                    right += col_means[i];
                    ++nr;
                }
            }
            if (nl == 0 || nr == 0)
                throw std::runtime_error(
                    "extinction box misses one sample half");
            left /= nl;
            right /= nr;
            result.measured_extinction = metrics::extinction(left, right);

            if (s.tds_reference) {
                result.tds_lines = metrics::align_tds_to_imaging(
                    *s.tds_reference, col_means, left_begin, left_end);
            }

            std::vector<std::pair<double, double>> rows;
            for (std::size_t i = 0; i < col_means.size(); ++i)
                rows.emplace_back(col_x[i], col_means[i]);
            write_xy_csv(log.root / "column_means.csv",
                         "x_sample_m,mean_amplitude_ratio", rows);
            log.add("column_means", "column_means.csv");

            json ext;
            ext["measured_extinction"] = *result.measured_extinction;
            ext["left_mean"] = left;
            ext["right_mean"] = right;
            if (result.tds_lines) {
                ext["tds_line_left"] = result.tds_lines->first;
                ext["tds_line_right"] = result.tds_lines->second;
            }
            std::ofstream(log.root / "extinction_eval.json")
                << ext.dump(2) << '\n';
            log.add("extinction_eval", "extinction_eval.json");

            // sub-band extinction of each half against the mirror reference
            const int nb = 5;
            metrics::ExtinctionCurve curve_left, curve_right;
            auto region_mean = [&](const distill::DistilledImage& di,
                                   bool left_half) {
                double sum = 0.0;
                int n = 0;
                for (int c = c_lo; c <= c_hi; ++c) {
                    const double x = column_sample_x(di, c, mag_thz);
                    if (left_half ? x >= -ev.edge_margin : x <= ev.edge_margin)
                        continue;
                    for (int r = row0 - ev.row_halfwidth;
                         r <= row0 + ev.row_halfwidth; ++r) {
                        if (r < 0 || r >= di.rows)
                            continue;
                        const std::size_t i = di.index(r, c);
                        if (ref.valid[i] && ref.amplitude[i] >
                                                result.floor[i] + an.threshold) {
                            sum += di.amplitude[i];
                            ++n;
                        }
                    }
                }
                return n > 0 ? sum / n : 0.0;
            };
            for (int b = 0; b < nb; ++b) {
                const double lo = an.band_lo +
                                  (an.band_hi - an.band_lo) * b / nb;
                const double hi = an.band_lo +
                                  (an.band_hi - an.band_lo) * (b + 1) / nb;
                const auto sample_sub =
                    distill::distill_image(*sample_cube, lo, hi);
                const auto ref_sub = distill::distill_image(ref_cube, lo, hi);
                const double fc = 0.5 * (lo + hi);
                const double rl = region_mean(ref_sub, true);
                const double sl = region_mean(sample_sub, true);
                const double rr = region_mean(ref_sub, false);
                const double sr = region_mean(sample_sub, false);
                if (rl > 0.0 && sl > 0.0) {
                    curve_left.frequencies.push_back(fc);
                    curve_left.k_values.push_back(metrics::extinction(rl, sl));
                }
                if (rr > 0.0 && sr > 0.0) {
                    curve_right.frequencies.push_back(fc);
                    curve_right.k_values.push_back(metrics::extinction(rr, sr));
                }
            }
            curve_left.save_csv((log.root / "extinction_left.csv").string());
            curve_right.save_csv((log.root / "extinction_right.csv").string());
            log.add("extinction_left", "extinction_left.csv");
            log.add("extinction_right", "extinction_right.csv");
            return 0;
        });
    }

    // requested artifacts
    stage("artifact export", [&] {
        if (wants(s, "reference")) {
            raster_io::write_distilled_image((log.root / "reference").string(),
                                             result.reference_image);
            log.add("reference_amplitude", "reference_amplitude.csv");
            log.add("reference_phase", "reference_phase.csv");
            log.add("reference_mask", "reference_mask.csv");
            log.add("reference_amplitude_pgm", "reference_amplitude.pgm");
        }
        if (wants(s, "amplitude_image") || wants(s, "phase_image")) {
            raster_io::write_distilled_image((log.root / "result").string(),
                                             result.result_image);
            log.add("result_amplitude", "result_amplitude.csv");
            log.add("result_phase", "result_phase.csv");
            log.add("result_mask", "result_mask.csv");
            log.add("result_amplitude_pgm", "result_amplitude.pgm");
        }
        if (wants(s, "waveform_dump")) {
            int r0, c0;
            if (s.waveform_pixel) {
                r0 = std::clamp(s.waveform_pixel->first, 0,
                                ref_cube.rows - 1);
                c0 = std::clamp(s.waveform_pixel->second, 0,
                                ref_cube.cols - 1);
            } else {
                // centroid pixel of the reference image
                double wsum = 0.0, rs = 0.0, cs = 0.0;
                const auto& ref = result.reference_image;
                for (int r = 0; r < ref.rows; ++r)
                    for (int c = 0; c < ref.cols; ++c) {
                        const double a = ref.amplitude[ref.index(r, c)];
                        wsum += a;
                        rs += a * r;
                        cs += a * c;
                    }
                r0 = static_cast<int>(std::llround(rs / wsum));
                c0 = static_cast<int>(std::llround(cs / wsum));
            }
            const auto w = ref_cube.waveform(r0, c0);
            std::vector<std::pair<double, double>> rows;
            for (int d = 0; d < ref_cube.n_delays(); ++d)
                rows.emplace_back(ref_cube.delay_times[d], w[d]);
            write_xy_csv(log.root / "waveform_center.csv", "delay_s,counts",
                         rows);
            log.add("waveform_center", "waveform_center.csv");

            const auto spec = distill::waveform_spectrum(
                distill::preprocess_waveform(w), ref_cube.dt());
            rows.clear();
            for (std::size_t k = 0; k < spec.frequencies.size(); ++k)
                rows.emplace_back(spec.frequencies[k], spec.amplitudes[k]);
            write_xy_csv(log.root / "spectrum_center.csv",
                         "frequency_hz,amplitude", rows);
            log.add("spectrum_center", "spectrum_center.csv");
        }
        if (wants(s, "fov_curve")) {
            // cross-section through the amplitude centroid plus the floor
            const auto& ref = result.reference_image;
            double wsum = 0.0, rs = 0.0;
            for (int r = 0; r < ref.rows; ++r)
                for (int c = 0; c < ref.cols; ++c) {
                    const double a = ref.amplitude[ref.index(r, c)];
                    wsum += a;
                    rs += a * r;
                }
            const int r0 = static_cast<int>(std::llround(rs / wsum));
            std::ofstream out(log.root / "cross_section.csv");
            out.precision(12);
            out << "x_sample_m,modulation_depth,floor_depth\n";
            for (int c = 0; c < ref.cols; ++c) {
                const std::size_t i = ref.index(r0, c);
                const double fd = ref.mean_counts[i] > 0.0
                                      ? result.floor[i] / ref.mean_counts[i]
                                      : 0.0;
                out << column_sample_x(ref, c, mag_thz) << ','
                    << ref.modulation_depth(i) << ',' << fd << '\n';
            }
            out.close();
            log.add("fov_curve", "cross_section.csv");
        }
        if (wants(s, "cube")) {
            synth::save_cube_binary(ref_cube,
                                    (log.root / "reference_cube.thzw").string());
            log.add("reference_cube", "reference_cube.thzw");
            if (sample_cube) {
                synth::save_cube_binary(
                    *sample_cube, (log.root / "sample_cube.thzw").string());
                log.add("sample_cube", "sample_cube.thzw");
            }
        }
        if (wants(s, "cube_csv")) {
            synth::save_cube_csv(ref_cube,
                                 (log.root / "reference_cube_csv").string());
            log.add("reference_cube_meta", "reference_cube_csv/meta.json");
        }
        if (wants(s, "metrology")) {
            result.report.notes = "scenario " + s.name +
                                  "; amplitudes are modulation depths; " +
                                  result.report.notes;
            std::ofstream(log.root / "metrology.json")
                << result.report.to_json() << '\n';
            log.add("metrology", "metrology.json");
        }
        return 0;
    });

    // manifest: a pure function of the scenario inputs and artifact bytes
    json manifest;
    manifest["scenario"] = s.name;
    manifest["seed"] = s.noise.rng_seed;
    manifest["qmc_samples"] = s.source.qmc_samples;
    manifest["config_fnv64"] = fnv1a64_hex(
        optics::bundle_to_json(s.bundle) + s.scene_spec.type +
        std::to_string(s.noise.visibility_scale) +
        std::to_string(s.source.rate));
    manifest["format_version"] = 1;
    manifest["artifacts"] = log.entries;
    result.manifest_json = manifest.dump(2) + "\n";
    std::ofstream(fs::path(out_dir) / "manifest.json") << result.manifest_json;

    return result;
}

}  // namespace thzqi::scenario
