#include "thzqi/synth.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "thzqi/qmc.hpp"

namespace thzqi::synth {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

struct Geometry {
    int rows_b = 0;
    int cols_b = 0;
    double pitch_cam = 0.0;      // binned pitch on the camera, m
    double pitch_crystal = 0.0;  // binned pitch mapped to the crystal plane
    double half_w = 0.0;         // camera-plane half width/height
    double half_h = 0.0;

    explicit Geometry(const optics::ConfigBundle& b)
    {
        rows_b = b.camera.sensor_rows / b.camera.binning;
        cols_b = b.camera.sensor_cols / b.camera.binning;
        pitch_cam = b.camera.pixel_pitch * b.camera.binning;
        pitch_crystal = pitch_cam / b.optics.mag_vis;
        half_w = 0.5 * cols_b * pitch_cam;
        half_h = 0.5 * rows_b * pitch_cam;
    }

    // camera-plane center of a binned pixel; row 0 is the top of the frame
    double col_center(int c) const { return (c + 0.5) * pitch_cam - half_w; }
    double row_center(int r) const { return half_h - (r + 0.5) * pitch_cam; }

    bool locate(double x_cam, double y_cam, int& row, int& col) const
    {
        col = static_cast<int>(std::floor((x_cam + half_w) / pitch_cam));
        row = static_cast<int>(std::floor((half_h - y_cam) / pitch_cam));
        return row >= 0 && row < rows_b && col >= 0 && col < cols_b;
    }
};

double averaged_shot_noise(double mean, int frames, std::uint64_t seed,
                           std::uint64_t row, std::uint64_t col,
                           std::uint64_t delay)
{
    // Counts averaged over `frames` Poisson frames; the averaged value is
    // approximated as N(mean, mean/frames). The deviate depends only on the
    // pixel/delay coordinates, never on evaluation order.
    if (mean <= 0.0)
        return 0.0;
    std::uint64_t h = qmc::hash_combine(seed, 0x74687a71ULL);  // stream tag
    h = qmc::hash_combine(h, row);
    h = qmc::hash_combine(h, col);
    h = qmc::hash_combine(h, delay);
    const double z = qmc::hash_to_normal(h);
    const double v = mean + std::sqrt(mean / frames) * z;
    return v > 0.0 ? v : 0.0;
}

double scene_magnitude_phase(const scene::SceneObject& obj, double mag_thz,
                             const biphoton::TransversePoint& rho_thz,
                             double f, double& phase)
{
    const auto r = obj.response(rho_thz.x * mag_thz, rho_thz.y * mag_thz, f);
    phase = r.phase;
    return r.magnitude;
}

}  // namespace

std::vector<double> WaveformCube::waveform(int r, int c) const
{
    const int nd = n_delays();
    std::vector<double> w(nd);
    for (int d = 0; d < nd; ++d)
        w[d] = at(r, c, d);
    return w;
}

void spectral_quadrature(const optics::SpectralModel& spectral,
                         std::vector<double>& frequencies,
                         std::vector<double>& weights)
{
    const int n = spectral.n_frequency_samples;
    frequencies.resize(n);
    weights.resize(n);
    if (n == 1) {
        frequencies[0] = spectral.center_frequency;
        weights[0] = 1.0;
        return;
    }
    const double span = 2.0 * spectral.fwhm;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = spectral.center_frequency - span +
                         2.0 * span * i / static_cast<double>(n - 1);
        frequencies[i] = f;
        const double df = f - spectral.center_frequency;
        double w;
        if (spectral.shape == optics::SpectralShape::gaussian) {
            const double sigma = spectral.fwhm / 2.3548200450309493;
            w = std::exp(-0.5 * df * df / (sigma * sigma));
        } else {
            // sinc^2 with the requested full width at half maximum
            const double u = 2.783112 * df / spectral.fwhm;
            const double s = u == 0.0 ? 1.0 : std::sin(u) / u;
            w = s * s;
        }
        weights[i] = w;
        total += w;
    }
    for (double& w : weights)
        w /= total;
}

double pixel_count_rate(const biphoton::TransversePoint& rho_d, double delay,
                        const scene::SceneObject& obj,
                        const optics::ConfigBundle& bundle,
                        const SourceModel& source, double visibility_scale,
                        std::span<const biphoton::PairSample> samples)
{
    const Geometry geo(bundle);
    const double cx = rho_d.x / bundle.optics.mag_vis;
    const double cy = rho_d.y / bundle.optics.mag_vis;
    const double half = 0.5 * geo.pitch_crystal;

    std::vector<double> freqs, weights;
    spectral_quadrature(bundle.spectral, freqs, weights);

    double acc = 0.0;
    std::size_t hits = 0;
    for (const auto& s : samples) {
        if (std::abs(s.rho_vis.x - cx) > half ||
            std::abs(s.rho_vis.y - cy) > half)
            continue;
        ++hits;
        double term = 0.0;
        for (std::size_t k = 0; k < freqs.size(); ++k) {
            double phase;
            const double mag = scene_magnitude_phase(
                obj, bundle.optics.mag_thz, s.rho_thz, freqs[k], phase);
            term += weights[k] *
                    (1.0 + visibility_scale * mag *
                               std::cos(phase + kTwoPi * freqs[k] * delay));
        }
        acc += s.weight * term;
    }
    if (hits == 0)
        throw EmptyPixel{};
    return source.rate * acc / static_cast<double>(samples.size());
}

namespace {

// Shared scaffolding for both synthesis paths: deterministic sample->pixel
// assignment in sample order (CSR layout).
struct BinnedSamples {
    std::vector<std::uint32_t> offsets;  // size pixels+1
    std::vector<std::uint32_t> order;    // sample indices grouped by pixel
};

BinnedSamples bin_samples(const std::vector<biphoton::PairSample>& samples,
                          const optics::ConfigBundle& bundle,
                          const Geometry& geo)
{
    const std::size_t n_pix =
        static_cast<std::size_t>(geo.rows_b) * geo.cols_b;
    std::vector<std::uint32_t> pixel_of(samples.size());
    std::vector<std::uint32_t> counts(n_pix, 0);
    constexpr std::uint32_t kOutside = 0xffffffffu;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        int row, col;
        if (geo.locate(samples[i].rho_vis.x * bundle.optics.mag_vis,
                       samples[i].rho_vis.y * bundle.optics.mag_vis, row,
                       col)) {
            pixel_of[i] = static_cast<std::uint32_t>(row) * geo.cols_b + col;
            ++counts[pixel_of[i]];
        } else {
            pixel_of[i] = kOutside;
        }
    }
    BinnedSamples out;
    out.offsets.assign(n_pix + 1, 0);
    for (std::size_t p = 0; p < n_pix; ++p)
        out.offsets[p + 1] = out.offsets[p] + counts[p];
    out.order.resize(out.offsets.back());
    std::vector<std::uint32_t> cursor(out.offsets.begin(),
                                      out.offsets.end() - 1);
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (pixel_of[i] != kOutside)
            out.order[cursor[pixel_of[i]]++] = static_cast<std::uint32_t>(i);
    return out;
}

WaveformCube make_empty_cube(const optics::ConfigBundle& bundle,
                             const Geometry& geo)
{
    WaveformCube cube;
    cube.rows = geo.rows_b;
    cube.cols = geo.cols_b;
    cube.pixel_pitch_effective = geo.pitch_crystal;
    cube.delay_times = optics::delay_axis(bundle.scan);
    cube.counts.assign(static_cast<std::size_t>(cube.rows) * cube.cols *
                           cube.delay_times.size(),
                       0.0);
    return cube;
}

void apply_camera_model(WaveformCube& cube, const optics::ConfigBundle& bundle,
                        const NoiseSpec& noise)
{
    const double qe = bundle.camera.quantum_efficiency;
    const double expo = bundle.scan.exposure;
    const double bg = noise.background_rate * bundle.camera.binning *
                      bundle.camera.binning * expo;
    const int nd = cube.n_delays();
#pragma omp parallel for schedule(static)
    for (int r = 0; r < cube.rows; ++r) {
        for (int c = 0; c < cube.cols; ++c) {
            for (int d = 0; d < nd; ++d) {
                double v = cube.at(r, c, d) * expo * qe + bg;
                if (noise.shot_noise)
                    v = averaged_shot_noise(
                        v, bundle.scan.frames_averaged_per_step,
                        noise.rng_seed, static_cast<std::uint64_t>(r),
                        static_cast<std::uint64_t>(c),
                        static_cast<std::uint64_t>(d));
                cube.at(r, c, d) = v;
            }
        }
    }
}

}  // namespace

WaveformCube synthesize_scan(const scene::SceneObject& obj,
                             const optics::ConfigBundle& bundle,
                             const NoiseSpec& noise, const SourceModel& source)
{
    optics::require_valid(bundle);
    const Geometry geo(bundle);
    const auto samples = biphoton::qmc_pair_samples(
        source.qmc_samples, bundle.optics, source.sequence_offset);
    const auto bins = bin_samples(samples, bundle, geo);

    std::vector<double> freqs, weights;
    spectral_quadrature(bundle.spectral, freqs, weights);
    const int nf = static_cast<int>(freqs.size());

    WaveformCube cube = make_empty_cube(bundle, geo);
    const int nd = cube.n_delays();
    const double rate_per_sample =
        source.rate / static_cast<double>(samples.size());
    const double v = noise.visibility_scale;
    const int n_pix = geo.rows_b * geo.cols_b;

    // Per pixel, collapse the sample sum into one in-phase and one quadrature
    // coefficient per frequency; the delay loop then only evaluates
    //   N_p + v * sum_f w_f (C_pf cos(2 pi f tau) - S_pf sin(2 pi f tau)).
#pragma omp parallel for schedule(dynamic, 8)
    for (int p = 0; p < n_pix; ++p) {
        const std::uint32_t begin = bins.offsets[p];
        const std::uint32_t end = bins.offsets[p + 1];
        if (begin == end)
            continue;  // background-only pixel
        std::vector<double> coef_cos(nf, 0.0), coef_sin(nf, 0.0);
        for (std::uint32_t i = begin; i < end; ++i) {
            const auto& s = samples[bins.order[i]];
            for (int k = 0; k < nf; ++k) {
                double phase;
                const double mag = scene_magnitude_phase(
                    obj, bundle.optics.mag_thz, s.rho_thz, freqs[k], phase);
                coef_cos[k] += weights[k] * mag * std::cos(phase);
                coef_sin[k] += weights[k] * mag * std::sin(phase);
            }
        }
        const double n_p = static_cast<double>(end - begin);
        const int r = p / geo.cols_b;
        const int c = p % geo.cols_b;
        for (int d = 0; d < nd; ++d) {
            double osc = 0.0;
            for (int k = 0; k < nf; ++k) {
                const double theta = kTwoPi * freqs[k] * cube.delay_times[d];
                osc += coef_cos[k] * std::cos(theta) -
                       coef_sin[k] * std::sin(theta);
            }
            cube.at(r, c, d) = rate_per_sample * (n_p + v * osc);
        }
    }

    apply_camera_model(cube, bundle, noise);
    return cube;
}

WaveformCube synthesize_scan_reference(const scene::SceneObject& obj,
                                       const optics::ConfigBundle& bundle,
                                       const NoiseSpec& noise,
                                       const SourceModel& source)
{
    optics::require_valid(bundle);
    const Geometry geo(bundle);
    const auto samples = biphoton::qmc_pair_samples(
        source.qmc_samples, bundle.optics, source.sequence_offset);
    const auto bins = bin_samples(samples, bundle, geo);

    std::vector<double> freqs, weights;
    spectral_quadrature(bundle.spectral, freqs, weights);

    WaveformCube cube = make_empty_cube(bundle, geo);
    const int nd = cube.n_delays();
    const double rate_per_sample =
        source.rate / static_cast<double>(samples.size());
    const double v = noise.visibility_scale;

    for (int r = 0; r < geo.rows_b; ++r) {
        for (int c = 0; c < geo.cols_b; ++c) {
            const int p = r * geo.cols_b + c;
            for (int d = 0; d < nd; ++d) {
                const double tau = cube.delay_times[d];
                double acc = 0.0;
                for (std::uint32_t i = bins.offsets[p];
                     i < bins.offsets[p + 1]; ++i) {
                    const auto& s = samples[bins.order[i]];
                    for (std::size_t k = 0; k < freqs.size(); ++k) {
                        double phase;
                        const double mag = scene_magnitude_phase(
                            obj, bundle.optics.mag_thz, s.rho_thz, freqs[k],
                            phase);
                        acc += weights[k] *
                               (1.0 + v * mag * std::cos(phase + kTwoPi *
                                                                     freqs[k] *
                                                                     tau));
                    }
                }
                cube.at(r, c, d) = rate_per_sample * acc;
            }
        }
    }

    apply_camera_model(cube, bundle, noise);
    return cube;
}

Frames apply_binning(const Frames& raw, int binning)
{
    if (binning < 1)
        throw std::invalid_argument("apply_binning: binning must be >= 1");
    Frames out;
    out.rows = raw.rows / binning;
    out.cols = raw.cols / binning;
    out.depth = raw.depth;
    out.data.assign(
        static_cast<std::size_t>(out.rows) * out.cols * out.depth, 0.0);
    for (int r = 0; r < out.rows * binning; ++r) {
        for (int c = 0; c < out.cols * binning; ++c) {
            const std::size_t src =
                (static_cast<std::size_t>(r) * raw.cols + c) * raw.depth;
            const std::size_t dst =
                (static_cast<std::size_t>(r / binning) * out.cols +
                 c / binning) *
                out.depth;
            for (int d = 0; d < out.depth; ++d)
                out.data[dst + d] += raw.data[src + d];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// persistence

namespace {

void check_cube(const WaveformCube& cube)
{
    if (cube.rows < 1 || cube.cols < 1 || cube.delay_times.empty())
        throw std::runtime_error("waveform cube: empty dimensions");
    const double dt = cube.dt();
    for (std::size_t i = 1; i < cube.delay_times.size(); ++i) {
        const double step = cube.delay_times[i] - cube.delay_times[i - 1];
        if (!(step > 0.0) || std::abs(step - dt) > 1e-9 * std::abs(dt))
            throw std::runtime_error(
                "waveform cube: delay axis not uniformly increasing");
    }
    for (double v : cube.counts)
        if (!std::isfinite(v) || v < 0.0)
            throw std::runtime_error("waveform cube: invalid count value");
}

}  // namespace

void save_cube_csv(const WaveformCube& cube, const std::string& dir)
{
    check_cube(cube);
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    nlohmann::json meta;
    meta["rows"] = cube.rows;
    meta["cols"] = cube.cols;
    meta["pixel_pitch_effective"] = cube.pixel_pitch_effective;
    meta["delay_times"] = cube.delay_times;
    std::ofstream(fs::path(dir) / "meta.json") << meta.dump(2) << "\n";

    const int nd = cube.n_delays();
    for (int d = 0; d < nd; ++d) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04d.csv", d);
        std::ofstream out(fs::path(dir) / name);
        out.precision(17);
        for (int r = 0; r < cube.rows; ++r) {
            for (int c = 0; c < cube.cols; ++c) {
                if (c)
                    out << ',';
                out << cube.at(r, c, d);
            }
            out << '\n';
        }
    }
}

WaveformCube load_cube_csv(const std::string& dir)
{
    namespace fs = std::filesystem;
    std::ifstream meta_in(fs::path(dir) / "meta.json");
    if (!meta_in)
        throw std::runtime_error("load_cube_csv: missing meta.json in " + dir);
    nlohmann::json meta = nlohmann::json::parse(meta_in);

    WaveformCube cube;
    cube.rows = meta.at("rows").get<int>();
    cube.cols = meta.at("cols").get<int>();
    cube.pixel_pitch_effective = meta.at("pixel_pitch_effective").get<double>();
    cube.delay_times = meta.at("delay_times").get<std::vector<double>>();
    cube.counts.assign(static_cast<std::size_t>(cube.rows) * cube.cols *
                           cube.delay_times.size(),
                       0.0);

    const int nd = cube.n_delays();
    for (int d = 0; d < nd; ++d) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04d.csv", d);
        std::ifstream in(fs::path(dir) / name);
        if (!in)
            throw std::runtime_error(std::string("load_cube_csv: missing ") +
                                     name);
        std::string line;
        for (int r = 0; r < cube.rows; ++r) {
            if (!std::getline(in, line))
                throw std::runtime_error("load_cube_csv: truncated frame");
            std::stringstream ss(line);
            std::string cell;
            for (int c = 0; c < cube.cols; ++c) {
                if (!std::getline(ss, cell, ','))
                    throw std::runtime_error("load_cube_csv: short row");
                cube.at(r, c, d) = std::stod(cell);
            }
        }
    }
    check_cube(cube);
    return cube;
}

namespace {
constexpr char kCubeMagic[8] = {'T', 'H', 'Z', 'W', 'C', 'U', 'B', '1'};
}

void save_cube_binary(const WaveformCube& cube, const std::string& path)
{
    check_cube(cube);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("save_cube_binary: cannot open " + path);

    unsigned char header[64] = {0};
    std::memcpy(header, kCubeMagic, 8);
    const std::uint32_t dims[3] = {static_cast<std::uint32_t>(cube.rows),
                                   static_cast<std::uint32_t>(cube.cols),
                                   static_cast<std::uint32_t>(cube.n_delays())};
    std::memcpy(header + 8, dims, 12);
    const double axis[3] = {cube.delay_times.front(), cube.dt(),
                            cube.pixel_pitch_effective};
    std::memcpy(header + 24, axis, 24);
    out.write(reinterpret_cast<const char*>(header), 64);

    std::vector<float> data(cube.counts.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        data[i] = static_cast<float>(cube.counts[i]);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(float)));
}

WaveformCube load_cube_binary(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("load_cube_binary: cannot open " + path);
    unsigned char header[64];
    in.read(reinterpret_cast<char*>(header), 64);
    if (!in || std::memcmp(header, kCubeMagic, 8) != 0)
        throw std::runtime_error("load_cube_binary: bad magic");

    std::uint32_t dims[3];
    double axis[3];
    std::memcpy(dims, header + 8, 12);
    std::memcpy(axis, header + 24, 24);

    WaveformCube cube;
    cube.rows = static_cast<int>(dims[0]);
    cube.cols = static_cast<int>(dims[1]);
    cube.pixel_pitch_effective = axis[2];
    cube.delay_times.resize(dims[2]);
    for (std::uint32_t d = 0; d < dims[2]; ++d)
        cube.delay_times[d] = axis[0] + axis[1] * d;

    std::vector<float> data(static_cast<std::size_t>(cube.rows) * cube.cols *
                            dims[2]);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
    if (!in)
        throw std::runtime_error("load_cube_binary: truncated data");
    cube.counts.assign(data.begin(), data.end());
    check_cube(cube);
    return cube;
}

}  // namespace thzqi::synth
