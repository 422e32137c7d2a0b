#include "thzqi/distill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "thzqi/fft.hpp"
#include "thzqi/fit.hpp"

namespace thzqi::distill {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double wrap_phase(double phi)
{
    while (phi > kPi)
        phi -= 2.0 * kPi;
    while (phi <= -kPi)
        phi += 2.0 * kPi;
    return phi;
}

std::vector<double> preprocess_waveform(const std::vector<double>& w,
                                        double taper_fraction)
{
    const std::size_t n = w.size();
    if (n < 8)
        throw TooShort{};

    const double mean = std::accumulate(w.begin(), w.end(), 0.0) /
                        static_cast<double>(n);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = w[i] - mean;

    const std::size_t ramp =
        std::max<std::size_t>(1, std::llround(taper_fraction * n));
    for (std::size_t i = 0; i < ramp && i < n; ++i) {
        const double f =
            0.5 * (1.0 - std::cos(kPi * static_cast<double>(i) / ramp));
        out[i] *= f;
        out[n - 1 - i] *= f;
    }
    return out;
}

PixelSpectrum waveform_spectrum(const std::vector<double>& w, double dt)
{
    if (dt <= 0.0)
        throw std::invalid_argument("waveform_spectrum: dt must be > 0");
    const std::size_t n = w.size();
    const std::size_t padded = fft::next_pow2(4 * n);
    PixelSpectrum s;
    s.amplitudes = fft::real_magnitude_spectrum(w, padded);
    const double scale = 2.0 / static_cast<double>(n);
    for (double& a : s.amplitudes)
        a *= scale;
    s.frequencies.resize(s.amplitudes.size());
    const double df = 1.0 / (static_cast<double>(padded) * dt);
    for (std::size_t k = 0; k < s.frequencies.size(); ++k)
        s.frequencies[k] = df * static_cast<double>(k);
    return s;
}

BandPeak band_peak(const PixelSpectrum& s, double f_lo, double f_hi)
{
    if (!(f_lo < f_hi))
        throw std::invalid_argument("band_peak: f_lo must be below f_hi");
    BandPeak best;
    bool found = false;
    for (std::size_t k = 0; k < s.frequencies.size(); ++k) {
        if (s.frequencies[k] < f_lo || s.frequencies[k] > f_hi)
            continue;
        if (!found || s.amplitudes[k] > best.amplitude) {
            best.amplitude = s.amplitudes[k];
            best.frequency = s.frequencies[k];
        }
        found = true;
    }
    if (!found)
        throw EmptyBand{};
    return best;
}

double band_peak_amplitude(const PixelSpectrum& s, double f_lo, double f_hi)
{
    return band_peak(s, f_lo, f_hi).amplitude;
}

namespace {

// raw band peak of one pixel trace plus its mean counts
double pixel_band_peak(const std::vector<double>& w, double dt, double f_lo,
                       double f_hi, double& mean)
{
    mean = std::accumulate(w.begin(), w.end(), 0.0) /
           static_cast<double>(w.size());
    const auto pre = preprocess_waveform(w);
    const auto spec = waveform_spectrum(pre, dt);
    return band_peak_amplitude(spec, f_lo, f_hi);
}

DistilledImage distill_common(const synth::WaveformCube& cube, double f_lo,
                              double f_hi, bool parallel)
{
    DistilledImage img;
    img.rows = cube.rows;
    img.cols = cube.cols;
    img.band_lo = f_lo;
    img.band_hi = f_hi;
    img.pixel_pitch_effective = cube.pixel_pitch_effective;
    const std::size_t n = static_cast<std::size_t>(cube.rows) * cube.cols;
    img.amplitude.assign(n, 0.0);
    img.mean_counts.assign(n, 0.0);
    img.phase.assign(n, 0.0);
    img.valid.assign(n, 1);

    const double dt = cube.dt();
    const int n_pix = cube.rows * cube.cols;
#pragma omp parallel for schedule(static) if (parallel)
    for (int p = 0; p < n_pix; ++p) {
        const int r = p / cube.cols;
        const int c = p % cube.cols;
        try {
            img.amplitude[p] = pixel_band_peak(cube.waveform(r, c), dt, f_lo,
                                               f_hi, img.mean_counts[p]);
        } catch (const std::exception&) {
            img.valid[p] = 0;
        }
    }
    return img;
}

}  // namespace

DistilledImage distill_image(const synth::WaveformCube& cube, double f_lo,
                             double f_hi)
{
    return distill_common(cube, f_lo, f_hi, true);
}

DistilledImage distill_image_reference(const synth::WaveformCube& cube,
                                       double f_lo, double f_hi)
{
    return distill_common(cube, f_lo, f_hi, false);
}

SharedWaveformParams fit_shared_params(
    const synth::WaveformCube& cube,
    const std::vector<std::pair<int, int>>& roi, double f_lo, double f_hi,
    double quiet_lo, double quiet_hi, double min_snr)
{
    if (roi.empty())
        throw std::invalid_argument("fit_shared_params: empty ROI");

    const int nd = cube.n_delays();
    std::vector<double> mean_wave(nd, 0.0);
    for (const auto& [r, c] : roi)
        for (int d = 0; d < nd; ++d)
            mean_wave[d] += cube.at(r, c, d);
    for (double& v : mean_wave)
        v /= static_cast<double>(roi.size());

    const double dt = cube.dt();
    const auto pre = preprocess_waveform(mean_wave);
    const auto spec = waveform_spectrum(pre, dt);
    const auto peak = band_peak(spec, f_lo, f_hi);
    const double floor = band_peak_amplitude(spec, quiet_lo, quiet_hi);
    if (!(peak.amplitude > min_snr * floor) || peak.amplitude <= 0.0)
        throw InsufficientSNR{};

    // Seeds: nu from the band peak, envelope center/width from the moments of
    // the rectified mean-free trace, offset from the mean.
    const double y0_seed =
        std::accumulate(mean_wave.begin(), mean_wave.end(), 0.0) / nd;
    double esum = 0.0, ecent = 0.0, esq = 0.0;
    for (int d = 0; d < nd; ++d) {
        const double e = std::abs(mean_wave[d] - y0_seed);
        esum += e;
        ecent += e * cube.delay_times[d];
    }
    ecent = esum > 0.0 ? ecent / esum : 0.0;
    for (int d = 0; d < nd; ++d) {
        const double e = std::abs(mean_wave[d] - y0_seed);
        esq += e * (cube.delay_times[d] - ecent) *
               (cube.delay_times[d] - ecent);
    }
    const double width_seed =
        esum > 0.0 ? std::max(std::sqrt(esq / esum), 2.0 * dt) : 2.0 * dt;
    double amp_seed = 0.0;
    for (int d = 0; d < nd; ++d)
        amp_seed = std::max(amp_seed, std::abs(mean_wave[d] - y0_seed));

    // Fit in picoseconds so the parameters are comparably scaled.
    const double ps = 1e-12;
    std::vector<double> t_ps(nd);
    for (int d = 0; d < nd; ++d)
        t_ps[d] = cube.delay_times[d] / ps;

    // params: A, nu_ps (rad/ps), phi, tc_ps, w_ps, y0
    std::vector<double> p0 = {amp_seed,
                              2.0 * kPi * peak.frequency * ps,
                              0.0,
                              ecent / ps,
                              width_seed / ps,
                              y0_seed};

    auto model = [](double t, const std::vector<double>& p,
                    double* jac) -> double {
        const double A = p[0], nu = p[1], phi = p[2], tc = p[3], w = p[4],
                     y0 = p[5];
        const double arg = nu * t + phi;
        const double s = std::sin(arg);
        const double cdt = t - tc;
        const double env = std::exp(-0.5 * cdt * cdt / (w * w));
        if (jac) {
            const double c = std::cos(arg);
            jac[0] = s * env;
            jac[1] = A * c * env * t;
            jac[2] = A * c * env;
            jac[3] = A * s * env * cdt / (w * w);
            jac[4] = A * s * env * cdt * cdt / (w * w * w);
            jac[5] = 1.0;
        }
        return A * s * env + y0;
    };

    // The phase seed is unknown; try a few and keep the best fit.
    fit::LevMarResult best;
    best.chi2 = std::numeric_limits<double>::infinity();
    for (double phi0 : {0.0, 0.5 * kPi, kPi, -0.5 * kPi}) {
        auto trial = p0;
        trial[2] = phi0;
        const auto res = fit::levmar(model, t_ps, mean_wave, trial);
        if (res.converged && res.chi2 < best.chi2)
            best = res;
    }
    if (!std::isfinite(best.chi2))
        throw NoConvergence{};

    SharedWaveformParams shared;
    shared.angular_frequency = std::abs(best.params[1]) / ps;
    shared.envelope_center = best.params[3] * ps;
    shared.envelope_width = std::abs(best.params[4]) * ps;
    shared.offset = best.params[5];
    return shared;
}

std::pair<double, double> fit_pixel_phase(const std::vector<double>& w,
                                          const std::vector<double>& delays,
                                          const SharedWaveformParams& shared)
{
    if (w.size() != delays.size())
        throw std::invalid_argument("fit_pixel_phase: length mismatch");

    const double nu = shared.angular_frequency;
    const double tc = shared.envelope_center;
    const double width = shared.envelope_width;
    if (!(width > 0.0))
        throw DegenerateEnvelope{};

    // residual = P * env sin(nu t) + Q * env cos(nu t), P = A cos phi,
    // Q = A sin phi
    double ss = 0.0, sc = 0.0, cc = 0.0, sy = 0.0, cy = 0.0;
    int support = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double t = delays[i];
        const double env =
            std::exp(-0.5 * (t - tc) * (t - tc) / (width * width));
        if (env > 0.01)
            ++support;
        const double bs = env * std::sin(nu * t);
        const double bc = env * std::cos(nu * t);
        const double y = w[i] - shared.offset;
        ss += bs * bs;
        sc += bs * bc;
        cc += bc * bc;
        sy += bs * y;
        cy += bc * y;
    }
    if (support < 3)
        throw DegenerateEnvelope{};

    const double det = ss * cc - sc * sc;
    if (std::abs(det) < 1e-300)
        throw DegenerateEnvelope{};
    const double p = (cc * sy - sc * cy) / det;
    const double q = (ss * cy - sc * sy) / det;
    const double amplitude = std::hypot(p, q);
    const double phase = amplitude > 0.0 ? std::atan2(q, p) : 0.0;
    return {amplitude, wrap_phase(phase)};
}

void fill_phases(DistilledImage& image, const synth::WaveformCube& cube,
                 const SharedWaveformParams& shared)
{
    if (image.rows != cube.rows || image.cols != cube.cols)
        throw ShapeMismatch{};
    const int n_pix = cube.rows * cube.cols;
#pragma omp parallel for schedule(static)
    for (int p = 0; p < n_pix; ++p) {
        const int r = p / cube.cols;
        const int c = p % cube.cols;
        try {
            const auto [amp, phi] =
                fit_pixel_phase(cube.waveform(r, c), cube.delay_times, shared);
            (void)amp;
            image.phase[p] = phi;
        } catch (const std::exception&) {
            image.valid[p] = 0;
        }
    }
}

DistilledImage reference_normalize(const DistilledImage& image,
                                   const DistilledImage& reference,
                                   double threshold,
                                   const std::vector<double>* floor)
{
    if (image.rows != reference.rows || image.cols != reference.cols)
        throw ShapeMismatch{};
    if (floor && floor->size() != reference.amplitude.size())
        throw ShapeMismatch{};

    DistilledImage out = image;
    const std::size_t n = image.amplitude.size();
    for (std::size_t i = 0; i < n; ++i) {
        // threshold on the modulation-depth scale: the reference must clear
        // its own quiet-band floor by `threshold` relative to mean counts
        const double ref_floor = floor ? (*floor)[i] : 0.0;
        const bool ok =
            image.valid[i] && reference.valid[i] &&
            reference.mean_counts[i] > 0.0 && reference.amplitude[i] > 0.0 &&
            (reference.amplitude[i] - ref_floor) / reference.mean_counts[i] >
                threshold;
        out.valid[i] = ok ? 1 : 0;
        if (ok) {
            out.amplitude[i] = image.amplitude[i] / reference.amplitude[i];
            out.phase[i] = wrap_phase(image.phase[i] - reference.phase[i]);
        } else {
            out.amplitude[i] = 0.0;
            out.phase[i] = 0.0;
        }
    }
    return out;
}

std::vector<std::pair<int, int>> select_roi(const DistilledImage& image,
                                            const std::vector<double>& floor,
                                            double min_snr)
{
    std::vector<std::pair<int, int>> roi;
    for (int r = 0; r < image.rows; ++r)
        for (int c = 0; c < image.cols; ++c) {
            const std::size_t i = image.index(r, c);
            if (image.valid[i] &&
                image.amplitude[i] > min_snr * floor[i])
                roi.emplace_back(r, c);
        }
    return roi;
}

}  // namespace thzqi::distill
