#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include "thzqi/distill.hpp"
#include "thzqi/scene.hpp"
#include "thzqi/synth.hpp"

using namespace thzqi;

namespace {

constexpr double kDt = 66.713e-15;

std::vector<double> tone(double freq, double amplitude, double offset,
                         int n = 150, double phase = 0.0)
{
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i)
        w[i] = offset + amplitude * std::sin(2.0 * M_PI * freq * i * kDt +
                                             phase);
    return w;
}

// model of the fitted waveform: A sin(nu t + phi) exp(-(t-tc)^2/2w^2) + y0
std::vector<double> eq_waveform(const std::vector<double>& t, double a,
                                double nu, double phi, double tc, double w,
                                double y0)
{
    std::vector<double> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        out[i] = a * std::sin(nu * t[i] + phi) *
                     std::exp(-0.5 * (t[i] - tc) * (t[i] - tc) / (w * w)) +
                 y0;
    return out;
}

std::vector<double> scan_axis(int n = 150)
{
    optics::ScanConfig scan;
    scan.n_steps = n;
    return optics::delay_axis(scan);
}

synth::WaveformCube single_pixel_cube(const std::vector<double>& w,
                                      const std::vector<double>& t)
{
    synth::WaveformCube cube;
    cube.rows = 1;
    cube.cols = 1;
    cube.pixel_pitch_effective = 1e-4;
    cube.delay_times = t;
    cube.counts = w;
    return cube;
}

// quiet-band floor in the same normalization as the distilled amplitudes
std::vector<double> metrics_floor(const synth::WaveformCube& cube)
{
    return distill::distill_image(cube, 0.6e12, 1.2e12).amplitude;
}

}  // namespace

TEST_CASE("preprocess: mean removal and exact endpoint zeros")
{
    const auto flat = distill::preprocess_waveform(
        std::vector<double>(64, 123.4));
    for (double v : flat)
        CHECK(std::abs(v) < 1e-10);  // mean removal up to rounding

    auto w = tone(1.5e12, 3.0, 100.0);
    const auto pre = distill::preprocess_waveform(w);
    CHECK(pre.front() == 0.0);
    CHECK(pre.back() == 0.0);
    const double mean_removed =
        std::accumulate(w.begin(), w.end(), 0.0) / w.size();
    (void)mean_removed;

    CHECK_THROWS_AS(distill::preprocess_waveform(std::vector<double>(7, 1.0)),
                    distill::TooShort);
}

TEST_CASE("preprocess keeps the dominant bin of a clean sinusoid")
{
    const int n = 150;
    const double t_total = n * kDt;
    const double f = 12.0 / t_total;  // 12 full periods
    const auto w = tone(f, 1.0, 50.0, n);

    const auto raw_spec = distill::waveform_spectrum(
        [&] {  // mean removal only, no taper
            auto v = w;
            const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
            for (auto& x : v)
                x -= m;
            return v;
        }(),
        kDt);
    const auto pre_spec =
        distill::waveform_spectrum(distill::preprocess_waveform(w), kDt);

    const auto raw_peak = distill::band_peak(raw_spec, 0.1e12, 7e12);
    const auto pre_peak = distill::band_peak(pre_spec, 0.1e12, 7e12);
    const double bin = raw_spec.frequencies[1] - raw_spec.frequencies[0];
    CHECK(std::abs(raw_peak.frequency - pre_peak.frequency) <= 1.5 * bin);
    CHECK(std::abs(raw_peak.frequency - f) <= 1.5 * bin);
}

TEST_CASE("waveform spectrum of known signals")
{
    // single tone at 1.5 THz
    const auto spec = distill::waveform_spectrum(
        distill::preprocess_waveform(tone(1.5e12, 1.0, 10.0)), kDt);
    // padded to 1024 bins: length and axis
    REQUIRE(spec.frequencies.size() == 513);
    const double df = spec.frequencies[1] - spec.frequencies[0];
    CHECK(df == doctest::Approx(1.0 / (1024 * kDt)).epsilon(1e-12));
    const auto peak = distill::band_peak(spec, 1.2e12, 1.8e12);
    CHECK(std::abs(peak.frequency - 1.5e12) <= 0.5 * df * 1.0001);

    // all zeros
    const auto zspec =
        distill::waveform_spectrum(std::vector<double>(150, 0.0), kDt);
    for (double a : zspec.amplitudes)
        CHECK(a == 0.0);

    // two equal tones resolve into two local maxima at the right places
    auto two = tone(1.0e12, 1.0, 20.0);
    const auto extra = tone(1.5e12, 1.0, 0.0);
    for (std::size_t i = 0; i < two.size(); ++i)
        two[i] += extra[i];
    const auto tspec = distill::waveform_spectrum(
        distill::preprocess_waveform(two), kDt);
    const auto p1 = distill::band_peak(tspec, 0.8e12, 1.2e12);
    const auto p2 = distill::band_peak(tspec, 1.3e12, 1.7e12);
    CHECK(std::abs(p1.frequency - 1.0e12) <= df);
    CHECK(std::abs(p2.frequency - 1.5e12) <= df);
    CHECK(p1.amplitude == doctest::Approx(p2.amplitude).epsilon(0.15));
}

TEST_CASE("band peak amplitude calibration")
{
    // the taper leaves 134/150 of the window, so a unit tone reads ~0.893
    // before scalloping; check against a direct DFT at the peak frequency
    const auto w = tone(1.5e12, 1.0, 5.0);
    const auto pre = distill::preprocess_waveform(w);
    const auto spec = distill::waveform_spectrum(pre, kDt);
    const auto peak = distill::band_peak(spec, 1.4e12, 1.6e12);

    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < pre.size(); ++i) {
        const double ang = -2.0 * M_PI * peak.frequency * i * kDt;
        re += pre[i] * std::cos(ang);
        im += pre[i] * std::sin(ang);
    }
    const double oracle = 2.0 * std::hypot(re, im) / pre.size();
    CHECK(peak.amplitude == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(peak.amplitude > 0.8);
    CHECK(peak.amplitude < 1.0);

    // out-of-band tone leaves only the window leakage floor
    const auto leak = distill::band_peak_amplitude(
        distill::waveform_spectrum(
            distill::preprocess_waveform(tone(1.0e12, 1.0, 5.0)), kDt),
        1.4e12, 1.6e12);
    CHECK(leak < 0.1);

    CHECK_THROWS_AS(distill::band_peak(spec, 8e12, 9e12), distill::EmptyBand);
}

TEST_CASE("band peak is exactly invariant under a constant offset")
{
    auto w = tone(1.5e12, 2.5, 100.0);
    const auto a = distill::band_peak_amplitude(
        distill::waveform_spectrum(distill::preprocess_waveform(w), kDt),
        1.4e12, 1.6e12);
    for (auto& v : w)
        v += 55.5;
    const auto b = distill::band_peak_amplitude(
        distill::waveform_spectrum(distill::preprocess_waveform(w), kDt),
        1.4e12, 1.6e12);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("white noise: signal and quiet bands see the same floor")
{
    std::mt19937_64 rng(31);
    std::normal_distribution<double> noise(0.0, 30.0);
    double band_sum = 0.0, quiet_sum = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> w(150);
        for (auto& v : w)
            v = 1000.0 + noise(rng);
        const auto spec = distill::waveform_spectrum(
            distill::preprocess_waveform(w), kDt);
        band_sum += distill::band_peak_amplitude(spec, 1.4e12, 1.6e12);
        quiet_sum += distill::band_peak_amplitude(spec, 0.6e12, 1.2e12);
    }
    const double ratio = band_sum / quiet_sum;
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
}

TEST_CASE("distill image: constants, linearity, permutation")
{
    // constant cube distills to zero amplitude
    synth::WaveformCube cube;
    cube.rows = 2;
    cube.cols = 2;
    cube.pixel_pitch_effective = 1e-4;
    cube.delay_times = scan_axis(64);
    cube.counts.assign(4 * 64, 42.0);
    const auto flat = distill::distill_image(cube, 1.4e12, 1.6e12);
    for (double a : flat.amplitude)
        CHECK(a == doctest::Approx(0.0).epsilon(1e-12));

    // distinct pixels
    const auto t = scan_axis(64);
    for (int d = 0; d < 64; ++d) {
        cube.counts[0 * 64 + d] =
            100 + 10 * std::sin(2 * M_PI * 1.5e12 * t[d]);
        cube.counts[1 * 64 + d] =
            100 + 5 * std::sin(2 * M_PI * 1.5e12 * t[d]);
        cube.counts[2 * 64 + d] = 80.0;
        cube.counts[3 * 64 + d] =
            50 + 2 * std::cos(2 * M_PI * 1.45e12 * t[d]);
    }
    const auto img = distill::distill_image(cube, 1.4e12, 1.6e12);

    // linearity: doubling every count doubles the band amplitudes exactly
    auto cube2 = cube;
    for (auto& v : cube2.counts)
        v *= 2.0;
    const auto img2 = distill::distill_image(cube2, 1.4e12, 1.6e12);
    for (std::size_t i = 0; i < img.amplitude.size(); ++i) {
        CHECK(img2.amplitude[i] ==
              doctest::Approx(2.0 * img.amplitude[i]).epsilon(1e-12));
        CHECK(img2.mean_counts[i] ==
              doctest::Approx(2.0 * img.mean_counts[i]).epsilon(1e-12));
    }

    // frame-order-preserving pixel permutation commutes with distillation
    auto cube3 = cube;
    for (int d = 0; d < 64; ++d)
        std::swap(cube3.counts[0 * 64 + d], cube3.counts[3 * 64 + d]);
    const auto img3 = distill::distill_image(cube3, 1.4e12, 1.6e12);
    CHECK(img3.amplitude[0] == doctest::Approx(img.amplitude[3]));
    CHECK(img3.amplitude[3] == doctest::Approx(img.amplitude[0]));
    CHECK(img3.amplitude[1] == doctest::Approx(img.amplitude[1]));
}

TEST_CASE("end to end: mirror scan distills to a central maximum and the "
          "shared fit recovers the idler center frequency")
{
    optics::ConfigBundle bundle;
    bundle.camera.pixel_pitch = 114.3333e-6;
    bundle.camera.sensor_rows = 48;
    bundle.camera.sensor_cols = 48;
    synth::SourceModel source;
    source.rate = 6.1e4;
    source.qmc_samples = 16384;
    const auto cube = synth::synthesize_scan(scene::plain_mirror(), bundle,
                                             {}, source);

    const auto img = distill::distill_image(cube, 1.4e12, 1.6e12);
    int best_r = -1, best_c = -1;
    double best = -1.0;
    for (int r = 0; r < img.rows; ++r)
        for (int c = 0; c < img.cols; ++c)
            if (img.amplitude[img.index(r, c)] > best) {
                best = img.amplitude[img.index(r, c)];
                best_r = r;
                best_c = c;
            }
    // single central maximum of the 16x16 frame
    CHECK(std::abs(best_r - 8) <= 1);
    CHECK(std::abs(best_c - 8) <= 1);

    const auto floor = metrics_floor(cube);
    const auto roi = distill::select_roi(img, floor, 3.0);
    REQUIRE_FALSE(roi.empty());
    const auto shared =
        distill::fit_shared_params(cube, roi, 1.4e12, 1.6e12);
    CHECK(shared.angular_frequency / (2.0 * M_PI) ==
          doctest::Approx(bundle.spectral.center_frequency).epsilon(0.02));
}

TEST_CASE("shared fit: exact round trip on model data")
{
    const auto t = scan_axis();
    const double a = 50.0, nu = 2 * M_PI * 1.45e12, phi = 0.3 * M_PI;
    const double tc = 0.3e-12, width = 3e-12, y0 = 500.0;
    const auto w = eq_waveform(t, a, nu, phi, tc, width, y0);
    const auto cube = single_pixel_cube(w, t);

    const auto shared =
        distill::fit_shared_params(cube, {{0, 0}}, 1.4e12, 1.6e12);
    CHECK(shared.angular_frequency == doctest::Approx(nu).epsilon(1e-6));
    CHECK(shared.envelope_center == doctest::Approx(tc).epsilon(1e-6));
    CHECK(shared.envelope_width == doctest::Approx(width).epsilon(1e-6));
    CHECK(shared.offset == doctest::Approx(y0).epsilon(1e-6));

    // per-pixel closed form recovers amplitude and phase to high precision
    const auto [amp, ph] = distill::fit_pixel_phase(w, t, shared);
    CHECK(amp == doctest::Approx(a).epsilon(1e-6));
    CHECK(std::abs(ph - phi) < 1e-6);

    // residual at numerical noise level
    double ss_res = 0.0, ss_sig = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double env = std::exp(-0.5 * (t[i] - shared.envelope_center) *
                                    (t[i] - shared.envelope_center) /
                                    (shared.envelope_width *
                                     shared.envelope_width));
        const double model =
            amp * std::sin(shared.angular_frequency * t[i] + ph) * env +
            shared.offset;
        ss_res += (w[i] - model) * (w[i] - model);
        ss_sig += (w[i] - y0) * (w[i] - y0);
    }
    CHECK(std::sqrt(ss_res / ss_sig) < 1e-8);
}

TEST_CASE("shared fit: flat waveform raises InsufficientSNR")
{
    const auto t = scan_axis(64);
    const auto cube = single_pixel_cube(std::vector<double>(64, 100.0), t);
    CHECK_THROWS_AS(
        distill::fit_shared_params(cube, {{0, 0}}, 1.4e12, 1.6e12),
        distill::InsufficientSNR);
}

TEST_CASE("pixel phase fit edge cases")
{
    const auto t = scan_axis();
    distill::SharedWaveformParams shared;
    shared.angular_frequency = 2 * M_PI * 1.5e12;
    shared.envelope_center = 0.0;
    shared.envelope_width = 3e-12;
    shared.offset = 10.0;

    // zero-amplitude input
    const auto [a0, p0] =
        distill::fit_pixel_phase(std::vector<double>(t.size(), 10.0), t,
                                 shared);
    CHECK(a0 == doctest::Approx(0.0).epsilon(1e-12));
    (void)p0;

    // a pi shift flips the phase and keeps the amplitude
    const auto w1 = eq_waveform(t, 7.0, shared.angular_frequency, 0.2, 0.0,
                                3e-12, 10.0);
    const auto w2 = eq_waveform(t, 7.0, shared.angular_frequency,
                                0.2 + M_PI, 0.0, 3e-12, 10.0);
    const auto [a1, p1] = distill::fit_pixel_phase(w1, t, shared);
    const auto [a2, p2] = distill::fit_pixel_phase(w2, t, shared);
    CHECK(a1 == doctest::Approx(a2).epsilon(1e-9));
    CHECK(std::abs(distill::wrap_phase(p2 - p1 - M_PI)) < 1e-9);

    // collapsed envelope
    auto degenerate = shared;
    degenerate.envelope_width = 1e-16;
    CHECK_THROWS_AS(distill::fit_pixel_phase(w1, t, degenerate),
                    distill::DegenerateEnvelope);
}

TEST_CASE("delay-axis shift moves the fitted phase by nu * dtau")
{
    const auto bundleless_t = scan_axis();
    const double nu = 2 * M_PI * 1.5e12;
    const auto w = eq_waveform(bundleless_t, 20.0, nu, 0.4, 0.0, 3e-12, 200.0);

    const double dtau = 0.37e-12;
    auto shifted_t = bundleless_t;
    for (auto& x : shifted_t)
        x += dtau;

    const auto cube_a = single_pixel_cube(w, bundleless_t);
    const auto cube_b = single_pixel_cube(w, shifted_t);
    const auto sh_a =
        distill::fit_shared_params(cube_a, {{0, 0}}, 1.4e12, 1.6e12);
    const auto sh_b =
        distill::fit_shared_params(cube_b, {{0, 0}}, 1.4e12, 1.6e12);
    const auto [aa, pa] = distill::fit_pixel_phase(w, bundleless_t, sh_a);
    const auto [ab, pb] = distill::fit_pixel_phase(w, shifted_t, sh_b);
    (void)aa;
    (void)ab;
    // same samples on a shifted clock: phi' = phi - nu * dtau (mod 2 pi)
    const double expected = distill::wrap_phase(pa - nu * dtau);
    CHECK(std::abs(distill::wrap_phase(pb - expected)) < 0.01 * 2 * M_PI);
}

TEST_CASE("reference normalize")
{
    const auto t = scan_axis(64);
    synth::WaveformCube cube;
    cube.rows = 1;
    cube.cols = 3;
    cube.pixel_pitch_effective = 1e-4;
    cube.delay_times = t;
    cube.counts.resize(3 * 64);
    for (int d = 0; d < 64; ++d) {
        cube.counts[0 * 64 + d] =
            1000 + 100 * std::sin(2 * M_PI * 1.5e12 * t[d]);
        cube.counts[1 * 64 + d] =
            1000 + 50 * std::sin(2 * M_PI * 1.5e12 * t[d]);
        cube.counts[2 * 64 + d] = 1000.0;  // below threshold after normalize
    }
    auto img = distill::distill_image(cube, 1.4e12, 1.6e12);
    distill::SharedWaveformParams shared;
    shared.angular_frequency = 2 * M_PI * 1.5e12;
    shared.envelope_center = 0.0;
    shared.envelope_width = 1e-9;  // effectively flat envelope
    shared.offset = 1000.0;
    distill::fill_phases(img, cube, shared);

    // image == reference: unit ratio, zero phase on valid pixels
    const auto self = distill::reference_normalize(img, img, 1e-3);
    CHECK(self.valid[0] == 1);
    CHECK(self.amplitude[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(self.phase[0] == doctest::Approx(0.0));
    CHECK(self.valid[2] == 0);  // no modulation -> below threshold

    // ratio against the stronger pixel
    auto ref = img;
    // reference uses pixel 0's waveform for every pixel
    for (std::size_t i = 1; i < 3; ++i) {
        ref.amplitude[i] = ref.amplitude[0];
        ref.mean_counts[i] = ref.mean_counts[0];
        ref.phase[i] = ref.phase[0];
    }
    const auto ratio = distill::reference_normalize(img, ref, 1e-3);
    CHECK(ratio.amplitude[1] == doctest::Approx(0.5).epsilon(1e-6));

    distill::DistilledImage wrong;
    wrong.rows = 2;
    wrong.cols = 2;
    wrong.amplitude.assign(4, 0.0);
    wrong.mean_counts.assign(4, 1.0);
    wrong.phase.assign(4, 0.0);
    wrong.valid.assign(4, 1);
    CHECK_THROWS_AS(distill::reference_normalize(img, wrong, 1e-3),
                    distill::ShapeMismatch);
}
