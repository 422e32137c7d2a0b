// Benchmark: parallel synthesis/distillation kernels against the serial
// reference implementations, at the desk-scale problem size.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "thzqi/distill.hpp"
#include "thzqi/scene.hpp"
#include "thzqi/synth.hpp"

using namespace thzqi;

namespace {

template <typename F>
double time_ms(F&& fn)
{
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv)
{
    std::size_t n_samples = 1 << 16;
    if (argc > 1)
        n_samples = std::strtoull(argv[1], nullptr, 10);

    optics::ConfigBundle bundle;
    bundle.camera.pixel_pitch = 114.3333e-6;
    bundle.camera.sensor_rows = 192;
    bundle.camera.sensor_cols = 192;

    synth::NoiseSpec noise;
    synth::SourceModel source;
    source.qmc_samples = n_samples;

    const auto mirror = scene::plain_mirror();

#ifdef _OPENMP
    std::cout << "threads: " << omp_get_max_threads() << "\n";
#else
    std::cout << "threads: 1 (built without OpenMP)\n";
#endif
    std::cout << "pair samples: " << n_samples << ", binned pixels: "
              << bundle.camera.sensor_rows / bundle.camera.binning << "x"
              << bundle.camera.sensor_cols / bundle.camera.binning
              << ", delays: " << bundle.scan.n_steps << "\n\n";

    synth::WaveformCube cube_par, cube_ser;
    const double t_synth_par = time_ms(
        [&] { cube_par = synth::synthesize_scan(mirror, bundle, noise, source); });
    const double t_synth_ser = time_ms([&] {
        cube_ser = synth::synthesize_scan_reference(mirror, bundle, noise,
                                                    source);
    });

    double max_rel = 0.0;
    for (std::size_t i = 0; i < cube_par.counts.size(); ++i) {
        const double a = cube_par.counts[i];
        const double b = cube_ser.counts[i];
        const double denom = std::abs(b) > 1e-12 ? std::abs(b) : 1.0;
        max_rel = std::max(max_rel, std::abs(a - b) / denom);
    }

    distill::DistilledImage img_par, img_ser;
    const double t_dist_par = time_ms(
        [&] { img_par = distill::distill_image(cube_par, 1.4e12, 1.6e12); });
    const double t_dist_ser = time_ms([&] {
        img_ser = distill::distill_image_reference(cube_par, 1.4e12, 1.6e12);
    });

    std::cout << "synthesize_scan            " << t_synth_par << " ms\n";
    std::cout << "synthesize_scan_reference  " << t_synth_ser << " ms  (x"
              << t_synth_ser / t_synth_par << ")\n";
    std::cout << "  max relative deviation   " << max_rel << "\n";
    std::cout << "distill_image              " << t_dist_par << " ms\n";
    std::cout << "distill_image_reference    " << t_dist_ser << " ms  (x"
              << t_dist_ser / t_dist_par << ")\n";
    return 0;
}
