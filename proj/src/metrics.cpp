#include "thzqi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "thzqi/fit.hpp"

namespace thzqi::metrics {

std::string MetrologyReport::to_json() const
{
    nlohmann::json j;
    j["fov_m"] = fov;
    j["fov_uncertainty_m"] = fov_uncertainty;
    j["resolution_m"] = resolution;
    j["resolution_uncertainty_m"] = resolution_uncertainty;
    j["spatial_modes"] = spatial_modes;
    j["noise_floor_median"] = noise_floor_median;
    j["notes"] = notes;
    return j.dump(2);
}

void ExtinctionCurve::save_csv(const std::string& path) const
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("ExtinctionCurve: cannot open " + path);
    out.precision(12);
    out << "frequency_hz,extinction\n";
    for (std::size_t i = 0; i < frequencies.size(); ++i)
        out << frequencies[i] << ',' << k_values[i] << '\n';
}

std::vector<double> noise_floor(const synth::WaveformCube& cube,
                                double quiet_lo, double quiet_hi)
{
    if (!(quiet_lo > 0.0 && quiet_lo < quiet_hi))
        throw std::invalid_argument("noise_floor: bad quiet band");
    // same per-pixel pipeline and normalization as the distilled amplitudes
    const auto img = distill::distill_image(cube, quiet_lo, quiet_hi);
    return img.amplitude;
}

namespace {

struct Profile {
    std::vector<double> position;   // m, image plane steps
    std::vector<double> amplitude;  // modulation depth
    std::vector<double> floor;      // modulation depth
    std::vector<std::uint8_t> valid;
};

// amplitude over mean counts; the threshold lives on this scale
double depth(const distill::DistilledImage& img, std::size_t i)
{
    return img.modulation_depth(i);
}

double floor_depth(const distill::DistilledImage& img,
                   const std::vector<double>& floor, std::size_t i)
{
    return img.mean_counts[i] > 0.0 ? floor[i] / img.mean_counts[i] : 0.0;
}

// Depth-weighted centroid over valid, above-threshold pixels.
void centroid(const distill::DistilledImage& img,
              const std::vector<double>& floor, double threshold, double& row,
              double& col)
{
    double wsum = 0.0, rsum = 0.0, csum = 0.0;
    for (int r = 0; r < img.rows; ++r)
        for (int c = 0; c < img.cols; ++c) {
            const std::size_t i = img.index(r, c);
            const double d = depth(img, i);
            if (!img.valid[i] || d <= floor_depth(img, floor, i) + threshold)
                continue;
            wsum += d;
            rsum += d * r;
            csum += d * c;
        }
    if (wsum <= 0.0)
        throw NoSignal{};
    row = rsum / wsum;
    col = csum / wsum;
}

Profile row_profile(const distill::DistilledImage& img,
                    const std::vector<double>& floor, int row, double pitch)
{
    Profile p;
    for (int c = 0; c < img.cols; ++c) {
        const std::size_t i = img.index(row, c);
        p.position.push_back(c * pitch);
        p.amplitude.push_back(depth(img, i));
        p.floor.push_back(floor_depth(img, floor, i));
        p.valid.push_back(img.valid[i]);
    }
    return p;
}

Profile radial_profile(const distill::DistilledImage& img,
                       const std::vector<double>& floor, double row0,
                       double col0, double pitch)
{
    const int nbins =
        static_cast<int>(std::ceil(std::hypot(img.rows, img.cols)));
    std::vector<double> amp(nbins, 0.0), flo(nbins, 0.0);
    std::vector<int> count(nbins, 0);
    for (int r = 0; r < img.rows; ++r)
        for (int c = 0; c < img.cols; ++c) {
            const std::size_t i = img.index(r, c);
            if (!img.valid[i])
                continue;
            const int bin = static_cast<int>(
                std::floor(std::hypot(r - row0, c - col0)));
            if (bin >= nbins)
                continue;
            amp[bin] += depth(img, i);
            flo[bin] += floor_depth(img, floor, i);
            ++count[bin];
        }
    Profile p;
    for (int b = 0; b < nbins; ++b) {
        if (count[b] == 0)
            continue;
        p.position.push_back(b * pitch);
        p.amplitude.push_back(amp[b] / count[b]);
        p.floor.push_back(flo[b] / count[b]);
        p.valid.push_back(1);
    }
    return p;
}

// Sub-pixel positions where (amplitude - floor - threshold) crosses zero,
// walking outward from the given start index.
double crossing(const Profile& p, int start, int step, double threshold)
{
    auto excess = [&](int i) {
        return p.valid[i] ? p.amplitude[i] - p.floor[i] - threshold
                          : -threshold;
    };
    int last = start;
    for (int i = start; i >= 0 && i < static_cast<int>(p.position.size());
         i += step) {
        if (excess(i) <= 0.0) {
            const double e0 = excess(last);
            const double e1 = excess(i);
            const double frac = e0 - e1 != 0.0 ? e0 / (e0 - e1) : 0.0;
            return p.position[last] +
                   frac * (p.position[i] - p.position[last]);
        }
        last = i;
    }
    return p.position[last];  // still above threshold at the image border
}

double profile_width(const Profile& p, int start, double threshold)
{
    if (start < 0 || start >= static_cast<int>(p.position.size()))
        throw NoSignal{};
    const double left = crossing(p, start, -1, threshold);
    const double right = crossing(p, start, +1, threshold);
    return right - left;
}

}  // namespace

double measure_fov(const distill::DistilledImage& reference,
                   const std::vector<double>& floor, double threshold,
                   double pixel_pitch_sample_plane, bool radial_average)
{
    if (floor.size() != reference.amplitude.size())
        throw std::invalid_argument("measure_fov: floor shape mismatch");

    double row0, col0;
    centroid(reference, floor, threshold, row0, col0);

    if (radial_average) {
        const auto p = radial_profile(reference, floor, row0, col0,
                                      pixel_pitch_sample_plane);
        if (p.position.empty())
            throw NoSignal{};
        // the profile starts at the centroid, so the outward crossing is a radius
        return 2.0 * profile_width(p, 0, threshold);
    }

    const int row = static_cast<int>(std::llround(row0));
    const auto p =
        row_profile(reference, floor, row, pixel_pitch_sample_plane);
    const int start = static_cast<int>(std::llround(col0));
    if (!p.valid[start] ||
        p.amplitude[start] <= p.floor[start] + threshold)
        throw NoSignal{};
    return profile_width(p, start, threshold);
}

double fov_threshold_spread(const distill::DistilledImage& reference,
                            const std::vector<double>& floor, double threshold,
                            double pixel_pitch_sample_plane,
                            bool radial_average)
{
    const double lo = measure_fov(reference, floor, 0.8 * threshold,
                                  pixel_pitch_sample_plane, radial_average);
    const double hi = measure_fov(reference, floor, 1.2 * threshold,
                                  pixel_pitch_sample_plane, radial_average);
    return 0.5 * std::abs(lo - hi);
}

KnifeEdgeResult knife_edge_resolution(
    const std::vector<double>& edge_positions,
    const std::vector<double>& integrated_amplitudes)
{
    if (edge_positions.size() != integrated_amplitudes.size())
        throw std::invalid_argument("knife_edge_resolution: length mismatch");
    if (edge_positions.size() < 8)
        throw std::invalid_argument(
            "knife_edge_resolution: need at least 8 edge positions");

    // order by position
    std::vector<std::size_t> idx(edge_positions.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return edge_positions[a] < edge_positions[b];
    });
    std::vector<double> x(idx.size()), y(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        x[i] = edge_positions[idx[i]];
        y[i] = integrated_amplitudes[idx[i]];
    }

    const double span = x.back() - x.front();
    if (!(span > 0.0))
        throw std::invalid_argument(
            "knife_edge_resolution: degenerate position span");

    std::vector<double> p0 = {0.5 * (y.front() + y.back()),
                              0.5 * (y.back() - y.front()),
                              0.5 * (x.front() + x.back()), span / 6.0};
    auto model = [](double xi, const std::vector<double>& p,
                    double* jac) -> double {
        const double a = p[0], b = p[1], x0 = p[2], s = p[3];
        const double u = (xi - x0) / (1.4142135623730951 * s);
        const double e = std::erf(u);
        if (jac) {
            const double g = 1.1283791670955126 * std::exp(-u * u);  // 2/sqrt(pi)
            jac[0] = 1.0;
            jac[1] = e;
            jac[2] = -b * g / (1.4142135623730951 * s);
            jac[3] = -b * g * u / s;
        }
        return a + b * e;
    };

    const auto res = fit::levmar(model, x, y, p0);
    if (!res.converged)
        throw distill::NoConvergence{};

    KnifeEdgeResult out;
    out.fit.offset = res.params[0];
    out.fit.amplitude = res.params[1];
    out.fit.center = res.params[2];
    out.fit.sigma = std::abs(res.params[3]);
    out.fit.sigma_uncertainty = std::sqrt(std::max(0.0, res.covariance[15]));
    out.fit.converged = true;

    // flag raw data that moves against the fitted direction by more than the
    // residual scale
    const double rms = std::sqrt(res.chi2 / static_cast<double>(x.size()));
    const double direction = res.params[1] >= 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 1; i < y.size(); ++i)
        if (direction * (y[i] - y[i - 1]) < -4.0 * rms - 1e-300)
            out.fit.monotonic_warning = true;

    const double fwhm_factor = 2.0 * std::sqrt(2.0 * std::log(2.0));
    out.resolution = fwhm_factor * out.fit.sigma;
    out.resolution_uncertainty = fwhm_factor * out.fit.sigma_uncertainty;
    return out;
}

double spatial_mode_count(double fov, double resolution)
{
    if (!(fov > 0.0) || !(resolution > 0.0))
        throw std::invalid_argument(
            "spatial_mode_count: fov and resolution must be > 0");
    return fov / resolution;
}

double extinction(double a0, double a)
{
    if (!(a0 > 0.0) || !(a > 0.0))
        throw NonPositiveAmplitude{};
    return 2.0 * std::log10(a0 / a);
}

std::pair<double, double> align_tds_to_imaging(
    std::pair<double, double> tds_pair,
    const std::vector<double>& imaging_column_means, int left_begin,
    int left_end)
{
    if (left_begin < 0 || left_end > static_cast<int>(imaging_column_means.size()) ||
        left_begin >= left_end)
        throw EmptyRegion{};
    double mean = 0.0;
    for (int i = left_begin; i < left_end; ++i)
        mean += imaging_column_means[i];
    mean /= static_cast<double>(left_end - left_begin);
    const double offset = mean - tds_pair.first;
    return {tds_pair.first + offset, tds_pair.second + offset};
}

}  // namespace thzqi::metrics
