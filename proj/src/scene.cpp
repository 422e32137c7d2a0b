#include "thzqi/scene.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "thzqi/optics.hpp"

namespace thzqi::scene {

SceneObject plain_mirror()
{
    return {[](double, double, double) { return Response{1.0, 0.0}; },
            "plain_mirror"};
}

SceneObject cross_cutout(double line_width)
{
    if (line_width <= 0.0)
        throw std::invalid_argument("cross_cutout: line_width must be > 0");
    const double half = 0.5 * line_width;
    return {[half](double x, double y, double) {
                const double d1 = std::abs(x - y) * 0.7071067811865476;
                const double d2 = std::abs(x + y) * 0.7071067811865476;
                if (d1 < half || d2 < half)
                    return Response{0.0, 0.0};
                return Response{1.0, 0.0};
            },
            "cross_cutout"};
}

SceneObject tape_stripes(const TapeSpec& spec)
{
    if (spec.refractive_index < 1.0 || spec.thickness <= 0.0 ||
        spec.stripe_width <= 0.0)
        throw std::invalid_argument("tape_stripes: invalid spec");
    const double half = 0.5 * spec.stripe_width;
    const double path_per_layer =
        2.0 * (spec.refractive_index - 1.0) * spec.thickness;
    return {[half, path_per_layer](double x, double, double f) {
                int layers = 0;
                if (x >= half)
                    layers = 2;
                else if (x >= -half)
                    layers = 1;
                const double phase = 2.0 * 3.14159265358979323846 * f *
                                     path_per_layer * layers /
                                     optics::kSpeedOfLight;
                return Response{1.0, phase};
            },
            "tape_stripes"};
}

SceneObject half_absorber(double extinction_left, double extinction_right)
{
    if (extinction_left < 0.0 || extinction_right < 0.0)
        throw std::invalid_argument("half_absorber: extinction must be >= 0");
    const double mag_left = std::pow(10.0, -0.5 * extinction_left);
    const double mag_right = std::pow(10.0, -0.5 * extinction_right);
    return {[mag_left, mag_right](double x, double, double) {
                return Response{x < 0.0 ? mag_left : mag_right, 0.0};
            },
            "half_absorber"};
}

SceneObject knife_edge(double edge_x)
{
    return {[edge_x](double x, double, double) {
                return Response{x < edge_x ? 1.0 : 0.0, 0.0};
            },
            "knife_edge"};
}

namespace {

struct Raster {
    double pitch = 0.0;
    int rows = 0;
    int cols = 0;
    std::vector<double> magnitude;
    std::vector<double> phase;
};

std::vector<double> parse_row(const std::string& line, int expected)
{
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != expected)
        throw std::runtime_error("scene raster: row has wrong column count");
    return row;
}

}  // namespace

SceneObject from_csv_raster(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("scene raster: cannot open " + path);

    std::string header;
    std::getline(in, header);
    auto raster = std::make_shared<Raster>();
    {
        std::stringstream ss(header);
        std::string hash, key;
        ss >> hash;
        if (hash != "#")
            throw std::runtime_error("scene raster: missing '#' header line");
        while (ss >> key) {
            if (key == "pitch")
                ss >> raster->pitch;
            else if (key == "rows")
                ss >> raster->rows;
            else if (key == "cols")
                ss >> raster->cols;
            else
                throw std::runtime_error("scene raster: unknown header key '" +
                                         key + "'");
        }
    }
    if (raster->pitch <= 0.0 || raster->rows < 1 || raster->cols < 1)
        throw std::runtime_error("scene raster: bad header values");

    std::string line;
    for (int r = 0; r < 2 * raster->rows; ++r) {
        if (!std::getline(in, line))
            throw std::runtime_error("scene raster: truncated file");
        if (line.empty()) {
            --r;
            continue;
        }
        auto row = parse_row(line, raster->cols);
        auto& dest = r < raster->rows ? raster->magnitude : raster->phase;
        dest.insert(dest.end(), row.begin(), row.end());
    }
    for (double m : raster->magnitude)
        if (!(m >= 0.0 && m <= 1.0))
            throw std::runtime_error(
                "scene raster: magnitude outside [0, 1]");

    return {[raster](double x, double y, double) {
                // raster centered on the origin, row 0 at the top (+y)
                const double half_w = 0.5 * raster->cols * raster->pitch;
                const double half_h = 0.5 * raster->rows * raster->pitch;
                const int c = static_cast<int>(std::floor((x + half_w) /
                                                          raster->pitch));
                const int r = static_cast<int>(std::floor((half_h - y) /
                                                          raster->pitch));
                if (r < 0 || r >= raster->rows || c < 0 || c >= raster->cols)
                    return Response{1.0, 0.0};
                const std::size_t i =
                    static_cast<std::size_t>(r) * raster->cols + c;
                return Response{raster->magnitude[i], raster->phase[i]};
            },
            "csv_raster"};
}

}  // namespace thzqi::scene
