#include "thzqi/raster_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace thzqi::raster_io {

void write_csv_matrix(const std::string& path, const std::vector<double>& data,
                      int rows, int cols)
{
    if (static_cast<std::size_t>(rows) * cols != data.size())
        throw std::invalid_argument("write_csv_matrix: shape mismatch");
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_csv_matrix: cannot open " + path);
    out.precision(17);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c)
                out << ',';
            out << data[static_cast<std::size_t>(r) * cols + c];
        }
        out << '\n';
    }
}

std::vector<double> read_csv_matrix(const std::string& path, int& rows,
                                    int& cols)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("read_csv_matrix: cannot open " + path);
    std::vector<double> data;
    std::string line;
    rows = 0;
    cols = -1;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string cell;
        int n = 0;
        while (std::getline(ss, cell, ',')) {
            data.push_back(std::stod(cell));
            ++n;
        }
        if (cols < 0)
            cols = n;
        else if (n != cols)
            throw std::runtime_error("read_csv_matrix: ragged rows in " + path);
        ++rows;
    }
    return data;
}

void write_pgm16(const std::string& path, const std::vector<double>& data,
                 int rows, int cols)
{
    if (static_cast<std::size_t>(rows) * cols != data.size())
        throw std::invalid_argument("write_pgm16: shape mismatch");
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_pgm16: cannot open " + path);

    const auto [mn, mx] = std::minmax_element(data.begin(), data.end());
    const double lo = *mn;
    const double hi = *mx;
    const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;

    out << "P2\n";
    out << "# linear scaling: gray = round(65535*(value-min)/(max-min)), min="
        << lo << " max=" << hi << "\n";
    out << cols << ' ' << rows << "\n65535\n";
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double v = data[static_cast<std::size_t>(r) * cols + c];
            const long g = std::lround((v - lo) * scale);
            out << g << (c + 1 < cols ? ' ' : '\n');
        }
    }
}

void write_distilled_image(const std::string& path_prefix,
                           const distill::DistilledImage& image)
{
    write_csv_matrix(path_prefix + "_amplitude.csv", image.amplitude,
                     image.rows, image.cols);
    write_csv_matrix(path_prefix + "_phase.csv", image.phase, image.rows,
                     image.cols);
    std::vector<double> mask(image.valid.begin(), image.valid.end());
    write_csv_matrix(path_prefix + "_mask.csv", mask, image.rows, image.cols);
    write_pgm16(path_prefix + "_amplitude.pgm", image.amplitude, image.rows,
                image.cols);
}

}  // namespace thzqi::raster_io
