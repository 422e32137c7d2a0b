#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thzqi/distill.hpp"

namespace thzqi::raster_io {

/// Plain comma-separated matrix, full double precision.
void write_csv_matrix(const std::string& path, const std::vector<double>& data,
                      int rows, int cols);
std::vector<double> read_csv_matrix(const std::string& path, int& rows,
                                    int& cols);

/// 16-bit ASCII PGM preview with the linear scaling recorded in a header
/// comment: value = round(65535 * (x - min) / (max - min)).
void write_pgm16(const std::string& path, const std::vector<double>& data,
                 int rows, int cols);

/// Amplitude, phase and mask of a distilled image as three CSV files plus a
/// PGM preview of the amplitude; paths get _amplitude.csv etc. appended.
void write_distilled_image(const std::string& path_prefix,
                           const distill::DistilledImage& image);

}  // namespace thzqi::raster_io
