#pragma once

#include <string>
#include <vector>

namespace cusp {

// 8-bit binary PGM (P5); values in [0,1] map to round(255*v).
void write_pgm(const std::string& path, int side, const std::vector<double>& values);

std::vector<unsigned char> read_pgm(const std::string& path, int* side_out);

}  // namespace cusp
