#include "cusp/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "cusp/errors.hpp"

namespace cusp {

void write_pgm(const std::string& path, int side, const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != side * side) {
        throw UsageError("pgm: value count does not match side^2");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write PGM: " + path);
    out << "P5\n" << side << " " << side << "\n255\n";
    for (double v : values) {
        const int byte = static_cast<int>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
        out.put(static_cast<char>(byte));
    }
    if (!out) throw DataError("failed writing PGM: " + path);
}

std::vector<unsigned char> read_pgm(const std::string& path, int* side_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open PGM: " + path);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5" || w != h || maxval != 255) {
        throw DataError("unsupported PGM format: " + path);
    }
    in.get();  // single whitespace after maxval
    std::vector<unsigned char> data(static_cast<std::size_t>(w * h));
    if (!in.read(reinterpret_cast<char*>(data.data()),
                 static_cast<std::streamsize>(data.size()))) {
        throw DataError("truncated PGM: " + path);
    }
    if (side_out) *side_out = w;
    return data;
}

}  // namespace cusp
