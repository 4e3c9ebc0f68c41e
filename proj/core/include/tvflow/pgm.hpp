#ifndef TVFLOW_PGM_HPP
#define TVFLOW_PGM_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace tvflow {

/// Grayscale image, PGM P2 (ASCII) or P5 (binary), maxval <= 65535.
struct ImageDatum {
    int width = 0, height = 0, maxval = 255;
    std::vector<std::uint16_t> pixels;  // row-major, top row first

    std::uint16_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

ImageDatum read_pgm(const std::string& path);
void write_pgm(const std::string& path, const ImageDatum& img, bool binary = true);

}  // namespace tvflow

#endif
