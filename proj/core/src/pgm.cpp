#include "tvflow/pgm.hpp"

#include <fstream>
#include <stdexcept>

namespace tvflow {

namespace {

// next whitespace-separated token, skipping '#' comment lines
std::string next_token(std::istream& is) {
    std::string tok;
    for (;;) {
        int c = is.get();
        if (c == EOF) throw std::runtime_error("read_pgm: unexpected end of file");
        if (c == '#') {
            std::string dummy;
            std::getline(is, dummy);
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
}

}  // namespace

ImageDatum read_pgm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_pgm: cannot open " + path);

    const std::string magic = next_token(f);
    if (magic != "P2" && magic != "P5")
        throw std::runtime_error("read_pgm: not a PGM (P2/P5) file: " + path);

    ImageDatum img;
    img.width = std::stoi(next_token(f));
    img.height = std::stoi(next_token(f));
    img.maxval = std::stoi(next_token(f));
    if (img.width <= 0 || img.height <= 0 || img.maxval <= 0 || img.maxval > 65535)
        throw std::runtime_error("read_pgm: malformed PGM header in " + path);

    const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
    img.pixels.resize(count);
    if (magic == "P2") {
        for (auto& p : img.pixels) p = static_cast<std::uint16_t>(std::stoi(next_token(f)));
    } else {
        // the single whitespace after maxval was already consumed by next_token
        const int bytes = img.maxval > 255 ? 2 : 1;
        std::vector<char> buf(count * bytes);
        f.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (!f) throw std::runtime_error("read_pgm: truncated pixel data in " + path);
        for (std::size_t i = 0; i < count; ++i) {
            if (bytes == 1)
                img.pixels[i] = static_cast<std::uint8_t>(buf[i]);
            else
                img.pixels[i] = static_cast<std::uint16_t>(
                    (static_cast<std::uint8_t>(buf[2 * i]) << 8) |
                    static_cast<std::uint8_t>(buf[2 * i + 1]));
        }
    }
    for (auto p : img.pixels)
        if (p > img.maxval) throw std::runtime_error("read_pgm: pixel above maxval in " + path);
    return img;
}

void write_pgm(const std::string& path, const ImageDatum& img, bool binary) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_pgm: cannot open " + path);
    f << (binary ? "P5" : "P2") << "\n"
      << img.width << " " << img.height << "\n"
      << img.maxval << "\n";
    if (binary) {
        const int bytes = img.maxval > 255 ? 2 : 1;
        for (auto p : img.pixels) {
            if (bytes == 2) f.put(static_cast<char>(p >> 8));
            f.put(static_cast<char>(p & 0xff));
        }
    } else {
        int col = 0;
        for (auto p : img.pixels) {
            f << p << (++col % 16 == 0 ? '\n' : ' ');
        }
        f << "\n";
    }
    if (!f) throw std::runtime_error("write_pgm: write failed for " + path);
}

}  // namespace tvflow
