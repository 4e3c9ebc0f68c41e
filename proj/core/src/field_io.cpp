#include "tvflow/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace tvflow {

namespace {

void write_le_doubles(std::ostream& os, const std::vector<double>& v) {
    static_assert(sizeof(double) == 8);
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(v.data()),
                 static_cast<std::streamsize>(v.size() * 8));
    } else {
        for (double x : v) {
            char buf[8];
            std::memcpy(buf, &x, 8);
            std::swap(buf[0], buf[7]);
            std::swap(buf[1], buf[6]);
            std::swap(buf[2], buf[5]);
            std::swap(buf[3], buf[4]);
            os.write(buf, 8);
        }
    }
}

void read_le_doubles(std::istream& is, std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::little) {
        is.read(reinterpret_cast<char*>(v.data()),
                static_cast<std::streamsize>(v.size() * 8));
    } else {
        for (double& x : v) {
            char buf[8];
            is.read(buf, 8);
            std::swap(buf[0], buf[7]);
            std::swap(buf[1], buf[6]);
            std::swap(buf[2], buf[5]);
            std::swap(buf[3], buf[4]);
            std::memcpy(&x, buf, 8);
        }
    }
    if (!is) throw std::runtime_error("read_field: truncated payload");
}

}  // namespace

void write_field(std::ostream& os, const ScalarField& u) {
    const Grid& g = u.grid;
    os << "tvflow-field v1 dim=" << g.dim << " n=" << g.n[0];
    if (g.dim == 2) os << "," << g.n[1];
    os << " L=" << std::setprecision(17) << g.extent[0];
    if (g.dim == 2) os << "," << g.extent[1];
    os << "\n";
    write_le_doubles(os, u.v);
}

void write_field(const std::string& path, const ScalarField& u) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_field: cannot open " + path);
    write_field(f, u);
    if (!f) throw std::runtime_error("write_field: write failed for " + path);
}

ScalarField read_field(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_field: missing header");
    std::istringstream hs(line);
    std::string magic, version;
    hs >> magic >> version;
    if (magic != "tvflow-field" || version != "v1")
        throw std::runtime_error("read_field: bad header: " + line);

    int dim = 0;
    std::array<int, 2> n{1, 1};
    std::array<double, 2> L{0.0, 0.0};
    std::string tok;
    while (hs >> tok) {
        if (tok.rfind("dim=", 0) == 0) {
            dim = std::stoi(tok.substr(4));
        } else if (tok.rfind("n=", 0) == 0) {
            std::istringstream vs(tok.substr(2));
            char comma;
            vs >> n[0];
            if (vs >> comma >> n[1]) {}
        } else if (tok.rfind("L=", 0) == 0) {
            std::istringstream vs(tok.substr(2));
            char comma;
            vs >> L[0];
            if (vs >> comma >> L[1]) {}
        }
    }
    Grid g = (dim == 1) ? Grid::line(n[0], L[0]) : Grid::rect(n[0], n[1], L[0], L[1]);
    ScalarField u(g);
    read_le_doubles(is, u.v);
    return u;
}

ScalarField read_field(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_field: cannot open " + path);
    return read_field(f);
}

}  // namespace tvflow
