#include "besovlab/serialize.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>

namespace besovlab {

namespace {

constexpr char kMagic[4] = {'B', 'S', 'V', 'G'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void write_grid_function(const GridFunction& f, std::ostream& out) {
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(f.resolution()));
    put_f64(out, f.domain.side_length);
    put_f64(out, f.support_radius ? *f.support_radius
                                  : std::numeric_limits<double>::quiet_NaN());
    const int n = f.resolution();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) put_f64(out, f.values(i, j));
    }
    if (!out) throw IoError("write_grid_function: stream failure");
}

void write_grid_function(const GridFunction& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_grid_function: cannot open " + path);
    write_grid_function(f, out);
}

GridFunction read_grid_function(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw IoError("read_grid_function: bad magic, not a grid-function file");
    }
    const std::uint32_t version = get_u32(in);
    if (version != kVersion) {
        throw IoError("read_grid_function: unsupported version " + std::to_string(version));
    }
    const std::uint32_t n = get_u32(in);
    const double side = get_f64(in);
    const double support = get_f64(in);
    if (!in) throw IoError("read_grid_function: truncated header");

    GridFunction f;
    f.domain = Domain::make(side, static_cast<int>(n));
    f.values.resize(n, n);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) f.values(i, j) = get_f64(in);
    }
    if (!in) throw IoError("read_grid_function: truncated values");
    if (!std::isnan(support)) f.support_radius = support;
    return f;
}

GridFunction read_grid_function(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_grid_function: cannot open " + path);
    return read_grid_function(in);
}

}  // namespace besovlab
