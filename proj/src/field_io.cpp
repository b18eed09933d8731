#include "nls/field_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace nls {

namespace {
constexpr char kMagic[5] = {'N', 'L', 'S', 'F', '1'};
}

void write_field(const std::string& path, const Field& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw structural_error("write_field: cannot open " + path);
    out.write(kMagic, 5);
    char tag = field.rep() == Rep::spectral ? 1 : 0;
    out.put(tag);
    out.put(0);
    out.put(0);
    std::uint64_t d = static_cast<std::uint64_t>(field.grid().dim);
    std::uint64_t n = static_cast<std::uint64_t>(field.grid().n);
    double box = field.grid().box;
    out.write(reinterpret_cast<const char*>(&d), 8);
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(&box), 8);
    out.write(reinterpret_cast<const char*>(field.data()), static_cast<std::streamsize>(field.size() * sizeof(cplx)));
    if (!out) throw structural_error("write_field: short write to " + path);
}

Field read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw structural_error("read_field: cannot open " + path);
    char magic[5];
    in.read(magic, 5);
    if (!in || std::memcmp(magic, kMagic, 5) != 0)
        throw structural_error("read_field: bad magic in " + path);
    char tag = 0, pad0 = 0, pad1 = 0;
    in.get(tag).get(pad0).get(pad1);
    if (tag != 0 && tag != 1) throw structural_error("read_field: bad representation tag");
    std::uint64_t d = 0, n = 0;
    double box = 0.0;
    in.read(reinterpret_cast<char*>(&d), 8);
    in.read(reinterpret_cast<char*>(&n), 8);
    in.read(reinterpret_cast<char*>(&box), 8);
    if (!in) throw structural_error("read_field: truncated header in " + path);

    GridSpec grid{static_cast<int>(n), box, static_cast<int>(d)};
    grid.validate();
    Field f(grid, tag == 1 ? Rep::spectral : Rep::physical);
    in.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(f.size() * sizeof(cplx)));
    if (!in) throw structural_error("read_field: truncated payload in " + path);
    return f;
}

}  // namespace nls
