#pragma once

// WRG1 field files.
//
//   bytes 0..3   magic "WRG1"
//   bytes 4..7   format version, uint32 little-endian
//   bytes 8..15  length of the JSON metadata block, uint64 little-endian
//   JSON block   {"grid": {"n": [...], "box": [...]}, "fields": [{"name", "components"}], ...}
//   payload      little-endian float64 arrays, fields in declared order,
//                components in order, each row-major over (x, y, z)

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "json.hpp"

#include "field.hpp"

namespace wring {

using json = nlohmann::json;

inline constexpr char kWrgMagic[4] = {'W', 'R', 'G', '1'};
inline constexpr std::uint32_t kWrgVersion = 1;

struct NamedField {
    std::string name;
    std::vector<ScalarField> components;  // 1 for scalars, 3 for vectors
};

struct FieldFile {
    Grid3 grid;
    json meta = json::object();  // free-form provenance; "grid" and "fields" are managed
    std::vector<NamedField> fields;

    const NamedField* find(const std::string& name) const {
        for (const auto& f : fields)
            if (f.name == name) return &f;
        return nullptr;
    }
};

inline NamedField named(std::string name, const VectorField& v) {
    return {std::move(name), {v[0], v[1], v[2]}};
}
inline NamedField named(std::string name, const ScalarField& s) { return {std::move(name), {s}}; }

inline VectorField as_vector(const NamedField& f) {
    if (f.components.size() != 3) fail(ErrorKind::Format, "field '" + f.name + "' is not a vector field");
    VectorField v;
    for (int a = 0; a < 3; ++a) v[a] = f.components[a];
    return v;
}

namespace detail {

template <class T>
void put_le(std::string& out, T value) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
        std::reverse(bytes.begin(), bytes.end());
        out.append(bytes.data(), sizeof(T));
    } else {
        out.append(reinterpret_cast<const char*>(&value), sizeof(T));
    }
}

template <class T>
T get_le(const char* p) {
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
}

}  // namespace detail

inline std::string encode_wrg1(const FieldFile& file) {
    json meta = file.meta;
    meta["grid"] = {{"n", file.grid.n}, {"box", file.grid.box}};
    json decl = json::array();
    for (const auto& f : file.fields) {
        if (f.components.empty()) fail(ErrorKind::BadArgument, "field '" + f.name + "' has no components");
        for (const auto& c : f.components)
            if (c.grid != file.grid) fail(ErrorKind::BadArgument, "field '" + f.name + "' is on a different grid");
        decl.push_back({{"name", f.name}, {"components", f.components.size()}});
    }
    meta["fields"] = decl;
    std::string text = meta.dump();

    std::string out;
    out.append(kWrgMagic, 4);
    detail::put_le<std::uint32_t>(out, kWrgVersion);
    detail::put_le<std::uint64_t>(out, text.size());
    out += text;
    for (const auto& f : file.fields)
        for (const auto& c : f.components)
            for (double x : c.data) detail::put_le<double>(out, x);
    return out;
}

inline FieldFile decode_wrg1(const std::string& bytes) {
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kWrgMagic, 4) != 0)
        fail(ErrorKind::Format, "not a WRG1 file (bad magic)");
    auto version = detail::get_le<std::uint32_t>(bytes.data() + 4);
    if (version != kWrgVersion) fail(ErrorKind::Format, "unsupported WRG1 version " + std::to_string(version));
    auto len = detail::get_le<std::uint64_t>(bytes.data() + 8);
    if (len > bytes.size() - 16) fail(ErrorKind::Format, "truncated WRG1 metadata block");

    FieldFile file;
    try {
        file.meta = json::parse(bytes.begin() + 16, bytes.begin() + 16 + std::ptrdiff_t(len));
        file.grid = Grid3(file.meta.at("grid").at("n").get<std::array<int, 3>>(),
                          file.meta.at("grid").at("box").get<Vec3>());
    } catch (const json::exception& e) {
        fail(ErrorKind::Format, std::string("malformed WRG1 metadata: ") + e.what());
    } catch (const Error& e) {
        fail(ErrorKind::Format, std::string("invalid WRG1 grid: ") + e.what());
    }

    std::size_t pos = 16 + len;
    std::size_t npts = file.grid.size();
    try {
        for (const auto& d : file.meta.at("fields")) {
            NamedField f{d.at("name").get<std::string>(), {}};
            auto nc = d.at("components").get<std::size_t>();
            if (nc == 0 || nc > 9) fail(ErrorKind::Format, "bad component count for field '" + f.name + "'");
            for (std::size_t c = 0; c < nc; ++c) {
                if (bytes.size() - pos < npts * 8) fail(ErrorKind::Format, "truncated WRG1 payload");
                ScalarField s(file.grid);
                for (std::size_t i = 0; i < npts; ++i, pos += 8) s[i] = detail::get_le<double>(bytes.data() + pos);
                f.components.push_back(std::move(s));
            }
            file.fields.push_back(std::move(f));
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::Format, std::string("malformed WRG1 field table: ") + e.what());
    }
    if (pos != bytes.size()) fail(ErrorKind::Format, "trailing bytes after WRG1 payload");
    file.meta.erase("grid");
    file.meta.erase("fields");
    return file;
}

inline void write_wrg1(const std::string& path, const FieldFile& file) {
    std::string bytes = encode_wrg1(file);
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorKind::BadArgument, "cannot open '" + path + "' for writing");
    os.write(bytes.data(), std::streamsize(bytes.size()));
    if (!os) fail(ErrorKind::BadArgument, "failed writing '" + path + "'");
}

inline FieldFile read_wrg1(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorKind::BadArgument, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return decode_wrg1(ss.str());
}

}  // namespace wring
