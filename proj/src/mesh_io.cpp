// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0

#include "meshmatch/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace meshmatch {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Line-oriented reader that skips blanks/comments and tracks line numbers
// for error reporting.
class LineReader {
public:
    LineReader(std::istream& in, const std::filesystem::path& path, char comment)
        : in_(in), path_(path), comment_(comment) {}

    // Next meaningful line, with trailing comments stripped.
    std::string next(const char* expected) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (auto pos = line.find(comment_); pos != std::string::npos) line = line.substr(0, pos);
            const auto end = line.find_last_not_of(" \t\r\n");
            if (end == std::string::npos) continue;
            return line.substr(0, end + 1);
        }
        fail(path_, "unexpected end of file while reading " + std::string(expected));
    }

    int line_no() const { return line_no_; }

private:
    std::istream& in_;
    const std::filesystem::path& path_;
    char comment_;
    int line_no_ = 0;
};

Mesh load_off(std::istream& in, const std::filesystem::path& path) {
    LineReader reader(in, path, '#');
    std::string header = reader.next("OFF header");
    long nv = -1, nf = -1, ne = -1;
    // Counts may share the header line ("OFF 8 12 0") or follow on their own.
    if (header.rfind("OFF", 0) != 0) fail(path, "line 1: expected OFF header");
    {
        std::istringstream ss(header.substr(3));
        if (!(ss >> nv >> nf >> ne)) {
            std::istringstream counts(reader.next("vertex/face counts"));
            if (!(counts >> nv >> nf >> ne))
                fail(path, "line " + std::to_string(reader.line_no()) + ": malformed count line");
        }
    }
    if (nv <= 0 || nf < 0) fail(path, "non-positive vertex count or negative face count");

    Mesh mesh;
    mesh.vertices.resize(nv, 3);
    for (long v = 0; v < nv; ++v) {
        std::istringstream ss(reader.next("vertex coordinates"));
        double x, y, z;
        if (!(ss >> x >> y >> z))
            fail(path, "line " + std::to_string(reader.line_no()) + ": malformed vertex line");
        mesh.vertices.row(v) << x, y, z;
    }
    mesh.triangles.resize(nf, 3);
    for (long f = 0; f < nf; ++f) {
        std::istringstream ss(reader.next("face indices"));
        long count, a, b, c;
        if (!(ss >> count)) fail(path, "line " + std::to_string(reader.line_no()) + ": malformed face line");
        if (count != 3)
            fail(path, "line " + std::to_string(reader.line_no()) + ": face with " +
                           std::to_string(count) + " vertices (triangles only)");
        if (!(ss >> a >> b >> c))
            fail(path, "line " + std::to_string(reader.line_no()) + ": malformed face indices");
        mesh.triangles.row(f) << static_cast<int>(a), static_cast<int>(b), static_cast<int>(c);
    }
    return mesh;
}

// --- PLY ---

enum class PlyType { Char, UChar, Short, UShort, Int, UInt, Float, Double };

int ply_type_size(PlyType t) {
    switch (t) {
        case PlyType::Char:
        case PlyType::UChar: return 1;
        case PlyType::Short:
        case PlyType::UShort: return 2;
        case PlyType::Int:
        case PlyType::UInt:
        case PlyType::Float: return 4;
        case PlyType::Double: return 8;
    }
    return 0;
}

PlyType parse_ply_type(const std::string& s, const std::filesystem::path& path) {
    if (s == "char" || s == "int8") return PlyType::Char;
    if (s == "uchar" || s == "uint8") return PlyType::UChar;
    if (s == "short" || s == "int16") return PlyType::Short;
    if (s == "ushort" || s == "uint16") return PlyType::UShort;
    if (s == "int" || s == "int32") return PlyType::Int;
    if (s == "uint" || s == "uint32") return PlyType::UInt;
    if (s == "float" || s == "float32") return PlyType::Float;
    if (s == "double" || s == "float64") return PlyType::Double;
    fail(path, "unsupported PLY property type '" + s + "'");
}

struct PlyProperty {
    std::string name;
    PlyType type = PlyType::Float;
    bool is_list = false;
    PlyType count_type = PlyType::UChar;
};

struct PlyElement {
    std::string name;
    long count = 0;
    std::vector<PlyProperty> properties;
};

double read_binary_scalar(std::istream& in, PlyType t, const std::filesystem::path& path) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), ply_type_size(t));
    if (!in) fail(path, "byte offset " + std::to_string(static_cast<long>(in.tellg())) +
                            ": truncated binary payload");
    switch (t) {
        case PlyType::Char: return static_cast<double>(static_cast<signed char>(buf[0]));
        case PlyType::UChar: return static_cast<double>(buf[0]);
        case PlyType::Short: {
            std::int16_t v; std::memcpy(&v, buf, 2); return v;
        }
        case PlyType::UShort: {
            std::uint16_t v; std::memcpy(&v, buf, 2); return v;
        }
        case PlyType::Int: {
            std::int32_t v; std::memcpy(&v, buf, 4); return v;
        }
        case PlyType::UInt: {
            std::uint32_t v; std::memcpy(&v, buf, 4); return v;
        }
        case PlyType::Float: {
            float v; std::memcpy(&v, buf, 4); return v;
        }
        case PlyType::Double: {
            double v; std::memcpy(&v, buf, 8); return v;
        }
    }
    return 0.0;
}

Mesh load_ply(std::istream& in, const std::filesystem::path& path) {
    std::string line;
    int line_no = 0;
    auto next_line = [&]() {
        if (!std::getline(in, line)) fail(path, "unexpected end of PLY header");
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    };

    next_line();
    if (line != "ply") fail(path, "line 1: missing 'ply' magic");

    bool binary = false;
    std::vector<PlyElement> elements;
    for (;;) {
        next_line();
        std::istringstream ss(line);
        std::string keyword;
        ss >> keyword;
        if (keyword == "comment" || keyword == "obj_info" || keyword.empty()) continue;
        if (keyword == "format") {
            std::string fmt, version;
            ss >> fmt >> version;
            if (fmt == "ascii") binary = false;
            else if (fmt == "binary_little_endian") binary = true;
            else fail(path, "line " + std::to_string(line_no) + ": unsupported PLY format '" + fmt +
                                "' (ascii or binary_little_endian only)");
        } else if (keyword == "element") {
            PlyElement el;
            if (!(ss >> el.name >> el.count))
                fail(path, "line " + std::to_string(line_no) + ": malformed element line");
            elements.push_back(el);
        } else if (keyword == "property") {
            if (elements.empty())
                fail(path, "line " + std::to_string(line_no) + ": property before any element");
            PlyProperty prop;
            std::string t;
            ss >> t;
            if (t == "list") {
                std::string count_t, value_t;
                if (!(ss >> count_t >> value_t >> prop.name))
                    fail(path, "line " + std::to_string(line_no) + ": malformed list property");
                prop.is_list = true;
                prop.count_type = parse_ply_type(count_t, path);
                prop.type = parse_ply_type(value_t, path);
            } else {
                if (!(ss >> prop.name))
                    fail(path, "line " + std::to_string(line_no) + ": malformed property line");
                prop.type = parse_ply_type(t, path);
            }
            elements.back().properties.push_back(prop);
        } else if (keyword == "end_header") {
            break;
        } else {
            fail(path, "line " + std::to_string(line_no) + ": unknown header keyword '" + keyword + "'");
        }
    }

    Mesh mesh;
    bool saw_vertex = false, saw_face = false;

    // ASCII payloads are tokenized per line; binary payloads are read field
    // by field in declared order. Unused properties are consumed and dropped.
    for (const PlyElement& el : elements) {
        if (el.name == "vertex") {
            saw_vertex = true;
            int xi = -1, yi = -1, zi = -1;
            for (size_t p = 0; p < el.properties.size(); ++p) {
                if (el.properties[p].is_list)
                    fail(path, "list property on vertex element is not supported");
                if (el.properties[p].name == "x") xi = static_cast<int>(p);
                if (el.properties[p].name == "y") yi = static_cast<int>(p);
                if (el.properties[p].name == "z") zi = static_cast<int>(p);
            }
            if (xi < 0 || yi < 0 || zi < 0) fail(path, "vertex element lacks x/y/z properties");
            mesh.vertices.resize(el.count, 3);
            std::vector<double> fields(el.properties.size());
            for (long v = 0; v < el.count; ++v) {
                if (binary) {
                    for (size_t p = 0; p < el.properties.size(); ++p)
                        fields[p] = read_binary_scalar(in, el.properties[p].type, path);
                } else {
                    next_line();
                    std::istringstream ss(line);
                    for (size_t p = 0; p < el.properties.size(); ++p)
                        if (!(ss >> fields[p]))
                            fail(path, "line " + std::to_string(line_no) + ": malformed vertex line");
                }
                mesh.vertices.row(v) << fields[static_cast<size_t>(xi)],
                    fields[static_cast<size_t>(yi)], fields[static_cast<size_t>(zi)];
            }
        } else if (el.name == "face") {
            saw_face = true;
            mesh.triangles.resize(el.count, 3);
            for (long f = 0; f < el.count; ++f) {
                long count = 0;
                std::vector<long> idx;
                if (binary) {
                    for (const PlyProperty& prop : el.properties) {
                        if (!prop.is_list) {
                            read_binary_scalar(in, prop.type, path);
                            continue;
                        }
                        count = static_cast<long>(read_binary_scalar(in, prop.count_type, path));
                        idx.resize(static_cast<size_t>(count));
                        for (long c = 0; c < count; ++c)
                            idx[static_cast<size_t>(c)] =
                                static_cast<long>(read_binary_scalar(in, prop.type, path));
                    }
                } else {
                    next_line();
                    std::istringstream ss(line);
                    if (!(ss >> count))
                        fail(path, "line " + std::to_string(line_no) + ": malformed face line");
                    idx.resize(static_cast<size_t>(count));
                    for (long c = 0; c < count; ++c)
                        if (!(ss >> idx[static_cast<size_t>(c)]))
                            fail(path, "line " + std::to_string(line_no) + ": malformed face indices");
                }
                if (count != 3)
                    fail(path, (binary ? "face " + std::to_string(f)
                                       : "line " + std::to_string(line_no)) +
                                   ": face with " + std::to_string(count) +
                                   " vertices (triangles only)");
                mesh.triangles.row(f) << static_cast<int>(idx[0]), static_cast<int>(idx[1]),
                    static_cast<int>(idx[2]);
            }
        } else {
            // Skip unknown elements.
            for (long r = 0; r < el.count; ++r) {
                if (binary) {
                    for (const PlyProperty& prop : el.properties) {
                        if (prop.is_list) {
                            long count = static_cast<long>(
                                read_binary_scalar(in, prop.count_type, path));
                            for (long c = 0; c < count; ++c) read_binary_scalar(in, prop.type, path);
                        } else {
                            read_binary_scalar(in, prop.type, path);
                        }
                    }
                } else {
                    next_line();
                }
            }
        }
    }
    if (!saw_vertex || !saw_face) fail(path, "PLY lacks vertex or face element");
    return mesh;
}

template <typename T>
void write_raw(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

}  // namespace

Mesh load_mesh_unchecked(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path.string() + ": cannot open file");

    const std::string ext = lower(path.extension().string());
    Mesh mesh;
    if (ext == ".off") mesh = load_off(in, path);
    else if (ext == ".ply") mesh = load_ply(in, path);
    else fail(path, "unsupported mesh format '" + ext + "' (OFF and PLY only)");

    mesh.id = path.stem().string();
    return mesh;
}

Mesh load_mesh(const std::filesystem::path& path) {
    Mesh mesh = load_mesh_unchecked(path);
    validate_mesh(mesh);
    return mesh;
}

void save_ply(const Mesh& mesh, const std::filesystem::path& path,
              const std::optional<VertexColors>& colors) {
    if (colors && colors->rows() != mesh.vertices.rows())
        throw std::runtime_error(path.string() + ": color count does not match vertex count");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open file for writing");

    out << "ply\nformat binary_little_endian 1.0\n";
    out << "element vertex " << mesh.num_vertices() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    if (colors)
        out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "element face " << mesh.num_triangles() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "end_header\n";

    for (int v = 0; v < mesh.num_vertices(); ++v) {
        write_raw(out, mesh.vertices(v, 0));
        write_raw(out, mesh.vertices(v, 1));
        write_raw(out, mesh.vertices(v, 2));
        if (colors) {
            write_raw(out, (*colors)(v, 0));
            write_raw(out, (*colors)(v, 1));
            write_raw(out, (*colors)(v, 2));
        }
    }
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        write_raw<std::uint8_t>(out, 3);
        write_raw<std::int32_t>(out, mesh.triangles(t, 0));
        write_raw<std::int32_t>(out, mesh.triangles(t, 1));
        write_raw<std::int32_t>(out, mesh.triangles(t, 2));
    }
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace meshmatch
