#include "dhg/io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace dhg {

namespace {

std::string lower_ext(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

TriMesh build_mesh(const std::vector<Vec3>& verts, const std::vector<std::vector<int>>& polys,
                   const char* what) {
    if (verts.empty() || polys.empty()) throw InvalidInput(std::string(what) + ": no geometry");
    Points v(static_cast<Index>(verts.size()), 3);
    for (std::size_t i = 0; i < verts.size(); ++i) v.row(static_cast<Index>(i)) = verts[i].transpose();
    std::vector<std::array<int, 3>> tris;
    for (const auto& poly : polys) {
        if (poly.size() < 3) throw InvalidInput(std::string(what) + ": face with fewer than 3 vertices");
        for (std::size_t k = 1; k + 1 < poly.size(); ++k)
            tris.push_back({poly[0], poly[k], poly[k + 1]});
    }
    Faces f(static_cast<Index>(tris.size()), 3);
    for (std::size_t i = 0; i < tris.size(); ++i)
        for (int c = 0; c < 3; ++c) f(static_cast<Index>(i), c) = tris[i][static_cast<std::size_t>(c)];
    return TriMesh(std::move(v), std::move(f));
}

}  // namespace

TriMesh parse_obj(std::istream& in) {
    std::vector<Vec3> verts;
    std::vector<std::vector<int>> polys;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p.x() >> p.y() >> p.z()))
                throw InvalidInput("obj line " + std::to_string(lineno) + ": bad vertex");
            verts.push_back(p);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string tok;
            while (ls >> tok) {
                // "i", "i/j", "i//k", "i/j/k"; negative indices count from the end.
                const auto slash = tok.find('/');
                int idx = 0;
                try {
                    idx = std::stoi(slash == std::string::npos ? tok : tok.substr(0, slash));
                } catch (const std::exception&) {
                    throw InvalidInput("obj line " + std::to_string(lineno) + ": bad face index");
                }
                if (idx < 0) idx = static_cast<int>(verts.size()) + idx + 1;
                if (idx < 1 || idx > static_cast<int>(verts.size()))
                    throw InvalidInput("obj line " + std::to_string(lineno) + ": face index out of range");
                poly.push_back(idx - 1);
            }
            polys.push_back(std::move(poly));
        }
    }
    return build_mesh(verts, polys, "obj");
}

TriMesh parse_off(std::istream& in) {
    std::string header;
    if (!(in >> header) || header != "OFF") throw InvalidInput("off: missing OFF header");
    std::size_t nv = 0, nf = 0, ne = 0;
    if (!(in >> nv >> nf >> ne)) throw InvalidInput("off: bad counts");
    std::vector<Vec3> verts(nv);
    for (auto& v : verts)
        if (!(in >> v.x() >> v.y() >> v.z())) throw InvalidInput("off: bad vertex");
    std::vector<std::vector<int>> polys(nf);
    for (auto& poly : polys) {
        std::size_t n = 0;
        if (!(in >> n) || n < 3) throw InvalidInput("off: bad face");
        poly.resize(n);
        for (auto& idx : poly) {
            if (!(in >> idx) || idx < 0 || idx >= static_cast<int>(nv))
                throw InvalidInput("off: face index out of range");
        }
    }
    return build_mesh(verts, polys, "off");
}

TriMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open mesh file: " + path);
    const std::string ext = lower_ext(path);
    if (ext == "obj") return parse_obj(in);
    if (ext == "off") return parse_off(in);
    // Sniff: OFF files start with the literal header.
    std::string first;
    in >> first;
    in.seekg(0);
    if (first == "OFF") return parse_off(in);
    return parse_obj(in);
}

void save_obj(const std::string& path, const TriMesh& mesh) {
    save_obj_scene(path, {{"mesh", mesh}});
}

void save_obj_scene(const std::string& path,
                    const std::vector<std::pair<std::string, TriMesh>>& parts) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out.precision(9);
    int offset = 0;
    for (const auto& [name, mesh] : parts) {
        out << "o " << name << "\n";
        for (Index i = 0; i < mesh.num_vertices(); ++i)
            out << "v " << mesh.vertices(i, 0) << ' ' << mesh.vertices(i, 1) << ' '
                << mesh.vertices(i, 2) << "\n";
        for (Index i = 0; i < mesh.num_faces(); ++i)
            out << "f " << mesh.faces(i, 0) + 1 + offset << ' ' << mesh.faces(i, 1) + 1 + offset
                << ' ' << mesh.faces(i, 2) + 1 + offset << "\n";
        offset += static_cast<int>(mesh.num_vertices());
    }
}

namespace {

void put_u32_le(std::ostream& out, std::uint32_t v) {
    const std::array<char, 4> bytes{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                    static_cast<char>((v >> 16) & 0xff),
                                    static_cast<char>((v >> 24) & 0xff)};
    out.write(bytes.data(), 4);
}

std::uint32_t get_u32_le(std::istream& in) {
    std::array<unsigned char, 4> b{};
    in.read(reinterpret_cast<char*>(b.data()), 4);
    if (!in) throw InvalidInput("dhpc: truncated header");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32_le(std::ostream& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32_le(out, bits);
}

float get_f32_le(std::istream& in) {
    const std::uint32_t bits = get_u32_le(in);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

}  // namespace

void write_dhpc(std::ostream& out, const PointCloud& cloud) {
    out.write("DHPC", 4);
    put_u32_le(out, static_cast<std::uint32_t>(cloud.size()));
    const char flags = cloud.normals ? 1 : 0;
    out.write(&flags, 1);
    for (Index i = 0; i < cloud.size(); ++i)
        for (int c = 0; c < 3; ++c) put_f32_le(out, static_cast<float>(cloud.points(i, c)));
    if (cloud.normals)
        for (Index i = 0; i < cloud.size(); ++i)
            for (int c = 0; c < 3; ++c) put_f32_le(out, static_cast<float>((*cloud.normals)(i, c)));
}

void write_dhpc_file(const std::string& path, const PointCloud& cloud) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path);
    write_dhpc(out, cloud);
}

PointCloud read_dhpc(std::istream& in) {
    std::array<char, 4> magic{};
    in.read(magic.data(), 4);
    if (!in || std::string(magic.data(), 4) != "DHPC") throw InvalidInput("dhpc: bad magic");
    const std::uint32_t count = get_u32_le(in);
    char flags = 0;
    in.read(&flags, 1);
    if (!in) throw InvalidInput("dhpc: truncated flags");
    Points pts(static_cast<Index>(count), 3);
    for (Index i = 0; i < pts.rows(); ++i)
        for (int c = 0; c < 3; ++c) pts(i, c) = static_cast<double>(get_f32_le(in));
    if (flags & 1) {
        Points nrm(static_cast<Index>(count), 3);
        for (Index i = 0; i < nrm.rows(); ++i)
            for (int c = 0; c < 3; ++c) nrm(i, c) = static_cast<double>(get_f32_le(in));
        // f32 rounding can nudge normals off unit length; renormalize rows.
        for (Index i = 0; i < nrm.rows(); ++i) nrm.row(i).normalize();
        return PointCloud(std::move(pts), std::move(nrm));
    }
    return PointCloud(std::move(pts));
}

PointCloud read_dhpc_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open: " + path);
    return read_dhpc(in);
}

namespace {
constexpr char kB64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const std::uint8_t* data, std::size_t len) {
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (std::size_t i = 0; i < len; i += 3) {
        std::uint32_t chunk = static_cast<std::uint32_t>(data[i]) << 16;
        if (i + 1 < len) chunk |= static_cast<std::uint32_t>(data[i + 1]) << 8;
        if (i + 2 < len) chunk |= static_cast<std::uint32_t>(data[i + 2]);
        out.push_back(kB64Alphabet[(chunk >> 18) & 0x3f]);
        out.push_back(kB64Alphabet[(chunk >> 12) & 0x3f]);
        out.push_back(i + 1 < len ? kB64Alphabet[(chunk >> 6) & 0x3f] : '=');
        out.push_back(i + 2 < len ? kB64Alphabet[chunk & 0x3f] : '=');
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    auto value_of = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    if (text.size() % 4 != 0) throw InvalidInput("base64: length not a multiple of 4");
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int vals[4];
        int pad = 0;
        for (int k = 0; k < 4; ++k) {
            const char c = text[i + static_cast<std::size_t>(k)];
            if (c == '=') {
                vals[k] = 0;
                ++pad;
            } else {
                vals[k] = value_of(c);
                if (vals[k] < 0 || pad > 0) throw InvalidInput("base64: bad character");
            }
        }
        const std::uint32_t chunk = (static_cast<std::uint32_t>(vals[0]) << 18) |
                                    (static_cast<std::uint32_t>(vals[1]) << 12) |
                                    (static_cast<std::uint32_t>(vals[2]) << 6) |
                                    static_cast<std::uint32_t>(vals[3]);
        out.push_back(static_cast<std::uint8_t>((chunk >> 16) & 0xff));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>((chunk >> 8) & 0xff));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(chunk & 0xff));
    }
    return out;
}

std::string encode_f32_block(const std::vector<float>& values) {
    std::vector<std::uint8_t> bytes(values.size() * 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint32_t bits;
        std::memcpy(&bits, &values[i], 4);
        bytes[4 * i] = static_cast<std::uint8_t>(bits & 0xff);
        bytes[4 * i + 1] = static_cast<std::uint8_t>((bits >> 8) & 0xff);
        bytes[4 * i + 2] = static_cast<std::uint8_t>((bits >> 16) & 0xff);
        bytes[4 * i + 3] = static_cast<std::uint8_t>((bits >> 24) & 0xff);
    }
    return base64_encode(bytes.data(), bytes.size());
}

std::vector<float> decode_f32_block(const std::string& text) {
    const auto bytes = base64_decode(text);
    if (bytes.size() % 4 != 0) throw InvalidInput("f32 block: byte count not a multiple of 4");
    std::vector<float> values(bytes.size() / 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::uint32_t bits = static_cast<std::uint32_t>(bytes[4 * i]) |
                                   (static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8) |
                                   (static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16) |
                                   (static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24);
        std::memcpy(&values[i], &bits, 4);
    }
    return values;
}

}  // namespace dhg
