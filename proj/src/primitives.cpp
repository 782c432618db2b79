#include "dhg/primitives.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <vector>

namespace dhg {

namespace {

struct MeshBuilder {
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> faces;

    int add(const Vec3& v) {
        verts.push_back(v);
        return static_cast<int>(verts.size()) - 1;
    }
    void tri(int a, int b, int c) { faces.push_back({a, b, c}); }

    TriMesh finish() const {
        Points v(static_cast<Index>(verts.size()), 3);
        for (std::size_t i = 0; i < verts.size(); ++i) v.row(static_cast<Index>(i)) = verts[i].transpose();
        Faces f(static_cast<Index>(faces.size()), 3);
        for (std::size_t i = 0; i < faces.size(); ++i)
            for (int c = 0; c < 3; ++c) f(static_cast<Index>(i), c) = faces[i][static_cast<std::size_t>(c)];
        return TriMesh(std::move(v), std::move(f));
    }
};

}  // namespace

TriMesh make_icosphere(double radius, int subdivisions) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> verts = {
        {-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (auto& v : verts) v.normalize();
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            verts.push_back(((verts[static_cast<std::size_t>(a)] + verts[static_cast<std::size_t>(b)]) * 0.5).normalized());
            const int idx = static_cast<int>(verts.size()) - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    MeshBuilder mb;
    for (const auto& v : verts) mb.add(v * radius);
    for (const auto& f : faces) mb.tri(f[0], f[1], f[2]);
    return mb.finish();
}

TriMesh make_box(const Vec3& he) {
    MeshBuilder mb;
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1})
                mb.add(Vec3(sx * he.x(), sy * he.y(), sz * he.z()));
    // Corner order: index bit 2 = x sign, bit 1 = y sign, bit 0 = z sign.
    const int quads[6][4] = {
        {0, 1, 3, 2},  // -x
        {4, 6, 7, 5},  // +x
        {0, 4, 5, 1},  // -y
        {2, 3, 7, 6},  // +y
        {0, 2, 6, 4},  // -z
        {1, 5, 7, 3},  // +z
    };
    for (const auto& q : quads) {
        mb.tri(q[0], q[1], q[2]);
        mb.tri(q[0], q[2], q[3]);
    }
    return mb.finish();
}

TriMesh make_cylinder(double radius, double height, int segments, int rings) {
    MeshBuilder mb;
    const double h2 = height / 2.0;
    std::vector<std::vector<int>> loops;
    for (int r = 0; r <= rings; ++r) {
        const double z = -h2 + height * r / rings;
        std::vector<int> loop;
        for (int s = 0; s < segments; ++s) {
            const double a = 2.0 * std::numbers::pi * s / segments;
            loop.push_back(mb.add(Vec3(radius * std::cos(a), radius * std::sin(a), z)));
        }
        loops.push_back(loop);
    }
    for (int r = 0; r < rings; ++r) {
        for (int s = 0; s < segments; ++s) {
            const int sn = (s + 1) % segments;
            mb.tri(loops[r][s], loops[r][sn], loops[r + 1][s]);
            mb.tri(loops[r + 1][s], loops[r][sn], loops[r + 1][sn]);
        }
    }
    const int bottom = mb.add(Vec3(0, 0, -h2));
    const int top = mb.add(Vec3(0, 0, h2));
    for (int s = 0; s < segments; ++s) {
        const int sn = (s + 1) % segments;
        mb.tri(bottom, loops.front()[sn], loops.front()[s]);
        mb.tri(top, loops.back()[s], loops.back()[sn]);
    }
    return mb.finish();
}

TriMesh make_capsule(const Vec3& a, const Vec3& b, double radius, int segments, int rings) {
    const Vec3 axis = b - a;
    const double len = axis.norm();
    if (len < 1e-12) return make_icosphere(radius, 3);
    const Vec3 z = axis / len;
    Vec3 ref = std::abs(z.x()) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    const Vec3 x = (ref - ref.dot(z) * z).normalized();
    const Vec3 y = z.cross(x);

    MeshBuilder mb;
    std::vector<std::vector<int>> loops;
    // Hemisphere around a (from pole up), cylinder, hemisphere around b.
    const int cap_rings = rings;
    const int a_pole = mb.add(a - radius * z);
    for (int r = 1; r <= cap_rings; ++r) {
        const double polar = std::numbers::pi / 2.0 * r / cap_rings;  // 0 at pole
        std::vector<int> loop;
        for (int s = 0; s < segments; ++s) {
            const double az = 2.0 * std::numbers::pi * s / segments;
            const Vec3 dir = std::sin(polar) * (std::cos(az) * x + std::sin(az) * y) -
                             std::cos(polar) * z;
            loop.push_back(mb.add(a + radius * dir));
        }
        loops.push_back(loop);
    }
    // Cylinder wall loops (the last cap loop sits at the a-equator already).
    for (int r = 1; r <= rings; ++r) {
        const double t = static_cast<double>(r) / rings;
        std::vector<int> loop;
        for (int s = 0; s < segments; ++s) {
            const double az = 2.0 * std::numbers::pi * s / segments;
            const Vec3 dir = std::cos(az) * x + std::sin(az) * y;
            loop.push_back(mb.add(a + t * len * z + radius * dir));
        }
        loops.push_back(loop);
    }
    for (int r = cap_rings - 1; r >= 1; --r) {
        const double polar = std::numbers::pi / 2.0 * r / cap_rings;
        std::vector<int> loop;
        for (int s = 0; s < segments; ++s) {
            const double az = 2.0 * std::numbers::pi * s / segments;
            const Vec3 dir = std::sin(polar) * (std::cos(az) * x + std::sin(az) * y) +
                             std::cos(polar) * z;
            loop.push_back(mb.add(b + radius * dir));
        }
        loops.push_back(loop);
    }
    const int b_pole = mb.add(b + radius * z);

    for (int s = 0; s < segments; ++s) {
        const int sn = (s + 1) % segments;
        mb.tri(a_pole, loops.front()[sn], loops.front()[s]);
        mb.tri(b_pole, loops.back()[s], loops.back()[sn]);
    }
    for (std::size_t r = 0; r + 1 < loops.size(); ++r) {
        for (int s = 0; s < segments; ++s) {
            const int sn = (s + 1) % segments;
            mb.tri(loops[r][s], loops[r][sn], loops[r + 1][s]);
            mb.tri(loops[r + 1][s], loops[r][sn], loops[r + 1][sn]);
        }
    }
    return mb.finish();
}

}  // namespace dhg
