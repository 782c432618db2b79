#include "dhg/tri_mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <unordered_map>
#include <vector>

namespace dhg {

namespace {

// Quantized grid key for duplicate-vertex merging.
struct GridKey {
    std::int64_t x, y, z;
    bool operator==(const GridKey&) const = default;
};

struct GridKeyHash {
    std::size_t operator()(const GridKey& k) const {
        std::uint64_t h = 1469598103934665603ULL;
        for (std::int64_t v : {k.x, k.y, k.z}) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

}  // namespace

TriMesh::TriMesh(Points v, Faces f) : vertices(std::move(v)), faces(std::move(f)) {
    if (!vertices.allFinite()) throw InvalidInput("mesh vertices non-finite");
    for (Index i = 0; i < faces.rows(); ++i)
        for (int c = 0; c < 3; ++c)
            if (faces(i, c) < 0 || faces(i, c) >= vertices.rows())
                throw InvalidInput("face index out of range");
    cleanup();
    check_watertight();
    orientation = signed_volume() >= 0.0 ? 1.0 : -1.0;
}

double TriMesh::signed_volume() const {
    double vol = 0.0;
    for (Index i = 0; i < faces.rows(); ++i)
        vol += face_vertex(i, 0).dot(face_vertex(i, 1).cross(face_vertex(i, 2))) / 6.0;
    return vol;
}

void TriMesh::cleanup() {
    constexpr double kMergeTol = 1e-7;
    // Merge duplicates within tolerance via grid quantization.
    std::unordered_map<GridKey, int, GridKeyHash> grid;
    std::vector<int> remap(static_cast<std::size_t>(vertices.rows()), -1);
    std::vector<Vec3> kept;
    kept.reserve(static_cast<std::size_t>(vertices.rows()));
    for (Index i = 0; i < vertices.rows(); ++i) {
        const Vec3 p = vertices.row(i).transpose();
        const GridKey key{static_cast<std::int64_t>(std::floor(p.x() / kMergeTol)),
                          static_cast<std::int64_t>(std::floor(p.y() / kMergeTol)),
                          static_cast<std::int64_t>(std::floor(p.z() / kMergeTol))};
        int found = -1;
        // Check the 27-cell neighborhood: quantization alone can split a pair
        // straddling a cell border.
        for (std::int64_t dx = -1; dx <= 1 && found < 0; ++dx)
            for (std::int64_t dy = -1; dy <= 1 && found < 0; ++dy)
                for (std::int64_t dz = -1; dz <= 1 && found < 0; ++dz) {
                    auto it = grid.find(GridKey{key.x + dx, key.y + dy, key.z + dz});
                    if (it != grid.end() &&
                        (kept[static_cast<std::size_t>(it->second)] - p).norm() <= kMergeTol)
                        found = it->second;
                }
        if (found < 0) {
            found = static_cast<int>(kept.size());
            kept.push_back(p);
            grid.emplace(key, found);
        }
        remap[static_cast<std::size_t>(i)] = found;
    }

    std::vector<std::array<int, 3>> good_faces;
    good_faces.reserve(static_cast<std::size_t>(faces.rows()));
    for (Index i = 0; i < faces.rows(); ++i) {
        std::array<int, 3> f{remap[static_cast<std::size_t>(faces(i, 0))],
                             remap[static_cast<std::size_t>(faces(i, 1))],
                             remap[static_cast<std::size_t>(faces(i, 2))]};
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) continue;
        const Vec3 a = kept[static_cast<std::size_t>(f[0])];
        const Vec3 b = kept[static_cast<std::size_t>(f[1])];
        const Vec3 c = kept[static_cast<std::size_t>(f[2])];
        if ((b - a).cross(c - a).norm() <= 0.0) continue;  // zero-area
        good_faces.push_back(f);
    }

    vertices.resize(static_cast<Index>(kept.size()), 3);
    for (std::size_t i = 0; i < kept.size(); ++i) vertices.row(static_cast<Index>(i)) = kept[i].transpose();
    faces.resize(static_cast<Index>(good_faces.size()), 3);
    for (std::size_t i = 0; i < good_faces.size(); ++i)
        for (int c = 0; c < 3; ++c) faces(static_cast<Index>(i), c) = good_faces[i][static_cast<std::size_t>(c)];
}

void TriMesh::check_watertight() {
    // Edge-manifold check: each directed edge must be matched by exactly one
    // opposite directed edge.
    std::map<std::pair<int, int>, int> directed;
    for (Index i = 0; i < faces.rows(); ++i) {
        for (int c = 0; c < 3; ++c) {
            const int a = faces(i, c), b = faces(i, (c + 1) % 3);
            ++directed[{a, b}];
        }
    }
    watertight = faces.rows() > 0;
    for (const auto& [edge, count] : directed) {
        auto it = directed.find({edge.second, edge.first});
        if (count != 1 || it == directed.end() || it->second != 1) {
            watertight = false;
            break;
        }
    }
}

double TriMesh::total_area() const {
    double area = 0.0;
    for (Index i = 0; i < faces.rows(); ++i) {
        const Vec3 a = face_vertex(i, 0), b = face_vertex(i, 1), c = face_vertex(i, 2);
        area += 0.5 * (b - a).cross(c - a).norm();
    }
    return area;
}

PointCloud TriMesh::sample_surface(Index count, std::uint64_t seed) const {
    if (num_faces() == 0) throw InvalidInput("cannot sample empty mesh");
    if (count <= 0) throw InvalidInput("sample count must be positive");
    std::vector<double> cumulative(static_cast<std::size_t>(num_faces()));
    double acc = 0.0;
    for (Index i = 0; i < num_faces(); ++i) {
        const Vec3 a = face_vertex(i, 0), b = face_vertex(i, 1), c = face_vertex(i, 2);
        acc += 0.5 * (b - a).cross(c - a).norm();
        cumulative[static_cast<std::size_t>(i)] = acc;
    }
    Rng rng(seed);
    Points pts(count, 3), nrm(count, 3);
    for (Index s = 0; s < count; ++s) {
        const double pick = rng.uniform() * acc;
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), pick);
        const Index f = static_cast<Index>(std::distance(cumulative.begin(), it) == static_cast<std::ptrdiff_t>(cumulative.size())
                                               ? cumulative.size() - 1
                                               : std::distance(cumulative.begin(), it));
        const Vec3 a = face_vertex(f, 0), b = face_vertex(f, 1), c = face_vertex(f, 2);
        double u = rng.uniform(), v = rng.uniform();
        if (u + v > 1.0) {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        pts.row(s) = (a + u * (b - a) + v * (c - a)).transpose();
        nrm.row(s) = (b - a).cross(c - a).normalized().transpose();
    }
    return PointCloud(std::move(pts), std::move(nrm));
}

}  // namespace dhg
