#pragma once

#include "dhg/point_cloud.hpp"
#include "dhg/rng.hpp"
#include "dhg/types.hpp"

#include <string>

namespace dhg {

/// Triangle mesh in meters. Construction cleans the input: vertices closer
/// than 1e-7 m are merged, zero-area faces dropped, and watertightness is
/// checked (every edge shared by exactly two faces, consistently oriented).
/// Non-watertight meshes are accepted but flagged.
struct TriMesh {
    Points vertices;  // n x 3
    Faces faces;      // m x 3
    bool watertight = false;

    TriMesh() = default;
    TriMesh(Points v, Faces f);

    Index num_vertices() const { return vertices.rows(); }
    Index num_faces() const { return faces.rows(); }

    Vec3 face_vertex(Index face, int corner) const {
        return vertices.row(faces(face, corner)).transpose();
    }

    double total_area() const;
    /// Positive for outward-oriented closed meshes (divergence theorem).
    double signed_volume() const;
    /// +1 or -1 depending on the face winding convention of the input.
    double orientation = 1.0;
    Vec3 bbox_min() const { return vertices.colwise().minCoeff().transpose(); }
    Vec3 bbox_max() const { return vertices.colwise().maxCoeff().transpose(); }

    /// Area-weighted uniform surface sampling with outward face normals.
    /// Deterministic for a fixed seed.
    PointCloud sample_surface(Index count, std::uint64_t seed) const;

private:
    void cleanup();
    void check_watertight();
};

}  // namespace dhg
