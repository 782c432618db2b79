#pragma once

#include "dhg/aabb_tree.hpp"
#include "dhg/kdtree.hpp"
#include "dhg/point_cloud.hpp"
#include "dhg/tri_mesh.hpp"
#include "dhg/types.hpp"

#include <optional>

namespace dhg {

/// Symmetric Chamfer distance: mean over a of squared nearest distance to b,
/// plus the same with roles swapped. Zero iff the clouds coincide pointwise.
double chamfer_distance(const PointCloud& a, const PointCloud& b);

/// Generalized winding number of the mesh at p (1 inside a watertight mesh,
/// 0 outside, fractional near defects).
double winding_number(const Vec3& p, const TriMesh& mesh);

struct InsideDiagnostics {
    Index boundary_ambiguous = 0;  // non-watertight, winding in [0.4, 0.6]
};

/// True iff the generalized winding number at p exceeds 0.5. For flagged
/// non-watertight meshes, winding values in [0.4, 0.6] count as
/// boundary-ambiguous and are treated as outside.
bool point_in_mesh(const Vec3& p, const TriMesh& mesh, InsideDiagnostics* diag = nullptr);

/// Combined membership + surface distance for the penetration inner loops.
/// Decides the side from the closest face's oriented normal when the query
/// is clearly off the face plane, and falls back to the winding number near
/// edges and vertices; agrees with point_in_mesh everywhere.
struct InsideQuery {
    bool inside = false;
    double distance = 0.0;
    Vec3 closest = Vec3::Zero();
};
InsideQuery inside_and_distance(const Vec3& p, const TriMesh& mesh, const AabbTree& tree);

/// Unsigned distance from p to the mesh surface (exact point-triangle).
double distance_to_surface(const Vec3& p, const TriMesh& mesh, const AabbTree& tree);
double distance_to_surface(const Vec3& p, const TriMesh& mesh);

/// Unsigned distance from p to the nearest cloud vertex.
double distance_to_surface(const Vec3& p, const PointCloud& cloud, const KdTree& tree);
double distance_to_surface(const Vec3& p, const PointCloud& cloud);

/// Nearest ray-mesh intersection with t > 1e-9. dir must be unit length.
std::optional<RayHit> ray_mesh_intersect(const Vec3& origin, const Vec3& dir,
                                         const TriMesh& mesh, const AabbTree& tree);
std::optional<RayHit> ray_mesh_intersect(const Vec3& origin, const Vec3& dir,
                                         const TriMesh& mesh);

/// Negates the chosen coordinate of every point (and normal). Callers center
/// the cloud first; reflection planes pass through the origin.
PointCloud reflect_points(const PointCloud& cloud, Axis axis);

}  // namespace dhg
