#include "dhg/geometry.hpp"

#include <cmath>
#include <numbers>

namespace dhg {

double chamfer_distance(const PointCloud& a, const PointCloud& b) {
    if (a.empty() || b.empty()) throw InvalidInput("chamfer_distance requires non-empty clouds");
    const KdTree tree_a(a.points), tree_b(b.points);
    double sum_ab = 0.0, sum_ba = 0.0;
    for (Index i = 0; i < a.size(); ++i)
        sum_ab += tree_b.nearest(a.points.row(i).transpose()).sq_dist;
    for (Index i = 0; i < b.size(); ++i)
        sum_ba += tree_a.nearest(b.points.row(i).transpose()).sq_dist;
    return sum_ab / static_cast<double>(a.size()) + sum_ba / static_cast<double>(b.size());
}

double winding_number(const Vec3& p, const TriMesh& mesh) {
    // Solid angle sum (van Oosterom & Strackee) over all faces.
    double total = 0.0;
    for (Index f = 0; f < mesh.num_faces(); ++f) {
        const Vec3 a = mesh.face_vertex(f, 0) - p;
        const Vec3 b = mesh.face_vertex(f, 1) - p;
        const Vec3 c = mesh.face_vertex(f, 2) - p;
        const double la = a.norm(), lb = b.norm(), lc = c.norm();
        const double det = a.dot(b.cross(c));
        const double denom = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
        total += 2.0 * std::atan2(det, denom);
    }
    return total / (4.0 * std::numbers::pi);
}

bool point_in_mesh(const Vec3& p, const TriMesh& mesh, InsideDiagnostics* diag) {
    const double w = winding_number(p, mesh);
    if (!mesh.watertight && w >= 0.4 && w <= 0.6) {
        if (diag) ++diag->boundary_ambiguous;
        return false;
    }
    return w > 0.5;
}

InsideQuery inside_and_distance(const Vec3& p, const TriMesh& mesh, const AabbTree& tree) {
    InsideQuery q;
    const auto closest = tree.closest_point(p);
    q.distance = closest.distance;
    q.closest = closest.point;
    if (closest.distance < 1e-12) {
        q.inside = false;  // on the surface: contributes nothing either way
        return q;
    }
    if (!mesh.watertight) {
        // Open meshes have no reliable face orientation near the defect.
        q.inside = point_in_mesh(p, mesh);
        return q;
    }
    const Vec3 a = mesh.face_vertex(closest.face, 0);
    const Vec3 n = (mesh.face_vertex(closest.face, 1) - a)
                       .cross(mesh.face_vertex(closest.face, 2) - a)
                       .normalized() *
                   mesh.orientation;
    const double side = (p - closest.point).dot(n);
    if (std::abs(side) > 0.2 * closest.distance) {
        q.inside = side < 0.0;
        return q;
    }
    q.inside = point_in_mesh(p, mesh);
    return q;
}

double distance_to_surface(const Vec3& p, const TriMesh& mesh, const AabbTree& tree) {
    if (mesh.num_faces() == 0) throw InvalidInput("distance to empty mesh");
    return tree.closest_point(p).distance;
}

double distance_to_surface(const Vec3& p, const TriMesh& mesh) {
    const AabbTree tree(mesh);
    return distance_to_surface(p, mesh, tree);
}

double distance_to_surface(const Vec3& p, const PointCloud& cloud, const KdTree& tree) {
    if (cloud.empty()) throw InvalidInput("distance to empty cloud");
    return std::sqrt(tree.nearest(p).sq_dist);
}

double distance_to_surface(const Vec3& p, const PointCloud& cloud) {
    const KdTree tree(cloud.points);
    return distance_to_surface(p, cloud, tree);
}

std::optional<RayHit> ray_mesh_intersect(const Vec3& origin, const Vec3& dir,
                                         const TriMesh& mesh, const AabbTree& tree) {
    if (std::abs(dir.norm() - 1.0) > 1e-6) throw InvalidInput("ray direction must be unit length");
    (void)mesh;
    return tree.ray_intersect(origin, dir, 1e-9);
}

std::optional<RayHit> ray_mesh_intersect(const Vec3& origin, const Vec3& dir,
                                         const TriMesh& mesh) {
    const AabbTree tree(mesh);
    return ray_mesh_intersect(origin, dir, mesh, tree);
}

PointCloud reflect_points(const PointCloud& cloud, Axis axis) {
    PointCloud out = cloud;
    const int k = static_cast<int>(axis);
    out.points.col(k) = -out.points.col(k);
    if (out.normals) out.normals->col(k) = -out.normals->col(k);
    return out;
}

}  // namespace dhg
