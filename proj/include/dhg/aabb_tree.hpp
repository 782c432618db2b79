#pragma once

#include "dhg/tri_mesh.hpp"
#include "dhg/types.hpp"

#include <optional>
#include <vector>

namespace dhg {

/// Closest point on a triangle (Eberly's region walk). Exact up to
/// floating-point rounding.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

struct RayHit {
    Vec3 point;
    Index face = -1;
    double t = 0.0;
};

/// Bounding-volume hierarchy over mesh triangles for exact closest-point
/// and nearest ray-intersection queries. Read-only after construction.
class AabbTree {
public:
    AabbTree() = default;
    explicit AabbTree(const TriMesh& mesh);

    struct Closest {
        Vec3 point;
        Index face = -1;
        double distance = 0.0;
    };

    Closest closest_point(const Vec3& q) const;

    /// Nearest intersection with t > t_min along a unit direction.
    std::optional<RayHit> ray_intersect(const Vec3& origin, const Vec3& dir,
                                        double t_min = 1e-9) const;

    bool empty() const { return nodes_.empty(); }

private:
    struct Node {
        Vec3 lo, hi;
        int left = -1, right = -1;
        int begin = 0, end = 0;  // leaf triangle range
    };

    int build(int begin, int end);
    void search_closest(int node, const Vec3& q, Closest& best) const;
    void search_ray(int node, const Vec3& origin, const Vec3& dir, double t_min,
                    std::optional<RayHit>& best) const;
    double box_sq_dist(const Node& n, const Vec3& q) const;
    bool box_ray_hits(const Node& n, const Vec3& origin, const Vec3& inv_dir, double t_max) const;

    const TriMesh* mesh_ = nullptr;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;
    static constexpr int kLeafSize = 4;
};

}  // namespace dhg
