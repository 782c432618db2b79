#include "dhg/aabb_tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace dhg {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);

    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

namespace {

// Moeller-Trumbore, watertight enough for our cleaned meshes.
std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                   const Vec3& b, const Vec3& c) {
    constexpr double kEps = 1e-14;
    const Vec3 e1 = b - a, e2 = c - a;
    const Vec3 pvec = dir.cross(e2);
    const double det = e1.dot(pvec);
    if (std::abs(det) < kEps) return std::nullopt;
    const double inv_det = 1.0 / det;
    const Vec3 tvec = origin - a;
    const double u = tvec.dot(pvec) * inv_det;
    if (u < -1e-12 || u > 1.0 + 1e-12) return std::nullopt;
    const Vec3 qvec = tvec.cross(e1);
    const double v = dir.dot(qvec) * inv_det;
    if (v < -1e-12 || u + v > 1.0 + 1e-12) return std::nullopt;
    return e2.dot(qvec) * inv_det;
}

}  // namespace

AabbTree::AabbTree(const TriMesh& mesh) : mesh_(&mesh) {
    order_.resize(static_cast<std::size_t>(mesh.num_faces()));
    std::iota(order_.begin(), order_.end(), 0);
    if (!order_.empty()) root_ = build(0, static_cast<int>(order_.size()));
}

int AabbTree::build(int begin, int end) {
    Node node;
    node.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    node.hi = -node.lo;
    for (int i = begin; i < end; ++i) {
        const Index f = order_[static_cast<std::size_t>(i)];
        for (int c = 0; c < 3; ++c) {
            const Vec3 v = mesh_->face_vertex(f, c);
            node.lo = node.lo.cwiseMin(v);
            node.hi = node.hi.cwiseMax(v);
        }
    }
    node.begin = begin;
    node.end = end;
    if (end - begin <= kLeafSize) {
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size()) - 1;
    }
    int axis = 0;
    (node.hi - node.lo).maxCoeff(&axis);
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int fa, int fb) {
                         const double ca = mesh_->face_vertex(fa, 0)[axis] +
                                           mesh_->face_vertex(fa, 1)[axis] +
                                           mesh_->face_vertex(fa, 2)[axis];
                         const double cb = mesh_->face_vertex(fb, 0)[axis] +
                                           mesh_->face_vertex(fb, 1)[axis] +
                                           mesh_->face_vertex(fb, 2)[axis];
                         return ca < cb || (ca == cb && fa < fb);
                     });
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[static_cast<std::size_t>(self)].left = left;
    nodes_[static_cast<std::size_t>(self)].right = right;
    return self;
}

double AabbTree::box_sq_dist(const Node& n, const Vec3& q) const {
    const Vec3 d = (n.lo - q).cwiseMax(0.0).cwiseMax(q - n.hi);
    return d.squaredNorm();
}

void AabbTree::search_closest(int ni, const Vec3& q, Closest& best) const {
    const Node& node = nodes_[static_cast<std::size_t>(ni)];
    if (node.left < 0) {
        for (int i = node.begin; i < node.end; ++i) {
            const Index f = order_[static_cast<std::size_t>(i)];
            const Vec3 cp = closest_point_on_triangle(q, mesh_->face_vertex(f, 0),
                                                      mesh_->face_vertex(f, 1),
                                                      mesh_->face_vertex(f, 2));
            const double d = (cp - q).norm();
            if (d < best.distance) {
                best.distance = d;
                best.point = cp;
                best.face = f;
            }
        }
        return;
    }
    const Node& l = nodes_[static_cast<std::size_t>(node.left)];
    const Node& r = nodes_[static_cast<std::size_t>(node.right)];
    const double dl = box_sq_dist(l, q), dr = box_sq_dist(r, q);
    const int first = dl <= dr ? node.left : node.right;
    const int second = dl <= dr ? node.right : node.left;
    const double dfirst = std::min(dl, dr), dsecond = std::max(dl, dr);
    if (dfirst < best.distance * best.distance) search_closest(first, q, best);
    if (dsecond < best.distance * best.distance) search_closest(second, q, best);
}

AabbTree::Closest AabbTree::closest_point(const Vec3& q) const {
    if (empty()) throw InvalidInput("closest_point on empty tree");
    Closest best;
    best.distance = std::numeric_limits<double>::infinity();
    search_closest(root_, q, best);
    return best;
}

bool AabbTree::box_ray_hits(const Node& n, const Vec3& origin, const Vec3& inv_dir,
                            double t_max) const {
    double t0 = 0.0, t1 = t_max;
    for (int k = 0; k < 3; ++k) {
        if (!std::isfinite(inv_dir[k])) {
            // Axis-parallel ray: reject if the origin misses the slab.
            if (origin[k] < n.lo[k] || origin[k] > n.hi[k]) return false;
            continue;
        }
        double ta = (n.lo[k] - origin[k]) * inv_dir[k];
        double tb = (n.hi[k] - origin[k]) * inv_dir[k];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    return true;
}

void AabbTree::search_ray(int ni, const Vec3& origin, const Vec3& dir, double t_min,
                          std::optional<RayHit>& best) const {
    const Node& node = nodes_[static_cast<std::size_t>(ni)];
    const Vec3 inv_dir = dir.cwiseInverse();
    const double t_max = best ? best->t : std::numeric_limits<double>::infinity();
    if (!box_ray_hits(node, origin, inv_dir, t_max)) return;
    if (node.left < 0) {
        for (int i = node.begin; i < node.end; ++i) {
            const Index f = order_[static_cast<std::size_t>(i)];
            const auto t = ray_triangle(origin, dir, mesh_->face_vertex(f, 0),
                                        mesh_->face_vertex(f, 1), mesh_->face_vertex(f, 2));
            if (t && *t > t_min && (!best || *t < best->t))
                best = RayHit{origin + *t * dir, f, *t};
        }
        return;
    }
    search_ray(node.left, origin, dir, t_min, best);
    search_ray(node.right, origin, dir, t_min, best);
}

std::optional<RayHit> AabbTree::ray_intersect(const Vec3& origin, const Vec3& dir,
                                              double t_min) const {
    if (empty()) return std::nullopt;
    std::optional<RayHit> best;
    search_ray(root_, origin, dir, t_min, best);
    return best;
}

}  // namespace dhg
