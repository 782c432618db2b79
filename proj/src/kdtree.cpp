#include "dhg/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace dhg {

KdTree::KdTree(const Points& pts) : pts_(pts) {
    order_.resize(static_cast<std::size_t>(pts_.rows()));
    std::iota(order_.begin(), order_.end(), 0);
    if (!order_.empty()) root_ = build(0, static_cast<int>(order_.size()), 0);
}

int KdTree::build(int begin, int end, int depth) {
    Node node;
    node.begin = begin;
    node.end = end;
    if (end - begin <= kLeafSize) {
        // Leaves keep index order sorted so tie-breaking matches brute force.
        std::sort(order_.begin() + begin, order_.begin() + end);
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size()) - 1;
    }
    // Split on the widest axis at the median.
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (int i = begin; i < end; ++i) {
        const Vec3 p = pts_.row(order_[static_cast<std::size_t>(i)]).transpose();
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                         const double pa = pts_(a, axis), pb = pts_(b, axis);
                         return pa < pb || (pa == pb && a < b);
                     });
    node.axis = axis;
    node.split = pts_(order_[static_cast<std::size_t>(mid)], axis);
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    const int left = build(begin, mid, depth + 1);
    const int right = build(mid, end, depth + 1);
    nodes_[static_cast<std::size_t>(self)].left = left;
    nodes_[static_cast<std::size_t>(self)].right = right;
    return self;
}

void KdTree::search(int ni, const Vec3& q, Hit& best) const {
    const Node& node = nodes_[static_cast<std::size_t>(ni)];
    if (node.left < 0) {
        for (int i = node.begin; i < node.end; ++i) {
            const int idx = order_[static_cast<std::size_t>(i)];
            const double d2 = (pts_.row(idx).transpose() - q).squaredNorm();
            if (d2 < best.sq_dist || (d2 == best.sq_dist && idx < best.index)) {
                best.sq_dist = d2;
                best.index = idx;
            }
        }
        return;
    }
    const double delta = q[node.axis] - node.split;
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    search(near, q, best);
    if (delta * delta <= best.sq_dist) search(far, q, best);
}

KdTree::Hit KdTree::nearest(const Vec3& q) const {
    if (empty()) throw InvalidInput("nearest query on empty index");
    Hit best;
    search(root_, q, best);
    return best;
}

}  // namespace dhg
