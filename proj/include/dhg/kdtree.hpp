#pragma once

#include "dhg/types.hpp"

#include <limits>
#include <vector>

namespace dhg {

/// Exact nearest-neighbor index over a fixed point set. Median-split k-d
/// tree; queries return the same point a brute-force scan would (ties by
/// lowest index). Immutable after construction, safe for concurrent queries.
class KdTree {
public:
    KdTree() = default;
    explicit KdTree(const Points& pts);

    Index size() const { return static_cast<Index>(pts_.rows()); }
    bool empty() const { return pts_.rows() == 0; }

    struct Hit {
        Index index = -1;
        double sq_dist = std::numeric_limits<double>::infinity();
    };

    Hit nearest(const Vec3& q) const;

    const Points& points() const { return pts_; }

private:
    struct Node {
        int left = -1;
        int right = -1;
        int begin = 0;   // leaf range into order_
        int end = 0;
        int axis = 0;
        double split = 0.0;
    };

    int build(int begin, int end, int depth);
    void search(int node, const Vec3& q, Hit& best) const;

    Points pts_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;
    static constexpr int kLeafSize = 8;
};

}  // namespace dhg
