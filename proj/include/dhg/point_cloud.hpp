#pragma once

#include "dhg/types.hpp"

#include <optional>
#include <utility>

namespace dhg {

/// A point set in meters, optionally with unit normals (one per point).
/// Coordinates must be finite; normals, when present, unit within 1e-6.
struct PointCloud {
    Points points;                  // n x 3
    std::optional<Points> normals;  // n x 3, unit rows

    PointCloud() = default;
    explicit PointCloud(Points pts) : points(std::move(pts)) { validate(); }
    PointCloud(Points pts, Points nrm) : points(std::move(pts)), normals(std::move(nrm)) { validate(); }

    Index size() const { return points.rows(); }
    bool empty() const { return points.rows() == 0; }

    Vec3 centroid() const {
        if (empty()) throw InvalidInput("centroid of empty cloud");
        return points.colwise().mean().transpose();
    }

    // Largest distance from the centroid; 2*max_radius serves as the
    // object diameter wherever the pipeline needs one.
    double max_radius_from(const Vec3& center) const {
        double r2 = 0.0;
        for (Index i = 0; i < points.rows(); ++i)
            r2 = std::max(r2, (points.row(i).transpose() - center).squaredNorm());
        return std::sqrt(r2);
    }

    void translate(const Vec3& t) { points.rowwise() += t.transpose(); }

    void validate() const {
        if (!points.allFinite()) throw InvalidInput("point cloud has non-finite coordinates");
        if (normals) {
            if (normals->rows() != points.rows())
                throw InvalidInput("normal count does not match point count");
            if (!normals->allFinite()) throw InvalidInput("normals non-finite");
            for (Index i = 0; i < normals->rows(); ++i) {
                const double n = normals->row(i).norm();
                if (std::abs(n - 1.0) > 1e-6)
                    throw InvalidInput("normal row " + std::to_string(i) + " is not unit length");
            }
        }
    }
};

}  // namespace dhg
