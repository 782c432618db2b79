#pragma once

#include "dhg/types.hpp"

#include <Eigen/Dense>

namespace dhg {

/// Distance from the origin to the boundary of the convex hull of a point
/// set, measured inside the linear span of the points (rank-deficient sets
/// are projected onto their span first). Returns 0 when the origin is not
/// strictly interior. Exact up to the convergence tolerance: the polytope is
/// grown best-first toward the hull (expanding-polytope style), terminating
/// when the nearest facet is supported by the point set.
double inscribed_radius(const Eigen::MatrixXd& points, double rel_tolerance = 1e-10);

/// True when the origin lies in the convex hull (within tolerance), via
/// Gilbert's minimum-norm-point descent. Used as an independent oracle path
/// and by the inscribed-radius initialization.
bool origin_in_hull(const Eigen::MatrixXd& points, double tolerance = 1e-9);

}  // namespace dhg
