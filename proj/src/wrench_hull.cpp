#include "dhg/wrench_hull.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <vector>

namespace dhg {

namespace {

// Minimum-norm point in conv(rows of P) by Gilbert's algorithm. Returns the
// squared distance; fills `support` with the indices of the final iterate's
// convex combination when requested.
double min_norm_sq(const Eigen::MatrixXd& P, int max_iters = 4000) {
    const Eigen::Index n = P.rows();
    Eigen::VectorXd x = P.row(0).transpose();
    for (int it = 0; it < max_iters; ++it) {
        // Support point in direction -x.
        Eigen::Index best = 0;
        double best_dot = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = P.row(j).dot(x);
            if (d < best_dot) {
                best_dot = d;
                best = j;
            }
        }
        const Eigen::VectorXd s = P.row(best).transpose();
        const double gap = x.squaredNorm() - x.dot(s);
        if (gap <= 1e-16 * std::max(1.0, x.squaredNorm())) break;
        // Line search on the segment [x, s]: minimize |x + t(s-x)|^2.
        const Eigen::VectorXd d = s - x;
        const double denom = d.squaredNorm();
        if (denom <= 0.0) break;
        const double t = std::clamp(-x.dot(d) / denom, 0.0, 1.0);
        x += t * d;
        if (x.squaredNorm() < 1e-30) break;
    }
    return x.squaredNorm();
}

struct Facet {
    std::vector<int> verts;      // sorted, size = dim
    Eigen::VectorXd normal;      // outward unit
    double offset = 0.0;         // normal . x for x on the facet
    bool alive = true;
};

// Outward-oriented hyperplane through dim points; interior point fixes the
// orientation. Returns false for degenerate (affinely dependent) vertex sets.
bool facet_plane(const Eigen::MatrixXd& Q, const std::vector<int>& verts,
                 const Eigen::VectorXd& interior, Eigen::VectorXd* normal, double* offset) {
    const int dim = static_cast<int>(Q.cols());
    Eigen::MatrixXd span(dim - 1, dim);
    for (int i = 1; i < dim; ++i)
        span.row(i - 1) = Q.row(verts[static_cast<std::size_t>(i)]) - Q.row(verts[0]);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(span, Eigen::ComputeFullV);
    if (dim > 1) {
        const auto& sv = svd.singularValues();
        const double scale = sv.size() > 0 ? sv[0] : 0.0;
        if (sv.size() == dim - 1 && sv[dim - 2] <= 1e-12 * std::max(scale, 1.0)) return false;
    }
    Eigen::VectorXd u = svd.matrixV().col(dim - 1);
    double b = u.dot(Q.row(verts[0]).transpose());
    if (u.dot(interior) > b) {
        u = -u;
        b = -b;
    }
    *normal = u;
    *offset = b;
    return true;
}

// Expands a witness simplex to full dimension by adding support points away
// from its affine hull. Returns false if the point set is flat.
bool complete_simplex(const Eigen::MatrixXd& Q, std::vector<int>* simplex) {
    const int dim = static_cast<int>(Q.cols());
    while (static_cast<int>(simplex->size()) < dim + 1) {
        const int k = static_cast<int>(simplex->size());
        // Orthonormal basis of the current affine hull directions.
        Eigen::MatrixXd dirs(std::max(k - 1, 1), dim);
        dirs.setZero();
        for (int i = 1; i < k; ++i)
            dirs.row(i - 1) = Q.row((*simplex)[static_cast<std::size_t>(i)]) -
                              Q.row((*simplex)[0]);
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(dirs, Eigen::ComputeFullV);
        // Any nullspace direction of the affine hull works as the probe.
        Eigen::VectorXd probe = Eigen::VectorXd::Zero(dim);
        int rank = 0;
        for (; rank < svd.singularValues().size(); ++rank)
            if (svd.singularValues()[rank] <= 1e-12) break;
        if (rank >= dim) return false;
        probe = svd.matrixV().col(rank);

        const Eigen::VectorXd base = Q.row((*simplex)[0]).transpose();
        auto reach = [&](const Eigen::VectorXd& u) {
            int best = -1;
            double best_val = 1e-12;
            for (Eigen::Index j = 0; j < Q.rows(); ++j) {
                const double v = u.dot(Q.row(j).transpose() - base);
                if (v > best_val &&
                    std::find(simplex->begin(), simplex->end(), static_cast<int>(j)) == simplex->end()) {
                    best_val = v;
                    best = static_cast<int>(j);
                }
            }
            return best;
        };
        int added = reach(probe);
        if (added < 0) added = reach(Eigen::VectorXd(-probe));
        if (added < 0) return false;
        simplex->push_back(added);
    }
    return true;
}

double epa_inscribed_radius(const Eigen::MatrixXd& Q, double tol) {
    const int dim = static_cast<int>(Q.cols());
    const Eigen::Index n = Q.rows();

    // Initial simplex: grow greedily from extreme points, then complete.
    std::vector<int> simplex;
    {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(dim);
        u[0] = 1.0;
        Eigen::Index first = 0;
        double best = -1e300;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = Q.row(j).dot(u);
            if (v > best) {
                best = v;
                first = j;
            }
        }
        simplex.push_back(static_cast<int>(first));
        if (!complete_simplex(Q, &simplex)) return 0.0;
    }

    Eigen::VectorXd interior = Eigen::VectorXd::Zero(dim);
    for (int v : simplex) interior += Q.row(v).transpose();
    interior /= static_cast<double>(simplex.size());

    // The origin must be strictly inside the current polytope for offsets to
    // be positive; EPA keeps expanding regardless and the final min offset
    // is what matters, but a negative popped offset means origin outside.
    std::vector<Facet> facets;
    auto push_facet = [&](std::vector<int> verts) -> bool {
        std::sort(verts.begin(), verts.end());
        Facet f;
        f.verts = std::move(verts);
        if (!facet_plane(Q, f.verts, interior, &f.normal, &f.offset)) return false;
        facets.push_back(std::move(f));
        return true;
    };

    for (std::size_t omit = 0; omit < simplex.size(); ++omit) {
        std::vector<int> verts;
        for (std::size_t i = 0; i < simplex.size(); ++i)
            if (i != omit) verts.push_back(simplex[i]);
        if (!push_facet(std::move(verts))) return 0.0;
    }

    using QueueItem = std::pair<double, std::size_t>;  // (offset, facet id)
    std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>> queue;
    for (std::size_t i = 0; i < facets.size(); ++i) queue.emplace(facets[i].offset, i);

    const int max_rounds = 20000;
    for (int round = 0; round < max_rounds; ++round) {
        if (queue.empty()) return 0.0;
        const auto [offset, fid] = queue.top();
        queue.pop();
        if (!facets[fid].alive) continue;

        const Eigen::VectorXd u = facets[fid].normal;
        Eigen::Index support = 0;
        double support_val = -1e300;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = Q.row(j).dot(u);
            if (v > support_val) {
                support_val = v;
                support = j;
            }
        }
        if (support_val - offset <= tol) {
            // The popped facet lies on the hull. Being the queue minimum,
            // its offset is the inscribed radius; non-positive offset means
            // the origin is outside or on the boundary.
            return offset > tol ? offset : 0.0;
        }

        // Visible-set expansion with the new support point.
        const int s = static_cast<int>(support);
        std::vector<std::size_t> visible;
        for (std::size_t i = 0; i < facets.size(); ++i) {
            if (!facets[i].alive) continue;
            if (facets[i].normal.dot(Q.row(s).transpose()) > facets[i].offset + tol * 0.5)
                visible.push_back(i);
        }
        if (visible.empty()) continue;  // numeric corner: nothing to do

        std::map<std::vector<int>, int> ridge_count;
        for (std::size_t i : visible) {
            facets[i].alive = false;
            for (std::size_t omit = 0; omit < facets[i].verts.size(); ++omit) {
                std::vector<int> ridge;
                for (std::size_t k = 0; k < facets[i].verts.size(); ++k)
                    if (k != omit) ridge.push_back(facets[i].verts[k]);
                ++ridge_count[ridge];
            }
        }
        for (const auto& [ridge, count] : ridge_count) {
            if (count != 1) continue;  // interior ridge of the visible set
            std::vector<int> verts = ridge;
            if (std::find(verts.begin(), verts.end(), s) != verts.end()) continue;
            verts.push_back(s);
            std::sort(verts.begin(), verts.end());
            Facet f;
            f.verts = std::move(verts);
            if (!facet_plane(Q, f.verts, interior, &f.normal, &f.offset)) continue;
            facets.push_back(std::move(f));
            queue.emplace(facets.back().offset, facets.size() - 1);
        }
    }
    // Iteration cap reached: report the best lower bound still queued.
    double best = 0.0;
    while (!queue.empty()) {
        const auto [offset, fid] = queue.top();
        queue.pop();
        if (facets[fid].alive) {
            best = std::max(0.0, offset);
            break;
        }
    }
    return best;
}

}  // namespace

bool origin_in_hull(const Eigen::MatrixXd& points, double tolerance) {
    if (points.rows() == 0) return false;
    return min_norm_sq(points) <= tolerance * tolerance;
}

double inscribed_radius(const Eigen::MatrixXd& points, double rel_tolerance) {
    if (points.rows() == 0 || points.cols() == 0) return 0.0;
    const double scale = points.rowwise().norm().maxCoeff();
    if (scale <= 0.0) return 0.0;

    // Project onto the linear span of the points.
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(points, Eigen::ComputeThinV);
    int rank = 0;
    for (; rank < svd.singularValues().size(); ++rank)
        if (svd.singularValues()[rank] <= 1e-9 * svd.singularValues()[0]) break;
    if (rank == 0) return 0.0;
    const Eigen::MatrixXd Q = points * svd.matrixV().leftCols(rank);

    if (rank == 1) {
        // Interval on a line: inscribed radius is min(|ends|) when the
        // origin is strictly between them.
        const double lo = Q.col(0).minCoeff();
        const double hi = Q.col(0).maxCoeff();
        if (lo < 0.0 && hi > 0.0) return std::min(-lo, hi);
        return 0.0;
    }

    const double tol = rel_tolerance * scale;
    if (!origin_in_hull(Q, tol)) return 0.0;
    return epa_inscribed_radius(Q, tol);
}

}  // namespace dhg
