#pragma once

#include "dhg/aabb_tree.hpp"
#include "dhg/kdtree.hpp"
#include "dhg/point_cloud.hpp"
#include "dhg/tri_mesh.hpp"
#include "dhg/types.hpp"

#include <memory>
#include <string>

namespace dhg {

/// The grasped body: triangle mesh, sampled point cloud with normals, scale
/// metadata, and read-only spatial indices shared by every consumer.
class ObjectModel {
public:
    static constexpr Index kDefaultSampleCount = 2048;

    ObjectModel(std::string id, TriMesh mesh, double scale = 1.0,
                Index sample_count = kDefaultSampleCount, std::uint64_t sample_seed = 7);

    /// Binds an explicit point cloud instead of sampling the mesh (used for
    /// ingested data and symmetry-exact fixtures).
    ObjectModel(std::string id, TriMesh mesh, PointCloud cloud, double scale = 1.0);

    const std::string& id() const { return id_; }
    double scale() const { return scale_; }
    const TriMesh& mesh() const { return *mesh_; }
    const PointCloud& cloud() const { return *cloud_; }
    const AabbTree& surface_index() const { return *surface_index_; }
    const KdTree& cloud_index() const { return *cloud_index_; }

    Vec3 center() const { return center_; }             // centroid of the sampled cloud
    double max_radius() const { return max_radius_; }   // from the center
    double diameter() const { return 2.0 * max_radius_; }

    /// Translate mesh and cloud so the cloud centroid sits at the origin.
    /// Returns the previous centroid. Indices are rebuilt.
    Vec3 center_at_origin();

private:
    void rebuild_indices();

    std::string id_;
    double scale_;
    // Mesh and cloud live behind shared pointers so the surface index's
    // mesh reference stays valid when ObjectModel values are moved around.
    std::shared_ptr<const TriMesh> mesh_;
    std::shared_ptr<const PointCloud> cloud_;
    Vec3 center_ = Vec3::Zero();
    double max_radius_ = 0.0;
    std::shared_ptr<const AabbTree> surface_index_;
    std::shared_ptr<const KdTree> cloud_index_;
};

}  // namespace dhg
