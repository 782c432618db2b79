#include "dhg/object_model.hpp"

namespace dhg {

ObjectModel::ObjectModel(std::string id, TriMesh mesh, double scale, Index sample_count,
                         std::uint64_t sample_seed)
    : id_(std::move(id)), scale_(scale) {
    if (mesh.num_faces() == 0) throw InvalidInput("object mesh has no faces");
    cloud_ = std::make_shared<const PointCloud>(mesh.sample_surface(sample_count, sample_seed));
    mesh_ = std::make_shared<const TriMesh>(std::move(mesh));
    rebuild_indices();
}

ObjectModel::ObjectModel(std::string id, TriMesh mesh, PointCloud cloud, double scale)
    : id_(std::move(id)), scale_(scale) {
    if (mesh.num_faces() == 0) throw InvalidInput("object mesh has no faces");
    if (cloud.empty()) throw InvalidInput("object cloud is empty");
    mesh_ = std::make_shared<const TriMesh>(std::move(mesh));
    cloud_ = std::make_shared<const PointCloud>(std::move(cloud));
    rebuild_indices();
}

void ObjectModel::rebuild_indices() {
    center_ = cloud_->centroid();
    max_radius_ = cloud_->max_radius_from(center_);
    surface_index_ = std::make_shared<AabbTree>(*mesh_);
    cloud_index_ = std::make_shared<KdTree>(cloud_->points);
}

Vec3 ObjectModel::center_at_origin() {
    const Vec3 offset = center_;
    TriMesh moved_mesh = *mesh_;
    moved_mesh.vertices.rowwise() -= offset.transpose();
    PointCloud moved_cloud = *cloud_;
    moved_cloud.translate(-offset);
    mesh_ = std::make_shared<const TriMesh>(std::move(moved_mesh));
    cloud_ = std::make_shared<const PointCloud>(std::move(moved_cloud));
    rebuild_indices();
    return offset;
}

}  // namespace dhg
