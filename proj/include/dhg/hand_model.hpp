#pragma once

#include "dhg/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dhg {

enum class Chirality : int { Right = 0, Left = 1 };

inline const char* chirality_name(Chirality c) { return c == Chirality::Right ? "right" : "left"; }

/// Hand parts in the fixed B = 6 layout: five fingers and the palm.
enum class HandPart : int { Thumb = 0, Index = 1, Middle = 2, Ring = 3, Little = 4, Palm = 5 };
constexpr int kNumHandParts = 6;
constexpr int kNumJointDof = 22;

const char* hand_part_name(HandPart p);

/// Recover a rotation matrix from the 6D representation (first two columns):
/// Gram-Schmidt on the column pair, third column by cross product.
/// Throws InvalidInput when the first column is degenerate (norm <= 1e-8) or
/// the columns are parallel.
Mat3 rot6d_to_matrix(const Vec6& r);
Vec6 matrix_to_rot6d(const Mat3& R);
/// Pull an upstream gradient dL/dR back to the 6D parameters.
Vec6 rot6d_backward(const Vec6& r, const Mat3& dL_dR);

/// One hand's configuration: global translation tau, 6D orientation, and the
/// 22 joint angles.
struct HandPose {
    Chirality chirality = Chirality::Right;
    Vec3 translation = Vec3::Zero();
    Vec6 rot6d = (Vec6() << 1, 0, 0, 0, 1, 0).finished();
    VecX joints = VecX::Zero(kNumJointDof);

    Mat3 rotation() const { return rot6d_to_matrix(rot6d); }
    void validate() const;

    /// Pose parameters flattened as [tau(3), rot6d(6), joints(22)].
    static constexpr int kParamCount = 3 + 6 + kNumJointDof;
    VecX to_params() const;
    static HandPose from_params(Chirality chi, const VecX& params);
};

struct Capsule {
    Vec3 a = Vec3::Zero();
    Vec3 b = Vec3::Zero();
    double radius = 0.0;
};

/// Penetration depth of p into the capsule: radius minus distance to the
/// axis segment. Positive inside, negative outside.
double capsule_depth(const Vec3& p, const Capsule& c);

/// Max depth over a capsule union; > 0 means inside the solid, and the value
/// is the distance to the containing primitive's surface.
struct SolidDepth {
    double depth = -1.0;
    int capsule = -1;
    double axis_t = 0.0;  // clamped segment parameter of the closest axis point
};
SolidDepth solid_depth(const Vec3& p, const std::vector<Capsule>& solid);

/// Kinematic template of the right hand. One entry per actuated DoF; joints
/// with several DoF appear as chained entries with zero offsets. The left
/// hand is this template reflected across its sagittal plane (x = 0).
struct HandTemplate {
    struct Joint {
        std::string name;
        int parent = -1;        // -1 attaches to the wrist root
        Vec3 offset = Vec3::Zero();   // in the parent joint's frame
        Vec3 axis = Vec3::UnitX();    // rotation axis, local frame
        double lower = 0.0;
        double upper = 0.0;
    };

    struct TemplateVertex {
        int joint = -1;               // owning joint (-1 = wrist root)
        Vec3 local = Vec3::Zero();    // position in the joint frame
        HandPart part = HandPart::Palm;
        bool fingertip = false;
    };

    struct TemplateCapsule {
        int joint = -1;
        Vec3 a = Vec3::Zero();
        Vec3 b = Vec3::Zero();
        double radius = 0.0;
        HandPart part = HandPart::Palm;
    };

    std::vector<Joint> joints;            // size 22
    std::vector<TemplateVertex> vertices; // size N_h
    std::vector<TemplateCapsule> capsules;
    // Per joint: bitmask of DoF indices affecting it (ancestors and self).
    std::vector<std::uint32_t> dof_mask;

    Index vertex_count() const { return static_cast<Index>(vertices.size()); }

    void finalize();  // validates the tree and computes dof_mask
    void validate() const;

    /// The built-in 22-DoF template: thumb 5, index/middle/ring 4 each,
    /// little 5; capsule phalanges plus a capsule-slab palm, ~890 surface
    /// samples.
    static const HandTemplate& standard();

    std::string to_json() const;
    static HandTemplate from_json(const std::string& text);
};

/// Posed hand surface. FK output carries the world-frame capsule solid and
/// the differentiation payload; externally ingested records carry vertices
/// and labels only.
struct HandSurface {
    Points vertices;                     // N_h x 3, world frame
    Eigen::VectorXi part_of_vertex;      // HandPart values
    std::vector<char> fingertip_mask;
    bool joints_clamped = false;

    std::vector<Capsule> solid;          // world frame; empty for external records
    bool has_solid() const { return !solid.empty(); }

    struct FkDetail {
        Chirality chirality = Chirality::Right;
        Vec6 rot6d;
        Mat3 global_rotation;
        Mat3 mirror;                      // sagittal reflection for left hands
        Points template_points;           // posed, template frame
        Points capsule_endpoints;         // 2 per capsule, posed template frame
        std::vector<Vec3> joint_origin;   // template frame
        std::vector<Vec3> joint_axis;     // template frame, current
        std::vector<char> dof_clamped;    // clamped DoF carry zero gradient
        std::vector<std::uint32_t> vertex_dof_mask;    // per vertex
        std::vector<std::uint32_t> endpoint_dof_mask;  // per capsule endpoint
    };
    std::optional<FkDetail> detail;

    Index size() const { return vertices.rows(); }

    /// Ingestion path for externally supplied hands (no template, no solid).
    static HandSurface from_external(Points verts, Eigen::VectorXi parts,
                                     std::vector<char> fingertips);
};

/// Deterministic forward kinematics. Joint angles outside their limits are
/// clamped and flagged on the result.
HandSurface forward_kinematics(const HandPose& pose, const HandTemplate& tmpl);

/// Gradient of a scalar w.r.t. pose parameters, accumulated from per-vertex
/// upstream gradients (rows aligned with surface.vertices).
struct PoseGrad {
    Vec3 d_translation = Vec3::Zero();
    Vec6 d_rot6d = Vec6::Zero();
    VecX d_joints = VecX::Zero(kNumJointDof);

    VecX to_params() const;
    PoseGrad& operator+=(const PoseGrad& o);
};

PoseGrad fk_vertex_gradient(const HandSurface& surface, const Points& dL_dvertex);
/// Same pull-back for capsule endpoints (rows: 2 per capsule, a then b).
PoseGrad fk_endpoint_gradient(const HandSurface& surface, const Points& dL_dendpoint);

/// Reflect a pose across an axis-aligned plane through the origin. Chirality
/// toggles; FK of the result equals the reflection of FK of the input,
/// vertex by vertex.
HandPose mirror_pose(const HandPose& pose, Axis plane);

}  // namespace dhg
