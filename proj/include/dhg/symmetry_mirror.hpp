#pragma once

#include "dhg/object_model.hpp"
#include "dhg/point_cloud.hpp"
#include "dhg/symopt.hpp"
#include "dhg/types.hpp"

#include <cstdint>
#include <vector>

namespace dhg {

/// Outcome of pseudo-symmetry plane selection: the chosen axis attains the
/// minimum of the three Chamfer values, ties broken in x < y < z order.
struct SymmetryReport {
    Axis chosen_axis = Axis::X;
    Vec3 chamfer = Vec3::Zero();  // per axis, m^2
    Vec3 centroid = Vec3::Zero();

    std::string to_json() const;
    static SymmetryReport from_json(const std::string& text);
};

/// Centers the cloud at its centroid, reflects it across each axis-aligned
/// plane and compares against the original with the Chamfer distance.
SymmetryReport detect_symmetry_plane(const PointCloud& cloud);
SymmetryReport detect_symmetry_plane(const ObjectModel& object);

/// Left-hand proposal from a right-hand grasp: mirror_pose across the
/// report's axis. The grasp must be expressed in the centered object frame.
HandPose mirror_grasp(const HandPose& right, const SymmetryReport& report);

/// Cartesian right x left pairing, deterministically subsampled to max_pairs
/// by a seeded shuffle. Pairs whose initial hand-hand penetration depth
/// exceeds discard_depth are dropped before optimization.
std::vector<DualGrasp> pair_proposals(const std::vector<HandPose>& rights,
                                      const std::vector<HandPose>& lefts, int max_pairs,
                                      std::uint64_t seed, double discard_depth = 5e-3,
                                      const HandTemplate& tmpl = HandTemplate::standard());

}  // namespace dhg
