#pragma once

#include "dhg/hand_model.hpp"
#include "dhg/object_model.hpp"
#include "dhg/types.hpp"

#include <string>
#include <vector>

namespace dhg {

struct EnergyConfig {
    double lambda_phh = 1.0;
    double lambda_pho = 1.0;
    double learning_rate = 5e-3;
    // The right hand starts in good contact; it moves with a smaller rate.
    double right_rate_scale = 0.1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    int max_iterations = 300;
    double stop_phh = 1e-4;   // m
    double stop_pho = 1e-4;   // m
    double discard_depth = 5e-3;  // m, max initial hand-hand penetration
    int max_pairs = 256;

    void validate() const;
};

enum class GraspStatus : int { Proposal = 0, Optimized = 1, Discarded = 2 };

const char* grasp_status_name(GraspStatus s);
GraspStatus grasp_status_from_name(const std::string& name);

/// Right and left pose bound to one object, with optimization provenance.
struct DualGrasp {
    HandPose right;
    HandPose left;
    std::string object_id;
    GraspStatus status = GraspStatus::Proposal;
    std::vector<double> energy_trace;  // total energy per accepted iterate
    double final_phh = 0.0;
    double final_pho = 0.0;
    bool joints_clamped = false;
    std::string note;  // diagnostics (discard reason, gradient failures)
};

struct DualPoseGrad {
    PoseGrad right;
    PoseGrad left;
};

/// Hand-hand interpenetration energy: sum over left-hand vertices inside the
/// right-hand solid of their depth (distance to the containing primitive's
/// surface). Requires the right surface to carry its capsule solid.
double energy_phh(const HandSurface& left, const HandSurface& right);
double energy_phh_grad(const HandSurface& left, const HandSurface& right, PoseGrad* d_left,
                       PoseGrad* d_right);

/// Hand-object interpenetration energy: sum over all vertices of both hands
/// inside the object mesh of their distance to the object surface.
double energy_pho(const HandSurface& right, const HandSurface& left, const ObjectModel& object);
double energy_pho_grad(const HandSurface& right, const HandSurface& left,
                       const ObjectModel& object, PoseGrad* d_right, PoseGrad* d_left);

/// Max penetration depth between the two hand solids, both directions.
double hand_hand_penetration_depth(const HandSurface& a, const HandSurface& b);

/// Minimizes lambda_phh * E_phh + lambda_pho * E_pho over both poses with
/// Adam, stopping once both energies fall below their thresholds. Steps that
/// would increase the total energy are rejected (rate halved), so the trace
/// is non-increasing. Proposals already below the thresholds return
/// immediately; proposals beyond the discard depth are discarded unoptimized.
DualGrasp optimize_dual_grasp(const DualGrasp& grasp, const ObjectModel& object,
                              const EnergyConfig& cfg,
                              const HandTemplate& tmpl = HandTemplate::standard());

/// Full pipeline: detect the pseudo-symmetry plane, mirror the right grasps,
/// pair, optimize, and filter. Deterministic for a fixed seed. Per-proposal
/// failures become Discarded entries; the batch never aborts. Poses in the
/// returned grasps are expressed in the centered object frame.
std::vector<DualGrasp> run_symopt(const ObjectModel& object,
                                  const std::vector<HandPose>& right_grasps,
                                  const EnergyConfig& cfg, std::uint64_t seed,
                                  unsigned threads = 0,
                                  const HandTemplate& tmpl = HandTemplate::standard());

}  // namespace dhg
