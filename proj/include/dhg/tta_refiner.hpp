#pragma once

#include "dhg/ddpm.hpp"
#include "dhg/hand_model.hpp"
#include "dhg/object_model.hpp"
#include "dhg/symopt.hpp"
#include "dhg/types.hpp"

#include <vector>

namespace dhg {

struct TtaConfig {
    double lambda_pen = 10.0;
    double lambda_con = 1.0;
    double lambda_dir = 1.0;
    int steps = 100;
    double learning_rate = 2e-3;
    // Joint angles live in radians and need larger steps than meters.
    double joint_rate_scale = 2.0;
    double beta1 = 0.9;
    double beta2 = 0.999;

    void validate() const;
};

/// Fingertip-contact energy: mean nearest distance from each hand's
/// fingertip vertices to the object cloud, summed over both hands.
double energy_con(const HandSurface& right, const HandSurface& left, const ObjectModel& object,
                  PoseGrad* d_right = nullptr, PoseGrad* d_left = nullptr);

/// Surface points selected by casting the predicted affordance directions
/// from the object center. Zero rows contribute nothing; rays that miss are
/// counted and skipped.
struct DirTargets {
    std::vector<Vec3> right_hits;
    std::vector<Vec3> left_hits;
    int missed_rays = 0;
};

DirTargets cast_direction_targets(const ObjectModel& object, const AffordanceState& directions);

/// Direction-matching energy: mean nearest distance from each hand's
/// vertices to its direction-selected surface points.
double energy_dir(const HandSurface& right, const HandSurface& left, const DirTargets& targets,
                  PoseGrad* d_right = nullptr, PoseGrad* d_left = nullptr);
double energy_dir(const HandSurface& right, const HandSurface& left, const ObjectModel& object,
                  const AffordanceState& directions, PoseGrad* d_right = nullptr,
                  PoseGrad* d_left = nullptr);

/// Minimizes lambda_pen * E_pen + lambda_con * E_con + lambda_dir * E_D over
/// both poses with Adam. Direction targets are cast once (the predicted
/// directions stay fixed during adaptation). Steps that would increase the
/// energy are rejected with the rate halved, so the recorded trace is
/// non-increasing. A non-finite starting energy returns the input unchanged
/// with a failure note.
DualGrasp refine(const DualGrasp& grasp, const ObjectModel& object,
                 const AffordanceState& directions, const TtaConfig& cfg,
                 const HandTemplate& tmpl = HandTemplate::standard());

}  // namespace dhg
