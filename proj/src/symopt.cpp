#include "dhg/symopt.hpp"

#include "dhg/adam.hpp"
#include "dhg/geometry.hpp"
#include "dhg/parallel.hpp"
#include "dhg/symmetry_mirror.hpp"

#include <algorithm>
#include <cmath>

namespace dhg {

void EnergyConfig::validate() const {
    if (lambda_phh < 0 || lambda_pho < 0) throw InvalidInput("energy config: negative weight");
    if (max_iterations < 1) throw InvalidInput("energy config: max_iterations must be >= 1");
    if (learning_rate <= 0) throw InvalidInput("energy config: learning rate must be positive");
    if (max_pairs < 1) throw InvalidInput("energy config: max_pairs must be >= 1");
}

const char* grasp_status_name(GraspStatus s) {
    switch (s) {
        case GraspStatus::Proposal: return "proposal";
        case GraspStatus::Optimized: return "optimized";
        case GraspStatus::Discarded: return "discarded";
    }
    return "?";
}

GraspStatus grasp_status_from_name(const std::string& name) {
    if (name == "proposal") return GraspStatus::Proposal;
    if (name == "optimized") return GraspStatus::Optimized;
    if (name == "discarded") return GraspStatus::Discarded;
    throw InvalidInput("unknown grasp status: " + name);
}

namespace {

// Depth gradient of the capsule-union solid, with the containing primitive
// and its axis parameter frozen (piecewise-smooth subgradient convention).
struct DepthGrad {
    Vec3 d_point = Vec3::Zero();
    Vec3 d_a = Vec3::Zero();
    Vec3 d_b = Vec3::Zero();
};

DepthGrad solid_depth_gradient(const Vec3& p, const Capsule& c, double axis_t) {
    DepthGrad g;
    const Vec3 q = c.a + axis_t * (c.b - c.a);
    const Vec3 diff = p - q;
    const double dist = diff.norm();
    if (dist < 1e-12) return g;  // on the axis: no defined direction
    const Vec3 dir = diff / dist;
    g.d_point = -dir;                     // depth = radius - |p - q|
    g.d_a = dir * (1.0 - axis_t);
    g.d_b = dir * axis_t;
    return g;
}

}  // namespace

double energy_phh(const HandSurface& left, const HandSurface& right) {
    return energy_phh_grad(left, right, nullptr, nullptr);
}

double energy_phh_grad(const HandSurface& left, const HandSurface& right, PoseGrad* d_left,
                       PoseGrad* d_right) {
    if (!right.has_solid())
        throw InvalidInput("energy_phh: right surface carries no capsule solid");
    double energy = 0.0;
    Points dL_dv, dL_de;
    if (d_left) dL_dv = Points::Zero(left.vertices.rows(), 3);
    if (d_right) dL_de = Points::Zero(2 * static_cast<Index>(right.solid.size()), 3);

    for (Index v = 0; v < left.vertices.rows(); ++v) {
        const Vec3 p = left.vertices.row(v).transpose();
        const SolidDepth sd = solid_depth(p, right.solid);
        if (sd.depth <= 0.0) continue;
        energy += sd.depth;
        if (!d_left && !d_right) continue;
        const DepthGrad dg = solid_depth_gradient(p, right.solid[static_cast<std::size_t>(sd.capsule)],
                                                  sd.axis_t);
        if (d_left) dL_dv.row(v) += dg.d_point.transpose();
        if (d_right) {
            dL_de.row(2 * sd.capsule) += dg.d_a.transpose();
            dL_de.row(2 * sd.capsule + 1) += dg.d_b.transpose();
        }
    }
    if (d_left) *d_left = fk_vertex_gradient(left, dL_dv);
    if (d_right) *d_right = fk_endpoint_gradient(right, dL_de);
    return energy;
}

namespace {

double hand_object_term(const HandSurface& hand, const ObjectModel& object, Points* dL_dv) {
    const Vec3 lo = object.mesh().bbox_min();
    const Vec3 hi = object.mesh().bbox_max();
    double energy = 0.0;
    for (Index v = 0; v < hand.vertices.rows(); ++v) {
        const Vec3 p = hand.vertices.row(v).transpose();
        if ((p.array() < lo.array()).any() || (p.array() > hi.array()).any()) continue;
        const InsideQuery q = inside_and_distance(p, object.mesh(), object.surface_index());
        if (!q.inside) continue;
        energy += q.distance;
        if (dL_dv && q.distance > 1e-12)
            dL_dv->row(v) += ((p - q.closest) / q.distance).transpose();
    }
    return energy;
}

}  // namespace

double energy_pho(const HandSurface& right, const HandSurface& left, const ObjectModel& object) {
    return energy_pho_grad(right, left, object, nullptr, nullptr);
}

double energy_pho_grad(const HandSurface& right, const HandSurface& left,
                       const ObjectModel& object, PoseGrad* d_right, PoseGrad* d_left) {
    double energy = 0.0;
    if (d_right) {
        Points dL_dv = Points::Zero(right.vertices.rows(), 3);
        energy += hand_object_term(right, object, &dL_dv);
        *d_right = fk_vertex_gradient(right, dL_dv);
    } else {
        energy += hand_object_term(right, object, nullptr);
    }
    if (d_left) {
        Points dL_dv = Points::Zero(left.vertices.rows(), 3);
        energy += hand_object_term(left, object, &dL_dv);
        *d_left = fk_vertex_gradient(left, dL_dv);
    } else {
        energy += hand_object_term(left, object, nullptr);
    }
    return energy;
}

double hand_hand_penetration_depth(const HandSurface& a, const HandSurface& b) {
    double depth = 0.0;
    if (b.has_solid())
        for (Index v = 0; v < a.vertices.rows(); ++v)
            depth = std::max(depth, solid_depth(a.vertices.row(v).transpose(), b.solid).depth);
    if (a.has_solid())
        for (Index v = 0; v < b.vertices.rows(); ++v)
            depth = std::max(depth, solid_depth(b.vertices.row(v).transpose(), a.solid).depth);
    return depth;
}

namespace {

struct EnergyEval {
    double phh = 0.0;
    double pho = 0.0;
    double total(const EnergyConfig& cfg) const {
        return cfg.lambda_phh * phh + cfg.lambda_pho * pho;
    }
    bool converged(const EnergyConfig& cfg) const {
        return phh <= cfg.stop_phh && pho <= cfg.stop_pho;
    }
};

EnergyEval evaluate(const HandSurface& right_fk, const HandSurface& left_fk,
                    const ObjectModel& object, const EnergyConfig& cfg, VecX* grad) {
    EnergyEval e;
    if (!grad) {
        e.phh = energy_phh(left_fk, right_fk);
        e.pho = energy_pho(right_fk, left_fk, object);
        return e;
    }
    PoseGrad phh_left, phh_right, pho_right, pho_left;
    e.phh = energy_phh_grad(left_fk, right_fk, &phh_left, &phh_right);
    e.pho = energy_pho_grad(right_fk, left_fk, object, &pho_right, &pho_left);
    grad->resize(2 * HandPose::kParamCount);
    PoseGrad right_total = phh_right;
    PoseGrad left_total = phh_left;
    // Scale hand-hand terms and add the hand-object terms.
    right_total.d_translation *= cfg.lambda_phh;
    right_total.d_rot6d *= cfg.lambda_phh;
    right_total.d_joints *= cfg.lambda_phh;
    left_total.d_translation *= cfg.lambda_phh;
    left_total.d_rot6d *= cfg.lambda_phh;
    left_total.d_joints *= cfg.lambda_phh;
    right_total.d_translation += cfg.lambda_pho * pho_right.d_translation;
    right_total.d_rot6d += cfg.lambda_pho * pho_right.d_rot6d;
    right_total.d_joints += cfg.lambda_pho * pho_right.d_joints;
    left_total.d_translation += cfg.lambda_pho * pho_left.d_translation;
    left_total.d_rot6d += cfg.lambda_pho * pho_left.d_rot6d;
    left_total.d_joints += cfg.lambda_pho * pho_left.d_joints;
    grad->head(HandPose::kParamCount) = right_total.to_params();
    grad->tail(HandPose::kParamCount) = left_total.to_params();
    return e;
}

void clamp_joints_to_limits(HandPose& pose, const HandTemplate& tmpl, bool* clamped) {
    for (Index j = 0; j < pose.joints.size(); ++j) {
        const auto& spec = tmpl.joints[static_cast<std::size_t>(j)];
        const double v = std::clamp(pose.joints[j], spec.lower, spec.upper);
        if (v != pose.joints[j]) {
            pose.joints[j] = v;
            if (clamped) *clamped = true;
        }
    }
}

}  // namespace

DualGrasp optimize_dual_grasp(const DualGrasp& grasp, const ObjectModel& object,
                              const EnergyConfig& cfg, const HandTemplate& tmpl) {
    cfg.validate();
    if (grasp.status != GraspStatus::Proposal)
        throw InvalidInput("optimize_dual_grasp: grasp is not a proposal");

    DualGrasp out = grasp;
    HandSurface right_fk = forward_kinematics(out.right, tmpl);
    HandSurface left_fk = forward_kinematics(out.left, tmpl);

    const double initial_depth = hand_hand_penetration_depth(left_fk, right_fk);
    EnergyEval e = evaluate(right_fk, left_fk, object, cfg, nullptr);
    out.energy_trace.push_back(e.total(cfg));
    out.final_phh = e.phh;
    out.final_pho = e.pho;

    if (initial_depth > cfg.discard_depth) {
        out.status = GraspStatus::Discarded;
        out.note = "initial hand-hand penetration above discard threshold";
        return out;
    }
    if (e.converged(cfg)) {
        out.status = GraspStatus::Optimized;
        return out;
    }

    VecX params(2 * HandPose::kParamCount);
    params.head(HandPose::kParamCount) = out.right.to_params();
    params.tail(HandPose::kParamCount) = out.left.to_params();

    VecX step_scale = VecX::Ones(2 * HandPose::kParamCount);
    step_scale.head(HandPose::kParamCount).setConstant(cfg.right_rate_scale);

    AdamOptimizer adam({cfg.learning_rate, cfg.beta1, cfg.beta2, 1e-8});
    double current_total = e.total(cfg);

    for (int it = 0; it < cfg.max_iterations; ++it) {
        VecX grad;
        evaluate(right_fk, left_fk, object, cfg, &grad);
        if (!grad.allFinite()) {
            out.status = GraspStatus::Discarded;
            out.note = "non-finite gradient";
            return out;
        }
        const VecX dir_adam = adam.direction(grad).cwiseProduct(step_scale);
        // Fallback direction: the raw gradient scaled to a unit max step,
        // which descends for small enough rates wherever Adam's normalized
        // direction zigzags across a kink.
        const VecX dir_grad =
            grad.cwiseProduct(step_scale) / std::max(grad.cwiseAbs().maxCoeff(), 1e-12);

        // Backtracking keeps the accepted trace non-increasing; the rate
        // doubles after every accepted step up to the configured value.
        bool accepted = false;
        for (const VecX* dir : {&dir_adam, &dir_grad}) {
            for (int k = 0; k < 12 && !accepted; ++k) {
                const double try_rate = cfg.learning_rate * std::pow(0.5, k);
                const VecX candidate = params - try_rate * (*dir);
                HandPose right_try, left_try;
                HandSurface right_try_fk, left_try_fk;
                EnergyEval e_try;
                try {
                    right_try = HandPose::from_params(out.right.chirality, candidate.head(HandPose::kParamCount));
                    left_try = HandPose::from_params(out.left.chirality, candidate.tail(HandPose::kParamCount));
                    right_try_fk = forward_kinematics(right_try, tmpl);
                    left_try_fk = forward_kinematics(left_try, tmpl);
                    e_try = evaluate(right_try_fk, left_try_fk, object, cfg, nullptr);
                } catch (const InvalidInput&) {
                    continue;
                }
                if (!std::isfinite(e_try.total(cfg)) || e_try.total(cfg) > current_total) continue;
                params = candidate;
                out.right = std::move(right_try);
                out.left = std::move(left_try);
                right_fk = std::move(right_try_fk);
                left_fk = std::move(left_try_fk);
                e = e_try;
                current_total = e.total(cfg);
                out.energy_trace.push_back(current_total);
                out.final_phh = e.phh;
                out.final_pho = e.pho;
                accepted = true;
            }
            if (accepted) break;
        }
        if (!accepted) break;  // no descent along either direction
        if (e.converged(cfg)) break;
    }

    clamp_joints_to_limits(out.right, tmpl, &out.joints_clamped);
    clamp_joints_to_limits(out.left, tmpl, &out.joints_clamped);
    out.status = e.converged(cfg) ? GraspStatus::Optimized : GraspStatus::Discarded;
    if (out.status == GraspStatus::Discarded) out.note = "energy thresholds not met";
    return out;
}

std::vector<DualGrasp> run_symopt(const ObjectModel& object,
                                  const std::vector<HandPose>& right_grasps,
                                  const EnergyConfig& cfg, std::uint64_t seed, unsigned threads,
                                  const HandTemplate& tmpl) {
    cfg.validate();
    if (right_grasps.empty()) return {};

    // Work in the centered object frame; shift the grasps along.
    ObjectModel centered = object;
    const Vec3 offset = centered.center_at_origin();
    std::vector<HandPose> rights = right_grasps;
    for (auto& p : rights) p.translation -= offset;

    const SymmetryReport report = detect_symmetry_plane(centered);
    std::vector<HandPose> lefts;
    lefts.reserve(rights.size());
    for (const auto& r : rights) lefts.push_back(mirror_grasp(r, report));

    std::vector<DualGrasp> proposals =
        pair_proposals(rights, lefts, cfg.max_pairs, seed, cfg.discard_depth, tmpl);
    for (auto& p : proposals) p.object_id = object.id();

    std::vector<DualGrasp> results(proposals.size());
    const unsigned workers = threads == 0 ? default_thread_count() : threads;
    parallel_for(proposals.size(), workers, [&](std::size_t i) {
        try {
            results[i] = optimize_dual_grasp(proposals[i], centered, cfg, tmpl);
        } catch (const std::exception& ex) {
            results[i] = proposals[i];
            results[i].status = GraspStatus::Discarded;
            results[i].note = std::string("optimization error: ") + ex.what();
        }
    });
    return results;
}

}  // namespace dhg
