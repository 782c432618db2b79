#include "dhg/tta_refiner.hpp"

#include "dhg/adam.hpp"
#include "dhg/geometry.hpp"
#include "dhg/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace dhg {

void TtaConfig::validate() const {
    if (lambda_pen < 0 || lambda_con < 0 || lambda_dir < 0)
        throw InvalidInput("tta config: negative weight");
    if (steps < 1) throw InvalidInput("tta config: steps must be >= 1");
    if (learning_rate <= 0) throw InvalidInput("tta config: learning rate must be positive");
}

namespace {

// Mean nearest distance from the selected hand vertices to target points,
// with the gradient pulled back through FK.
double mean_nearest_term(const HandSurface& hand, const std::vector<char>& select,
                         const KdTree& targets, Points* dL_dv) {
    Index count = 0;
    for (char s : select) count += s ? 1 : 0;
    if (count == 0) throw InvalidInput("mean distance: empty vertex selection");
    double sum = 0.0;
    for (Index v = 0; v < hand.vertices.rows(); ++v) {
        if (!select[static_cast<std::size_t>(v)]) continue;
        const Vec3 p = hand.vertices.row(v).transpose();
        const auto hit = targets.nearest(p);
        const double d = std::sqrt(hit.sq_dist);
        sum += d;
        if (dL_dv && d > 1e-12) {
            const Vec3 dir = (p - targets.points().row(hit.index).transpose()) / d;
            dL_dv->row(v) += dir.transpose() / static_cast<double>(count);
        }
    }
    return sum / static_cast<double>(count);
}

std::vector<char> all_selected(Index n) { return std::vector<char>(static_cast<std::size_t>(n), 1); }

}  // namespace

double energy_con(const HandSurface& right, const HandSurface& left, const ObjectModel& object,
                  PoseGrad* d_right, PoseGrad* d_left) {
    if (right.fingertip_mask.empty() || left.fingertip_mask.empty())
        throw InvalidInput("energy_con: missing fingertip masks");
    double energy = 0.0;
    for (const auto& [hand, grad] : {std::pair{&right, d_right}, std::pair{&left, d_left}}) {
        Points dL_dv;
        if (grad) dL_dv = Points::Zero(hand->vertices.rows(), 3);
        energy += mean_nearest_term(*hand, hand->fingertip_mask, object.cloud_index(),
                                    grad ? &dL_dv : nullptr);
        if (grad) *grad = fk_vertex_gradient(*hand, dL_dv);
    }
    return energy;
}

DirTargets cast_direction_targets(const ObjectModel& object, const AffordanceState& directions) {
    if (directions.rows() != 2 * kNumHandParts)
        throw InvalidInput("direction targets: expected 2*B direction rows");
    DirTargets out;
    const Vec3 center = object.center();
    for (Index row = 0; row < directions.rows(); ++row) {
        const Vec3 d = directions.directions.row(row).transpose();
        const double n = d.norm();
        if (n < 1e-12) continue;  // inactive part
        if (std::abs(n - 1.0) > 1e-6)
            throw InvalidInput("direction targets: rows must be unit or zero");
        const auto hit = object.surface_index().ray_intersect(center, d, 1e-9);
        if (!hit) {
            ++out.missed_rays;
            continue;
        }
        if (row < kNumHandParts)
            out.right_hits.push_back(hit->point);
        else
            out.left_hits.push_back(hit->point);
    }
    return out;
}

double energy_dir(const HandSurface& right, const HandSurface& left, const DirTargets& targets,
                  PoseGrad* d_right, PoseGrad* d_left) {
    double energy = 0.0;
    for (const auto& [hand, hits, grad] :
         {std::tuple{&right, &targets.right_hits, d_right}, std::tuple{&left, &targets.left_hits, d_left}}) {
        if (grad) *grad = PoseGrad{};
        if (hits->empty()) continue;  // all-zero masks contribute nothing
        Points target_pts(static_cast<Index>(hits->size()), 3);
        for (std::size_t i = 0; i < hits->size(); ++i)
            target_pts.row(static_cast<Index>(i)) = (*hits)[i].transpose();
        const KdTree tree(target_pts);
        Points dL_dv;
        if (grad) dL_dv = Points::Zero(hand->vertices.rows(), 3);
        energy += mean_nearest_term(*hand, all_selected(hand->vertices.rows()), tree,
                                    grad ? &dL_dv : nullptr);
        if (grad) *grad = fk_vertex_gradient(*hand, dL_dv);
    }
    return energy;
}

double energy_dir(const HandSurface& right, const HandSurface& left, const ObjectModel& object,
                  const AffordanceState& directions, PoseGrad* d_right, PoseGrad* d_left) {
    return energy_dir(right, left, cast_direction_targets(object, directions), d_right, d_left);
}

namespace {

struct TtaEval {
    double pen = 0.0, con = 0.0, dir = 0.0;
    double total(const TtaConfig& cfg) const {
        return cfg.lambda_pen * pen + cfg.lambda_con * con + cfg.lambda_dir * dir;
    }
};

TtaEval evaluate_tta(const HandSurface& right_fk, const HandSurface& left_fk,
                     const ObjectModel& object, const DirTargets& targets, const TtaConfig& cfg,
                     VecX* grad) {
    TtaEval e;
    if (!grad) {
        e.pen = loss_pen(right_fk, left_fk, object);
        e.con = energy_con(right_fk, left_fk, object);
        e.dir = energy_dir(right_fk, left_fk, targets);
        return e;
    }
    PoseGrad pen_r, pen_l, con_r, con_l, dir_r, dir_l;
    e.pen = loss_pen(right_fk, left_fk, object, &pen_r, &pen_l);
    e.con = energy_con(right_fk, left_fk, object, &con_r, &con_l);
    e.dir = energy_dir(right_fk, left_fk, targets, &dir_r, &dir_l);
    auto combine = [&](const PoseGrad& p, const PoseGrad& c, const PoseGrad& d) {
        PoseGrad g;
        g.d_translation = cfg.lambda_pen * p.d_translation + cfg.lambda_con * c.d_translation +
                          cfg.lambda_dir * d.d_translation;
        g.d_rot6d = cfg.lambda_pen * p.d_rot6d + cfg.lambda_con * c.d_rot6d +
                    cfg.lambda_dir * d.d_rot6d;
        g.d_joints = cfg.lambda_pen * p.d_joints + cfg.lambda_con * c.d_joints +
                     cfg.lambda_dir * d.d_joints;
        return g;
    };
    grad->resize(2 * HandPose::kParamCount);
    grad->head(HandPose::kParamCount) = combine(pen_r, con_r, dir_r).to_params();
    grad->tail(HandPose::kParamCount) = combine(pen_l, con_l, dir_l).to_params();
    return e;
}

}  // namespace

DualGrasp refine(const DualGrasp& grasp, const ObjectModel& object,
                 const AffordanceState& directions, const TtaConfig& cfg,
                 const HandTemplate& tmpl) {
    cfg.validate();
    DualGrasp out = grasp;
    out.energy_trace.clear();

    const DirTargets targets = cast_direction_targets(object, directions);

    HandSurface right_fk, left_fk;
    TtaEval e;
    try {
        right_fk = forward_kinematics(out.right, tmpl);
        left_fk = forward_kinematics(out.left, tmpl);
        e = evaluate_tta(right_fk, left_fk, object, targets, cfg, nullptr);
    } catch (const std::exception& ex) {
        out.note = std::string("tta: initial evaluation failed: ") + ex.what();
        return out;
    }
    if (!std::isfinite(e.total(cfg))) {
        out.note = "tta: non-finite initial energy";
        return out;
    }

    VecX params(2 * HandPose::kParamCount);
    params.head(HandPose::kParamCount) = out.right.to_params();
    params.tail(HandPose::kParamCount) = out.left.to_params();
    AdamOptimizer adam({cfg.learning_rate, cfg.beta1, cfg.beta2, 1e-8});

    VecX group_scale = VecX::Ones(2 * HandPose::kParamCount);
    group_scale.segment(9, kNumJointDof).setConstant(cfg.joint_rate_scale);
    group_scale.segment(HandPose::kParamCount + 9, kNumJointDof).setConstant(cfg.joint_rate_scale);

    double current = e.total(cfg);
    out.energy_trace.push_back(current);

    for (int it = 0; it < cfg.steps; ++it) {
        // Periodic moment restart: moments accumulated while escaping deep
        // penetration otherwise bias the directions long after the escape.
        if (it > 0 && it % 50 == 0) adam.reset();
        VecX grad;
        evaluate_tta(right_fk, left_fk, object, targets, cfg, &grad);
        if (!grad.allFinite()) {
            out.note = "tta: non-finite gradient at step " + std::to_string(it);
            break;
        }
        const VecX dir_adam = adam.direction(grad).cwiseProduct(group_scale);
        const VecX dir_grad = VecX((grad / std::max(grad.cwiseAbs().maxCoeff(), 1e-12)).cwiseProduct(group_scale));
        // Projected fallbacks escape wedges where the coupled direction
        // ascends on both sides of a nearest-neighbor kink.
        const VecX dir_trans = [&] {
            VecX d = VecX::Zero(grad.size());
            d.segment<3>(0) = grad.segment<3>(0);
            d.segment<3>(HandPose::kParamCount) = grad.segment<3>(HandPose::kParamCount);
            return VecX(d / std::max(d.cwiseAbs().maxCoeff(), 1e-12));
        }();
        const VecX dir_joints = [&] {
            VecX d = VecX::Zero(grad.size());
            d.tail(kNumJointDof) = grad.tail(kNumJointDof);
            d.segment(9, kNumJointDof) = grad.segment(9, kNumJointDof);
            return VecX(d / std::max(d.cwiseAbs().maxCoeff(), 1e-12));
        }();

        bool accepted = false;
        auto try_direction = [&](const VecX& dir) {
            for (int k = 0; k < 12 && !accepted; ++k) {
                const double try_rate = cfg.learning_rate * std::pow(0.5, k);
                const VecX candidate = params - try_rate * dir;
                HandPose right_try, left_try;
                HandSurface right_try_fk, left_try_fk;
                TtaEval e_try;
                try {
                    right_try = HandPose::from_params(out.right.chirality, candidate.head(HandPose::kParamCount));
                    left_try = HandPose::from_params(out.left.chirality, candidate.tail(HandPose::kParamCount));
                    right_try_fk = forward_kinematics(right_try, tmpl);
                    left_try_fk = forward_kinematics(left_try, tmpl);
                    e_try = evaluate_tta(right_try_fk, left_try_fk, object, targets, cfg, nullptr);
                } catch (const InvalidInput&) {
                    continue;
                }
                if (!std::isfinite(e_try.total(cfg)) || e_try.total(cfg) >= current) continue;
                params = candidate;
                out.right = std::move(right_try);
                out.left = std::move(left_try);
                right_fk = std::move(right_try_fk);
                left_fk = std::move(left_try_fk);
                current = e_try.total(cfg);
                out.energy_trace.push_back(current);
                accepted = true;
            }
        };

        // Backtracking with fallbacks; the rate doubles after accepted
        // steps. Against the contact wall (the penetration term's one-sided
        // slope is invisible to the subgradient) bundled directions can all
        // be rejected while single coordinates still descend, so the last
        // resort is a coordinate sweep over the largest gradient entries.
        for (const VecX* dir : {&dir_adam, &dir_grad, &dir_trans, &dir_joints}) {
            try_direction(*dir);
            if (accepted) break;
        }
        if (!accepted) {
            std::vector<Index> order(static_cast<std::size_t>(grad.size()));
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(),
                      [&](Index a, Index b) { return std::abs(grad[a]) > std::abs(grad[b]); });
            for (std::size_t c = 0; c < 12 && !accepted; ++c) {
                VecX e = VecX::Zero(grad.size());
                e[order[c]] = grad[order[c]] > 0 ? 1.0 : -1.0;
                try_direction(e);
                if (!accepted) try_direction(VecX(-e));
            }
        }
        if (!accepted) break;  // no descent along any probed direction
    }
    return out;
}

}  // namespace dhg
