#include "dhg/losses.hpp"

#include "dhg/geometry.hpp"

#include <cmath>

namespace dhg {

void LossConfig::validate() const {
    for (double v : {lambda_w, lambda_ori, lambda_pose, lambda_vertices, lambda_mask, lambda_con,
                     lambda_part, lambda_hand, lambda_pen})
        if (v < 0.0) throw InvalidInput("loss config: negative weight");
}

ScaledTranslation ScaledTranslation::from_raw(const Vec3& tau, double diameter) {
    if (diameter <= 0.0) throw InvalidInput("scaled translation: diameter must be positive");
    return ScaledTranslation{tau / diameter, diameter};
}

double loss_contact(const VecX& truth, const VecX& pred, double lambda_w, VecX* d_pred) {
    if (truth.size() != pred.size()) throw InvalidInput("loss_contact: length mismatch");
    if (lambda_w < 0.0) throw InvalidInput("loss_contact: negative weight");
    double loss = 0.0;
    if (d_pred) d_pred->setZero(pred.size());
    for (Index i = 0; i < truth.size(); ++i) {
        const double w = 1.0 + lambda_w * truth[i];
        const double r = truth[i] - pred[i];
        loss += std::abs(w * r);
        if (d_pred) (*d_pred)[i] = -w * (r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0));
    }
    return loss;
}

double loss_part(const Eigen::MatrixXd& truth_one_hot, const Eigen::MatrixXd& pred,
                 Eigen::MatrixXd* d_pred) {
    if (truth_one_hot.rows() != pred.rows() || truth_one_hot.cols() != pred.cols())
        throw InvalidInput("loss_part: shape mismatch");
    if (truth_one_hot.rows() == 0) throw InvalidInput("loss_part: empty input");
    const Index n = pred.rows();
    double loss = 0.0;
    if (d_pred) d_pred->setZero(pred.rows(), pred.cols());
    for (Index i = 0; i < n; ++i) {
        if (std::abs(pred.row(i).sum() - 1.0) > 1e-6)
            throw InvalidInput("loss_part: prediction row " + std::to_string(i) +
                               " is not a probability vector");
        Index cls = -1;
        for (Index c = 0; c < truth_one_hot.cols(); ++c) {
            const double v = truth_one_hot(i, c);
            if (v == 1.0 && cls < 0) cls = c;
            else if (v != 0.0 && !(v == 1.0 && cls == c))
                throw InvalidInput("loss_part: truth row " + std::to_string(i) + " is not one-hot");
        }
        if (cls < 0) throw InvalidInput("loss_part: truth row " + std::to_string(i) + " has no class");
        const double p = std::max(pred(i, cls), 1e-300);
        loss -= std::log(p);
        if (d_pred) (*d_pred)(i, cls) = -1.0 / (p * static_cast<double>(n));
    }
    return loss / static_cast<double>(n);
}

namespace {
// Gradient guard band: inside it the arccos derivative is treated as zero so
// coincident and opposite rotations stay finite; the value itself clamps to
// the full [-1+eps, 1] range so L(R, R) is exactly zero.
constexpr double kAcosClamp = 1e-7;
}

double geodesic_loss(const Mat3& a, const Mat3& b) {
    const double u = ((a.transpose() * b).trace() - 1.0) / 2.0;
    return std::acos(std::clamp(u, -1.0 + kAcosClamp, 1.0));
}

HandPose HandLossInput::to_pose() const {
    HandPose p;
    p.chirality = chirality;
    p.translation = translation.raw();
    p.rot6d = rot6d;
    p.joints = joints;
    return p;
}

HandLossInput HandLossInput::from_pose(const HandPose& pose, double diameter) {
    HandLossInput in;
    in.chirality = pose.chirality;
    in.translation = ScaledTranslation::from_raw(pose.translation, diameter);
    in.rot6d = pose.rot6d;
    in.joints = pose.joints;
    return in;
}

VecX HandLossInput::to_params() const {
    VecX p(HandPose::kParamCount);
    p.head<3>() = translation.scaled;
    p.segment<6>(3) = rot6d;
    p.tail(kNumJointDof) = joints;
    return p;
}

HandLossInput HandLossInput::from_params(Chirality chi, double diameter, const VecX& params) {
    if (params.size() != HandPose::kParamCount) throw InvalidInput("hand loss params: wrong length");
    HandLossInput in;
    in.chirality = chi;
    in.translation = ScaledTranslation{params.head<3>(), diameter};
    in.rot6d = params.segment<6>(3);
    in.joints = params.tail(kNumJointDof);
    return in;
}

namespace {

// One hand's share of the reconstruction loss; gradient w.r.t. the
// prediction's [tau', rot6d, theta] parameters.
double hand_loss_single(const HandLossInput& truth, const HandLossInput& pred,
                        const LossConfig& cfg, const HandTemplate& tmpl, VecX* grad) {
    if (grad) grad->setZero(HandPose::kParamCount);

    double loss = 0.0;

    const Vec3 dt = pred.translation.scaled - truth.translation.scaled;
    const double nt = dt.norm();
    loss += nt;
    if (grad && nt > 1e-15) grad->head<3>() = dt / nt;

    const Mat3 r_truth = rot6d_to_matrix(truth.rot6d);
    const Mat3 r_pred = rot6d_to_matrix(pred.rot6d);
    const double u_raw = ((r_truth.transpose() * r_pred).trace() - 1.0) / 2.0;
    loss += cfg.lambda_ori * std::acos(std::clamp(u_raw, -1.0 + kAcosClamp, 1.0));
    if (grad && u_raw > -1.0 + kAcosClamp && u_raw < 1.0 - kAcosClamp) {
        const double dacos = -1.0 / std::sqrt(1.0 - u_raw * u_raw);
        const Mat3 dL_dR = cfg.lambda_ori * dacos * 0.5 * r_truth;
        grad->segment<6>(3) += rot6d_backward(pred.rot6d, dL_dR);
    }

    const VecX dj = pred.joints - truth.joints;
    const double nj = dj.norm();
    loss += cfg.lambda_pose * nj;
    if (grad && nj > 1e-15) grad->tail(kNumJointDof) = cfg.lambda_pose * dj / nj;

    const HandSurface truth_fk = forward_kinematics(truth.to_pose(), tmpl);
    const HandSurface pred_fk = forward_kinematics(pred.to_pose(), tmpl);
    const double nv = (truth_fk.vertices - pred_fk.vertices).norm();
    loss += cfg.lambda_vertices * nv;
    if (grad && nv > 1e-15) {
        const Points dL_dv = cfg.lambda_vertices * (pred_fk.vertices - truth_fk.vertices) / nv;
        const PoseGrad pg = fk_vertex_gradient(pred_fk, dL_dv);
        // FK consumed raw tau; the loss parameter is tau' = tau / diameter.
        grad->head<3>() += pg.d_translation * pred.translation.diameter;
        grad->segment<6>(3) += pg.d_rot6d;
        grad->tail(kNumJointDof) += pg.d_joints;
    }
    return loss;
}

}  // namespace

double loss_hand(const HandLossInput& truth_right, const HandLossInput& truth_left,
                 const HandLossInput& pred_right, const HandLossInput& pred_left,
                 const LossConfig& cfg, const HandTemplate& tmpl, VecX* d_pred_right,
                 VecX* d_pred_left) {
    cfg.validate();
    return hand_loss_single(truth_right, pred_right, cfg, tmpl, d_pred_right) +
           hand_loss_single(truth_left, pred_left, cfg, tmpl, d_pred_left);
}

double loss_pen(const HandSurface& right, const HandSurface& left, const ObjectModel& object,
                PoseGrad* d_right, PoseGrad* d_left) {
    double loss = 0.0;
    Points d_right_v, d_left_v, d_right_e;
    if (d_right) {
        d_right_v = Points::Zero(right.vertices.rows(), 3);
        d_right_e = Points::Zero(2 * static_cast<Index>(right.solid.size()), 3);
    }
    if (d_left) d_left_v = Points::Zero(left.vertices.rows(), 3);

    // Hand-object penetration, both hands.
    const Vec3 lo = object.mesh().bbox_min();
    const Vec3 hi = object.mesh().bbox_max();
    auto object_term = [&](const HandSurface& hand, Points* dv) {
        for (Index v = 0; v < hand.vertices.rows(); ++v) {
            const Vec3 p = hand.vertices.row(v).transpose();
            if ((p.array() < lo.array()).any() || (p.array() > hi.array()).any()) continue;
            const InsideQuery q = inside_and_distance(p, object.mesh(), object.surface_index());
            if (!q.inside) continue;
            loss += q.distance;
            if (dv && q.distance > 1e-12)
                dv->row(v) += ((p - q.closest) / q.distance).transpose();
        }
    };
    object_term(right, d_right ? &d_right_v : nullptr);
    object_term(left, d_left ? &d_left_v : nullptr);

    // Left hand into the right hand.
    if (!right.has_solid()) throw InvalidInput("loss_pen: right surface carries no capsule solid");
    for (Index v = 0; v < left.vertices.rows(); ++v) {
        const Vec3 p = left.vertices.row(v).transpose();
        const SolidDepth sd = solid_depth(p, right.solid);
        if (sd.depth <= 0.0) continue;
        loss += sd.depth;
        if (!d_right && !d_left) continue;
        const Capsule& c = right.solid[static_cast<std::size_t>(sd.capsule)];
        const Vec3 q = c.a + sd.axis_t * (c.b - c.a);
        const Vec3 diff = p - q;
        const double dist = diff.norm();
        if (dist < 1e-12) continue;
        const Vec3 dir = diff / dist;
        if (d_left) d_left_v.row(v) += (-dir).transpose();
        if (d_right) {
            d_right_e.row(2 * sd.capsule) += (dir * (1.0 - sd.axis_t)).transpose();
            d_right_e.row(2 * sd.capsule + 1) += (dir * sd.axis_t).transpose();
        }
    }

    if (d_right) {
        *d_right = fk_vertex_gradient(right, d_right_v);
        *d_right += fk_endpoint_gradient(right, d_right_e);
    }
    if (d_left) *d_left = fk_vertex_gradient(left, d_left_v);
    return loss;
}

double loss_ddpm(const Eigen::MatrixXd& eps_dir, const Eigen::MatrixXd& eps_dir_pred,
                 const VecX& eps_mask, const VecX& eps_mask_pred, double lambda_mask,
                 Eigen::MatrixXd* d_dir_pred, VecX* d_mask_pred) {
    if (eps_dir.rows() != eps_dir_pred.rows() || eps_dir.cols() != eps_dir_pred.cols())
        throw InvalidInput("loss_ddpm: direction shape mismatch");
    if (eps_mask.size() != eps_mask_pred.size()) throw InvalidInput("loss_ddpm: mask shape mismatch");
    if (lambda_mask < 0.0) throw InvalidInput("loss_ddpm: negative weight");
    const double dir_term = (eps_dir - eps_dir_pred).squaredNorm();
    const double mask_term = (eps_mask - eps_mask_pred).squaredNorm();
    if (d_dir_pred) *d_dir_pred = 2.0 * (eps_dir_pred - eps_dir);
    if (d_mask_pred) *d_mask_pred = 2.0 * lambda_mask * (eps_mask_pred - eps_mask);
    return dir_term + lambda_mask * mask_term;
}

}  // namespace dhg
