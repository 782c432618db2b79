#pragma once

#include "dhg/hand_model.hpp"
#include "dhg/object_model.hpp"
#include "dhg/symopt.hpp"
#include "dhg/types.hpp"

#include <optional>

namespace dhg {

struct LossConfig {
    double lambda_w = 4.0;     // contact-region weighting
    double lambda_ori = 1.0;
    double lambda_pose = 1.0;
    double lambda_vertices = 10.0;
    double lambda_mask = 1.0;  // mask branch of the two-branch diffusion loss
    double lambda_con = 1.0;
    double lambda_part = 1.0;
    double lambda_hand = 1.0;
    double lambda_pen = 1.0;

    void validate() const;
};

/// Translations scaled by the object diameter: tau' = tau / d. Exactly
/// invertible as tau = tau' * d.
struct ScaledTranslation {
    Vec3 scaled = Vec3::Zero();
    double diameter = 0.0;

    static ScaledTranslation from_raw(const Vec3& tau, double diameter);
    Vec3 raw() const { return scaled * diameter; }
};

/// Weighted contact regression: sum_i |w_i (c_i - c_hat_i)| with
/// w_i = 1 + lambda_w * c_i taken from the ground truth (L1 norm).
double loss_contact(const VecX& truth, const VecX& pred, double lambda_w,
                    VecX* d_pred = nullptr);

/// Mean cross-entropy of predicted part probabilities against one-hot rows.
/// Rows of `pred` must sum to 1 within 1e-6.
double loss_part(const Eigen::MatrixXd& truth_one_hot, const Eigen::MatrixXd& pred,
                 Eigen::MatrixXd* d_pred = nullptr);

/// Geodesic rotation distance after 6D -> matrix conversion, with the
/// arccos argument clamped to keep the gradient finite.
double geodesic_loss(const Mat3& a, const Mat3& b);

/// One hand's parameters inside the reconstruction loss. The surface loss
/// term runs FK; `diameter` unscales tau' for it.
struct HandLossInput {
    ScaledTranslation translation;
    Vec6 rot6d;
    VecX joints = VecX::Zero(kNumJointDof);
    Chirality chirality = Chirality::Right;

    HandPose to_pose() const;
    static HandLossInput from_pose(const HandPose& pose, double diameter);

    VecX to_params() const;  // [tau'(3), rot6d(6), joints(22)]
    static HandLossInput from_params(Chirality chi, double diameter, const VecX& params);
};

/// Two-hand reconstruction loss, Sum over both hands of
/// ||tau' - tau'_hat|| + l_ori * geodesic + l_pose * ||theta - theta_hat||_2
/// + l_vertices * ||V - V_hat||_2 (Frobenius over FK surfaces).
/// Gradients are w.r.t. the predicted side, in HandLossInput parameters.
double loss_hand(const HandLossInput& truth_right, const HandLossInput& truth_left,
                 const HandLossInput& pred_right, const HandLossInput& pred_left,
                 const LossConfig& cfg, const HandTemplate& tmpl = HandTemplate::standard(),
                 VecX* d_pred_right = nullptr, VecX* d_pred_left = nullptr);

/// Penetration loss: hand-object term for both hands plus the left-in-right
/// hand term. Matches energy_pho + energy_phh on shared inputs.
double loss_pen(const HandSurface& right, const HandSurface& left, const ObjectModel& object,
                PoseGrad* d_right = nullptr, PoseGrad* d_left = nullptr);

/// Two-branch diffusion loss: ||e_dir - e_dir_hat||_2^2 +
/// lambda_mask * ||e_mask - e_mask_hat||_2^2.
double loss_ddpm(const Eigen::MatrixXd& eps_dir, const Eigen::MatrixXd& eps_dir_pred,
                 const VecX& eps_mask, const VecX& eps_mask_pred, double lambda_mask,
                 Eigen::MatrixXd* d_dir_pred = nullptr, VecX* d_mask_pred = nullptr);

}  // namespace dhg
