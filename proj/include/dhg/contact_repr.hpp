#pragma once

#include "dhg/hand_model.hpp"
#include "dhg/object_model.hpp"
#include "dhg/types.hpp"

#include <optional>

namespace dhg {

struct ContactConfig {
    double sharpness = 150.0;   // k, 1/m
    double part_threshold = 0.4;
};

/// The per-hand contact fields of the dual-hand representation:
/// contact map C (N values in [0,1]), part map P (N one-hot rows over the
/// six hand parts plus a no-contact class), affordance directions D (one
/// unit-or-zero 3-vector per part), and contact mask M. D rows are zero
/// exactly where M is zero.
struct HandContact {
    VecX contact;                      // N
    Eigen::VectorXi part;              // N, values in [0, kNumHandParts]
    Eigen::Matrix<double, Eigen::Dynamic, 3> directions;  // B x 3
    Eigen::VectorXi mask;              // B, 0/1
    Eigen::VectorXi degenerate;        // B, 1 where the centroid hit the center

    Eigen::MatrixXd part_one_hot() const;  // N x (B+1)
};

struct ContactRepresentation {
    HandContact right;
    HandContact left;
};

/// Proximity contact per object point: c = 1 - 2*(sigmoid(k*d) - 0.5), where
/// d is the distance to the nearest hand vertex.
VecX contact_map(const ObjectModel& object, const HandSurface& hand,
                 const ContactConfig& cfg = {});

/// Points with contact >= threshold take the part id of their nearest hand
/// vertex; the rest get the no-contact class (index B = 6).
Eigen::VectorXi part_map(const ObjectModel& object, const HandSurface& hand, const VecX& contact,
                         double threshold);

/// Unit vectors from the object cloud center to the per-part contact
/// centroids; zero with mask 0 for parts without contacted points. A
/// centroid within 1e-9 of the center keeps mask 1, direction zero, and is
/// flagged degenerate.
void affordance_directions(const ObjectModel& object, const VecX& contact,
                           const Eigen::VectorXi& part,
                           Eigen::Matrix<double, Eigen::Dynamic, 3>* directions,
                           Eigen::VectorXi* mask, Eigen::VectorXi* degenerate = nullptr);

HandContact compute_hand_contact(const ObjectModel& object, const HandSurface& hand,
                                 const ContactConfig& cfg = {});

ContactRepresentation compute_contact_representation(const ObjectModel& object,
                                                     const HandSurface& right,
                                                     const HandSurface& left,
                                                     const ContactConfig& cfg = {});

}  // namespace dhg
