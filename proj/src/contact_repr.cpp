#include "dhg/contact_repr.hpp"

#include "dhg/kdtree.hpp"

#include <cmath>

namespace dhg {

Eigen::MatrixXd HandContact::part_one_hot() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(part.size(), kNumHandParts + 1);
    for (Index i = 0; i < part.size(); ++i) out(i, part[i]) = 1.0;
    return out;
}

VecX contact_map(const ObjectModel& object, const HandSurface& hand, const ContactConfig& cfg) {
    if (hand.size() == 0) throw InvalidInput("contact_map: empty hand surface");
    const KdTree hand_tree(hand.vertices);
    const Points& pts = object.cloud().points;
    VecX c(pts.rows());
    for (Index i = 0; i < pts.rows(); ++i) {
        const double d = std::sqrt(hand_tree.nearest(pts.row(i).transpose()).sq_dist);
        // 1 - 2*(sigmoid(k d) - 1/2), written to stay accurate for large k d.
        c[i] = 2.0 / (1.0 + std::exp(cfg.sharpness * d));
    }
    return c;
}

Eigen::VectorXi part_map(const ObjectModel& object, const HandSurface& hand, const VecX& contact,
                         double threshold) {
    if (contact.size() != object.cloud().size())
        throw InvalidInput("part_map: contact length does not match object cloud");
    const KdTree hand_tree(hand.vertices);
    const Points& pts = object.cloud().points;
    Eigen::VectorXi part(pts.rows());
    for (Index i = 0; i < pts.rows(); ++i) {
        if (contact[i] >= threshold) {
            const Index nearest = hand_tree.nearest(pts.row(i).transpose()).index;
            part[i] = hand.part_of_vertex[nearest];
        } else {
            part[i] = kNumHandParts;  // no-contact class
        }
    }
    return part;
}

void affordance_directions(const ObjectModel& object, const VecX& contact,
                           const Eigen::VectorXi& part,
                           Eigen::Matrix<double, Eigen::Dynamic, 3>* directions,
                           Eigen::VectorXi* mask, Eigen::VectorXi* degenerate) {
    if (part.size() != object.cloud().size())
        throw InvalidInput("affordance_directions: part length does not match object cloud");
    (void)contact;
    const Vec3 center = object.center();
    directions->setZero(kNumHandParts, 3);
    mask->setZero(kNumHandParts);
    if (degenerate) degenerate->setZero(kNumHandParts);

    Eigen::Matrix<double, Eigen::Dynamic, 3> centroid =
        Eigen::Matrix<double, Eigen::Dynamic, 3>::Zero(kNumHandParts, 3);
    Eigen::VectorXi count = Eigen::VectorXi::Zero(kNumHandParts);
    const Points& pts = object.cloud().points;
    for (Index i = 0; i < part.size(); ++i) {
        if (part[i] >= kNumHandParts) continue;
        centroid.row(part[i]) += pts.row(i);
        ++count[part[i]];
    }
    for (int b = 0; b < kNumHandParts; ++b) {
        if (count[b] == 0) continue;
        (*mask)[b] = 1;
        const Vec3 dir = centroid.row(b).transpose() / count[b] - center;
        if (dir.norm() < 1e-9) {
            if (degenerate) (*degenerate)[b] = 1;
            continue;  // direction stays zero, mask stays 1
        }
        directions->row(b) = dir.normalized().transpose();
    }
}

HandContact compute_hand_contact(const ObjectModel& object, const HandSurface& hand,
                                 const ContactConfig& cfg) {
    HandContact out;
    out.contact = contact_map(object, hand, cfg);
    out.part = part_map(object, hand, out.contact, cfg.part_threshold);
    affordance_directions(object, out.contact, out.part, &out.directions, &out.mask,
                          &out.degenerate);
    return out;
}

ContactRepresentation compute_contact_representation(const ObjectModel& object,
                                                     const HandSurface& right,
                                                     const HandSurface& left,
                                                     const ContactConfig& cfg) {
    return ContactRepresentation{compute_hand_contact(object, right, cfg),
                                 compute_hand_contact(object, left, cfg)};
}

}  // namespace dhg
