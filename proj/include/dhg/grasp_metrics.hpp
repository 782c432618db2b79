#pragma once

#include "dhg/contact_repr.hpp"
#include "dhg/ddpm.hpp"
#include "dhg/hand_model.hpp"
#include "dhg/object_model.hpp"
#include "dhg/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dhg {

struct Q1Config {
    double friction = 1.0;      // Coulomb mu
    int cone_edges = 8;         // discretization m
    double torque_scale = 1.0;  // multiplies p x f; use 1 / object max radius
};

struct ContactPoint {
    Vec3 position;
    Vec3 inward_normal;  // unit, pointing into the object
};

/// Ferrari-Canny epsilon quality: the radius of the largest origin-centered
/// ball inside the convex hull of the discretized contact wrenches
/// (f, torque_scale * p x f), measured in the wrench span. Returns 0 when
/// force closure is impossible (fewer than four wrenches of affine dimension
/// three, or origin not strictly interior).
double q1_quality(const std::vector<ContactPoint>& contacts, const Q1Config& cfg = {});

/// Contact extraction for Q1: object points with contact >= threshold,
/// farthest-point downsampled to at most max_contacts; inward normals are
/// the negated cloud normals.
std::vector<ContactPoint> extract_q1_contacts(const ObjectModel& object, const VecX& contact_map,
                                              double threshold = 0.4, int max_contacts = 64);

/// Max penetration depth of hand vertices into the object, in centimeters.
double penetration_depth(const HandSurface& hand, const ObjectModel& object);

/// Hand-hand intersection volume by voxelizing the union bounding box, in
/// cubic centimeters. Both surfaces must carry their capsule solids.
double penetration_volume(const HandSurface& right, const HandSurface& left,
                          double voxel_size = 2e-3);

/// Mean over unordered grasp pairs of the mean per-vertex distance, in
/// centimeters. All surfaces must share one vertex layout.
double diversity_sigma(const std::vector<const HandSurface*>& grasps);

struct SigmaGrouped {
    double sigma_cm = 0.0;
    int groups_used = 0;
    int groups_skipped = 0;  // fewer than two grasps
};

/// Within-group diversity averaged across groups; each grasp contributes the
/// concatenated right+left vertex set.
SigmaGrouped diversity_sigma_by_type(
    const std::vector<std::pair<const HandSurface*, const HandSurface*>>& grasps,
    const std::vector<std::string>& group_of_grasp);

struct MetricsReport {
    double q1_right = 0.0, q1_left = 0.0, q1_total = 0.0;
    double pen_ro_cm = 0.0, pen_lo_cm = 0.0;
    double pen_rl_vol_cm3 = 0.0;
    double sigma_r_cm = 0.0, sigma_l_cm = 0.0, sigma_ta_cm = 0.0;
    int grasp_count = 0;

    std::string to_json() const;
    /// Fixed-width table matching the reported column layout.
    std::string render_table() const;
};

struct SemanticVerdict {
    bool dir_single = false;
    bool dir_double = false;
    bool grasp_single = false;
    bool grasp_double = false;
};

/// Object part labels aligned with the sampled cloud, exactly two distinct
/// part names (the smaller and the larger part by point count).
struct ObjectParts {
    std::vector<std::string> part_of_point;

    std::string smaller_part() const;
    std::string larger_part() const;
    void validate(Index cloud_size) const;
};

/// "right <category> <part>, left <category> <part>".
struct ParsedInstruction {
    std::string category;
    std::string right_part;
    std::string left_part;
};
ParsedInstruction parse_affordance_text(const std::string& text);

/// Per-hand decision rule: a hand targeting the smaller part needs at least
/// two fingers on it; a hand targeting the larger part needs the thumb plus
/// one other finger on it. Directions mode reads finger rays cast from the
/// object center; grasp mode reads per-finger contacted object points.
/// single = either hand passes, double = both.
SemanticVerdict semantic_check(const ObjectModel& object, const ObjectParts& parts,
                               const std::string& text,
                               const AffordanceState* directions = nullptr,
                               const ContactRepresentation* grasp_contacts = nullptr);

}  // namespace dhg
