#pragma once

// Procedural fixtures shared by the unit and acceptance suites: symmetric
// objects and synthetic penetration-free wrap grasps.

#include "dhg/geometry.hpp"
#include "dhg/hand_model.hpp"
#include "dhg/object_model.hpp"
#include "dhg/primitives.hpp"
#include "dhg/rng.hpp"

#include <numbers>
#include <string>
#include <vector>

namespace dhg::test {

inline TriMesh make_capsule_union_mesh(double radius, double half_span) {
    // Two perpendicular capsules crossing at the origin; watertight per
    // component, symmetric about all three axis planes.
    const TriMesh a = make_capsule(Vec3(-half_span, 0, 0), Vec3(half_span, 0, 0), radius);
    const TriMesh b = make_capsule(Vec3(0, -half_span, 0), Vec3(0, half_span, 0), radius);
    Points v(a.num_vertices() + b.num_vertices(), 3);
    v.topRows(a.num_vertices()) = a.vertices;
    v.bottomRows(b.num_vertices()) = b.vertices;
    Faces f(a.num_faces() + b.num_faces(), 3);
    f.topRows(a.num_faces()) = a.faces;
    f.bottomRows(b.num_faces()) = b.faces.array() + static_cast<int>(a.num_vertices());
    return TriMesh(std::move(v), std::move(f));
}

/// An object whose cloud is exactly mirror symmetric about the given axis:
/// half the samples unioned with their reflection. The mesh should itself be
/// symmetric (boxes, spheres, cylinders from primitives are).
inline ObjectModel symmetric_cloud_object(const std::string& id, const TriMesh& mesh, Axis axis,
                                          Index half_count = 1024, std::uint64_t seed = 7) {
    const PointCloud half = mesh.sample_surface(half_count, seed);
    const int k = static_cast<int>(axis);
    Points pts(2 * half.size(), 3);
    pts.topRows(half.size()) = half.points;
    Points mirrored = half.points;
    mirrored.col(k) = -mirrored.col(k);
    pts.bottomRows(half.size()) = mirrored;
    Points nrm(2 * half.size(), 3);
    nrm.topRows(half.size()) = *half.normals;
    Points mirrored_n = *half.normals;
    mirrored_n.col(k) = -mirrored_n.col(k);
    nrm.bottomRows(half.size()) = mirrored_n;
    return ObjectModel(id, mesh, PointCloud(std::move(pts), std::move(nrm)));
}

/// Ten symmetric fixture objects: spheres, boxes, cylinders, capsule unions.
inline std::vector<ObjectModel> fixture_objects() {
    std::vector<ObjectModel> objects;
    objects.emplace_back("sphere_050", make_icosphere(0.050, 3));
    objects.emplace_back("sphere_060", make_icosphere(0.060, 3));
    objects.emplace_back("sphere_070", make_icosphere(0.070, 3));
    objects.emplace_back("box_a", make_box(Vec3(0.040, 0.055, 0.070)));
    objects.emplace_back("box_b", make_box(Vec3(0.050, 0.050, 0.050)));
    objects.emplace_back("box_c", make_box(Vec3(0.035, 0.060, 0.045)));
    objects.emplace_back("cylinder_a", make_cylinder(0.040, 0.140, 48, 8));
    objects.emplace_back("cylinder_b", make_cylinder(0.055, 0.090, 48, 8));
    objects.emplace_back("capsules_a", make_capsule_union_mesh(0.030, 0.070));
    objects.emplace_back("capsules_b", make_capsule_union_mesh(0.038, 0.055));
    return objects;
}

/// A curled right-hand pose approaching the object along +direction (unit,
/// from the object center), slid inward until it nearly touches while
/// staying penetration free. `lateral` displaces the approach line so
/// several grasps on one object stay clear of each other.
inline HandPose make_wrap_grasp(const ObjectModel& object, const Vec3& direction,
                                double curl = 0.55, const Vec3& lateral = Vec3::Zero(),
                                const HandTemplate& tmpl = HandTemplate::standard()) {
    const Vec3 u = direction.normalized();
    // Hand frame: palm normal +z faces the object, fingers along +y.
    Vec3 ref = std::abs(u.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
    const Vec3 fingers = (ref - ref.dot(u) * u).normalized();
    Mat3 R;
    R.col(2) = -u;                      // palm normal
    R.col(1) = fingers;                 // finger direction
    R.col(0) = R.col(1).cross(R.col(2));

    HandPose pose;
    pose.chirality = Chirality::Right;
    pose.rot6d = matrix_to_rot6d(R);
    for (std::size_t j = 0; j < tmpl.joints.size(); ++j) {
        const auto& name = tmpl.joints[j].name;
        if (name.find("mcp_flex") != std::string::npos) pose.joints[static_cast<Index>(j)] = curl;
        if (name.find("pip") != std::string::npos) pose.joints[static_cast<Index>(j)] = curl;
        if (name.find("dip") != std::string::npos) pose.joints[static_cast<Index>(j)] = 0.7 * curl;
        if (name == "thumb_cmc_flex") pose.joints[static_cast<Index>(j)] = 0.6 * curl;
        if (name == "thumb_mcp_flex") pose.joints[static_cast<Index>(j)] = 0.6 * curl;
        if (name == "thumb_ip_flex") pose.joints[static_cast<Index>(j)] = 0.4 * curl;
        if (name == "thumb_cmc_abd") pose.joints[static_cast<Index>(j)] = -0.2;
        if (name == "little_cmc_flex") pose.joints[static_cast<Index>(j)] = 0.2 * curl;
    }

    // Palm center sits near local (0, 0.05, 0): pull the wrist back along
    // the finger axis so the palm, not the wrist, faces the object center.
    // Then slide inward along u while penetration free (coarse pass, then a
    // fine pass around the contact offset).
    const Vec3 palm_shift = -0.05 * fingers;
    auto probe = [&](double offset, double* min_dist) {
        pose.translation = lateral + palm_shift + u * offset;
        const HandSurface fk = forward_kinematics(pose, tmpl);
        *min_dist = 1e9;
        for (Index v = 0; v < fk.size(); ++v) {
            const Vec3 p = fk.vertices.row(v).transpose();
            const InsideQuery q = inside_and_distance(p, object.mesh(), object.surface_index());
            if (q.inside) return true;
            *min_dist = std::min(*min_dist, q.distance);
        }
        return false;
    };
    const double start = object.max_radius() + 0.16;
    double coarse = start;
    for (double offset = start; offset > 0.01; offset -= 0.005) {
        double min_dist = 1e9;
        if (probe(offset, &min_dist)) break;
        coarse = offset;
        if (min_dist < 4.0e-3) break;
    }
    double best_offset = coarse;
    for (double offset = coarse; offset > coarse - 0.006; offset -= 0.001) {
        double min_dist = 1e9;
        if (probe(offset, &min_dist)) break;
        best_offset = offset;
        if (min_dist < 2.0e-3) break;
    }
    // Back off one step so every vertex keeps a positive clearance.
    pose.translation = lateral + palm_shift + u * (best_offset + 1e-3);
    return pose;
}

/// Curls each finger onto the surface: per finger, the largest extra
/// flexion (searched in small steps) that keeps every vertex of that finger
/// outside the mesh. Leaves fingertip pads within a few millimeters of the
/// object for near-contact fixtures.
inline HandPose close_fingers(const ObjectModel& object, HandPose pose,
                              const HandTemplate& tmpl = HandTemplate::standard()) {
    // Flexion DoF indices per finger part, with curl factors.
    std::vector<std::vector<std::pair<int, double>>> flexors(kNumHandParts);
    for (std::size_t j = 0; j < tmpl.joints.size(); ++j) {
        const auto& name = tmpl.joints[j];
        HandPart part = HandPart::Palm;
        if (name.name.rfind("thumb", 0) == 0) part = HandPart::Thumb;
        else if (name.name.rfind("index", 0) == 0) part = HandPart::Index;
        else if (name.name.rfind("middle", 0) == 0) part = HandPart::Middle;
        else if (name.name.rfind("ring", 0) == 0) part = HandPart::Ring;
        else if (name.name.rfind("little", 0) == 0) part = HandPart::Little;
        else continue;
        double factor = 0.0;
        if (name.name.find("mcp_flex") != std::string::npos) factor = 1.0;
        if (name.name.find("pip") != std::string::npos) factor = 1.0;
        if (name.name.find("dip") != std::string::npos) factor = 0.7;
        if (name.name.find("cmc_flex") != std::string::npos) factor = 0.5;
        if (name.name.find("ip_flex") != std::string::npos) factor = 0.7;
        if (factor > 0.0)
            flexors[static_cast<int>(part)].emplace_back(static_cast<int>(j), factor);
    }

    auto penetrates = [&](const HandPose& trial, int part) {
        const HandSurface fk = forward_kinematics(trial, tmpl);
        for (Index v = 0; v < fk.size(); ++v) {
            if (fk.part_of_vertex[v] != part) continue;
            const Vec3 pt = fk.vertices.row(v).transpose();
            if (inside_and_distance(pt, object.mesh(), object.surface_index()).inside) return true;
        }
        return false;
    };
    auto curl_until_contact = [&](HandPose p, int part,
                                  const std::vector<std::pair<int, double>>& joints) {
        auto with_delta = [&](double delta) {
            HandPose trial = p;
            for (const auto& [j, factor] : joints) {
                const auto& spec = tmpl.joints[static_cast<std::size_t>(j)];
                trial.joints[j] = std::min(spec.upper, trial.joints[j] + factor * delta);
            }
            return trial;
        };
        double coarse = 0.0;
        for (double delta = 0.0; delta <= 1.2; delta += 0.1) {
            if (penetrates(with_delta(delta), part)) break;
            coarse = delta;
        }
        double best_delta = coarse;
        for (double delta = coarse; delta <= coarse + 0.1; delta += 0.02) {
            if (penetrates(with_delta(delta), part)) break;
            best_delta = delta;
        }
        return with_delta(best_delta);
    };

    for (int part = 0; part < 5; ++part) {
        // Whole finger, then distal joints only, so the pad reaches the
        // surface even when a proximal segment touches first.
        pose = curl_until_contact(pose, part, flexors[part]);
        std::vector<std::pair<int, double>> distal;
        for (const auto& [j, factor] : flexors[part]) {
            const auto& name = tmpl.joints[static_cast<std::size_t>(j)].name;
            if (name.find("pip") != std::string::npos || name.find("dip") != std::string::npos ||
                name.find("ip_flex") != std::string::npos)
                distal.emplace_back(j, factor);
        }
        pose = curl_until_contact(pose, part, distal);
        std::vector<std::pair<int, double>> tip_only;
        for (const auto& [j, factor] : distal) {
            const auto& name = tmpl.joints[static_cast<std::size_t>(j)].name;
            if (name.find("dip") != std::string::npos || name.find("ip_flex") != std::string::npos)
                tip_only.emplace_back(j, 1.0);
        }
        pose = curl_until_contact(pose, part, tip_only);
    }
    return pose;
}

/// Equatorial approach directions for placing several grasps per object.
inline std::vector<Vec3> approach_directions(int count, double tilt = 0.0) {
    std::vector<Vec3> dirs;
    for (int k = 0; k < count; ++k) {
        const double a = 2.0 * std::numbers::pi * k / count;
        dirs.push_back(Vec3(std::cos(a), std::sin(a), tilt).normalized());
    }
    return dirs;
}

}  // namespace dhg::test
