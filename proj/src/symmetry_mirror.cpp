#include "dhg/symmetry_mirror.hpp"

#include "dhg/geometry.hpp"
#include "dhg/rng.hpp"

#include <nlohmann/json.hpp>

namespace dhg {

using nlohmann::json;

std::string SymmetryReport::to_json() const {
    json j;
    j["axis"] = axis_name(chosen_axis);
    j["chamfer"] = {chamfer.x(), chamfer.y(), chamfer.z()};
    j["centroid"] = {centroid.x(), centroid.y(), centroid.z()};
    return j.dump();
}

SymmetryReport SymmetryReport::from_json(const std::string& text) {
    SymmetryReport r;
    try {
        const json j = json::parse(text);
        const std::string axis = j.at("axis").get<std::string>();
        if (axis == "x") r.chosen_axis = Axis::X;
        else if (axis == "y") r.chosen_axis = Axis::Y;
        else if (axis == "z") r.chosen_axis = Axis::Z;
        else throw InvalidInput("symmetry report: bad axis '" + axis + "'");
        for (int k = 0; k < 3; ++k) {
            r.chamfer[k] = j.at("chamfer")[static_cast<std::size_t>(k)].get<double>();
            r.centroid[k] = j.at("centroid")[static_cast<std::size_t>(k)].get<double>();
        }
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("symmetry report json: ") + e.what());
    }
    return r;
}

SymmetryReport detect_symmetry_plane(const PointCloud& cloud) {
    if (cloud.empty()) throw InvalidInput("detect_symmetry_plane: empty cloud");
    SymmetryReport report;
    report.centroid = cloud.centroid();
    PointCloud centered = cloud;
    centered.translate(-report.centroid);
    for (int k = 0; k < 3; ++k)
        report.chamfer[k] = chamfer_distance(centered, reflect_points(centered, static_cast<Axis>(k)));
    int best = 0;
    for (int k = 1; k < 3; ++k)
        if (report.chamfer[k] < report.chamfer[best]) best = k;
    report.chosen_axis = static_cast<Axis>(best);
    return report;
}

SymmetryReport detect_symmetry_plane(const ObjectModel& object) {
    return detect_symmetry_plane(object.cloud());
}

HandPose mirror_grasp(const HandPose& right, const SymmetryReport& report) {
    return mirror_pose(right, report.chosen_axis);
}

std::vector<DualGrasp> pair_proposals(const std::vector<HandPose>& rights,
                                      const std::vector<HandPose>& lefts, int max_pairs,
                                      std::uint64_t seed, double discard_depth,
                                      const HandTemplate& tmpl) {
    if (rights.empty() || lefts.empty()) throw InvalidInput("pair_proposals: empty pose list");
    if (max_pairs < 1) throw InvalidInput("pair_proposals: max_pairs must be positive");

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(rights.size() * lefts.size());
    for (std::size_t i = 0; i < rights.size(); ++i)
        for (std::size_t j = 0; j < lefts.size(); ++j) pairs.emplace_back(i, j);

    if (pairs.size() > static_cast<std::size_t>(max_pairs)) {
        Rng rng(seed);
        seeded_shuffle(pairs, rng);
        pairs.resize(static_cast<std::size_t>(max_pairs));
    }

    std::vector<HandSurface> right_fk(rights.size()), left_fk(lefts.size());
    std::vector<char> have_r(rights.size(), 0), have_l(lefts.size(), 0);

    std::vector<DualGrasp> out;
    out.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
        if (!have_r[i]) {
            right_fk[i] = forward_kinematics(rights[i], tmpl);
            have_r[i] = 1;
        }
        if (!have_l[j]) {
            left_fk[j] = forward_kinematics(lefts[j], tmpl);
            have_l[j] = 1;
        }
        const double depth = hand_hand_penetration_depth(left_fk[j], right_fk[i]);
        if (depth > discard_depth) continue;
        DualGrasp g;
        g.right = rights[i];
        g.left = lefts[j];
        g.status = GraspStatus::Proposal;
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace dhg
