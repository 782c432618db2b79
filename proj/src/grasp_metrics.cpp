#include "dhg/grasp_metrics.hpp"

#include "dhg/geometry.hpp"
#include "dhg/wrench_hull.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace dhg {

using nlohmann::json;

namespace {

// Data-derived tangent frame so the discretized cones rotate with the
// contacts. Falls back to the global axis least aligned with the normal
// when the centroid direction is parallel to it.
Vec3 tangent_seed(const Vec3& p, const Vec3& n, const Vec3& centroid) {
    Vec3 seed = centroid - p;
    seed -= seed.dot(n) * n;
    if (seed.norm() > 1e-8) return seed.normalized();
    int axis = 0;
    Vec3 dots(std::abs(n.x()), std::abs(n.y()), std::abs(n.z()));
    dots.minCoeff(&axis);
    Vec3 e = Vec3::Zero();
    e[axis] = 1.0;
    e -= e.dot(n) * n;
    return e.normalized();
}

}  // namespace

double q1_quality(const std::vector<ContactPoint>& contacts, const Q1Config& cfg) {
    if (contacts.empty()) throw InvalidInput("q1_quality: no contacts");
    if (cfg.cone_edges < 3) throw InvalidInput("q1_quality: need at least 3 cone edges");
    if (cfg.friction < 0.0) throw InvalidInput("q1_quality: negative friction");

    Vec3 centroid = Vec3::Zero();
    for (const auto& c : contacts) centroid += c.position;
    centroid /= static_cast<double>(contacts.size());

    const int m = cfg.cone_edges;
    Eigen::MatrixXd wrenches(static_cast<Index>(contacts.size()) * m, 6);
    Index row = 0;
    for (const auto& c : contacts) {
        const Vec3 n = c.inward_normal;
        if (std::abs(n.norm() - 1.0) > 1e-6)
            throw InvalidInput("q1_quality: contact normals must be unit");
        const Vec3 t1 = tangent_seed(c.position, n, centroid);
        const Vec3 t2 = n.cross(t1);
        for (int j = 0; j < m; ++j) {
            const double a = 2.0 * std::numbers::pi * j / m;
            const Vec3 f = (n + cfg.friction * (std::cos(a) * t1 + std::sin(a) * t2)).normalized();
            wrenches.row(row).head<3>() = f.transpose();
            wrenches.row(row).tail<3>() = (cfg.torque_scale * c.position.cross(f)).transpose();
            ++row;
        }
    }

    // No closure is possible below affine dimension three of the wrench set.
    if (wrenches.rows() < 4) return 0.0;
    Eigen::MatrixXd centered = wrenches.rowwise() - wrenches.colwise().mean();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
    int affine_dim = 0;
    const double top = svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
    for (Index k = 0; k < svd.singularValues().size(); ++k)
        if (svd.singularValues()[k] > 1e-9 * std::max(top, 1.0)) ++affine_dim;
    if (affine_dim < 3) return 0.0;

    return inscribed_radius(wrenches);
}

std::vector<ContactPoint> extract_q1_contacts(const ObjectModel& object, const VecX& contact_map,
                                              double threshold, int max_contacts) {
    if (contact_map.size() != object.cloud().size())
        throw InvalidInput("extract_q1_contacts: contact map length mismatch");
    if (!object.cloud().normals)
        throw InvalidInput("extract_q1_contacts: object cloud carries no normals");
    std::vector<Index> selected;
    for (Index i = 0; i < contact_map.size(); ++i)
        if (contact_map[i] >= threshold) selected.push_back(i);

    // Farthest-point downsampling keeps the contact patch geometry spread.
    if (static_cast<int>(selected.size()) > max_contacts) {
        std::vector<Index> keep;
        keep.push_back(selected.front());
        std::vector<double> dist(selected.size(), std::numeric_limits<double>::infinity());
        while (static_cast<int>(keep.size()) < max_contacts) {
            const Vec3 last = object.cloud().points.row(keep.back()).transpose();
            Index farthest = 0;
            double best = -1.0;
            for (std::size_t k = 0; k < selected.size(); ++k) {
                const double d =
                    (object.cloud().points.row(selected[k]).transpose() - last).squaredNorm();
                dist[k] = std::min(dist[k], d);
                if (dist[k] > best) {
                    best = dist[k];
                    farthest = selected[k];
                }
            }
            if (best <= 0.0) break;
            keep.push_back(farthest);
        }
        selected = std::move(keep);
    }

    std::vector<ContactPoint> contacts;
    contacts.reserve(selected.size());
    for (Index i : selected)
        contacts.push_back(ContactPoint{object.cloud().points.row(i).transpose(),
                                        -object.cloud().normals->row(i).transpose()});
    return contacts;
}

double penetration_depth(const HandSurface& hand, const ObjectModel& object) {
    const Vec3 lo = object.mesh().bbox_min();
    const Vec3 hi = object.mesh().bbox_max();
    double depth_m = 0.0;
    for (Index v = 0; v < hand.vertices.rows(); ++v) {
        const Vec3 p = hand.vertices.row(v).transpose();
        if ((p.array() < lo.array()).any() || (p.array() > hi.array()).any()) continue;
        const InsideQuery q = inside_and_distance(p, object.mesh(), object.surface_index());
        if (q.inside) depth_m = std::max(depth_m, q.distance);
    }
    return depth_m * 100.0;
}

double penetration_volume(const HandSurface& right, const HandSurface& left, double voxel_size) {
    if (!right.has_solid() || !left.has_solid())
        throw InvalidInput("penetration_volume: both hands must carry capsule solids");
    if (voxel_size <= 0.0) throw InvalidInput("penetration_volume: voxel size must be positive");

    auto solid_box = [](const std::vector<Capsule>& solid, Vec3* lo, Vec3* hi) {
        *lo = Vec3::Constant(std::numeric_limits<double>::infinity());
        *hi = -*lo;
        for (const auto& c : solid) {
            *lo = lo->cwiseMin(c.a.cwiseMin(c.b).array().matrix() - Vec3::Constant(c.radius));
            *hi = hi->cwiseMax(c.a.cwiseMax(c.b).array().matrix() + Vec3::Constant(c.radius));
        }
    };
    Vec3 rlo, rhi, llo, lhi;
    solid_box(right.solid, &rlo, &rhi);
    solid_box(left.solid, &llo, &lhi);
    const Vec3 lo = rlo.cwiseMax(llo);
    const Vec3 hi = rhi.cwiseMin(lhi);
    if ((lo.array() >= hi.array()).any()) return 0.0;

    std::int64_t inside = 0;
    const Vec3 extent = hi - lo;
    const Eigen::Vector3i counts = (extent / voxel_size).array().ceil().cast<int>().cwiseMax(1);
    for (int ix = 0; ix < counts.x(); ++ix)
        for (int iy = 0; iy < counts.y(); ++iy)
            for (int iz = 0; iz < counts.z(); ++iz) {
                const Vec3 p = lo + voxel_size * Vec3(ix + 0.5, iy + 0.5, iz + 0.5);
                if ((p.array() > hi.array()).any()) continue;
                if (solid_depth(p, right.solid).depth > 0.0 &&
                    solid_depth(p, left.solid).depth > 0.0)
                    ++inside;
            }
    const double voxel_cm3 = std::pow(voxel_size * 100.0, 3);
    return static_cast<double>(inside) * voxel_cm3;
}

double diversity_sigma(const std::vector<const HandSurface*>& grasps) {
    if (grasps.size() < 2) throw InvalidInput("diversity_sigma: need at least two grasps");
    const Index nv = grasps.front()->vertices.rows();
    for (const auto* g : grasps)
        if (g->vertices.rows() != nv) throw InvalidInput("diversity_sigma: vertex layout mismatch");
    double total = 0.0;
    int pairs = 0;
    for (std::size_t a = 0; a < grasps.size(); ++a)
        for (std::size_t b = a + 1; b < grasps.size(); ++b) {
            double mean = 0.0;
            for (Index v = 0; v < nv; ++v)
                mean += (grasps[a]->vertices.row(v) - grasps[b]->vertices.row(v)).norm();
            total += mean / static_cast<double>(nv);
            ++pairs;
        }
    return total / pairs * 100.0;
}

SigmaGrouped diversity_sigma_by_type(
    const std::vector<std::pair<const HandSurface*, const HandSurface*>>& grasps,
    const std::vector<std::string>& group_of_grasp) {
    if (grasps.size() != group_of_grasp.size())
        throw InvalidInput("diversity_sigma_by_type: group list mismatch");
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < grasps.size(); ++i) groups[group_of_grasp[i]].push_back(i);

    SigmaGrouped out;
    double sum = 0.0;
    for (const auto& [name, members] : groups) {
        if (members.size() < 2) {
            ++out.groups_skipped;
            continue;
        }
        double total = 0.0;
        int pairs = 0;
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                const auto& [ra, la] = grasps[members[a]];
                const auto& [rb, lb] = grasps[members[b]];
                const Index nr = ra->vertices.rows(), nl = la->vertices.rows();
                double mean = 0.0;
                for (Index v = 0; v < nr; ++v)
                    mean += (ra->vertices.row(v) - rb->vertices.row(v)).norm();
                for (Index v = 0; v < nl; ++v)
                    mean += (la->vertices.row(v) - lb->vertices.row(v)).norm();
                total += mean / static_cast<double>(nr + nl);
                ++pairs;
            }
        sum += total / pairs;
        ++out.groups_used;
    }
    if (out.groups_used > 0) out.sigma_cm = sum / out.groups_used * 100.0;
    return out;
}

std::string MetricsReport::to_json() const {
    json j;
    j["q1_r"] = q1_right;
    j["q1_l"] = q1_left;
    j["q1_t"] = q1_total;
    j["pen_ro_cm"] = pen_ro_cm;
    j["pen_lo_cm"] = pen_lo_cm;
    j["pen_rl_vol_cm3"] = pen_rl_vol_cm3;
    j["sigma_r_cm"] = sigma_r_cm;
    j["sigma_l_cm"] = sigma_l_cm;
    j["sigma_ta_cm"] = sigma_ta_cm;
    j["grasps"] = grasp_count;
    return j.dump();
}

std::string MetricsReport::render_table() const {
    std::ostringstream os;
    os << "  Q1r     Q1l     Q1t     pen_ro  pen_lo  pen_rl_vol  sigma_r  sigma_l  sigma_t/a\n";
    os.setf(std::ios::fixed);
    os.precision(4);
    os << "  " << q1_right << "  " << q1_left << "  " << q1_total << "  " << pen_ro_cm << "  "
       << pen_lo_cm << "  " << pen_rl_vol_cm3 << "      " << sigma_r_cm << "   " << sigma_l_cm
       << "   " << sigma_ta_cm << "\n";
    return os.str();
}

void ObjectParts::validate(Index cloud_size) const {
    if (static_cast<Index>(part_of_point.size()) != cloud_size)
        throw InvalidInput("object parts: label count does not match cloud");
    std::set<std::string> names(part_of_point.begin(), part_of_point.end());
    if (names.size() != 2)
        throw InvalidInput("object parts: expected exactly two part names, got " +
                           std::to_string(names.size()));
}

namespace {
std::pair<std::string, std::string> order_parts(const ObjectParts& parts) {
    std::map<std::string, int> counts;
    for (const auto& p : parts.part_of_point) ++counts[p];
    if (counts.size() != 2) throw InvalidInput("object parts: expected exactly two part names");
    auto it = counts.begin();
    const auto first = *it;
    const auto second = *(++it);
    // Fewer points = the smaller part; ties break lexicographically.
    if (first.second < second.second) return {first.first, second.first};
    if (second.second < first.second) return {second.first, first.first};
    return {std::min(first.first, second.first), std::max(first.first, second.first)};
}
}  // namespace

std::string ObjectParts::smaller_part() const {
    std::map<std::string, int> counts;
    for (const auto& p : part_of_point) ++counts[p];
    ObjectParts tmp{part_of_point};
    return order_parts(tmp).first;
}

std::string ObjectParts::larger_part() const {
    ObjectParts tmp{part_of_point};
    return order_parts(tmp).second;
}

ParsedInstruction parse_affordance_text(const std::string& text) {
    // Expected: "right <category> <part>, left <category> <part>"
    auto parse_side = [](const std::string& chunk, const std::string& chirality) {
        std::istringstream is(chunk);
        std::string chi, category, part;
        if (!(is >> chi >> category >> part) || chi != chirality)
            throw InvalidInput("affordance text: expected '" + chirality +
                               " <category> <part>', got '" + chunk + "'");
        std::string extra;
        if (is >> extra) throw InvalidInput("affordance text: trailing tokens in '" + chunk + "'");
        return std::pair<std::string, std::string>(category, part);
    };
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw InvalidInput("affordance text: missing comma");
    std::string left_chunk = text.substr(comma + 1);
    const auto start = left_chunk.find_first_not_of(" \t");
    if (start == std::string::npos) throw InvalidInput("affordance text: empty left clause");
    left_chunk = left_chunk.substr(start);

    const auto [cat_r, part_r] = parse_side(text.substr(0, comma), "right");
    const auto [cat_l, part_l] = parse_side(left_chunk, "left");
    if (cat_r != cat_l) throw InvalidInput("affordance text: category mismatch between hands");
    return ParsedInstruction{cat_r, part_r, part_l};
}

namespace {

// Per-hand rule over finger -> touched-part sets.
bool hand_rule_passes(const std::vector<std::set<std::string>>& finger_parts,
                      const std::string& target, const std::string& smaller,
                      const std::string& larger) {
    if (target == smaller) {
        int fingers_on_target = 0;
        for (int f = 0; f < 5; ++f)
            if (finger_parts[static_cast<std::size_t>(f)].count(target)) ++fingers_on_target;
        return fingers_on_target >= 2;
    }
    if (target == larger) {
        const bool thumb = finger_parts[static_cast<int>(HandPart::Thumb)].count(target) > 0;
        int others = 0;
        for (int f = 1; f < 5; ++f)
            if (finger_parts[static_cast<std::size_t>(f)].count(target)) ++others;
        return thumb && others >= 1;
    }
    throw InvalidInput("affordance text: part '" + target + "' is not an object part");
}

std::string part_at_point(const ObjectModel& object, const ObjectParts& parts, const Vec3& p) {
    const Index nearest = object.cloud_index().nearest(p).index;
    return parts.part_of_point[static_cast<std::size_t>(nearest)];
}

}  // namespace

SemanticVerdict semantic_check(const ObjectModel& object, const ObjectParts& parts,
                               const std::string& text, const AffordanceState* directions,
                               const ContactRepresentation* grasp_contacts) {
    parts.validate(object.cloud().size());
    const ParsedInstruction instr = parse_affordance_text(text);
    const auto [smaller, larger] = order_parts(parts);

    SemanticVerdict verdict;

    if (directions) {
        if (directions->rows() != 2 * kNumHandParts)
            throw InvalidInput("semantic_check: expected 2*B direction rows");
        bool pass[2] = {false, false};
        for (int hand = 0; hand < 2; ++hand) {
            std::vector<std::set<std::string>> finger_parts(5);
            for (int f = 0; f < 5; ++f) {
                const Index row = hand * kNumHandParts + f;
                const Vec3 d = directions->directions.row(row).transpose();
                if (d.norm() < 1e-12) continue;
                const auto hit = object.surface_index().ray_intersect(object.center(), d.normalized());
                if (!hit) continue;
                finger_parts[static_cast<std::size_t>(f)].insert(
                    part_at_point(object, parts, hit->point));
            }
            const std::string& target = hand == 0 ? instr.right_part : instr.left_part;
            pass[hand] = hand_rule_passes(finger_parts, target, smaller, larger);
        }
        verdict.dir_single = pass[0] || pass[1];
        verdict.dir_double = pass[0] && pass[1];
    }

    if (grasp_contacts) {
        bool pass[2] = {false, false};
        for (int hand = 0; hand < 2; ++hand) {
            const HandContact& hc = hand == 0 ? grasp_contacts->right : grasp_contacts->left;
            if (hc.part.size() != object.cloud().size())
                throw InvalidInput("semantic_check: part map length mismatch");
            std::vector<std::set<std::string>> finger_parts(5);
            for (Index i = 0; i < hc.part.size(); ++i) {
                const int p = hc.part[i];
                if (p < 0 || p >= 5) continue;  // palm and no-contact ignored
                finger_parts[static_cast<std::size_t>(p)].insert(
                    parts.part_of_point[static_cast<std::size_t>(i)]);
            }
            const std::string& target = hand == 0 ? instr.right_part : instr.left_part;
            pass[hand] = hand_rule_passes(finger_parts, target, smaller, larger);
        }
        verdict.grasp_single = pass[0] || pass[1];
        verdict.grasp_double = pass[0] && pass[1];
    }

    return verdict;
}

}  // namespace dhg
