#include "dhg/hand_model.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Geometry>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

namespace dhg {

using nlohmann::json;

const char* hand_part_name(HandPart p) {
    switch (p) {
        case HandPart::Thumb: return "thumb";
        case HandPart::Index: return "index";
        case HandPart::Middle: return "middle";
        case HandPart::Ring: return "ring";
        case HandPart::Little: return "little";
        case HandPart::Palm: return "palm";
    }
    return "?";
}

Mat3 rot6d_to_matrix(const Vec6& r) {
    const Vec3 a = r.head<3>();
    const Vec3 b = r.tail<3>();
    const double na = a.norm();
    if (na <= 1e-8) throw InvalidInput("rot6d: degenerate first column");
    const Vec3 c1 = a / na;
    const Vec3 w = b - c1.dot(b) * c1;
    const double nw = w.norm();
    if (nw <= 1e-8) throw InvalidInput("rot6d: columns are parallel");
    const Vec3 c2 = w / nw;
    Mat3 R;
    R.col(0) = c1;
    R.col(1) = c2;
    R.col(2) = c1.cross(c2);
    return R;
}

Vec6 matrix_to_rot6d(const Mat3& R) {
    Vec6 r;
    r.head<3>() = R.col(0);
    r.tail<3>() = R.col(1);
    return r;
}

Vec6 rot6d_backward(const Vec6& r, const Mat3& dL_dR) {
    const Vec3 a = r.head<3>();
    const Vec3 b = r.tail<3>();
    const double na = a.norm();
    const Vec3 c1 = a / na;
    const Vec3 w = b - c1.dot(b) * c1;
    const double nw = w.norm();
    const Vec3 c2 = w / nw;

    const Vec3 g1 = dL_dR.col(0);
    const Vec3 g2 = dL_dR.col(1);
    const Vec3 g3 = dL_dR.col(2);

    // c3 = c1 x c2 feeds back into both columns.
    const Vec3 h1 = g1 + c2.cross(g3);
    const Vec3 h2 = g2 + g3.cross(c1);

    const Mat3 proj2 = (Mat3::Identity() - c2 * c2.transpose()) / nw;
    const Vec3 dL_dw = proj2 * h2;

    const Vec3 dL_db = dL_dw - c1 * c1.dot(dL_dw);

    // a contributes through c1 directly and through w = b - (c1.b) c1.
    const Vec3 u = b * c1.dot(dL_dw) + c1.dot(b) * dL_dw;
    const Mat3 proj1 = (Mat3::Identity() - c1 * c1.transpose()) / na;
    const Vec3 dL_da = proj1 * (h1 - u);

    Vec6 g;
    g.head<3>() = dL_da;
    g.tail<3>() = dL_db;
    return g;
}

void HandPose::validate() const {
    if (joints.size() != kNumJointDof)
        throw InvalidInput("pose: expected 22 joint angles, got " + std::to_string(joints.size()));
    if (!translation.allFinite() || !rot6d.allFinite() || !joints.allFinite())
        throw InvalidInput("pose: non-finite parameters");
    (void)rot6d_to_matrix(rot6d);
}

VecX HandPose::to_params() const {
    VecX p(kParamCount);
    p.head<3>() = translation;
    p.segment<6>(3) = rot6d;
    p.tail(kNumJointDof) = joints;
    return p;
}

HandPose HandPose::from_params(Chirality chi, const VecX& params) {
    if (params.size() != kParamCount) throw InvalidInput("pose params: wrong length");
    HandPose p;
    p.chirality = chi;
    p.translation = params.head<3>();
    p.rot6d = params.segment<6>(3);
    p.joints = params.tail(kNumJointDof);
    return p;
}

double capsule_depth(const Vec3& p, const Capsule& c) {
    const Vec3 ab = c.b - c.a;
    const double len2 = ab.squaredNorm();
    double t = len2 > 0.0 ? (p - c.a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return c.radius - (p - (c.a + t * ab)).norm();
}

SolidDepth solid_depth(const Vec3& p, const std::vector<Capsule>& solid) {
    SolidDepth best;
    best.depth = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < solid.size(); ++i) {
        const Capsule& c = solid[i];
        const Vec3 ab = c.b - c.a;
        const double len2 = ab.squaredNorm();
        double t = len2 > 0.0 ? (p - c.a).dot(ab) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double depth = c.radius - (p - (c.a + t * ab)).norm();
        if (depth > best.depth) {
            best.depth = depth;
            best.capsule = static_cast<int>(i);
            best.axis_t = t;
        }
    }
    return best;
}

void HandTemplate::validate() const {
    if (joints.size() != kNumJointDof)
        throw InvalidInput("template: expected 22 DoF, got " + std::to_string(joints.size()));
    for (std::size_t j = 0; j < joints.size(); ++j) {
        if (joints[j].parent >= static_cast<int>(j))
            throw InvalidInput("template: joint parents must precede children");
        if (joints[j].parent < -1) throw InvalidInput("template: bad parent index");
        if (joints[j].axis.norm() < 1e-9) throw InvalidInput("template: zero joint axis");
        if (joints[j].lower > joints[j].upper) throw InvalidInput("template: inverted joint limits");
    }
    for (const auto& v : vertices)
        if (v.joint < -1 || v.joint >= static_cast<int>(joints.size()))
            throw InvalidInput("template: vertex joint out of range");
    for (const auto& c : capsules)
        if (c.joint < -1 || c.joint >= static_cast<int>(joints.size()))
            throw InvalidInput("template: capsule joint out of range");
}

void HandTemplate::finalize() {
    validate();
    for (auto& j : joints) j.axis.normalize();
    dof_mask.assign(joints.size(), 0);
    for (std::size_t j = 0; j < joints.size(); ++j) {
        std::uint32_t mask = 1u << j;
        if (joints[j].parent >= 0) mask |= dof_mask[static_cast<std::size_t>(joints[j].parent)];
        dof_mask[j] = mask;
    }
}

namespace {

constexpr double kFlexLo = 0.0, kFlexHi = 1.6;
constexpr double kAbdLo = -0.35, kAbdHi = 0.35;

struct TemplateBuilder {
    HandTemplate t;

    int add_joint(const std::string& name, int parent, const Vec3& offset, const Vec3& axis,
                  double lo, double hi) {
        t.joints.push_back({name, parent, offset, axis.normalized(), lo, hi});
        return static_cast<int>(t.joints.size()) - 1;
    }

    // Deterministic capsule surface sampling: axial rings on the cylinder,
    // polar rings on each cap, two pole points. Distal phalanges also get a
    // dense pad patch on their palmar (+z template) side; only those patch
    // vertices carry the fingertip flag, so fingertip distances measure the
    // surface that actually closes on an object.
    void add_capsule(int joint, const Vec3& a, const Vec3& b, double radius, HandPart part,
                     bool with_pad, int n_around, int n_axial, int cap_rings) {
        t.capsules.push_back({joint, a, b, radius, part});
        const Vec3 axis = b - a;
        const double len = axis.norm();
        const Vec3 z = len > 1e-12 ? Vec3(axis / len) : Vec3(0, 0, 1);
        Vec3 ref = std::abs(z.x()) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
        const Vec3 x = (ref - ref.dot(z) * z).normalized();
        const Vec3 y = z.cross(x);
        auto push = [&](const Vec3& p, bool tip) { t.vertices.push_back({joint, p, part, tip}); };
        push(a - radius * z, false);
        push(b + radius * z, false);
        for (int cap = 0; cap < 2; ++cap) {
            const Vec3 center = cap == 0 ? a : b;
            const double sign = cap == 0 ? -1.0 : 1.0;
            for (int rr = 1; rr <= cap_rings; ++rr) {
                const double polar = std::numbers::pi / 2.0 * rr / (cap_rings + 1);
                for (int s = 0; s < n_around; ++s) {
                    const double az = 2.0 * std::numbers::pi * s / n_around;
                    const Vec3 dir = std::sin(polar) * (std::cos(az) * x + std::sin(az) * y) +
                                     sign * std::cos(polar) * z;
                    push(center + radius * dir, false);
                }
            }
        }
        for (int rr = 0; rr < n_axial; ++rr) {
            const double at = n_axial == 1 ? 0.5 : static_cast<double>(rr) / (n_axial - 1);
            for (int s = 0; s < n_around; ++s) {
                const double az = 2.0 * std::numbers::pi * (s + 0.5 * (rr % 2)) / n_around;
                const Vec3 dir = std::cos(az) * x + std::sin(az) * y;
                push(a + at * len * z + radius * dir, false);
            }
        }
        if (with_pad) {
            // 24 pad vertices: a tight palmar sector (local -y maps to the
            // template +z side) over the outer half of the phalanx plus the
            // palmar cap rows. Kept narrow so the pad's mean distance drops
            // to contact scale when the finger closes on a surface.
            const double pad_az[4] = {225.0, 250.0, 275.0, 300.0};
            for (double az_deg : pad_az) {
                const double az = az_deg * std::numbers::pi / 180.0;
                const Vec3 dir = std::cos(az) * x + std::sin(az) * y;
                for (double at : {0.55, 0.7, 0.85, 1.0})
                    push(a + at * len * z + radius * dir, true);
                for (double polar_deg : {25.0, 50.0}) {
                    const double polar = polar_deg * std::numbers::pi / 180.0;
                    const Vec3 cap_dir = std::sin(polar) * dir + std::cos(polar) * z;
                    push(b + radius * cap_dir, true);
                }
            }
        }
    }
};

// A standard three-phalanx finger: MCP abduction + flexion, PIP, DIP.
void build_finger(TemplateBuilder& tb, const std::string& name, HandPart part, int parent,
                  const Vec3& knuckle_offset, double l1, double l2, double l3, double radius) {
    const int mcp_abd = tb.add_joint(name + "_mcp_abd", parent, knuckle_offset, Vec3(0, 0, 1), kAbdLo, kAbdHi);
    const int mcp_flex = tb.add_joint(name + "_mcp_flex", mcp_abd, Vec3::Zero(), Vec3(1, 0, 0), kFlexLo, kFlexHi);
    const int pip = tb.add_joint(name + "_pip", mcp_flex, Vec3(0, l1, 0), Vec3(1, 0, 0), kFlexLo, kFlexHi);
    const int dip = tb.add_joint(name + "_dip", pip, Vec3(0, l2, 0), Vec3(1, 0, 0), kFlexLo, kFlexHi);
    tb.add_capsule(mcp_flex, Vec3::Zero(), Vec3(0, l1, 0), radius, part, false, 6, 4, 1);
    tb.add_capsule(pip, Vec3::Zero(), Vec3(0, l2, 0), radius * 0.94, part, false, 6, 4, 1);
    tb.add_capsule(dip, Vec3::Zero(), Vec3(0, l3, 0), radius * 0.88, part, true, 8, 5, 2);
}

HandTemplate build_standard_template() {
    TemplateBuilder tb;

    // Template frame: wrist at the origin, fingers along +y, palm normal +z,
    // thumb on the +x side (right hand). Sagittal plane: x = 0.
    for (double px : {-0.028, -0.0095, 0.0095, 0.028})
        tb.add_capsule(-1, Vec3(px, 0.015, 0), Vec3(px, 0.085, 0), 0.011, HandPart::Palm,
                       false, 8, 5, 1);

    // Thumb: 5 DoF (CMC abduction/axial/flexion, MCP, IP).
    const Vec3 thumb_dir = Vec3(0.866, 0.5, 0.0).normalized();
    // Positive flexion curls the thumb toward the palm normal (+z).
    const Vec3 thumb_flex_axis = thumb_dir.cross(Vec3(0, 0, 1)).normalized();
    const int t_abd = tb.add_joint("thumb_cmc_abd", -1, Vec3(0.028, 0.018, 0.0), Vec3(0, 1, 0), kAbdLo, kAbdHi);
    const int t_rot = tb.add_joint("thumb_cmc_rot", t_abd, Vec3::Zero(), thumb_dir, kAbdLo, kAbdHi);
    const int t_cmc = tb.add_joint("thumb_cmc_flex", t_rot, Vec3::Zero(), thumb_flex_axis, kFlexLo, kFlexHi);
    const int t_mcp = tb.add_joint("thumb_mcp_flex", t_cmc, 0.042 * thumb_dir, thumb_flex_axis, kFlexLo, kFlexHi);
    const int t_ip = tb.add_joint("thumb_ip_flex", t_mcp, 0.032 * thumb_dir, thumb_flex_axis, kFlexLo, kFlexHi);
    tb.add_capsule(t_cmc, Vec3::Zero(), 0.042 * thumb_dir, 0.010, HandPart::Thumb, false, 6, 4, 1);
    tb.add_capsule(t_mcp, Vec3::Zero(), 0.032 * thumb_dir, 0.009, HandPart::Thumb, false, 6, 4, 1);
    tb.add_capsule(t_ip, Vec3::Zero(), 0.027 * thumb_dir, 0.008, HandPart::Thumb, true, 8, 5, 2);

    build_finger(tb, "index", HandPart::Index, -1, Vec3(0.024, 0.088, 0), 0.040, 0.026, 0.022, 0.0085);
    build_finger(tb, "middle", HandPart::Middle, -1, Vec3(0.008, 0.092, 0), 0.044, 0.029, 0.023, 0.0085);
    build_finger(tb, "ring", HandPart::Ring, -1, Vec3(-0.008, 0.088, 0), 0.040, 0.027, 0.022, 0.008);

    // Little finger: extra CMC flexion -> 5 DoF.
    const int l_cmc = tb.add_joint("little_cmc_flex", -1, Vec3(-0.020, 0.030, 0), Vec3(1, 0, 0), kFlexLo, 0.6);
    build_finger(tb, "little", HandPart::Little, l_cmc, Vec3(-0.004, 0.052, 0), 0.031, 0.020, 0.018, 0.007);

    tb.t.finalize();
    return tb.t;
}

}  // namespace

const HandTemplate& HandTemplate::standard() {
    static const HandTemplate tmpl = build_standard_template();
    return tmpl;
}

namespace {

Mat3 sagittal_reflection() {
    Mat3 s = Mat3::Identity();
    s(0, 0) = -1.0;
    return s;
}

}  // namespace

HandSurface forward_kinematics(const HandPose& pose, const HandTemplate& tmpl) {
    pose.validate();
    if (tmpl.dof_mask.size() != tmpl.joints.size())
        throw InvalidInput("template not finalized");

    const std::size_t nj = tmpl.joints.size();
    std::vector<Mat3> rot(nj);
    std::vector<Vec3> origin(nj);
    std::vector<Vec3> axis_world(nj);
    bool clamped = false;

    std::vector<char> dof_clamped(nj, 0);
    for (std::size_t j = 0; j < nj; ++j) {
        const auto& spec = tmpl.joints[j];
        double theta = pose.joints[static_cast<Index>(j)];
        const double used = std::clamp(theta, spec.lower, spec.upper);
        if (used != theta) {
            clamped = true;
            dof_clamped[j] = 1;
        }
        const Mat3 parent_rot = spec.parent < 0 ? Mat3::Identity() : rot[static_cast<std::size_t>(spec.parent)];
        const Vec3 parent_origin = spec.parent < 0 ? Vec3::Zero() : origin[static_cast<std::size_t>(spec.parent)];
        origin[j] = parent_origin + parent_rot * spec.offset;
        axis_world[j] = parent_rot * spec.axis;
        rot[j] = parent_rot * Eigen::AngleAxisd(used, spec.axis).toRotationMatrix();
    }

    const Mat3 R = rot6d_to_matrix(pose.rot6d);
    const Mat3 M = pose.chirality == Chirality::Left ? sagittal_reflection() : Mat3::Identity();
    const Mat3 world = R * M;

    HandSurface out;
    const Index nv = tmpl.vertex_count();
    out.vertices.resize(nv, 3);
    out.part_of_vertex.resize(nv);
    out.fingertip_mask.resize(static_cast<std::size_t>(nv));
    out.joints_clamped = clamped;

    HandSurface::FkDetail detail;
    detail.chirality = pose.chirality;
    detail.rot6d = pose.rot6d;
    detail.global_rotation = R;
    detail.mirror = M;
    detail.template_points.resize(nv, 3);
    detail.joint_origin = origin;
    detail.joint_axis = axis_world;
    detail.dof_clamped = dof_clamped;
    detail.vertex_dof_mask.resize(static_cast<std::size_t>(nv));

    for (Index v = 0; v < nv; ++v) {
        const auto& tv = tmpl.vertices[static_cast<std::size_t>(v)];
        Vec3 pt = tv.local;
        if (tv.joint >= 0) {
            const std::size_t j = static_cast<std::size_t>(tv.joint);
            pt = origin[j] + rot[j] * tv.local;
        }
        detail.template_points.row(v) = pt.transpose();
        out.vertices.row(v) = (world * pt + pose.translation).transpose();
        out.part_of_vertex[v] = static_cast<int>(tv.part);
        out.fingertip_mask[static_cast<std::size_t>(v)] = tv.fingertip ? 1 : 0;
        detail.vertex_dof_mask[static_cast<std::size_t>(v)] =
            tv.joint >= 0 ? tmpl.dof_mask[static_cast<std::size_t>(tv.joint)] : 0u;
    }

    const Index ncap = static_cast<Index>(tmpl.capsules.size());
    detail.capsule_endpoints.resize(2 * ncap, 3);
    detail.endpoint_dof_mask.resize(static_cast<std::size_t>(2 * ncap));
    out.solid.resize(static_cast<std::size_t>(ncap));
    for (Index c = 0; c < ncap; ++c) {
        const auto& tc = tmpl.capsules[static_cast<std::size_t>(c)];
        Vec3 pa = tc.a, pb = tc.b;
        if (tc.joint >= 0) {
            const std::size_t j = static_cast<std::size_t>(tc.joint);
            pa = origin[j] + rot[j] * tc.a;
            pb = origin[j] + rot[j] * tc.b;
        }
        detail.capsule_endpoints.row(2 * c) = pa.transpose();
        detail.capsule_endpoints.row(2 * c + 1) = pb.transpose();
        const std::uint32_t mask = tc.joint >= 0 ? tmpl.dof_mask[static_cast<std::size_t>(tc.joint)] : 0u;
        detail.endpoint_dof_mask[static_cast<std::size_t>(2 * c)] = mask;
        detail.endpoint_dof_mask[static_cast<std::size_t>(2 * c + 1)] = mask;
        out.solid[static_cast<std::size_t>(c)] =
            Capsule{world * pa + pose.translation, world * pb + pose.translation, tc.radius};
    }

    out.detail = std::move(detail);
    return out;
}

HandSurface HandSurface::from_external(Points verts, Eigen::VectorXi parts,
                                       std::vector<char> fingertips) {
    if (parts.size() != verts.rows() || static_cast<Index>(fingertips.size()) != verts.rows())
        throw InvalidInput("external hand: label lengths do not match vertex count");
    if (!verts.allFinite()) throw InvalidInput("external hand: non-finite vertices");
    for (Index i = 0; i < parts.size(); ++i)
        if (parts[i] < 0 || parts[i] >= kNumHandParts)
            throw InvalidInput("external hand: part id out of range");
    HandSurface s;
    s.vertices = std::move(verts);
    s.part_of_vertex = std::move(parts);
    s.fingertip_mask = std::move(fingertips);
    return s;
}

VecX PoseGrad::to_params() const {
    VecX p(HandPose::kParamCount);
    p.head<3>() = d_translation;
    p.segment<6>(3) = d_rot6d;
    p.tail(kNumJointDof) = d_joints;
    return p;
}

PoseGrad& PoseGrad::operator+=(const PoseGrad& o) {
    d_translation += o.d_translation;
    d_rot6d += o.d_rot6d;
    d_joints += o.d_joints;
    return *this;
}

namespace {

PoseGrad accumulate_gradient(const HandSurface& surface, const Points& upstream,
                             const Points& template_points,
                             const std::vector<std::uint32_t>& dof_masks) {
    if (!surface.detail)
        throw InvalidInput("gradient requires an FK-generated surface");
    const auto& d = *surface.detail;
    if (upstream.rows() != template_points.rows())
        throw InvalidInput("gradient rows do not match surface");

    PoseGrad g;
    Mat3 dL_dR = Mat3::Zero();
    const Mat3 world = d.global_rotation * d.mirror;

    for (Index v = 0; v < upstream.rows(); ++v) {
        const Vec3 gv = upstream.row(v).transpose();
        if (gv.isZero(0.0)) continue;
        const Vec3 pt = template_points.row(v).transpose();
        g.d_translation += gv;
        dL_dR += gv * (d.mirror * pt).transpose();
        std::uint32_t mask = dof_masks[static_cast<std::size_t>(v)];
        while (mask != 0u) {
            const int j = std::countr_zero(mask);
            mask &= mask - 1u;
            if (d.dof_clamped[static_cast<std::size_t>(j)]) continue;
            const Vec3 dp = d.joint_axis[static_cast<std::size_t>(j)].cross(
                pt - d.joint_origin[static_cast<std::size_t>(j)]);
            g.d_joints[j] += gv.dot(world * dp);
        }
    }
    g.d_rot6d = rot6d_backward(d.rot6d, dL_dR);
    return g;
}

}  // namespace

PoseGrad fk_vertex_gradient(const HandSurface& surface, const Points& dL_dvertex) {
    if (!surface.detail) throw InvalidInput("gradient requires an FK-generated surface");
    return accumulate_gradient(surface, dL_dvertex, surface.detail->template_points,
                               surface.detail->vertex_dof_mask);
}

PoseGrad fk_endpoint_gradient(const HandSurface& surface, const Points& dL_dendpoint) {
    if (!surface.detail) throw InvalidInput("gradient requires an FK-generated surface");
    return accumulate_gradient(surface, dL_dendpoint, surface.detail->capsule_endpoints,
                               surface.detail->endpoint_dof_mask);
}

HandPose mirror_pose(const HandPose& pose, Axis plane) {
    const Mat3 S = reflection_matrix(plane);
    const Mat3 Sh = sagittal_reflection();
    HandPose out = pose;
    out.chirality = pose.chirality == Chirality::Right ? Chirality::Left : Chirality::Right;
    out.translation = S * pose.translation;
    out.rot6d = matrix_to_rot6d(S * rot6d_to_matrix(pose.rot6d) * Sh);
    return out;
}

// JSON template serialization: joint tree, capsules, and sampled vertices.
std::string HandTemplate::to_json() const {
    json j;
    j["dof"] = joints.size();
    json jj = json::array();
    for (const auto& joint : joints) {
        jj.push_back({{"name", joint.name},
                      {"parent", joint.parent},
                      {"offset", {joint.offset.x(), joint.offset.y(), joint.offset.z()}},
                      {"axis", {joint.axis.x(), joint.axis.y(), joint.axis.z()}},
                      {"lower", joint.lower},
                      {"upper", joint.upper}});
    }
    j["joints"] = std::move(jj);
    json jc = json::array();
    for (const auto& c : capsules) {
        jc.push_back({{"joint", c.joint},
                      {"a", {c.a.x(), c.a.y(), c.a.z()}},
                      {"b", {c.b.x(), c.b.y(), c.b.z()}},
                      {"radius", c.radius},
                      {"part", static_cast<int>(c.part)}});
    }
    j["capsules"] = std::move(jc);
    json jv = json::array();
    for (const auto& v : vertices) {
        jv.push_back({{"joint", v.joint},
                      {"local", {v.local.x(), v.local.y(), v.local.z()}},
                      {"part", static_cast<int>(v.part)},
                      {"fingertip", v.fingertip}});
    }
    j["vertices"] = std::move(jv);
    return j.dump();
}

HandTemplate HandTemplate::from_json(const std::string& text) {
    HandTemplate t;
    try {
        const json j = json::parse(text);
        for (const auto& jj : j.at("joints")) {
            Joint joint;
            joint.name = jj.at("name").get<std::string>();
            joint.parent = jj.at("parent").get<int>();
            const auto& off = jj.at("offset");
            joint.offset = Vec3(off[0].get<double>(), off[1].get<double>(), off[2].get<double>());
            const auto& ax = jj.at("axis");
            joint.axis = Vec3(ax[0].get<double>(), ax[1].get<double>(), ax[2].get<double>());
            joint.lower = jj.at("lower").get<double>();
            joint.upper = jj.at("upper").get<double>();
            t.joints.push_back(std::move(joint));
        }
        for (const auto& jc : j.at("capsules")) {
            TemplateCapsule c;
            c.joint = jc.at("joint").get<int>();
            const auto& a = jc.at("a");
            const auto& b = jc.at("b");
            c.a = Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
            c.b = Vec3(b[0].get<double>(), b[1].get<double>(), b[2].get<double>());
            c.radius = jc.at("radius").get<double>();
            c.part = static_cast<HandPart>(jc.at("part").get<int>());
            t.capsules.push_back(c);
        }
        for (const auto& jv : j.at("vertices")) {
            TemplateVertex v;
            v.joint = jv.at("joint").get<int>();
            const auto& loc = jv.at("local");
            v.local = Vec3(loc[0].get<double>(), loc[1].get<double>(), loc[2].get<double>());
            v.part = static_cast<HandPart>(jv.at("part").get<int>());
            v.fingertip = jv.at("fingertip").get<bool>();
            t.vertices.push_back(v);
        }
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("template json: ") + e.what());
    }
    t.finalize();
    return t;
}

}  // namespace dhg
