#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dhg/geometry.hpp"
#include "dhg/symmetry_mirror.hpp"
#include "dhg/symopt.hpp"

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <numeric>

using namespace dhg;

namespace {

PointCloud random_cloud(Index n, Rng& rng, double extent) {
    Points pts(n, 3);
    for (Index i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c) pts(i, c) = rng.uniform(-extent, extent);
    return PointCloud(pts);
}

PointCloud symmetrized(const PointCloud& half, Axis axis) {
    Points pts(2 * half.size(), 3);
    pts.topRows(half.size()) = half.points;
    Points mirrored = half.points;
    mirrored.col(static_cast<int>(axis)) = -mirrored.col(static_cast<int>(axis));
    pts.bottomRows(half.size()) = mirrored;
    return PointCloud(pts);
}

}  // namespace

TEST_CASE("fully symmetric box corners tie-break to x") {
    Points corners(8, 3);
    int row = 0;
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1}) corners.row(row++) = Vec3(0.04 * sx, 0.06 * sy, 0.08 * sz).transpose();
    const auto report = detect_symmetry_plane(PointCloud(corners));
    const double diam2 = std::pow(2 * Vec3(0.04, 0.06, 0.08).norm(), 2);
    for (int k = 0; k < 3; ++k) CHECK(report.chamfer[k] < 1e-3 * diam2);
    CHECK(report.chosen_axis == Axis::X);
}

TEST_CASE("single point at origin: all chamfer zero, axis x") {
    Points one(1, 3);
    one.setZero();
    const auto report = detect_symmetry_plane(PointCloud(one));
    CHECK(report.chamfer.norm() == doctest::Approx(0.0));
    CHECK(report.chosen_axis == Axis::X);
}

TEST_CASE("L-shape symmetric only about y picks y") {
    // Hammer-like L: a long bar along x plus a head along z, both symmetric
    // in y, asymmetric in x and z.
    Rng rng(3);
    std::vector<Vec3> pts;
    for (int i = 0; i < 300; ++i)
        pts.emplace_back(rng.uniform(-0.1, 0.06), rng.uniform(-0.02, 0.02), rng.uniform(-0.015, 0.015));
    for (int i = 0; i < 200; ++i)
        pts.emplace_back(rng.uniform(0.04, 0.06), rng.uniform(-0.02, 0.02), rng.uniform(0.0, 0.08));
    Points half(static_cast<Index>(pts.size()), 3);
    for (std::size_t i = 0; i < pts.size(); ++i) half.row(static_cast<Index>(i)) = pts[i].transpose();
    // Symmetrize in y only.
    const PointCloud cloud = symmetrized(PointCloud(half), Axis::Y);

    const auto report = detect_symmetry_plane(cloud);
    CHECK(report.chosen_axis == Axis::Y);

    // Brute-force oracle: centered cloud reflected per axis.
    PointCloud centered = cloud;
    centered.translate(-cloud.centroid());
    for (int k = 0; k < 3; ++k) {
        Points mirrored = centered.points;
        mirrored.col(k) = -mirrored.col(k);
        const double brute = test::brute_chamfer(centered.points, mirrored);
        CHECK(report.chamfer[k] == doctest::Approx(brute).epsilon(1e-10));
    }
}

TEST_CASE("constructed mirror-symmetric clouds are detected 100/100") {
    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        const Axis axis = static_cast<Axis>(trial % 3);
        PointCloud half = random_cloud(150, rng, 0.1);
        // Shift to make the other two axes generically asymmetric.
        half.points.col((static_cast<int>(axis) + 1) % 3).array() += 0.07;
        const PointCloud cloud = symmetrized(half, axis);
        const auto report = detect_symmetry_plane(cloud);
        CHECK(report.chosen_axis == axis);
        const double diam2 = std::pow(2 * cloud.max_radius_from(cloud.centroid()), 2);
        CHECK(report.chamfer[static_cast<int>(axis)] < 1e-12 * diam2);
    }
}

TEST_CASE("detection is invariant to point order and translation") {
    Rng rng(21);
    PointCloud cloud = symmetrized(random_cloud(100, rng, 0.08), Axis::Z);
    const auto base = detect_symmetry_plane(cloud);

    // Shuffle rows.
    std::vector<Index> perm(static_cast<std::size_t>(cloud.size()));
    std::iota(perm.begin(), perm.end(), 0);
    seeded_shuffle(perm, rng);
    Points shuffled(cloud.size(), 3);
    for (Index i = 0; i < cloud.size(); ++i) shuffled.row(i) = cloud.points.row(perm[static_cast<std::size_t>(i)]);
    const auto shuffled_report = detect_symmetry_plane(PointCloud(shuffled));
    CHECK(shuffled_report.chosen_axis == base.chosen_axis);
    CHECK((shuffled_report.chamfer - base.chamfer).norm() < 1e-12);

    PointCloud moved = cloud;
    moved.translate(Vec3(1.5, -2.0, 0.25));
    const auto moved_report = detect_symmetry_plane(moved);
    CHECK(moved_report.chosen_axis == base.chosen_axis);
    CHECK((moved_report.chamfer - base.chamfer).norm() < 1e-10);
}

TEST_CASE("mirror_grasp reflects the contact side") {
    const ObjectModel sphere("s", make_icosphere(0.06, 3));
    const HandPose right = test::make_wrap_grasp(sphere, Vec3(1, 0, 0));
    SymmetryReport report;
    report.chosen_axis = Axis::X;
    const HandPose left = mirror_grasp(right, report);
    CHECK(left.chirality == Chirality::Left);

    const auto& tmpl = HandTemplate::standard();
    const HandSurface right_fk = forward_kinematics(right, tmpl);
    const HandSurface left_fk = forward_kinematics(left, tmpl);
    // Contact centroids (vertices within 5 mm of the surface) mirror in x.
    Vec3 right_contact = Vec3::Zero(), left_contact = Vec3::Zero();
    int rc = 0, lc = 0;
    for (Index v = 0; v < right_fk.size(); ++v) {
        if (sphere.surface_index().closest_point(right_fk.vertices.row(v).transpose()).distance < 5e-3) {
            right_contact += right_fk.vertices.row(v).transpose();
            ++rc;
        }
        if (sphere.surface_index().closest_point(left_fk.vertices.row(v).transpose()).distance < 5e-3) {
            left_contact += left_fk.vertices.row(v).transpose();
            ++lc;
        }
    }
    REQUIRE(rc > 0);
    REQUIRE(lc == rc);
    right_contact /= rc;
    left_contact /= lc;
    CHECK(left_contact.x() == doctest::Approx(-right_contact.x()).epsilon(1e-6));
    CHECK(left_contact.y() == doctest::Approx(right_contact.y()).epsilon(1e-6));
}

TEST_CASE("mirrored grasp on a symmetric object has equal penetration energy") {
    // Faceted meshes are only approximately reflection symmetric; build a
    // box, which is exactly symmetric, and a slightly penetrating grasp.
    const ObjectModel box("b", make_box(Vec3(0.05, 0.05, 0.05)));
    HandPose right = test::make_wrap_grasp(box, Vec3(1, 0, 0));
    right.translation -= Vec3(1, 0, 0) * 12e-3;  // push until several vertices sit inside

    SymmetryReport report;
    report.chosen_axis = Axis::X;
    const HandPose left = mirror_grasp(right, report);

    const auto& tmpl = HandTemplate::standard();
    const HandSurface right_fk = forward_kinematics(right, tmpl);
    const HandSurface left_fk = forward_kinematics(left, tmpl);
    const HandSurface far_fk = forward_kinematics(
        [] { HandPose p; p.translation = Vec3(10, 10, 10); return p; }(), tmpl);

    const double e_right = energy_pho(right_fk, far_fk, box);
    const double e_left = energy_pho(left_fk, far_fk, box);
    CHECK(e_right > 0.0);
    CHECK(e_left == doctest::Approx(e_right).epsilon(1e-6));
}

TEST_CASE("pair_proposals: cartesian count, overlap filter, determinism") {
    const ObjectModel sphere("s", make_icosphere(0.06, 3));
    std::vector<HandPose> rights;
    for (const auto& dir : test::approach_directions(3)) rights.push_back(test::make_wrap_grasp(sphere, dir));
    SymmetryReport report;
    report.chosen_axis = Axis::Z;  // mirroring in z keeps lefts clear of rights
    std::vector<HandPose> lefts;
    for (const auto& r : rights) lefts.push_back(mirror_grasp(r, report));

    // z-mirror of an equatorial grasp overlaps its source; only the pairing
    // logic is under test here, so use well-separated tilted grasps instead.
    rights.clear();
    lefts.clear();
    for (const auto& dir : test::approach_directions(3, 0.35)) rights.push_back(test::make_wrap_grasp(sphere, dir));
    for (const auto& r : rights) lefts.push_back(mirror_grasp(r, report));

    const auto pairs = pair_proposals(rights, lefts, 100, 7);
    CHECK(pairs.size() <= 9);
    CHECK(pairs.size() >= 3);

    // Superimposed identical poses are dropped.
    std::vector<HandPose> left_same;
    for (auto r : rights) {
        r.chirality = Chirality::Left;
        left_same.push_back(r);
    }
    bool any_self_pair_survives = false;
    const auto self_pairs = pair_proposals(rights, left_same, 100, 7);
    for (const auto& p : self_pairs)
        if ((p.right.translation - p.left.translation).norm() < 1e-12) any_self_pair_survives = true;
    CHECK_FALSE(any_self_pair_survives);

    // Deterministic subsampling.
    const auto a = pair_proposals(rights, lefts, 5, 1234);
    const auto b = pair_proposals(rights, lefts, 5, 1234);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK((a[i].right.translation - b[i].right.translation).norm() == 0.0);
        CHECK((a[i].left.translation - b[i].left.translation).norm() == 0.0);
    }
}

TEST_CASE("symmetry report json round trip") {
    SymmetryReport r;
    r.chosen_axis = Axis::Y;
    r.chamfer = Vec3(0.25, 1e-13, 0.5);
    r.centroid = Vec3(0.01, -0.02, 0.33);
    const auto back = SymmetryReport::from_json(r.to_json());
    CHECK(back.chosen_axis == Axis::Y);
    CHECK((back.chamfer - r.chamfer).norm() == doctest::Approx(0.0));
    CHECK((back.centroid - r.centroid).norm() == doctest::Approx(0.0));
}
