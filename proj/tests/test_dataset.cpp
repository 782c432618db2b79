#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dhg/config.hpp"
#include "dhg/dataset.hpp"
#include "dhg/io.hpp"

#include "support/fixtures.hpp"

#include <cstdio>
#include <sstream>

using namespace dhg;

namespace {

GraspRecord labeled_record(const std::string& right_part, const std::string& left_part,
                           Rng& rng) {
    GraspRecord r;
    r.object_id = "bottle_01";
    r.scale = 1.0;
    r.right.translation = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    r.left = mirror_pose(r.right, Axis::X);
    r.label = AffordanceLabel{"bottle", right_part, left_part};
    return r;
}

// A record with synthetic contact maps concentrating given mass fractions on
// the two object parts.
GraspRecord record_with_fractions(const ObjectParts& parts, double right_lid_fraction,
                                  double left_lid_fraction) {
    GraspRecord r;
    r.object_id = "bottle_01";
    const Index n = static_cast<Index>(parts.part_of_point.size());
    ContactRepresentation cr;
    for (auto [hc, frac] : {std::pair{&cr.right, right_lid_fraction},
                            std::pair{&cr.left, left_lid_fraction}}) {
        hc->contact = VecX::Zero(n);
        hc->part = Eigen::VectorXi::Constant(n, kNumHandParts);
        hc->directions.setZero(kNumHandParts, 3);
        hc->mask = Eigen::VectorXi::Zero(kNumHandParts);
        hc->degenerate = Eigen::VectorXi::Zero(kNumHandParts);
        // Deposit mass: `frac` on the first lid point, 1-frac on the first
        // body point.
        Index lid = -1, body = -1;
        for (Index i = 0; i < n && (lid < 0 || body < 0); ++i) {
            if (parts.part_of_point[static_cast<std::size_t>(i)] == "lid" && lid < 0) lid = i;
            if (parts.part_of_point[static_cast<std::size_t>(i)] == "body" && body < 0) body = i;
        }
        hc->contact[lid] = frac;
        hc->contact[body] = 1.0 - frac;
    }
    r.contact = std::move(cr);
    return r;
}

}  // namespace

TEST_CASE("affordance label format") {
    const AffordanceLabel label{"bottle", "lid", "body"};
    CHECK(label.render(Chirality::Right) == "right bottle lid");
    CHECK(label.render(Chirality::Left) == "left bottle body");
    CHECK(label.render_pair() == "right bottle lid, left bottle body");
    CHECK(default_categories().size() == 9);
    CHECK(default_categories()[0] == "bottle");
}

TEST_CASE("label_grasp: strict 95% rule") {
    ObjectParts parts;
    for (int i = 0; i < 100; ++i) parts.part_of_point.push_back(i < 30 ? "lid" : "body");

    // 0.97 / 0.03 on the right, all body on the left.
    const auto label =
        label_grasp(record_with_fractions(parts, 0.97, 0.0), parts, "bottle");
    REQUIRE(label.has_value());
    CHECK(label->render(Chirality::Right) == "right bottle lid");
    CHECK(label->render(Chirality::Left) == "left bottle body");

    // 0.94 on the dominant part: below the cutoff.
    std::string diag;
    CHECK_FALSE(label_grasp(record_with_fractions(parts, 0.94, 0.0), parts, "bottle", &diag));
    CHECK(diag.find("95%") != std::string::npos);

    // Exactly 0.95 fails the strict inequality.
    CHECK_FALSE(label_grasp(record_with_fractions(parts, 0.95, 0.0), parts, "bottle"));
    // Just above passes.
    CHECK(label_grasp(record_with_fractions(parts, 0.95 + 1e-6, 0.0), parts, "bottle").has_value());

    // Zero contact mass on a hand.
    GraspRecord zero = record_with_fractions(parts, 0.97, 0.0);
    zero.contact->left.contact.setZero();
    CHECK_FALSE(label_grasp(zero, parts, "bottle", &diag));
    CHECK(diag.find("zero contact mass") != std::string::npos);

    GraspRecord no_contact;
    CHECK_THROWS_AS(label_grasp(no_contact, parts, "bottle"), InvalidInput);
}

TEST_CASE("balance_affordances: 2x rule and diversity retention") {
    Rng rng(5);
    std::vector<GraspRecord> records;
    for (int i = 0; i < 100; ++i) records.push_back(labeled_record("lid", "body", rng));
    for (int i = 0; i < 30; ++i) records.push_back(labeled_record("body", "body", rng));
    for (int i = 0; i < 20; ++i) records.push_back(labeled_record("lid", "lid", rng));

    const auto balanced = balance_affordances(records);
    std::map<std::string, int> counts;
    for (const auto& r : balanced) ++counts[r.label->type_key()];
    CHECK(counts["bottle/lid+body"] == 60);
    CHECK(counts["bottle/body+body"] == 30);
    CHECK(counts["bottle/lid+lid"] == 20);

    // Below the 2x bound: unchanged.
    std::vector<GraspRecord> mild;
    for (int i = 0; i < 50; ++i) mild.push_back(labeled_record("lid", "body", rng));
    for (int i = 0; i < 30; ++i) mild.push_back(labeled_record("body", "body", rng));
    CHECK(balance_affordances(mild).size() == 80);

    // Single type: unchanged.
    std::vector<GraspRecord> single;
    for (int i = 0; i < 10; ++i) single.push_back(labeled_record("lid", "body", rng));
    CHECK(balance_affordances(single).size() == 10);

    // Property: max count <= 2 * second max on random profiles.
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<GraspRecord> rs;
        const int types = 2 + static_cast<int>(rng.uniform_index(4));
        for (int t = 0; t < types; ++t) {
            const int count = 1 + static_cast<int>(rng.uniform_index(60));
            for (int i = 0; i < count; ++i)
                rs.push_back(labeled_record("part" + std::to_string(t), "body", rng));
        }
        const auto out = balance_affordances(rs);
        std::map<std::string, std::size_t> c;
        for (const auto& r : out) ++c[r.label->type_key()];
        std::vector<std::size_t> sorted;
        for (const auto& [k, v] : c) sorted.push_back(v);
        std::sort(sorted.rbegin(), sorted.rend());
        if (sorted.size() >= 2) CHECK(sorted[0] <= 2 * sorted[1]);
    }
}

TEST_CASE("ingest: well-formed, corrupt lines reported, positions tagged") {
    std::ostringstream data;
    data << R"({"object":"mug_1","scale":1.0,"trans":[0.1,0,0],"rot6d":[1,0,0,0,1,0],"theta":[0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]})" << "\n";
    data << R"({"object":"mug_1","scale":1.0,"trans":[0.1,0],"rot6d":[1,0,0,0,1,0],"theta":[0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]})" << "\n";
    data << "not json at all\n";
    std::istringstream in(data.str());
    const auto report = ingest_single_hand(in);
    CHECK(report.grasps.size() == 1);
    CHECK(report.errors.size() == 2);
    CHECK(report.errors[0].find("line 2") != std::string::npos);
    CHECK(report.errors[1].find("line 3") != std::string::npos);

    // theta of length 21 is rejected with a position-tagged error.
    std::ostringstream bad_theta;
    bad_theta << R"({"object":"m","scale":1.0,"trans":[0,0,0],"rot6d":[1,0,0,0,1,0],"theta":[0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]})" << "\n";
    std::istringstream in2(bad_theta.str());
    const auto report2 = ingest_single_hand(in2);
    CHECK(report2.grasps.empty());
    REQUIRE(report2.errors.size() == 1);
    CHECK(report2.errors[0].find("line 1") != std::string::npos);
}

TEST_CASE("ingest: large fixture with a few corrupt lines") {
    Rng rng(7);
    std::ostringstream data;
    int corrupted = 0;
    for (int i = 0; i < 1000; ++i) {
        if (i == 100 || i == 500 || i == 900) {
            data << "{\"object\": \"x\"}\n";
            ++corrupted;
            continue;
        }
        data << R"({"object":"obj","scale":1.2,"trans":[0.01,0.02,0.03],"rot6d":[1,0,0,0,1,0],"theta":[)";
        for (int j = 0; j < 22; ++j) data << (j ? "," : "") << rng.uniform(0, 0.5);
        data << "]}\n";
    }
    std::istringstream in(data.str());
    const auto report = ingest_single_hand(in);
    CHECK(report.grasps.size() == 997);
    CHECK(report.errors.size() == 3);
}

TEST_CASE("grasp record round trip is lossless for poses") {
    Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        GraspRecord r;
        r.object_id = "obj_" + std::to_string(trial);
        r.scale = rng.uniform(0.5, 2.0);
        r.right.translation = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        Vec6 rr;
        for (int k = 0; k < 6; ++k) rr[k] = rng.uniform(-1, 1);
        if (rr.head<3>().norm() < 0.3 || rr.head<3>().cross(rr.tail<3>()).norm() < 0.3) continue;
        r.right.rot6d = rr;
        for (int k = 0; k < kNumJointDof; ++k) r.right.joints[k] = rng.uniform(-0.3, 1.5);
        r.left = mirror_pose(r.right, Axis::Y);
        r.status = GraspStatus::Optimized;
        r.energy_trace_tail = {0.5, 0.01, 1e-5};
        SymmetryReport sym;
        sym.chosen_axis = Axis::Y;
        sym.chamfer = Vec3(0.1, 1e-14, 0.2);
        r.symmetry = sym;
        r.tta = TtaProvenance{42, 3.25e-4};
        r.label = AffordanceLabel{"hammer", "handle", "head"};

        const GraspRecord back = GraspRecord::from_json_line(r.to_json_line());
        CHECK((back.right.to_params() - r.right.to_params()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((back.left.to_params() - r.left.to_params()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(back.scale == r.scale);
        CHECK(back.status == GraspStatus::Optimized);
        CHECK(back.label->type_key() == r.label->type_key());
        CHECK(back.energy_trace_tail == r.energy_trace_tail);
        CHECK(back.tta->accepted_steps == 42);
        CHECK(back.symmetry->chosen_axis == Axis::Y);
    }
}

TEST_CASE("contact blocks survive the round trip within f32 precision") {
    const ObjectModel sphere("s", make_icosphere(0.05, 2));
    const auto& tmpl = HandTemplate::standard();
    const HandPose grasp = test::make_wrap_grasp(sphere, Vec3(1, 0, 0));
    GraspRecord r;
    r.object_id = "s";
    r.right = grasp;
    r.left = mirror_pose(grasp, Axis::X);
    r.contact = compute_contact_representation(sphere, forward_kinematics(r.right, tmpl),
                                               forward_kinematics(r.left, tmpl));
    const GraspRecord back = GraspRecord::from_json_line(r.to_json_line());
    REQUIRE(back.contact.has_value());
    CHECK((back.contact->right.contact - r.contact->right.contact).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((back.contact->right.part - r.contact->right.part).cwiseAbs().maxCoeff() == 0);
    CHECK((back.contact->left.directions - r.contact->left.directions).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((back.contact->left.mask - r.contact->left.mask).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("records file io") {
    Rng rng(13);
    std::vector<GraspRecord> records;
    for (int i = 0; i < 5; ++i) records.push_back(labeled_record("lid", "body", rng));
    const std::string path = "/tmp/dhg_test_records.jsonl";
    write_records_file(path, records);
    const auto back = read_records_file(path);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < back.size(); ++i)
        CHECK((back[i].right.to_params() - records[i].right.to_params()).cwiseAbs().maxCoeff() == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("toml subset parsing and pipeline config") {
    const std::string text = R"(
# pipeline configuration
[energy]
lambda_phh = 2.5
max_iterations = 42
stop_pho = 5e-5

[tta]
steps = 77
lambda_pen = 12.0   # stronger wall

[contact]
sharpness = 120.0

[ddpm]
steps = 250
guidance_scale = 1.5
)";
    const auto cfg = PipelineConfig::from_toml(text);
    CHECK(cfg.energy.lambda_phh == 2.5);
    CHECK(cfg.energy.max_iterations == 42);
    CHECK(cfg.energy.stop_pho == 5e-5);
    CHECK(cfg.energy.lambda_pho == 1.0);  // default preserved
    CHECK(cfg.tta.steps == 77);
    CHECK(cfg.tta.lambda_pen == 12.0);
    CHECK(cfg.contact.sharpness == 120.0);
    CHECK(cfg.ddpm.steps == 250);
    CHECK(cfg.ddpm.guidance_scale == 1.5);

    // Digest is stable for identical bytes and changes otherwise.
    CHECK(PipelineConfig::from_toml(text).digest == cfg.digest);
    CHECK(PipelineConfig::from_toml(text + "\n[loss]\nlambda_w = 2\n").digest != cfg.digest);

    CHECK_THROWS_AS(PipelineConfig::from_toml("[energy]\nlambda_phh = abc\n"), InvalidInput);
    CHECK_THROWS_AS(PipelineConfig::from_toml("no_equals_line\n"), InvalidInput);
}

TEST_CASE("environment overrides") {
    setenv("DHG_ENERGY_MAX_ITERATIONS", "17", 1);
    setenv("DHG_TTA_LEARNING_RATE", "0.004", 1);
    PipelineConfig cfg = PipelineConfig::defaults();
    cfg.apply_environment();
    CHECK(cfg.energy.max_iterations == 17);
    CHECK(cfg.tta.learning_rate == 0.004);
    unsetenv("DHG_ENERGY_MAX_ITERATIONS");
    unsetenv("DHG_TTA_LEARNING_RATE");
}

TEST_CASE("object parts file round trip") {
    const ObjectModel box("b", make_box(Vec3(0.04, 0.04, 0.08)), 1.0, 256, 3);
    ObjectParts parts;
    for (Index i = 0; i < box.cloud().size(); ++i)
        parts.part_of_point.push_back(box.cloud().points(i, 2) > 0.02 ? "cap" : "base");
    const std::string path = "/tmp/dhg_test_parts.json";
    write_object_parts_file(path, box, parts);
    const auto back = read_object_parts_file(path, box.cloud().size());
    CHECK(back.part_of_point == parts.part_of_point);
    CHECK_THROWS_AS(read_object_parts_file(path, box.cloud().size() + 1), InvalidInput);
    std::remove(path.c_str());
}

TEST_CASE("dhpc binary cloud round trip") {
    const ObjectModel sphere("s", make_icosphere(0.05, 2), 1.0, 128, 5);
    const std::string path = "/tmp/dhg_test_cloud.dhpc";
    write_dhpc_file(path, sphere.cloud());
    const PointCloud back = read_dhpc_file(path);
    REQUIRE(back.size() == sphere.cloud().size());
    CHECK((back.points - sphere.cloud().points).cwiseAbs().maxCoeff() < 1e-6);
    REQUIRE(back.normals.has_value());
    std::remove(path.c_str());
}
