// dhg: dual-hand grasp pipeline tool.
//
// Subcommands mirror the pipeline stages: symmetry detection, mirrored-pair
// optimization, contact labeling, affordance balancing, metrics, direction
// sampling, test-time refinement, and OBJ scene export. All diagnostics go
// to stderr; data lands in files only. Exit codes: 0 ok, 1 internal error,
// 2 input/schema error.

#include <CLI11.hpp>

#include <nlohmann/json.hpp>

#include "dhg/config.hpp"
#include "dhg/contact_repr.hpp"
#include "dhg/dataset.hpp"
#include "dhg/ddpm.hpp"
#include "dhg/geometry.hpp"
#include "dhg/grasp_metrics.hpp"
#include "dhg/io.hpp"
#include "dhg/parallel.hpp"
#include "dhg/primitives.hpp"
#include "dhg/symmetry_mirror.hpp"
#include "dhg/symopt.hpp"
#include "dhg/tta_refiner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dhg;

namespace {

struct ManifestWriter {
    std::string command;
    std::uint64_t config_digest = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::map<std::string, std::int64_t> counts;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void write(const std::string& next_to) const {
        json j;
        j["command"] = command;
        char digest_hex[32];
        std::snprintf(digest_hex, sizeof digest_hex, "%016llx",
                      static_cast<unsigned long long>(config_digest));
        j["config_digest"] = digest_hex;
        j["seed"] = seed;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        j["counts"] = counts;
        j["seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::ofstream out(next_to + ".manifest.json");
        out << j.dump(2) << "\n";
    }
};

ObjectModel load_object(const std::string& path, Index samples) {
    TriMesh mesh = load_mesh(path);
    std::string id = fs::path(path).stem().string();
    return ObjectModel(std::move(id), std::move(mesh), 1.0, samples);
}

PipelineConfig load_config(const std::string& path) {
    PipelineConfig cfg = path.empty() ? PipelineConfig::defaults() : PipelineConfig::from_file(path);
    cfg.apply_environment();
    return cfg;
}

TriMesh capsule_mesh(const Capsule& c) { return make_capsule(c.a, c.b, c.radius, 16, 4); }

int run_symmetry(const std::string& object_path, const std::string& out_path, Index samples) {
    ManifestWriter manifest{.command = "symmetry", .inputs = {object_path}, .outputs = {out_path}};
    const ObjectModel object = load_object(object_path, samples);
    const SymmetryReport report = detect_symmetry_plane(object);
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write: " + out_path);
    out << report.to_json() << "\n";
    out.close();
    manifest.counts["points"] = object.cloud().size();
    manifest.write(out_path);
    std::cerr << "symmetry: axis " << axis_name(report.chosen_axis) << ", chamfer ["
              << report.chamfer.transpose() << "]\n";
    return 0;
}

int run_symopt_cmd(const std::string& object_path, const std::string& grasps_path,
                   const std::string& config_path, std::uint64_t seed,
                   const std::string& out_path, unsigned threads, bool with_contact,
                   Index samples) {
    ManifestWriter manifest{.command = "symopt", .inputs = {object_path, grasps_path},
                            .outputs = {out_path}};
    const PipelineConfig cfg = load_config(config_path);
    manifest.config_digest = cfg.digest;
    manifest.seed = seed;

    ObjectModel object = load_object(object_path, samples);
    const auto ingest = ingest_single_hand_file(grasps_path);
    for (const auto& err : ingest.errors) std::cerr << "symopt: " << grasps_path << " " << err << "\n";

    std::vector<HandPose> rights;
    double scale = 1.0;
    for (const auto& g : ingest.grasps) {
        rights.push_back(g.pose);
        scale = g.scale;
    }

    std::vector<GraspRecord> records;
    std::optional<SymmetryReport> report;
    if (!rights.empty()) {
        // run_symopt works in the centered frame; keep the report for
        // provenance.
        ObjectModel centered = object;
        centered.center_at_origin();
        report = detect_symmetry_plane(centered);

        const auto results = run_symopt(object, rights, cfg.energy, seed, threads);
        const auto& tmpl = HandTemplate::standard();
        for (const auto& grasp : results) {
            GraspRecord r = GraspRecord::from_dual_grasp(grasp, scale, report);
            if (with_contact && grasp.status == GraspStatus::Optimized) {
                r.contact = compute_contact_representation(
                    centered, forward_kinematics(grasp.right, tmpl),
                    forward_kinematics(grasp.left, tmpl), cfg.contact);
            }
            records.push_back(std::move(r));
        }
    }
    write_records_file(out_path, records);
    std::int64_t optimized = 0, discarded = 0;
    for (const auto& r : records) {
        if (r.status == GraspStatus::Optimized) ++optimized;
        if (r.status == GraspStatus::Discarded) ++discarded;
    }
    manifest.counts["ingested"] = static_cast<std::int64_t>(ingest.grasps.size());
    manifest.counts["ingest_errors"] = static_cast<std::int64_t>(ingest.errors.size());
    manifest.counts["proposals"] = static_cast<std::int64_t>(records.size());
    manifest.counts["optimized"] = optimized;
    manifest.counts["discarded"] = discarded;
    manifest.write(out_path);
    std::cerr << "symopt: " << optimized << " optimized, " << discarded << " discarded\n";
    return 0;
}

int run_metrics(const std::string& grasps_path, const std::string& object_path,
                const std::string& config_path, const std::string& out_path, unsigned threads,
                Index samples) {
    ManifestWriter manifest{.command = "metrics", .inputs = {grasps_path, object_path},
                            .outputs = {out_path}};
    const PipelineConfig cfg = load_config(config_path);
    manifest.config_digest = cfg.digest;
    const ObjectModel object = load_object(object_path, samples);
    const auto records = read_records_file(grasps_path);
    const auto& tmpl = HandTemplate::standard();

    struct PerGrasp {
        double q1r = 0, q1l = 0, q1t = 0, pen_ro = 0, pen_lo = 0, vol = 0;
        HandSurface right, left;
        std::string type;
        bool ok = false;
    };
    std::vector<PerGrasp> per(records.size());
    const Q1Config q1cfg{1.0, 8, 1.0 / object.max_radius()};
    parallel_for(records.size(), threads == 0 ? default_thread_count() : threads, [&](std::size_t i) {
        const auto& r = records[i];
        PerGrasp& p = per[i];
        p.right = forward_kinematics(r.right, tmpl);
        p.left = forward_kinematics(r.left, tmpl);
        const ContactRepresentation contact =
            r.contact ? *r.contact
                      : compute_contact_representation(object, p.right, p.left, cfg.contact);
        const auto c_right = extract_q1_contacts(object, contact.right.contact, cfg.contact.part_threshold);
        const auto c_left = extract_q1_contacts(object, contact.left.contact, cfg.contact.part_threshold);
        if (!c_right.empty()) p.q1r = q1_quality(c_right, q1cfg);
        if (!c_left.empty()) p.q1l = q1_quality(c_left, q1cfg);
        auto both = c_right;
        both.insert(both.end(), c_left.begin(), c_left.end());
        if (!both.empty()) p.q1t = q1_quality(both, q1cfg);
        p.pen_ro = penetration_depth(p.right, object);
        p.pen_lo = penetration_depth(p.left, object);
        p.vol = penetration_volume(p.right, p.left);
        p.type = r.label ? r.label->type_key() : "unlabeled";
        p.ok = true;
    });

    MetricsReport report;
    report.grasp_count = static_cast<int>(records.size());
    std::vector<const HandSurface*> rights, lefts;
    std::vector<std::pair<const HandSurface*, const HandSurface*>> pairs;
    std::vector<std::string> types;
    for (const auto& p : per) {
        if (!p.ok) continue;
        report.q1_right += p.q1r;
        report.q1_left += p.q1l;
        report.q1_total += p.q1t;
        report.pen_ro_cm += p.pen_ro;
        report.pen_lo_cm += p.pen_lo;
        report.pen_rl_vol_cm3 += p.vol;
        rights.push_back(&p.right);
        lefts.push_back(&p.left);
        pairs.emplace_back(&p.right, &p.left);
        types.push_back(p.type);
    }
    const double n = std::max<double>(1.0, static_cast<double>(rights.size()));
    report.q1_right /= n;
    report.q1_left /= n;
    report.q1_total /= n;
    report.pen_ro_cm /= n;
    report.pen_lo_cm /= n;
    report.pen_rl_vol_cm3 /= n;
    if (rights.size() >= 2) {
        report.sigma_r_cm = diversity_sigma(rights);
        report.sigma_l_cm = diversity_sigma(lefts);
        const auto grouped = diversity_sigma_by_type(pairs, types);
        report.sigma_ta_cm = grouped.sigma_cm;
    }

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write: " + out_path);
    out << report.to_json() << "\n";
    out.close();
    manifest.counts["grasps"] = static_cast<std::int64_t>(records.size());
    manifest.write(out_path);
    std::cerr << report.render_table();
    return 0;
}

int run_label(const std::string& grasps_path, const std::string& parts_path,
              const std::string& category, const std::string& out_path) {
    ManifestWriter manifest{.command = "label", .inputs = {grasps_path, parts_path},
                            .outputs = {out_path}};
    auto records = read_records_file(grasps_path);
    std::vector<GraspRecord> labeled;
    std::int64_t rejected = 0;
    for (auto& r : records) {
        if (!r.contact) {
            std::cerr << "label: record without contact blocks skipped\n";
            ++rejected;
            continue;
        }
        const ObjectParts parts = read_object_parts_file(
            parts_path, static_cast<Index>(r.contact->right.contact.size()));
        std::string diag;
        const auto label = label_grasp(r, parts, category, &diag);
        if (!label) {
            std::cerr << "label: rejected (" << diag << ")\n";
            ++rejected;
            continue;
        }
        r.label = label;
        labeled.push_back(std::move(r));
    }
    write_records_file(out_path, labeled);
    manifest.counts["labeled"] = static_cast<std::int64_t>(labeled.size());
    manifest.counts["rejected"] = rejected;
    manifest.write(out_path);
    std::cerr << "label: " << labeled.size() << " labeled, " << rejected << " rejected\n";
    return 0;
}

int run_balance(const std::string& in_path, const std::string& out_path) {
    ManifestWriter manifest{.command = "balance", .inputs = {in_path}, .outputs = {out_path}};
    const auto records = read_records_file(in_path);
    const auto balanced = balance_affordances(records);
    write_records_file(out_path, balanced);
    manifest.counts["in"] = static_cast<std::int64_t>(records.size());
    manifest.counts["out"] = static_cast<std::int64_t>(balanced.size());
    manifest.write(out_path);
    std::cerr << "balance: " << records.size() << " -> " << balanced.size() << "\n";
    return 0;
}

int run_refine(const std::string& grasps_path, const std::string& dirs_path,
               const std::string& object_path, const std::string& config_path,
               const std::string& out_path, unsigned threads, Index samples) {
    ManifestWriter manifest{.command = "refine",
                            .inputs = {grasps_path, dirs_path, object_path},
                            .outputs = {out_path}};
    const PipelineConfig cfg = load_config(config_path);
    manifest.config_digest = cfg.digest;
    const ObjectModel object = load_object(object_path, samples);
    auto records = read_records_file(grasps_path);

    // Directions: JSON-Lines aligned with the grasp records, or one JSON
    // object broadcast to all records. Non-unit rows are normalized.
    std::vector<AffordanceState> dirs;
    {
        std::ifstream in(dirs_path);
        if (!in) throw InvalidInput("cannot open directions file: " + dirs_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            AffordanceState s = AffordanceState::from_json(line);
            for (Index b = 0; b < s.rows(); ++b) {
                const double norm = s.directions.row(b).norm();
                if (norm > 1e-12) s.directions.row(b) /= norm;
            }
            dirs.push_back(std::move(s));
        }
    }
    if (dirs.empty()) throw InvalidInput("directions file is empty: " + dirs_path);
    if (dirs.size() != 1 && dirs.size() != records.size())
        throw InvalidInput("directions count does not match grasp records");

    std::vector<GraspRecord> refined(records.size());
    parallel_for(records.size(), threads == 0 ? default_thread_count() : threads, [&](std::size_t i) {
        DualGrasp g;
        g.right = records[i].right;
        g.left = records[i].left;
        g.object_id = records[i].object_id;
        g.status = records[i].status;
        const AffordanceState& d = dirs.size() == 1 ? dirs[0] : dirs[i];
        const DualGrasp out = refine(g, object, d, cfg.tta);
        GraspRecord r = records[i];
        r.right = out.right;
        r.left = out.left;
        r.tta = TtaProvenance{static_cast<int>(out.energy_trace.size()) - 1,
                              out.energy_trace.empty() ? 0.0 : out.energy_trace.back()};
        refined[i] = std::move(r);
    });
    write_records_file(out_path, refined);
    manifest.counts["refined"] = static_cast<std::int64_t>(refined.size());
    manifest.write(out_path);
    std::cerr << "refine: " << refined.size() << " grasps\n";
    return 0;
}

int run_sample_dirs(const std::string& config_path, const std::string& denoiser_kind,
                    std::uint64_t seed, int count, const std::string& out_path) {
    ManifestWriter manifest{.command = "sample-dirs", .outputs = {out_path}};
    const PipelineConfig cfg = load_config(config_path);
    manifest.config_digest = cfg.digest;
    manifest.seed = seed;
    const DdpmSchedule schedule =
        DdpmSchedule::linear(cfg.ddpm.steps, cfg.ddpm.beta_start, cfg.ddpm.beta_end);

    Denoiser denoiser;
    std::optional<ToyDenoiser> toy;
    if (denoiser_kind == "zero") {
        denoiser = [](const AffordanceState& s, int, const VecX*) {
            return AffordanceState::zeros(static_cast<int>(s.rows()));
        };
    } else if (denoiser_kind == "toy") {
        toy.emplace(2 * kNumHandParts, 8, 32, seed ^ 0x9e3779b9u);
        denoiser = toy->as_denoiser(schedule);
    } else {
        throw InvalidInput("unknown denoiser '" + denoiser_kind + "' (use zero or toy)");
    }

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write: " + out_path);
    for (int k = 0; k < count; ++k) {
        const AffordanceState s = reverse_sample(denoiser, schedule, nullptr,
                                                 cfg.ddpm.guidance_scale, seed + static_cast<std::uint64_t>(k));
        out << s.to_json() << "\n";
    }
    out.close();
    manifest.counts["samples"] = count;
    manifest.write(out_path);
    std::cerr << "sample-dirs: " << count << " states via " << denoiser_kind << "\n";
    return 0;
}

int run_export_obj(const std::string& grasps_path, const std::string& object_path,
                   const std::string& out_dir, Index samples) {
    ManifestWriter manifest{.command = "export-obj", .inputs = {grasps_path, object_path}};
    const ObjectModel object = load_object(object_path, samples);
    const auto records = read_records_file(grasps_path);
    fs::create_directories(out_dir);
    const auto& tmpl = HandTemplate::standard();
    int exported = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        std::vector<std::pair<std::string, TriMesh>> parts;
        parts.emplace_back("object", object.mesh());
        int c = 0;
        for (const Capsule& cap : forward_kinematics(records[i].right, tmpl).solid)
            parts.emplace_back("right_" + std::to_string(c++), capsule_mesh(cap));
        c = 0;
        for (const Capsule& cap : forward_kinematics(records[i].left, tmpl).solid)
            parts.emplace_back("left_" + std::to_string(c++), capsule_mesh(cap));
        const std::string path = out_dir + "/grasp_" + std::to_string(i) + ".obj";
        save_obj_scene(path, parts);
        manifest.outputs.push_back(path);
        ++exported;
    }
    manifest.counts["scenes"] = exported;
    if (!manifest.outputs.empty()) manifest.write(manifest.outputs.front());
    std::cerr << "export-obj: " << exported << " scenes in " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dual-hand grasp pipeline"};
    app.require_subcommand(1);

    unsigned threads = 0;

    std::string object_path, grasps_path, config_path, out_path, parts_path, dirs_path;
    std::string category = "object";
    std::string denoiser_kind = "zero";
    std::string in_path, out_dir;
    std::uint64_t seed = 0;
    int count = 1;
    Index samples = ObjectModel::kDefaultSampleCount;
    bool no_contact = false;

    auto* sym = app.add_subcommand("symmetry", "detect the pseudo-symmetry plane");
    sym->add_option("--object", object_path, "OBJ/OFF mesh")->required();
    sym->add_option("--out", out_path, "report JSON path")->required();
    sym->add_option("--samples", samples, "surface sample count");

    auto* sopt = app.add_subcommand("symopt", "mirror + optimize dual-hand grasps");
    sopt->add_option("--threads", threads, "worker pool size (default: logical cores)");
    sopt->add_option("--object", object_path)->required();
    sopt->add_option("--grasps", grasps_path, "single-hand JSON-Lines")->required();
    sopt->add_option("--config", config_path, "TOML config");
    sopt->add_option("--seed", seed);
    sopt->add_option("--out", out_path)->required();
    sopt->add_option("--samples", samples);
    sopt->add_flag("--no-contact", no_contact, "skip contact blocks on output");

    auto* met = app.add_subcommand("metrics", "grasp quality and penetration metrics");
    met->add_option("--threads", threads, "worker pool size (default: logical cores)");
    met->add_option("--grasps", grasps_path)->required();
    met->add_option("--object", object_path)->required();
    met->add_option("--config", config_path);
    met->add_option("--out", out_path)->required();
    met->add_option("--samples", samples);

    auto* lab = app.add_subcommand("label", "apply the 95% single-part labeling rule");
    lab->add_option("--grasps", grasps_path)->required();
    lab->add_option("--parts", parts_path, "object part mapping JSON")->required();
    lab->add_option("--category", category)->required();
    lab->add_option("--out", out_path)->required();

    auto* bal = app.add_subcommand("balance", "equalize affordance-type counts");
    bal->add_option("--in", in_path)->required();
    bal->add_option("--out", out_path)->required();

    auto* ref = app.add_subcommand("refine", "test-time adaptation of grasps");
    ref->add_option("--threads", threads, "worker pool size (default: logical cores)");
    ref->add_option("--grasps", grasps_path)->required();
    ref->add_option("--dirs", dirs_path, "affordance-direction JSON-Lines")->required();
    ref->add_option("--object", object_path)->required();
    ref->add_option("--config", config_path);
    ref->add_option("--out", out_path)->required();
    ref->add_option("--samples", samples);

    auto* smp = app.add_subcommand("sample-dirs", "sample affordance directions via the diffusion schedule");
    smp->add_option("--config", config_path);
    smp->add_option("--denoiser", denoiser_kind, "zero | toy");
    smp->add_option("--seed", seed);
    smp->add_option("--count", count);
    smp->add_option("--out", out_path)->required();

    auto* exp = app.add_subcommand("export-obj", "write grasp scenes as OBJ files");
    exp->add_option("--grasps", grasps_path)->required();
    exp->add_option("--object", object_path)->required();
    exp->add_option("--out-dir", out_dir)->required();
    exp->add_option("--samples", samples);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sym->parsed()) return run_symmetry(object_path, out_path, samples);
        if (sopt->parsed())
            return run_symopt_cmd(object_path, grasps_path, config_path, seed, out_path, threads,
                                  !no_contact, samples);
        if (met->parsed())
            return run_metrics(grasps_path, object_path, config_path, out_path, threads, samples);
        if (lab->parsed()) return run_label(grasps_path, parts_path, category, out_path);
        if (bal->parsed()) return run_balance(in_path, out_path);
        if (ref->parsed())
            return run_refine(grasps_path, dirs_path, object_path, config_path, out_path, threads,
                              samples);
        if (smp->parsed()) return run_sample_dirs(config_path, denoiser_kind, seed, count, out_path);
        if (exp->parsed()) return run_export_obj(grasps_path, object_path, out_dir, samples);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
