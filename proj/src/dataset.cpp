#include "dhg/dataset.hpp"

#include "dhg/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace dhg {

using nlohmann::json;

std::string AffordanceLabel::render(Chirality chi) const {
    return std::string(chirality_name(chi)) + " " + category + " " +
           (chi == Chirality::Right ? right_part : left_part);
}

std::string AffordanceLabel::render_pair() const {
    return render(Chirality::Right) + ", " + render(Chirality::Left);
}

const std::vector<std::string>& default_categories() {
    static const std::vector<std::string> cats = {"bottle", "pistol", "flashlight",
                                                  "hammer", "headphones", "lightbulb",
                                                  "lock",   "knife",  "USBstick"};
    return cats;
}

namespace {

json vec_to_json(const Eigen::Ref<const VecX>& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

VecX vec_from_json(const json& a, Index expected, const char* what) {
    if (!a.is_array() || static_cast<Index>(a.size()) != expected)
        throw InvalidInput(std::string(what) + ": expected " + std::to_string(expected) +
                           " values");
    VecX v(expected);
    for (Index i = 0; i < expected; ++i) v[i] = a[static_cast<std::size_t>(i)].get<double>();
    return v;
}

json pose_to_json(const HandPose& pose, const char* prefix) {
    json j;
    const std::string p = prefix;
    j[p + "trans"] = vec_to_json(pose.translation);
    j[p + "rot6d"] = vec_to_json(pose.rot6d);
    j[p + "theta"] = vec_to_json(pose.joints);
    return j;
}

HandPose pose_from_json(const json& j, const char* prefix, Chirality chi) {
    const std::string p = prefix;
    HandPose pose;
    pose.chirality = chi;
    pose.translation = vec_from_json(j.at(p + "trans"), 3, "trans");
    pose.rot6d = vec_from_json(j.at(p + "rot6d"), 6, "rot6d");
    pose.joints = vec_from_json(j.at(p + "theta"), kNumJointDof, "theta");
    pose.validate();
    return pose;
}

std::vector<float> to_f32(const Eigen::Ref<const VecX>& v) {
    std::vector<float> out(static_cast<std::size_t>(v.size()));
    for (Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = static_cast<float>(v[i]);
    return out;
}

json hand_contact_to_json(const HandContact& hc) {
    json j;
    j["dtype"] = "f32";
    j["n"] = hc.contact.size();
    j["c"] = encode_f32_block(to_f32(hc.contact));
    VecX part_f(hc.part.size());
    for (Index i = 0; i < hc.part.size(); ++i) part_f[i] = static_cast<double>(hc.part[i]);
    j["p"] = encode_f32_block(to_f32(part_f));
    std::vector<float> d;
    d.reserve(static_cast<std::size_t>(hc.directions.size()));
    for (Index i = 0; i < hc.directions.rows(); ++i)
        for (int c = 0; c < 3; ++c) d.push_back(static_cast<float>(hc.directions(i, c)));
    j["d"] = encode_f32_block(d);
    VecX mask_f(hc.mask.size());
    for (Index i = 0; i < hc.mask.size(); ++i) mask_f[i] = static_cast<double>(hc.mask[i]);
    j["m"] = encode_f32_block(to_f32(mask_f));
    return j;
}

HandContact hand_contact_from_json(const json& j) {
    if (j.at("dtype").get<std::string>() != "f32")
        throw InvalidInput("contact block: unsupported dtype");
    const Index n = j.at("n").get<Index>();
    HandContact hc;
    const auto c = decode_f32_block(j.at("c").get<std::string>());
    const auto p = decode_f32_block(j.at("p").get<std::string>());
    const auto d = decode_f32_block(j.at("d").get<std::string>());
    const auto m = decode_f32_block(j.at("m").get<std::string>());
    if (static_cast<Index>(c.size()) != n || static_cast<Index>(p.size()) != n)
        throw InvalidInput("contact block: length mismatch");
    if (d.size() != static_cast<std::size_t>(kNumHandParts) * 3 ||
        m.size() != static_cast<std::size_t>(kNumHandParts))
        throw InvalidInput("contact block: direction block size mismatch");
    hc.contact.resize(n);
    hc.part.resize(n);
    for (Index i = 0; i < n; ++i) {
        hc.contact[i] = static_cast<double>(c[static_cast<std::size_t>(i)]);
        hc.part[i] = static_cast<int>(p[static_cast<std::size_t>(i)]);
    }
    hc.directions.resize(kNumHandParts, 3);
    for (int b = 0; b < kNumHandParts; ++b)
        for (int k = 0; k < 3; ++k)
            hc.directions(b, k) = static_cast<double>(d[static_cast<std::size_t>(3 * b + k)]);
    hc.mask.resize(kNumHandParts);
    for (int b = 0; b < kNumHandParts; ++b)
        hc.mask[b] = static_cast<int>(m[static_cast<std::size_t>(b)]);
    hc.degenerate = Eigen::VectorXi::Zero(kNumHandParts);
    return hc;
}

}  // namespace

GraspRecord GraspRecord::from_dual_grasp(const DualGrasp& grasp, double scale,
                                         const std::optional<SymmetryReport>& symmetry,
                                         std::size_t trace_tail) {
    GraspRecord r;
    r.object_id = grasp.object_id;
    r.scale = scale;
    r.right = grasp.right;
    r.left = grasp.left;
    r.status = grasp.status;
    r.symmetry = symmetry;
    const std::size_t n = grasp.energy_trace.size();
    const std::size_t start = n > trace_tail ? n - trace_tail : 0;
    r.energy_trace_tail.assign(grasp.energy_trace.begin() + static_cast<std::ptrdiff_t>(start),
                               grasp.energy_trace.end());
    return r;
}

std::string GraspRecord::to_json_line() const {
    json j;
    j["object"] = object_id;
    j["scale"] = scale;
    j.update(pose_to_json(right, ""));
    j.update(pose_to_json(left, "left_"));
    if (label) {
        j["label"] = {{"category", label->category},
                      {"right", label->render(Chirality::Right)},
                      {"left", label->render(Chirality::Left)},
                      {"right_part", label->right_part},
                      {"left_part", label->left_part}};
    }
    json prov;
    prov["status"] = grasp_status_name(status);
    if (symmetry) prov["symmetry"] = json::parse(symmetry->to_json());
    if (!energy_trace_tail.empty()) prov["energy_trace_tail"] = energy_trace_tail;
    if (tta) prov["tta"] = {{"accepted_steps", tta->accepted_steps},
                            {"final_energy", tta->final_energy}};
    j["provenance"] = std::move(prov);
    if (contact) {
        j["contact"] = {{"right", hand_contact_to_json(contact->right)},
                        {"left", hand_contact_to_json(contact->left)}};
    }
    return j.dump();
}

GraspRecord GraspRecord::from_json_line(const std::string& line) {
    try {
        const json j = json::parse(line);
        GraspRecord r;
        r.object_id = j.at("object").get<std::string>();
        r.scale = j.at("scale").get<double>();
        r.right = pose_from_json(j, "", Chirality::Right);
        r.left = pose_from_json(j, "left_", Chirality::Left);
        if (j.contains("label")) {
            AffordanceLabel label;
            label.category = j["label"].at("category").get<std::string>();
            label.right_part = j["label"].at("right_part").get<std::string>();
            label.left_part = j["label"].at("left_part").get<std::string>();
            r.label = std::move(label);
        }
        if (j.contains("provenance")) {
            const auto& prov = j["provenance"];
            if (prov.contains("status"))
                r.status = grasp_status_from_name(prov["status"].get<std::string>());
            if (prov.contains("symmetry"))
                r.symmetry = SymmetryReport::from_json(prov["symmetry"].dump());
            if (prov.contains("energy_trace_tail"))
                r.energy_trace_tail = prov["energy_trace_tail"].get<std::vector<double>>();
            if (prov.contains("tta"))
                r.tta = TtaProvenance{prov["tta"].at("accepted_steps").get<int>(),
                                      prov["tta"].at("final_energy").get<double>()};
        }
        if (j.contains("contact")) {
            ContactRepresentation cr;
            cr.right = hand_contact_from_json(j["contact"].at("right"));
            cr.left = hand_contact_from_json(j["contact"].at("left"));
            r.contact = std::move(cr);
        }
        return r;
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("grasp record: ") + e.what());
    }
}

std::optional<AffordanceLabel> label_grasp(const GraspRecord& record, const ObjectParts& parts,
                                           const std::string& category, std::string* diagnostic) {
    if (!record.contact) throw InvalidInput("label_grasp: record carries no contact maps");
    const Index n = static_cast<Index>(parts.part_of_point.size());
    if (record.contact->right.contact.size() != n || record.contact->left.contact.size() != n)
        throw InvalidInput("label_grasp: contact map length does not match part mapping");

    auto dominant_part = [&](const VecX& contact, const char* hand) -> std::optional<std::string> {
        std::map<std::string, double> mass;
        double total = 0.0;
        for (Index i = 0; i < n; ++i) {
            mass[parts.part_of_point[static_cast<std::size_t>(i)]] += contact[i];
            total += contact[i];
        }
        if (total <= 0.0) {
            if (diagnostic) *diagnostic = std::string(hand) + " hand: zero contact mass";
            return std::nullopt;
        }
        for (const auto& [name, m] : mass) {
            if (m / total > 0.95) return name;  // strictly more than 95%
        }
        if (diagnostic)
            *diagnostic = std::string(hand) + " hand: no part holds more than 95% of contact";
        return std::nullopt;
    };

    const auto right_part = dominant_part(record.contact->right.contact, "right");
    if (!right_part) return std::nullopt;
    const auto left_part = dominant_part(record.contact->left.contact, "left");
    if (!left_part) return std::nullopt;
    return AffordanceLabel{category, *right_part, *left_part};
}

std::vector<GraspRecord> balance_affordances(const std::vector<GraspRecord>& records) {
    std::map<std::string, std::vector<std::size_t>> by_type;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].label) throw InvalidInput("balance_affordances: unlabeled record");
        by_type[records[i].label->type_key()].push_back(i);
    }
    if (by_type.size() < 2) return records;

    std::vector<std::pair<std::string, std::size_t>> counts;
    for (const auto& [key, members] : by_type) counts.emplace_back(key, members.size());
    std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
        return a.second > b.second || (a.second == b.second && a.first < b.first);
    });
    const std::size_t top = counts[0].second;
    const std::size_t second = counts[1].second;
    if (top <= 2 * second) return records;

    // Farthest-point selection over pose parameters keeps the retained
    // samples spread out.
    const auto& members = by_type[counts[0].first];
    const std::size_t keep_count = 2 * second;
    std::vector<VecX> params;
    params.reserve(members.size());
    for (std::size_t idx : members) {
        VecX p(2 * HandPose::kParamCount);
        p.head(HandPose::kParamCount) = records[idx].right.to_params();
        p.tail(HandPose::kParamCount) = records[idx].left.to_params();
        params.push_back(std::move(p));
    }
    std::vector<char> kept(members.size(), 0);
    std::vector<double> dist(members.size(), std::numeric_limits<double>::infinity());
    std::size_t current = 0;
    kept[current] = 1;
    for (std::size_t picked = 1; picked < keep_count; ++picked) {
        double best = -1.0;
        std::size_t next = 0;
        for (std::size_t k = 0; k < members.size(); ++k) {
            if (kept[k]) continue;
            dist[k] = std::min(dist[k], (params[k] - params[current]).squaredNorm());
            if (dist[k] > best) {
                best = dist[k];
                next = k;
            }
        }
        kept[next] = 1;
        current = next;
    }

    std::vector<GraspRecord> out;
    out.reserve(records.size() - (members.size() - keep_count));
    std::map<std::size_t, bool> drop;
    for (std::size_t k = 0; k < members.size(); ++k)
        if (!kept[k]) drop[members[k]] = true;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (!drop.count(i)) out.push_back(records[i]);
    return out;
}

IngestReport ingest_single_hand(std::istream& in) {
    IngestReport report;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            IngestedGrasp g;
            g.object_id = j.at("object").get<std::string>();
            g.scale = j.at("scale").get<double>();
            g.pose = pose_from_json(j, "", Chirality::Right);
            report.grasps.push_back(std::move(g));
        } catch (const std::exception& e) {
            report.errors.push_back("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return report;
}

IngestReport ingest_single_hand_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open grasp file: " + path);
    return ingest_single_hand(in);
}

void write_records(std::ostream& out, const std::vector<GraspRecord>& records) {
    for (const auto& r : records) out << r.to_json_line() << "\n";
}

void write_records_file(const std::string& path, const std::vector<GraspRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    write_records(out, records);
}

std::vector<GraspRecord> read_records(std::istream& in) {
    std::vector<GraspRecord> records;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            records.push_back(GraspRecord::from_json_line(line));
        } catch (const std::exception& e) {
            throw InvalidInput("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return records;
}

std::vector<GraspRecord> read_records_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open records file: " + path);
    return read_records(in);
}

ObjectParts read_object_parts_file(const std::string& path, Index expected_points) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open parts file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        const json j = json::parse(buf.str());
        const auto& part = j.at("part");
        ObjectParts parts;
        parts.part_of_point.reserve(part.size());
        for (const auto& p : part) parts.part_of_point.push_back(p.get<std::string>());
        if (expected_points >= 0 && static_cast<Index>(parts.part_of_point.size()) != expected_points)
            throw InvalidInput("parts file: " + std::to_string(parts.part_of_point.size()) +
                               " labels for " + std::to_string(expected_points) + " points");
        return parts;
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("parts file: ") + e.what());
    }
}

void write_object_parts_file(const std::string& path, const ObjectModel& object,
                             const ObjectParts& parts) {
    json j;
    json pts = json::array();
    for (Index i = 0; i < object.cloud().size(); ++i)
        pts.push_back({object.cloud().points(i, 0), object.cloud().points(i, 1),
                       object.cloud().points(i, 2)});
    j["points"] = std::move(pts);
    j["part"] = parts.part_of_point;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << j.dump();
}

}  // namespace dhg
