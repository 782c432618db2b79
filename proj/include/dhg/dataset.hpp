#pragma once

#include "dhg/contact_repr.hpp"
#include "dhg/grasp_metrics.hpp"
#include "dhg/hand_model.hpp"
#include "dhg/symmetry_mirror.hpp"
#include "dhg/symopt.hpp"
#include "dhg/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dhg {

/// Per-hand text label "<chirality> <category> <part>" (lowercase tokens,
/// single spaces); the pair renders as the instruction format
/// "right <category> <part>, left <category> <part>".
struct AffordanceLabel {
    std::string category;
    std::string right_part;
    std::string left_part;

    std::string render(Chirality chi) const;
    std::string render_pair() const;
    /// Grouping key for balancing.
    std::string type_key() const { return category + "/" + right_part + "+" + left_part; }
};

struct TtaProvenance {
    int accepted_steps = 0;
    double final_energy = 0.0;
};

/// One dataset row: object binding, both poses, optional contact blocks and
/// label, and pipeline provenance.
struct GraspRecord {
    std::string object_id;
    double scale = 1.0;  // logged scale of the source point cloud
    HandPose right;
    HandPose left;
    std::optional<ContactRepresentation> contact;
    std::optional<AffordanceLabel> label;

    // Provenance.
    GraspStatus status = GraspStatus::Proposal;
    std::optional<SymmetryReport> symmetry;
    std::vector<double> energy_trace_tail;
    std::optional<TtaProvenance> tta;

    static GraspRecord from_dual_grasp(const DualGrasp& grasp, double scale,
                                       const std::optional<SymmetryReport>& symmetry,
                                       std::size_t trace_tail = 4);

    std::string to_json_line() const;
    static GraspRecord from_json_line(const std::string& line);
};

/// The nine stock categories; the vocabulary itself is open.
const std::vector<std::string>& default_categories();

/// More than 95% of a hand's contact mass (sum of contact values grouped by
/// object part) must fall on one part, for both hands, to earn a label.
/// Returns nullopt below or at the threshold, and for zero contact mass
/// (diagnostic notes the reason).
std::optional<AffordanceLabel> label_grasp(const GraspRecord& record, const ObjectParts& parts,
                                           const std::string& category,
                                           std::string* diagnostic = nullptr);

/// When the most frequent affordance type exceeds twice the second most
/// frequent, it is truncated to exactly that bound; retained samples are
/// chosen by farthest-point selection over the pose parameters so diversity
/// survives the cut. Inputs with fewer than two types pass through.
std::vector<GraspRecord> balance_affordances(const std::vector<GraspRecord>& records);

struct IngestedGrasp {
    std::string object_id;
    double scale = 1.0;
    HandPose pose;
};

struct IngestReport {
    std::vector<IngestedGrasp> grasps;
    std::vector<std::string> errors;  // "line N: reason"
};

/// JSON-Lines single-hand input, one record per line:
/// {"object": str, "scale": f64, "trans": [3], "rot6d": [6], "theta": [22]}.
/// Malformed lines are reported and skipped; valid lines still load.
IngestReport ingest_single_hand(std::istream& in);
IngestReport ingest_single_hand_file(const std::string& path);

void write_records(std::ostream& out, const std::vector<GraspRecord>& records);
void write_records_file(const std::string& path, const std::vector<GraspRecord>& records);
std::vector<GraspRecord> read_records(std::istream& in);
std::vector<GraspRecord> read_records_file(const std::string& path);

/// Part mapping JSON {"points": [[x,y,z],...], "part": ["lid",...]} aligned
/// with the object's sampled cloud.
ObjectParts read_object_parts_file(const std::string& path, Index expected_points);
void write_object_parts_file(const std::string& path, const ObjectModel& object,
                             const ObjectParts& parts);

}  // namespace dhg
