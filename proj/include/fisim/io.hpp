#ifndef FISIM_IO_HPP
#define FISIM_IO_HPP

#include <optional>
#include <stdexcept>
#include <string>

#include "fisim/analysis.hpp"
#include "fisim/pipeline.hpp"
#include "fisim/timing.hpp"

namespace fisim {

/// Parse/validation failure with a path into the offending document.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& path, const std::string& reason)
        : std::runtime_error(path + ": " + reason), path(path), reason(reason) {}

    std::string path;
    std::string reason;
};

/// Scan defaults carried by an experiment file; command-line flags override
/// any of them.
struct ScanSpec {
    std::optional<std::string> target;
    std::optional<double> from;
    std::optional<double> to;
    std::optional<int> steps;
    std::optional<int> order;
    bool positions = false;
    std::optional<double> wavelength;
    std::optional<int> multiplicity;
    std::vector<DetectorId> pattern;
    std::vector<DetectorId> forbid;

    bool operator==(const ScanSpec&) const = default;
};

struct ExperimentDoc {
    Experiment experiment;
    std::optional<Geometry> geometry;
    std::optional<ScanSpec> scan;

    bool operator==(const ExperimentDoc&) const = default;
};

/// Parses and validates a .experiment.json document. Every failure throws
/// ValidationError naming the document path; no input crashes.
ExperimentDoc parse_experiment(const std::string& text);
ExperimentDoc load_experiment(const std::string& file_path);

/// Inverse of parse_experiment: parse(serialize(doc)) == doc.
std::string serialize_experiment(const ExperimentDoc& doc);

/// Canonically sorted JSON list of {occupation, re, im, order}.
std::string serialize_state(const QuantumState& state);
QuantumState parse_state(const std::string& text);

/// CSV with header "x,x_kind,y,pattern"; the pattern column encodes
/// required ids joined by '+' and forbidden ids each prefixed by '-'.
std::string curve_to_csv(const ScanCurve& curve);
ScanCurve curve_from_csv(const std::string& text);

std::string fit_result_to_json(const FitResult& fit);

SourceImbalanceTable imbalance_table_from_json(const std::string& text);
SourceImbalanceTable load_imbalance_table(const std::string& file_path);

std::string arrival_report_to_json(const ArrivalReport& report);

std::string read_file(const std::string& file_path);

} // namespace fisim

#endif
