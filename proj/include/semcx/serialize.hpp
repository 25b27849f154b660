#pragma once

#include <string>
#include <utility>
#include <vector>

#include "semcx/filtration.hpp"
#include "semcx/report.hpp"

namespace semcx {

// Machine records are line-delimited `key<TAB>value` pairs in a fixed key
// order, UTF-8, "\n" endings, doubles at full round-trip precision. They are
// byte-reproducible for fixed inputs and seeds.

std::string to_record(const ComplexityReport& report);
ComplexityReport report_from_record(const std::string& text);

std::string to_record(const CorrelationResult& result);
CorrelationResult correlation_from_record(const std::string& text);

/// record_type value of a serialized record ("complexity_report",
/// "filtration_trace", "correlation_result", "subsample_manifest").
std::string record_type_of(const std::string& text);

// Human tables mirror the paper-style layout: measures at one decimal,
// machine records keep full precision.
std::string render_human_table(const ComplexityReport& report);
std::string render_plot_data(const ComplexityReport& report);  // measure<TAB>value rows

std::string render_human_table(const CorrelationResult& result);
std::string render_plot_data(const CorrelationResult& result);  // x<TAB>y rows

// Trace persistence: <dir>/trace_manifest plus step_<k>/ids.txt and
// step_<k>/report.mrec per step.
void write_trace(const std::string& dir, const FiltrationTrace& trace);
std::string trace_manifest_record(const FiltrationTrace& trace);

/// Loaded view of a persisted manifest; step reports stay on disk.
struct TraceManifest {
    FiltrationConfig config;
    std::string source_path;
    bool aborted = false;
    std::size_t abort_step = 0;
    struct Step {
        std::size_t index = 0;
        std::size_t examples = 0;
        std::size_t removed = 0;
        double average_entropy = 0.0;
        std::string ids_path;     // relative to the manifest directory
        std::string report_path;  // relative to the manifest directory
    };
    std::vector<Step> steps;
};

TraceManifest trace_manifest_from_record(const std::string& text);
std::string render_human_table(const TraceManifest& manifest);
std::string render_plot_data(const TraceManifest& manifest);  // step<TAB>average_entropy rows

std::string subsample_manifest_record(const std::string& source_path, double keep_fraction,
                                      std::uint64_t seed, std::size_t input_examples,
                                      std::size_t kept_examples);

// Shared formatting helpers (also used by tests).
std::string format_full(double v);              // shortest round-trip decimal
std::string format_fixed1(double v);            // one decimal, halves away from zero
std::string escape_value(const std::string& v);
std::string unescape_value(const std::string& v);

/// Read a whole file or throw InputError.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Ordered key/value view of a record; throws InputError on malformed lines.
std::vector<std::pair<std::string, std::string>> parse_record(const std::string& text);

}  // namespace semcx
