#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace semcx {

/// Tokenization switches applied at load time. The policy is recorded into
/// every Dataset it produced so a report can be regenerated from the raw file.
struct NormalizationPolicy {
    bool lowercase = true;
    bool strip_punctuation = true;
    bool collapse_whitespace = true;

    bool operator==(const NormalizationPolicy&) const = default;
};

struct Example {
    std::string id;
    std::string transcript;             // raw text as found in the file
    std::vector<std::string> tokens;    // normalized, never empty once loaded
    std::string label;
};

struct Dataset {
    std::vector<Example> examples;
    NormalizationPolicy policy;
    std::string source_path;

    std::size_t size() const { return examples.size(); }
    bool empty() const { return examples.empty(); }
};

enum class DatasetFormat {
    DelimitedColumns,       // header row names id/transcript/label, comma or tab separated
    LineDelimitedRecords,   // one JSON object per line: {"id"?, "text", "label"}
};

struct LoadSummary {
    std::size_t parsed_records = 0;
    std::size_t dropped_empty = 0;      // transcripts that normalized to zero tokens
    std::vector<std::string> dropped_ids;
};

struct LoadResult {
    Dataset dataset;
    LoadSummary summary;
};

/// Input problems (unreadable file, malformed record, bad embedding row, ...).
/// The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Deterministic tokenization: lowercase / punctuation stripping / whitespace
/// collapsing as flagged, then split on whitespace. May return an empty
/// sequence. Only ASCII case and punctuation are touched so UTF-8 multi-byte
/// sequences pass through unchanged.
std::vector<std::string> normalize(std::string_view text, const NormalizationPolicy& policy);

/// Sniffs the format from the first non-blank line ('{' starts a JSON record).
DatasetFormat detect_format(const std::string& path);

/// Loads and normalizes a dataset. Examples whose transcript normalizes to
/// zero tokens are dropped and counted in the summary; everything else that
/// violates the record contract (missing field, duplicate id, empty label)
/// raises InputError with the line number.
LoadResult load_dataset(const std::string& path, DatasetFormat format,
                        const NormalizationPolicy& policy = {});

/// One representative per distinct (token sequence, label) pair, first
/// occurrence kept, order stable.
Dataset unique_examples(const Dataset& d);

/// Serializes a dataset as line-delimited records (the loader's format (b)).
/// Used by the subsample command; byte-deterministic.
std::string to_jsonl(const Dataset& d);

}  // namespace semcx
