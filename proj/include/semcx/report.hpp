#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "semcx/corpus.hpp"
#include "semcx/encodings.hpp"
#include "semcx/geometric.hpp"
#include "semcx/lexical.hpp"

namespace semcx {

enum class EncoderKind { Lda, External };

/// Everything build_report needs beyond the dataset itself.
struct MeasureConfig {
    Scope scope = Scope::UniqueTranscripts;
    std::vector<EncoderKind> encoders;  // empty -> lexical-only report
    std::string embeddings_path;        // required when External is requested

    std::optional<std::size_t> lda_topics;
    std::optional<double> lda_alpha;
    std::optional<double> lda_beta;
    std::optional<std::size_t> lda_iterations;

    std::size_t max_geometric_points = 10000;
    std::uint64_t seed = 0;
    std::string metric = "cosine";
};

/// A Table-1-shaped result set for one dataset. Every value is reproducible
/// from the provenance fields plus the raw input file. generated_at is
/// presentation-only: it appears in human tables but never in machine
/// records, which must be byte-reproducible.
struct ComplexityReport {
    std::string tool_version;
    std::string generated_at;
    std::string source_path;
    NormalizationPolicy policy;
    Scope scope = Scope::UniqueTranscripts;
    std::string metric_tag = "cosine";

    std::size_t total_examples = 0;
    std::size_t analyzed_examples = 0;  // after scope dedup and any cap subsample
    bool subsampled = false;
    std::uint64_t seed = 0;

    LexicalMeasures lexical;
    std::vector<GeometricMeasures> geometric;  // one block per encoder used

    bool has_degenerate_flags() const;
};

/// Value equality over everything a machine record carries (generated_at is
/// excluded by design).
bool values_equal(const ComplexityReport& a, const ComplexityReport& b);

/// Per-encoder intermediates for debug dumps (MST edge list, clusters).
struct GeometricDetail {
    std::string encoder_tag;
    MstComplexityResult mst;
    AriComplexityResult ari;
    std::vector<std::string> ids;     // analyzed example ids, row-aligned
    std::vector<std::string> labels;  // analyzed example labels, row-aligned
};

/// Computes all requested measures. Geometric vertices are the analyzed
/// examples: scope-deduplicated on (tokens, label) and, above
/// max_geometric_points, seeded-uniformly subsampled with the report flagged.
/// Pass `details` to capture the per-encoder MST and clustering.
ComplexityReport build_report(const Dataset& d, const MeasureConfig& cfg,
                              std::vector<GeometricDetail>* details = nullptr);

/// Arithmetic mean; throws std::invalid_argument on empty input.
double average_geometric(std::span<const double> values);

struct CorrelationResult {
    std::vector<std::pair<double, double>> points;  // (complexity, accuracy)
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    bool degenerate_constant_y = false;
    std::string complexity_column;
    bool relative = false;
};

/// Ordinary least squares with r^2 = 1 - SS_res/SS_tot. Constant y fits
/// perfectly by definition (r^2 = 1, flagged). Requires >= 2 points and
/// nonzero x variance.
CorrelationResult linear_fit_r2(std::span<const std::pair<double, double>> points);

}  // namespace semcx
