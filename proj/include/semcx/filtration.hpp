#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "semcx/corpus.hpp"
#include "semcx/lexical.hpp"
#include "semcx/report.hpp"

namespace semcx {

struct FiltrationConfig {
    std::size_t ngram_order = 3;
    double removal_fraction = 0.10;  // fraction of unique n-grams marked per step
    std::size_t steps = 1;
    std::uint64_t seed = 0;          // random baseline only; filtering itself is deterministic
};

/// The lowest-count n-grams of the profile, ties broken by lexicographic
/// n-gram order. The selection size is removal_fraction times the unique
/// n-gram count, rounded to nearest and floored at 1.
std::vector<NGram> least_frequent_ngrams(const NGramProfile& profile, double fraction);

struct FilterStepResult {
    Dataset dataset;
    bool aborted = false;     // removal would have emptied the dataset; input returned unchanged
    std::size_t removed = 0;  // examples dropped by this step
};

/// Ranks n-gram frequencies by occurrence count over the whole dataset,
/// marks the least frequent set, and removes every example whose own token
/// windows contain a marked n-gram. Examples shorter than the order can
/// never be removed. Never empties the dataset.
FilterStepResult filter_step(const Dataset& d, const FiltrationConfig& cfg);

using MeasureHook = std::function<ComplexityReport(const Dataset&)>;

struct FiltrationStepRecord {
    std::size_t index = 0;                  // 0 is the unfiltered dataset
    std::vector<std::string> surviving_ids;
    std::size_t removed = 0;
    ComplexityReport report;
};

struct FiltrationTrace {
    FiltrationConfig config;
    std::string source_path;
    std::vector<FiltrationStepRecord> steps;  // strictly nested surviving sets
    bool aborted = false;
    std::size_t abort_step = 0;  // step index that refused to run (when aborted)
};

/// Applies filter_step iteratively, recomputing the report after each step.
/// Stops early when a step would empty the dataset.
FiltrationTrace filtration_sequence(const Dataset& d, const FiltrationConfig& cfg,
                                    const MeasureHook& measure);

/// Seeded uniform sample without replacement keeping
/// round-up(keep_fraction * N) examples, original order preserved.
Dataset random_subsample(const Dataset& d, double keep_fraction, std::uint64_t seed);

}  // namespace semcx
