#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "semcx/corpus.hpp"

namespace semcx {

/// Whether duplicated transcripts are counted once or per occurrence.
enum class Scope {
    AllExamples,
    UniqueTranscripts,
};

const char* to_string(Scope scope);
Scope scope_from_string(std::string_view name);  // throws InputError on unknown name

using NGram = std::vector<std::string>;

/// Multiset of n-grams of one fixed order. Keys iterate in lexicographic
/// token order, which the filtration tie-break relies on.
struct NGramProfile {
    std::size_t order = 0;
    std::map<NGram, std::size_t> counts;
    std::size_t total = 0;

    bool empty() const { return counts.empty(); }
    std::size_t unique_count() const { return counts.size(); }
};

struct LexicalMeasures {
    std::size_t vocabulary_size = 0;
    std::size_t unique_transcripts = 0;
    std::map<std::size_t, double> entropy_by_order;  // orders 1..3, bits
    double average_entropy = 0.0;
    std::vector<std::size_t> empty_orders;  // orders whose profile was empty (entropy taken as 0)
};

/// Number of distinct tokens across all example token sequences.
std::size_t vocabulary_size(const Dataset& d);

/// Number of distinct token sequences (label-insensitive).
std::size_t unique_transcript_count(const Dataset& d);

/// Sliding-window n-grams within each token sequence; no cross-example
/// windows, no padding. Sequences shorter than n contribute nothing.
NGramProfile ngram_profile(const Dataset& d, std::size_t order, Scope scope);

/// Shannon entropy in bits over the empirical n-gram distribution.
/// Throws std::domain_error on an empty profile (entropy undefined).
double ngram_entropy(const NGramProfile& profile);

/// Vocabulary, unique transcripts, entropies for n in {1,2,3} and their mean.
LexicalMeasures lexical_measures(const Dataset& d, Scope scope);

}  // namespace semcx
