#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "semcx/corpus.hpp"

namespace semcx {

/// One fixed-dimension real vector per analyzed example, row i aligned to
/// example i. Immutable once built.
struct EmbeddingMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // row-major
    std::string encoder_tag;

    std::span<const double> row(std::size_t i) const {
        return {data.data() + i * cols, cols};
    }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

struct LdaOptions {
    std::size_t topic_count = 8;     // K
    double doc_topic_prior = 6.25;   // alpha
    double topic_word_prior = 0.01;  // beta
    std::size_t iterations = 500;    // Gibbs sweeps
    std::uint64_t seed = 0;
};

/// K = max(number of distinct labels, 8), alpha = 50/K, beta = 0.01,
/// 500 sweeps. All of these are CLI-exposed.
LdaOptions default_lda_options(const Dataset& d, std::uint64_t seed);

/// Collapsed-Gibbs LDA state. Documents are the distinct token sequences of
/// the training dataset; the final sweep's per-document topic counts are kept
/// so encoding a fitted transcript is a lookup.
struct LdaModel {
    std::size_t topic_count = 0;
    double doc_topic_prior = 0.0;
    double topic_word_prior = 0.0;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;

    std::vector<std::string> vocabulary;                    // column -> token
    std::unordered_map<std::string, std::uint32_t> vocab_index;
    std::vector<std::uint32_t> topic_word_counts;           // K x V, row-major
    std::vector<std::uint64_t> topic_totals;                // K
    std::unordered_map<std::string, std::vector<std::uint32_t>> doc_topics;  // joined tokens -> K counts

    bool degenerate_fit = false;  // vocabulary smaller than K

    std::string tag() const;
};

/// Single-threaded collapsed Gibbs sampling, fully determined by the seed.
LdaModel fit_lda(const Dataset& d, const LdaOptions& opts);

/// Row i = smoothed document-topic distribution for example i:
/// (assignment counts + alpha), normalized. Transcripts seen at fit time use
/// the stored final-sweep counts; unseen transcripts are folded in with a
/// sampler seeded from the model seed and the token sequence, so equal token
/// sequences always produce equal rows. Out-of-vocabulary tokens are skipped;
/// a document with no in-vocabulary tokens encodes as the uniform row.
EmbeddingMatrix encode_lda(const LdaModel& model, const Dataset& d);

/// Reads `id<TAB>v1,v2,...,vD` lines and aligns rows to the dataset's
/// examples. Missing ids, inconsistent dimensions and non-finite values are
/// fatal, with the offending row identified. Extra ids are ignored.
EmbeddingMatrix load_embeddings(const std::string& path, const Dataset& d);

/// 1 - u.v / (|u||v|), clamped to [0, 2]. Bytewise-equal vectors give exactly
/// 0. Throws std::domain_error on a zero vector, std::invalid_argument on a
/// dimension mismatch.
double cosine_distance(std::span<const double> u, std::span<const double> v);

}  // namespace semcx
