#include "semcx/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace semcx {

namespace {

// Tokens interned against the sorted vocabulary, so id order equals
// lexicographic token order and packed n-gram keys sort like token tuples.
struct Interned {
    std::vector<std::string> vocab;  // sorted
    std::vector<std::vector<std::uint32_t>> docs;

    std::size_t vocab_size() const { return vocab.size(); }
};

Interned intern(const Dataset& d) {
    Interned out;
    std::unordered_set<std::string> seen;
    for (const auto& ex : d.examples) {
        for (const auto& tok : ex.tokens) {
            if (seen.insert(tok).second) {
                out.vocab.push_back(tok);
            }
        }
    }
    std::sort(out.vocab.begin(), out.vocab.end());
    std::unordered_map<std::string, std::uint32_t> index;
    index.reserve(out.vocab.size());
    for (std::uint32_t i = 0; i < out.vocab.size(); ++i) {
        index.emplace(out.vocab[i], i);
    }
    out.docs.reserve(d.size());
    for (const auto& ex : d.examples) {
        std::vector<std::uint32_t> ids;
        ids.reserve(ex.tokens.size());
        for (const auto& tok : ex.tokens) {
            ids.push_back(index.at(tok));
        }
        out.docs.push_back(std::move(ids));
    }
    return out;
}

// Keeps the first occurrence of each distinct id sequence.
std::vector<std::size_t> distinct_doc_indices(const std::vector<std::vector<std::uint32_t>>& docs) {
    std::vector<std::size_t> kept;
    struct VecHash {
        std::size_t operator()(const std::vector<std::uint32_t>& v) const {
            std::size_t h = 1469598103934665603ull;
            for (auto x : v) {
                h ^= x;
                h *= 1099511628211ull;
            }
            return h;
        }
    };
    std::unordered_set<std::vector<std::uint32_t>, VecHash> seen;
    seen.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (seen.insert(docs[i]).second) {
            kept.push_back(i);
        }
    }
    return kept;
}

constexpr std::size_t kPackBits = 21;  // 3 ids fit a uint64 while vocab < 2^21

}  // namespace

const char* to_string(Scope scope) {
    return scope == Scope::AllExamples ? "all" : "unique";
}

Scope scope_from_string(std::string_view name) {
    if (name == "all") return Scope::AllExamples;
    if (name == "unique") return Scope::UniqueTranscripts;
    throw InputError("unknown scope '" + std::string(name) + "' (expected 'unique' or 'all')");
}

std::size_t vocabulary_size(const Dataset& d) {
    std::unordered_set<std::string> vocab;
    for (const auto& ex : d.examples) {
        vocab.insert(ex.tokens.begin(), ex.tokens.end());
    }
    return vocab.size();
}

std::size_t unique_transcript_count(const Dataset& d) {
    std::unordered_set<std::string> seen;
    seen.reserve(d.size());
    for (const auto& ex : d.examples) {
        std::string key;
        for (const auto& tok : ex.tokens) {
            key += tok;
            key += '\x1f';
        }
        seen.insert(std::move(key));
    }
    return seen.size();
}

NGramProfile ngram_profile(const Dataset& d, std::size_t order, Scope scope) {
    if (order == 0) {
        throw std::invalid_argument("ngram order must be >= 1");
    }
    NGramProfile profile;
    profile.order = order;

    const auto interned = intern(d);
    std::vector<std::size_t> doc_ids;
    if (scope == Scope::UniqueTranscripts) {
        doc_ids = distinct_doc_indices(interned.docs);
    } else {
        doc_ids.resize(interned.docs.size());
        for (std::size_t i = 0; i < doc_ids.size(); ++i) doc_ids[i] = i;
    }

    const bool packable = order <= 3 && interned.vocab_size() < (1ull << kPackBits);
    if (packable) {
        std::unordered_map<std::uint64_t, std::size_t> counts;
        for (auto di : doc_ids) {
            const auto& doc = interned.docs[di];
            if (doc.size() < order) continue;
            for (std::size_t i = 0; i + order <= doc.size(); ++i) {
                std::uint64_t key = 0;
                for (std::size_t k = 0; k < order; ++k) {
                    key = (key << kPackBits) | doc[i + k];
                }
                ++counts[key];
                ++profile.total;
            }
        }
        std::vector<std::uint64_t> keys;
        keys.reserve(counts.size());
        for (const auto& [k, _] : counts) keys.push_back(k);
        std::sort(keys.begin(), keys.end());
        // Packed-key order equals token-tuple order, so hinted inserts land at
        // the end in O(1).
        for (auto key : keys) {
            NGram gram(order);
            for (std::size_t k = 0; k < order; ++k) {
                const auto shift = kPackBits * (order - 1 - k);
                gram[k] = interned.vocab[(key >> shift) & ((1ull << kPackBits) - 1)];
            }
            profile.counts.emplace_hint(profile.counts.end(), std::move(gram), counts[key]);
        }
    } else {
        for (auto di : doc_ids) {
            const auto& doc = interned.docs[di];
            if (doc.size() < order) continue;
            for (std::size_t i = 0; i + order <= doc.size(); ++i) {
                NGram gram(order);
                for (std::size_t k = 0; k < order; ++k) {
                    gram[k] = interned.vocab[doc[i + k]];
                }
                ++profile.counts[std::move(gram)];
                ++profile.total;
            }
        }
    }
    return profile;
}

double ngram_entropy(const NGramProfile& profile) {
    if (profile.empty()) {
        throw std::domain_error("entropy undefined for an empty n-gram profile");
    }
    const double total = static_cast<double>(profile.total);
    double h = 0.0;
    for (const auto& [gram, count] : profile.counts) {
        const double p = static_cast<double>(count) / total;
        h -= p * std::log2(p);
    }
    return h < 0.0 ? 0.0 : h;  // guard the single-unique-ngram rounding case
}

LexicalMeasures lexical_measures(const Dataset& d, Scope scope) {
    if (d.empty()) {
        throw std::invalid_argument("lexical measures require a non-empty dataset");
    }
    LexicalMeasures m;
    m.vocabulary_size = vocabulary_size(d);
    m.unique_transcripts = unique_transcript_count(d);
    double sum = 0.0;
    for (std::size_t order = 1; order <= 3; ++order) {
        const auto profile = ngram_profile(d, order, scope);
        double h = 0.0;
        if (profile.empty()) {
            m.empty_orders.push_back(order);
        } else {
            h = ngram_entropy(profile);
        }
        m.entropy_by_order[order] = h;
        sum += h;
    }
    m.average_entropy = sum / 3.0;
    return m;
}

}  // namespace semcx
