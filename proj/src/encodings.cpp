#include "semcx/encodings.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace semcx {

namespace {

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& tok : tokens) {
        out += tok;
        out += '\x1f';
    }
    return out;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Uniform in [0, 1) built directly from the generator's bits, so draws are
// identical on every platform (the standard distributions are not).
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t sample_index(std::mt19937_64& rng, const std::vector<double>& weights, double total) {
    const double target = uniform01(rng) * total;
    double cum = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        cum += weights[k];
        if (target < cum) return k;
    }
    return weights.size() - 1;
}

struct GibbsCounts {
    std::vector<std::uint32_t> doc_topic;    // D x K
    std::vector<std::uint32_t> topic_word;   // K x V
    std::vector<std::uint64_t> topic_total;  // K
};

// One full sweep of collapsed Gibbs over every token position.
void gibbs_sweep(const std::vector<std::vector<std::uint32_t>>& docs,
                 std::vector<std::vector<std::uint32_t>>& assignments, GibbsCounts& counts,
                 std::size_t K, std::size_t V, double alpha, double beta, std::mt19937_64& rng,
                 std::vector<double>& weights) {
    const double vbeta = static_cast<double>(V) * beta;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        auto* dt = &counts.doc_topic[d * K];
        for (std::size_t i = 0; i < docs[d].size(); ++i) {
            const std::uint32_t w = docs[d][i];
            const std::uint32_t old_k = assignments[d][i];
            --dt[old_k];
            --counts.topic_word[static_cast<std::size_t>(old_k) * V + w];
            --counts.topic_total[old_k];

            double total = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                const double wk =
                    (dt[k] + alpha) * (counts.topic_word[k * V + w] + beta) /
                    (static_cast<double>(counts.topic_total[k]) + vbeta);
                weights[k] = wk;
                total += wk;
            }
            const auto new_k = static_cast<std::uint32_t>(sample_index(rng, weights, total));
            assignments[d][i] = new_k;
            ++dt[new_k];
            ++counts.topic_word[static_cast<std::size_t>(new_k) * V + w];
            ++counts.topic_total[new_k];
        }
    }
}

void write_theta(double* row, const std::uint32_t* doc_topic, std::size_t K, std::size_t len,
                 double alpha) {
    const double denom = static_cast<double>(len) + static_cast<double>(K) * alpha;
    for (std::size_t k = 0; k < K; ++k) {
        row[k] = (doc_topic[k] + alpha) / denom;
    }
}

std::string format_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

LdaOptions default_lda_options(const Dataset& d, std::uint64_t seed) {
    std::unordered_set<std::string> labels;
    for (const auto& ex : d.examples) {
        labels.insert(ex.label);
    }
    LdaOptions opts;
    opts.topic_count = std::max<std::size_t>(labels.size(), 8);
    opts.doc_topic_prior = 50.0 / static_cast<double>(opts.topic_count);
    opts.topic_word_prior = 0.01;
    opts.iterations = 500;
    opts.seed = seed;
    return opts;
}

std::string LdaModel::tag() const {
    return "lda-K" + std::to_string(topic_count) + "-a" + format_g(doc_topic_prior) + "-b" +
           format_g(topic_word_prior) + "-i" + std::to_string(iterations) + "-s" +
           std::to_string(seed);
}

LdaModel fit_lda(const Dataset& d, const LdaOptions& opts) {
    if (d.empty()) {
        throw std::invalid_argument("fit_lda requires a non-empty dataset");
    }
    if (opts.topic_count < 2) {
        throw std::invalid_argument("fit_lda requires topic_count >= 2");
    }
    if (opts.iterations < 1) {
        throw std::invalid_argument("fit_lda requires iterations >= 1");
    }

    LdaModel model;
    model.topic_count = opts.topic_count;
    model.doc_topic_prior = opts.doc_topic_prior;
    model.topic_word_prior = opts.topic_word_prior;
    model.iterations = opts.iterations;
    model.seed = opts.seed;

    // Documents are the distinct token sequences: encodings must be a
    // function of the token sequence alone, so duplicates share one document.
    std::vector<const std::vector<std::string>*> transcripts;
    {
        std::unordered_set<std::string> seen;
        for (const auto& ex : d.examples) {
            if (seen.insert(join_tokens(ex.tokens)).second) {
                transcripts.push_back(&ex.tokens);
            }
        }
    }

    for (const auto* tokens : transcripts) {
        for (const auto& tok : *tokens) {
            if (model.vocab_index.emplace(tok, static_cast<std::uint32_t>(model.vocabulary.size()))
                    .second) {
                model.vocabulary.push_back(tok);
            }
        }
    }
    const std::size_t V = model.vocabulary.size();
    const std::size_t K = model.topic_count;
    model.degenerate_fit = V < K;

    std::vector<std::vector<std::uint32_t>> docs;
    docs.reserve(transcripts.size());
    for (const auto* tokens : transcripts) {
        std::vector<std::uint32_t> ids;
        ids.reserve(tokens->size());
        for (const auto& tok : *tokens) {
            ids.push_back(model.vocab_index.at(tok));
        }
        docs.push_back(std::move(ids));
    }

    GibbsCounts counts;
    counts.doc_topic.assign(docs.size() * K, 0);
    counts.topic_word.assign(K * V, 0);
    counts.topic_total.assign(K, 0);

    std::mt19937_64 rng(opts.seed);
    std::vector<std::vector<std::uint32_t>> assignments(docs.size());
    for (std::size_t di = 0; di < docs.size(); ++di) {
        assignments[di].resize(docs[di].size());
        for (std::size_t i = 0; i < docs[di].size(); ++i) {
            const auto k = static_cast<std::uint32_t>(rng() % K);
            assignments[di][i] = k;
            ++counts.doc_topic[di * K + k];
            ++counts.topic_word[static_cast<std::size_t>(k) * V + docs[di][i]];
            ++counts.topic_total[k];
        }
    }

    std::vector<double> weights(K);
    for (std::size_t sweep = 0; sweep < opts.iterations; ++sweep) {
        gibbs_sweep(docs, assignments, counts, K, V, opts.doc_topic_prior, opts.topic_word_prior,
                    rng, weights);
    }

    model.topic_word_counts = std::move(counts.topic_word);
    model.topic_totals = std::move(counts.topic_total);
    for (std::size_t di = 0; di < docs.size(); ++di) {
        std::vector<std::uint32_t> dt(counts.doc_topic.begin() + di * K,
                                      counts.doc_topic.begin() + (di + 1) * K);
        model.doc_topics.emplace(join_tokens(*transcripts[di]), std::move(dt));
    }
    return model;
}

EmbeddingMatrix encode_lda(const LdaModel& model, const Dataset& d) {
    const std::size_t K = model.topic_count;
    const std::size_t V = model.vocabulary.size();
    EmbeddingMatrix e;
    e.rows = d.size();
    e.cols = K;
    e.data.assign(e.rows * K, 0.0);
    e.encoder_tag = model.tag();

    const double alpha = model.doc_topic_prior;
    const double beta = model.topic_word_prior;
    const double vbeta = static_cast<double>(V) * beta;

    // Unseen transcripts fold in against the frozen topic-word counts with a
    // sampler seeded from (model seed, token sequence); results are cached by
    // transcript so equal token sequences share a row.
    std::unordered_map<std::string, std::vector<std::uint32_t>> folded;
    std::vector<double> weights(K);

    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto& tokens = d.examples[i].tokens;
        const std::string key = join_tokens(tokens);

        const std::vector<std::uint32_t>* dt = nullptr;
        if (auto it = model.doc_topics.find(key); it != model.doc_topics.end()) {
            dt = &it->second;
        } else if (auto fit = folded.find(key); fit != folded.end()) {
            dt = &fit->second;
        } else {
            std::vector<std::uint32_t> in_vocab;
            in_vocab.reserve(tokens.size());
            for (const auto& tok : tokens) {
                if (auto vit = model.vocab_index.find(tok); vit != model.vocab_index.end()) {
                    in_vocab.push_back(vit->second);
                }
            }
            std::vector<std::uint32_t> doc_topic(K, 0);
            if (!in_vocab.empty()) {
                std::mt19937_64 rng(splitmix64(model.seed ^ fnv1a64(key)));
                std::vector<std::uint32_t> assignment(in_vocab.size());
                for (std::size_t t = 0; t < in_vocab.size(); ++t) {
                    const auto k = static_cast<std::uint32_t>(rng() % K);
                    assignment[t] = k;
                    ++doc_topic[k];
                }
                for (std::size_t sweep = 0; sweep < model.iterations; ++sweep) {
                    for (std::size_t t = 0; t < in_vocab.size(); ++t) {
                        const std::uint32_t w = in_vocab[t];
                        --doc_topic[assignment[t]];
                        double total = 0.0;
                        for (std::size_t k = 0; k < K; ++k) {
                            const double wk =
                                (doc_topic[k] + alpha) *
                                (model.topic_word_counts[k * V + w] + beta) /
                                (static_cast<double>(model.topic_totals[k]) + vbeta);
                            weights[k] = wk;
                            total += wk;
                        }
                        const auto nk =
                            static_cast<std::uint32_t>(sample_index(rng, weights, total));
                        assignment[t] = nk;
                        ++doc_topic[nk];
                    }
                }
            }
            dt = &folded.emplace(key, std::move(doc_topic)).first->second;
        }

        std::size_t len = 0;
        for (std::size_t k = 0; k < K; ++k) len += (*dt)[k];
        write_theta(&e.data[i * K], dt->data(), K, len, alpha);
    }
    return e;
}

EmbeddingMatrix load_embeddings(const std::string& path, const Dataset& d) {
    std::ifstream in(path);
    if (!in) {
        throw InputError(path + ": cannot open embeddings file");
    }

    std::unordered_map<std::string, std::vector<double>> by_id;
    std::size_t dim = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto where = path + ":" + std::to_string(line_no);
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw InputError(where + ": expected 'id<TAB>v1,v2,...'");
        }
        std::string id = line.substr(0, tab);
        std::vector<double> values;
        const char* p = line.c_str() + tab + 1;
        const char* end = line.c_str() + line.size();
        while (p < end) {
            char* next = nullptr;
            const double v = std::strtod(p, &next);
            if (next == p) {
                throw InputError(where + ": malformed value for id '" + id + "'");
            }
            if (!std::isfinite(v)) {
                throw InputError(where + ": non-finite value in row for id '" + id + "'");
            }
            values.push_back(v);
            p = next;
            if (p < end) {
                if (*p != ',') {
                    throw InputError(where + ": expected ',' between values for id '" + id + "'");
                }
                ++p;
                if (p == end) {
                    throw InputError(where + ": trailing ',' in row for id '" + id + "'");
                }
            }
        }
        if (values.empty()) {
            throw InputError(where + ": no values for id '" + id + "'");
        }
        if (dim == 0) {
            dim = values.size();
        } else if (values.size() != dim) {
            throw InputError(where + ": dimension mismatch for id '" + id + "' (expected " +
                             std::to_string(dim) + ", got " + std::to_string(values.size()) + ")");
        }
        if (!by_id.emplace(std::move(id), std::move(values)).second) {
            throw InputError(where + ": duplicate embedding row");
        }
    }
    if (by_id.empty()) {
        throw InputError(path + ": empty embeddings file");
    }

    EmbeddingMatrix e;
    e.rows = d.size();
    e.cols = dim;
    e.data.reserve(e.rows * dim);
    e.encoder_tag = "external:" + path;
    for (const auto& ex : d.examples) {
        const auto it = by_id.find(ex.id);
        if (it == by_id.end()) {
            throw InputError(path + ": no embedding row for example id '" + ex.id + "'");
        }
        e.data.insert(e.data.end(), it->second.begin(), it->second.end());
    }
    return e;
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("cosine_distance: dimension mismatch");
    }
    if (u.size() == v.size() && u.data() != nullptr &&
        std::memcmp(u.data(), v.data(), u.size() * sizeof(double)) == 0) {
        double norm = 0.0;
        for (double x : u) norm += x * x;
        if (norm == 0.0) {
            throw std::domain_error("cosine_distance undefined for a zero vector");
        }
        return 0.0;
    }
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) {
        throw std::domain_error("cosine_distance undefined for a zero vector");
    }
    double cos = dot / (std::sqrt(nu) * std::sqrt(nv));
    cos = std::clamp(cos, -1.0, 1.0);
    const double dist = 1.0 - cos;
    return std::clamp(dist, 0.0, 2.0);
}

}  // namespace semcx
