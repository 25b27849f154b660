#include "semcx/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

namespace semcx {

namespace {

// Rejection-sampled bound so draws do not depend on the standard library's
// (implementation-defined) uniform_int_distribution.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

std::size_t fraction_count(double fraction, std::size_t total) {
    const auto rounded = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
    return std::clamp<std::size_t>(rounded, 1, total);
}

}  // namespace

std::vector<NGram> least_frequent_ngrams(const NGramProfile& profile, double fraction) {
    if (profile.empty()) {
        throw std::invalid_argument("least_frequent_ngrams requires a non-empty profile");
    }
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("removal fraction must lie in (0, 1)");
    }
    // Map iteration is lexicographic; stable sort by count keeps that order
    // inside each count bucket, which is the documented tie-break.
    std::vector<const std::pair<const NGram, std::size_t>*> ranked;
    ranked.reserve(profile.counts.size());
    for (const auto& entry : profile.counts) {
        ranked.push_back(&entry);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto* a, const auto* b) { return a->second < b->second; });

    const std::size_t take = fraction_count(fraction, ranked.size());
    std::vector<NGram> marked;
    marked.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        marked.push_back(ranked[i]->first);
    }
    return marked;
}

FilterStepResult filter_step(const Dataset& d, const FiltrationConfig& cfg) {
    if (d.empty()) {
        throw std::invalid_argument("filter_step requires a non-empty dataset");
    }
    FilterStepResult result;

    const auto profile = ngram_profile(d, cfg.ngram_order, Scope::AllExamples);
    if (profile.empty()) {
        // Every transcript is shorter than the order; nothing can be removed.
        result.dataset = d;
        result.aborted = true;
        return result;
    }
    const auto marked_list = least_frequent_ngrams(profile, cfg.removal_fraction);
    const std::set<NGram> marked(marked_list.begin(), marked_list.end());

    auto contains_marked = [&](const std::vector<std::string>& tokens) {
        if (tokens.size() < cfg.ngram_order) return false;
        NGram window(cfg.ngram_order);
        for (std::size_t i = 0; i + cfg.ngram_order <= tokens.size(); ++i) {
            for (std::size_t k = 0; k < cfg.ngram_order; ++k) {
                window[k] = tokens[i + k];
            }
            if (marked.count(window)) return true;
        }
        return false;
    };

    Dataset survivors;
    survivors.policy = d.policy;
    survivors.source_path = d.source_path;
    for (const auto& ex : d.examples) {
        if (!contains_marked(ex.tokens)) {
            survivors.examples.push_back(ex);
        }
    }

    if (survivors.empty()) {
        result.dataset = d;
        result.aborted = true;
        return result;
    }
    result.removed = d.size() - survivors.size();
    result.dataset = std::move(survivors);
    return result;
}

FiltrationTrace filtration_sequence(const Dataset& d, const FiltrationConfig& cfg,
                                    const MeasureHook& measure) {
    if (cfg.steps < 1) {
        throw std::invalid_argument("filtration requires steps >= 1");
    }
    FiltrationTrace trace;
    trace.config = cfg;
    trace.source_path = d.source_path;

    auto snapshot = [&](const Dataset& ds, std::size_t index, std::size_t removed) {
        FiltrationStepRecord rec;
        rec.index = index;
        rec.removed = removed;
        rec.surviving_ids.reserve(ds.size());
        for (const auto& ex : ds.examples) {
            rec.surviving_ids.push_back(ex.id);
        }
        rec.report = measure(ds);
        trace.steps.push_back(std::move(rec));
    };

    Dataset current = d;
    snapshot(current, 0, 0);
    for (std::size_t step = 1; step <= cfg.steps; ++step) {
        auto result = filter_step(current, cfg);
        if (result.aborted) {
            trace.aborted = true;
            trace.abort_step = step;
            break;
        }
        current = std::move(result.dataset);
        snapshot(current, step, result.removed);
    }
    return trace;
}

Dataset random_subsample(const Dataset& d, double keep_fraction, std::uint64_t seed) {
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
        throw std::invalid_argument("keep_fraction must lie in (0, 1]");
    }
    const std::size_t n = d.size();
    // Round-up with a small backoff so 0.21 * 100 keeps exactly 21.
    auto keep = static_cast<std::size_t>(std::ceil(keep_fraction * static_cast<double>(n) - 1e-9));
    keep = std::clamp<std::size_t>(keep, 1, n);
    if (keep == n) {
        return d;
    }

    // Partial Fisher-Yates over the index vector, then restore file order.
    std::vector<std::size_t> indices(n);
    for (std::size_t i = 0; i < n; ++i) indices[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < keep; ++i) {
        const std::size_t j = i + bounded(rng, n - i);
        std::swap(indices[i], indices[j]);
    }
    indices.resize(keep);
    std::sort(indices.begin(), indices.end());

    Dataset out;
    out.policy = d.policy;
    out.source_path = d.source_path;
    out.examples.reserve(keep);
    for (auto idx : indices) {
        out.examples.push_back(d.examples[idx]);
    }
    return out;
}

}  // namespace semcx
