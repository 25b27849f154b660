#include "semcx/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <stdexcept>

#include "semcx/filtration.hpp"
#include "semcx/version.hpp"

namespace semcx {

namespace {

std::string now_utc() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> labels_of(const Dataset& d) {
    std::vector<std::string> labels;
    labels.reserve(d.size());
    for (const auto& ex : d.examples) {
        labels.push_back(ex.label);
    }
    return labels;
}

}  // namespace

bool ComplexityReport::has_degenerate_flags() const {
    if (!lexical.empty_orders.empty()) return true;
    for (const auto& g : geometric) {
        if (g.mst_degenerate || g.ari_degenerate) return true;
    }
    return false;
}

bool values_equal(const ComplexityReport& a, const ComplexityReport& b) {
    auto geo_equal = [](const GeometricMeasures& x, const GeometricMeasures& y) {
        return x.encoder_tag == y.encoder_tag && x.mst_complexity == y.mst_complexity &&
               x.ari == y.ari && x.ari_complexity == y.ari_complexity &&
               x.mst_degenerate == y.mst_degenerate && x.ari_degenerate == y.ari_degenerate;
    };
    if (!(a.tool_version == b.tool_version && a.source_path == b.source_path &&
          a.policy == b.policy && a.scope == b.scope && a.metric_tag == b.metric_tag &&
          a.total_examples == b.total_examples && a.analyzed_examples == b.analyzed_examples &&
          a.subsampled == b.subsampled && a.seed == b.seed)) {
        return false;
    }
    if (!(a.lexical.vocabulary_size == b.lexical.vocabulary_size &&
          a.lexical.unique_transcripts == b.lexical.unique_transcripts &&
          a.lexical.entropy_by_order == b.lexical.entropy_by_order &&
          a.lexical.average_entropy == b.lexical.average_entropy &&
          a.lexical.empty_orders == b.lexical.empty_orders)) {
        return false;
    }
    return std::equal(a.geometric.begin(), a.geometric.end(), b.geometric.begin(),
                      b.geometric.end(), geo_equal);
}

ComplexityReport build_report(const Dataset& d, const MeasureConfig& cfg,
                              std::vector<GeometricDetail>* details) {
    if (d.empty()) {
        throw std::invalid_argument("build_report requires a non-empty dataset");
    }
    ComplexityReport report;
    report.tool_version = kToolVersion;
    report.generated_at = now_utc();
    report.source_path = d.source_path;
    report.policy = d.policy;
    report.scope = cfg.scope;
    report.metric_tag = cfg.metric;
    report.seed = cfg.seed;
    report.total_examples = d.size();

    report.lexical = lexical_measures(d, cfg.scope);

    Dataset analyzed = cfg.scope == Scope::UniqueTranscripts ? unique_examples(d) : d;
    if (analyzed.size() > cfg.max_geometric_points) {
        analyzed = random_subsample(
            analyzed,
            static_cast<double>(cfg.max_geometric_points) / static_cast<double>(analyzed.size()),
            cfg.seed);
        // The rounding backoff can leave one extra example; trim to the cap.
        if (analyzed.size() > cfg.max_geometric_points) {
            analyzed.examples.resize(cfg.max_geometric_points);
        }
        report.subsampled = true;
    }
    report.analyzed_examples = analyzed.size();

    if (!cfg.encoders.empty() && analyzed.size() < 2) {
        throw InputError("geometric measures require at least 2 analyzed examples");
    }

    const auto labels = labels_of(analyzed);
    for (const auto encoder : cfg.encoders) {
        EmbeddingMatrix embedding;
        if (encoder == EncoderKind::Lda) {
            LdaOptions opts = default_lda_options(analyzed, cfg.seed);
            if (cfg.lda_topics) opts.topic_count = *cfg.lda_topics;
            if (cfg.lda_alpha) opts.doc_topic_prior = *cfg.lda_alpha;
            if (cfg.lda_beta) opts.topic_word_prior = *cfg.lda_beta;
            if (cfg.lda_iterations) opts.iterations = *cfg.lda_iterations;
            const auto model = fit_lda(analyzed, opts);
            embedding = encode_lda(model, analyzed);
        } else {
            if (cfg.embeddings_path.empty()) {
                throw InputError("external encoder requested without an embeddings file");
            }
            embedding = load_embeddings(cfg.embeddings_path, analyzed);
        }

        const auto matrix = distance_matrix(embedding);
        auto mst = mst_complexity(matrix, labels);
        auto ari = ari_complexity(matrix, labels);

        GeometricMeasures g;
        g.encoder_tag = embedding.encoder_tag;
        g.mst_complexity = mst.value;
        g.mst_degenerate = mst.degenerate;
        g.ari = ari.ari;
        g.ari_complexity = ari.value;
        g.ari_degenerate = ari.degenerate;
        report.geometric.push_back(g);

        if (details != nullptr) {
            GeometricDetail detail;
            detail.encoder_tag = embedding.encoder_tag;
            detail.mst = std::move(mst);
            detail.ari = std::move(ari);
            detail.labels = labels;
            detail.ids.reserve(analyzed.size());
            for (const auto& ex : analyzed.examples) {
                detail.ids.push_back(ex.id);
            }
            details->push_back(std::move(detail));
        }
    }
    return report;
}

double average_geometric(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("average_geometric requires at least one value");
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

CorrelationResult linear_fit_r2(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) {
        throw std::invalid_argument("linear_fit_r2 requires at least 2 points");
    }
    const auto n = static_cast<double>(points.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& [x, y] : points) {
        mean_x += x;
        mean_y += y;
    }
    mean_x /= n;
    mean_y /= n;

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("linear_fit_r2 requires nonzero x variance");
    }

    CorrelationResult result;
    result.points.assign(points.begin(), points.end());
    result.slope = sxy / sxx;
    result.intercept = mean_y - result.slope * mean_x;
    if (syy == 0.0) {
        result.r_squared = 1.0;  // constant y: the flat line fits exactly
        result.degenerate_constant_y = true;
        return result;
    }
    double ss_res = 0.0;
    for (const auto& [x, y] : points) {
        const double r = y - (result.slope * x + result.intercept);
        ss_res += r * r;
    }
    double r2 = 1.0 - ss_res / syy;
    result.r_squared = std::clamp(r2, 0.0, 1.0);
    return result;
}

}  // namespace semcx
