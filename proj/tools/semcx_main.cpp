// semcx — semantic complexity profiling for labeled utterance datasets.
//
// Subcommands: analyze, filter, subsample, correlate, report.
// Exit codes: 0 success, 1 input error, 2 a degenerate-computation flag was
// raised and --strict was given. SEMCX_THREADS caps internal parallelism.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "semcx/corpus.hpp"
#include "semcx/filtration.hpp"
#include "semcx/geometric.hpp"
#include "semcx/report.hpp"
#include "semcx/serialize.hpp"
#include "semcx/version.hpp"

namespace fs = std::filesystem;
using namespace semcx;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitDegenerate = 2;

DatasetFormat resolve_format(const std::string& format, const std::string& path) {
    if (format == "delimited") return DatasetFormat::DelimitedColumns;
    if (format == "jsonl") return DatasetFormat::LineDelimitedRecords;
    return detect_format(path);
}

LoadResult load_with_summary(const std::string& path, const std::string& format,
                             const NormalizationPolicy& policy) {
    auto result = load_dataset(path, resolve_format(format, path), policy);
    if (result.summary.dropped_empty > 0) {
        std::cerr << "note: dropped " << result.summary.dropped_empty
                  << " example(s) with empty transcripts after normalization\n";
    }
    return result;
}

std::string resolve_column(const std::string& name) {
    static const std::map<std::string, std::string> aliases = {
        {"average_entropy", "lexical.average_entropy"},
        {"vocabulary", "lexical.vocabulary"},
        {"unique_transcripts", "lexical.unique_transcripts"},
        {"mst_average", "geometric.average.mst_complexity"},
        {"ari_average", "geometric.average.ari_complexity"},
    };
    const auto it = aliases.find(name);
    return it == aliases.end() ? name : it->second;
}

double column_value(const std::string& record_text, const std::string& column,
                    const std::string& where) {
    for (const auto& [key, value] : parse_record(record_text)) {
        if (key == column) {
            return std::strtod(value.c_str(), nullptr);
        }
    }
    throw InputError(where + ": no column '" + column + "' in record");
}

// Two-column accuracy file: `key <whitespace-or-comma> value`, '#' comments.
std::map<std::string, double> read_accuracy_file(const std::string& path) {
    const auto text = read_file(path);
    std::map<std::string, double> out;
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        ++line_no;
        auto end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto first = line.find_first_not_of(" \t,");
        if (first == std::string::npos) continue;
        const auto sep = line.find_first_of(" \t,", first);
        if (sep == std::string::npos) {
            throw InputError(path + ":" + std::to_string(line_no) + ": expected two columns");
        }
        const std::string key = line.substr(first, sep - first);
        char* parsed_end = nullptr;
        const double value = std::strtod(line.c_str() + sep, &parsed_end);
        if (parsed_end == line.c_str() + sep) {
            throw InputError(path + ":" + std::to_string(line_no) + ": malformed accuracy value");
        }
        if (!out.emplace(key, value).second) {
            throw InputError(path + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                             "'");
        }
    }
    return out;
}

struct AnalyzeArgs {
    std::string dataset;
    std::string format = "auto";
    std::string scope = "unique";
    std::vector<std::string> encoders;
    std::string embeddings;
    std::optional<std::size_t> lda_topics;
    std::optional<double> lda_alpha;
    std::optional<double> lda_beta;
    std::optional<std::size_t> lda_iters;
    std::uint64_t seed = 0;
    std::size_t max_geometric_points = 10000;
    std::string out;
    bool keep_case = false;
    bool keep_punctuation = false;
    bool dump_geometry = false;
    bool strict = false;
};

int run_analyze(const AnalyzeArgs& args) {
    NormalizationPolicy policy;
    policy.lowercase = !args.keep_case;
    policy.strip_punctuation = !args.keep_punctuation;

    MeasureConfig cfg;
    cfg.scope = scope_from_string(args.scope);
    cfg.seed = args.seed;
    cfg.max_geometric_points = args.max_geometric_points;
    cfg.embeddings_path = args.embeddings;
    cfg.lda_topics = args.lda_topics;
    cfg.lda_alpha = args.lda_alpha;
    cfg.lda_beta = args.lda_beta;
    cfg.lda_iterations = args.lda_iters;
    for (const auto& name : args.encoders) {
        if (name == "lda") {
            cfg.encoders.push_back(EncoderKind::Lda);
        } else if (name == "external") {
            cfg.encoders.push_back(EncoderKind::External);
        } else {
            throw InputError("unknown encoder '" + name + "' (expected 'lda' or 'external')");
        }
    }

    const auto loaded = load_with_summary(args.dataset, args.format, policy);
    std::vector<GeometricDetail> details;
    const auto report =
        build_report(loaded.dataset, cfg, args.dump_geometry ? &details : nullptr);

    std::cout << render_human_table(report);
    if (!args.out.empty()) {
        write_file((fs::path(args.out) / "report.mrec").string(), to_record(report));
        for (std::size_t i = 0; i < details.size(); ++i) {
            const auto& d = details[i];
            const std::string stem = "encoder_" + std::to_string(i);
            write_file((fs::path(args.out) / (stem + "_mst.csv")).string(),
                       mst_dump(d.mst.tree, d.labels));
            write_file((fs::path(args.out) / (stem + "_clusters.csv")).string(),
                       cluster_dump(d.ari.clusters, d.ids));
        }
    }
    if (args.strict && report.has_degenerate_flags()) {
        std::cerr << "strict: degenerate-computation flag raised\n";
        return kExitDegenerate;
    }
    return kExitOk;
}

struct FilterArgs {
    std::string dataset;
    std::size_t steps = 0;
    std::size_t ngram_order = 3;
    double removal_fraction = 0.10;
    std::uint64_t seed = 0;
    std::string scope = "unique";
    std::string out;
    bool strict = false;
};

int run_filter(const FilterArgs& args) {
    const auto loaded = load_with_summary(args.dataset, "auto", {});

    FiltrationConfig cfg;
    cfg.steps = args.steps;
    cfg.ngram_order = args.ngram_order;
    cfg.removal_fraction = args.removal_fraction;
    cfg.seed = args.seed;

    MeasureConfig measure_cfg;
    measure_cfg.scope = scope_from_string(args.scope);
    measure_cfg.seed = args.seed;
    const MeasureHook hook = [&](const Dataset& d) { return build_report(d, measure_cfg); };

    const auto trace = filtration_sequence(loaded.dataset, cfg, hook);
    write_trace(args.out, trace);
    std::cout << render_human_table(trace_manifest_from_record(trace_manifest_record(trace)));

    if (args.strict) {
        for (const auto& step : trace.steps) {
            if (step.report.has_degenerate_flags()) {
                std::cerr << "strict: degenerate-computation flag raised at step " << step.index
                          << "\n";
                return kExitDegenerate;
            }
        }
    }
    return kExitOk;
}

struct SubsampleArgs {
    std::string dataset;
    double keep_fraction = 1.0;
    std::uint64_t seed = 0;
    std::string out;
};

int run_subsample(const SubsampleArgs& args) {
    const auto loaded = load_with_summary(args.dataset, "auto", {});
    const auto sample = random_subsample(loaded.dataset, args.keep_fraction, args.seed);
    write_file((fs::path(args.out) / "dataset.jsonl").string(), to_jsonl(sample));
    write_file((fs::path(args.out) / "manifest").string(),
               subsample_manifest_record(loaded.dataset.source_path, args.keep_fraction,
                                         args.seed, loaded.dataset.size(), sample.size()));
    std::cout << "kept " << sample.size() << " of " << loaded.dataset.size() << " examples\n";
    return kExitOk;
}

struct CorrelateArgs {
    std::string input_dir;
    std::string complexity_col;
    std::string accuracy_file;
    bool relative = false;
    std::string out;
    bool strict = false;
};

int run_correlate(const CorrelateArgs& args) {
    const std::string column = resolve_column(args.complexity_col);
    const auto accuracy = read_accuracy_file(args.accuracy_file);

    // (key, complexity) in deterministic order: trace steps, or report files
    // sorted by name.
    std::vector<std::pair<std::string, double>> complexities;
    const fs::path dir(args.input_dir);
    const fs::path manifest_path = dir / "trace_manifest";
    if (fs::exists(manifest_path)) {
        const auto manifest = trace_manifest_from_record(read_file(manifest_path.string()));
        for (const auto& step : manifest.steps) {
            const auto report_text = read_file((dir / step.report_path).string());
            complexities.emplace_back(std::to_string(step.index),
                                      column_value(report_text, column, step.report_path));
        }
    } else if (fs::is_directory(dir)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".mrec") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            const auto text = read_file(file.string());
            if (record_type_of(text) != "complexity_report") continue;
            complexities.emplace_back(file.stem().string(),
                                      column_value(text, column, file.string()));
        }
        if (complexities.empty()) {
            throw InputError(args.input_dir + ": no trace_manifest and no .mrec report files");
        }
    } else {
        throw InputError(args.input_dir + ": not a trace or report directory");
    }

    std::vector<std::pair<double, double>> points;
    for (const auto& [key, complexity] : complexities) {
        const auto it = accuracy.find(key);
        if (it == accuracy.end()) continue;  // steps without accuracy are skipped
        points.emplace_back(complexity, it->second);
    }
    if (points.size() < complexities.size()) {
        std::cerr << "note: " << complexities.size() - points.size()
                  << " record(s) had no accuracy entry and were skipped\n";
    }
    if (points.size() < 2) {
        throw InputError("correlation needs at least 2 matched (complexity, accuracy) points");
    }

    if (args.relative) {
        std::size_t min_idx = 0;
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (points[i].first < points[min_idx].first) min_idx = i;
        }
        const double base = points[min_idx].second;
        if (base == 0.0) {
            throw InputError("--relative: accuracy at minimum complexity is zero");
        }
        for (auto& [x, y] : points) y /= base;
    }

    auto result = linear_fit_r2(points);
    result.complexity_column = column;
    result.relative = args.relative;

    write_file((fs::path(args.out) / "correlation.mrec").string(), to_record(result));
    write_file((fs::path(args.out) / "plot.tsv").string(), render_plot_data(result));
    std::cout << render_human_table(result);

    if (args.strict && result.degenerate_constant_y) {
        std::cerr << "strict: degenerate-computation flag raised\n";
        return kExitDegenerate;
    }
    return kExitOk;
}

int run_report(const std::string& record_path, const std::string& format) {
    const auto text = read_file(record_path);
    const auto type = record_type_of(text);
    const bool human = format == "human-table";
    if (type == "complexity_report") {
        const auto report = report_from_record(text);
        std::cout << (human ? render_human_table(report) : render_plot_data(report));
    } else if (type == "filtration_trace") {
        const auto manifest = trace_manifest_from_record(text);
        std::cout << (human ? render_human_table(manifest) : render_plot_data(manifest));
    } else if (type == "correlation_result") {
        const auto result = correlation_from_record(text);
        std::cout << (human ? render_human_table(result) : render_plot_data(result));
    } else {
        throw InputError(record_path + ": no renderer for record type '" + type + "'");
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semantic complexity profiling for labeled utterance datasets"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);

    AnalyzeArgs analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "compute a complexity report");
    analyze_cmd->add_option("dataset", analyze.dataset, "dataset file")->required();
    analyze_cmd->add_option("--format", analyze.format, "input format")
        ->check(CLI::IsMember({"auto", "delimited", "jsonl"}));
    analyze_cmd->add_option("--scope", analyze.scope, "count duplicated transcripts once or per occurrence")
        ->check(CLI::IsMember({"unique", "all"}));
    analyze_cmd->add_option("--encoders", analyze.encoders, "geometric encoders (lda, external)")
        ->delimiter(',');
    analyze_cmd->add_option("--embeddings", analyze.embeddings, "embedding file for the external encoder");
    analyze_cmd->add_option("--lda-topics", analyze.lda_topics, "LDA topic count");
    analyze_cmd->add_option("--lda-alpha", analyze.lda_alpha, "LDA document-topic prior");
    analyze_cmd->add_option("--lda-beta", analyze.lda_beta, "LDA topic-word prior");
    analyze_cmd->add_option("--lda-iters", analyze.lda_iters, "LDA Gibbs sweeps");
    analyze_cmd->add_option("--seed", analyze.seed, "RNG seed (LDA and cap subsampling)");
    analyze_cmd->add_option("--max-geometric-points", analyze.max_geometric_points,
                            "cap on geometric vertices; larger sets are subsampled");
    analyze_cmd->add_option("--out", analyze.out, "output directory for report.mrec");
    analyze_cmd->add_flag("--keep-case", analyze.keep_case, "do not lowercase transcripts");
    analyze_cmd->add_flag("--keep-punctuation", analyze.keep_punctuation,
                          "do not strip punctuation");
    analyze_cmd->add_flag("--dump-geometry", analyze.dump_geometry,
                          "write MST edge and cluster dumps next to the report");
    analyze_cmd->add_flag("--strict", analyze.strict, "exit 2 on degenerate-computation flags");

    FilterArgs filter;
    auto* filter_cmd = app.add_subcommand("filter", "run complexity-reducing filtration");
    filter_cmd->add_option("dataset", filter.dataset, "dataset file")->required();
    filter_cmd->add_option("--steps", filter.steps, "number of filtration steps")->required();
    filter_cmd->add_option("--ngram-order", filter.ngram_order, "order used for frequency ranking");
    filter_cmd->add_option("--removal-fraction", filter.removal_fraction,
                           "fraction of least-frequent unique n-grams marked per step");
    filter_cmd->add_option("--seed", filter.seed, "recorded seed (random baseline only)");
    filter_cmd->add_option("--scope", filter.scope, "scope for per-step reports")
        ->check(CLI::IsMember({"unique", "all"}));
    filter_cmd->add_option("--out", filter.out, "trace output directory")->required();
    filter_cmd->add_flag("--strict", filter.strict, "exit 2 on degenerate-computation flags");

    SubsampleArgs subsample;
    auto* subsample_cmd = app.add_subcommand("subsample", "seeded uniform subsample");
    subsample_cmd->add_option("dataset", subsample.dataset, "dataset file")->required();
    subsample_cmd->add_option("--keep-fraction", subsample.keep_fraction,
                              "fraction of examples to keep")->required();
    subsample_cmd->add_option("--seed", subsample.seed, "RNG seed")->required();
    subsample_cmd->add_option("--out", subsample.out, "output directory")->required();

    CorrelateArgs correlate;
    auto* correlate_cmd = app.add_subcommand("correlate", "fit complexity vs accuracy");
    correlate_cmd->add_option("--complexity-col", correlate.complexity_col,
                              "record key or alias (average_entropy, mst_average, ...)")
        ->required();
    correlate_cmd->add_option("dir", correlate.input_dir, "trace or report directory")->required();
    correlate_cmd->add_option("--accuracy-file", correlate.accuracy_file,
                              "two-column file: step-or-stem accuracy")->required();
    correlate_cmd->add_flag("--relative", correlate.relative,
                            "divide accuracies by the one at minimum complexity");
    correlate_cmd->add_option("--out", correlate.out, "output directory")->required();
    correlate_cmd->add_flag("--strict", correlate.strict,
                            "exit 2 on degenerate-computation flags");

    std::string report_path, report_format;
    auto* report_cmd = app.add_subcommand("report", "render a machine record");
    report_cmd->add_option("record", report_path, "machine-record file")->required();
    report_cmd->add_option("--format", report_format, "output format")
        ->check(CLI::IsMember({"human-table", "plot-data"}))
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze_cmd->parsed()) return run_analyze(analyze);
        if (filter_cmd->parsed()) return run_filter(filter);
        if (subsample_cmd->parsed()) return run_subsample(subsample);
        if (correlate_cmd->parsed()) return run_correlate(correlate);
        if (report_cmd->parsed()) return run_report(report_path, report_format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
