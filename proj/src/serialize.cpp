#include "semcx/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "semcx/version.hpp"

namespace semcx {

namespace {

namespace fs = std::filesystem;

std::string bool_str(bool v) {
    return v ? "1" : "0";
}

// Ordered writer; key order is part of the format.
class RecordWriter {
public:
    void add(std::string key, std::string value) {
        lines_ += key;
        lines_ += '\t';
        lines_ += escape_value(value);
        lines_ += '\n';
    }
    void add(std::string key, std::uint64_t value) { add(std::move(key), std::to_string(value)); }
    void add(std::string key, double value) { add(std::move(key), format_full(value)); }
    void add(std::string key, bool value) { add(std::move(key), bool_str(value)); }

    std::string str() && { return std::move(lines_); }

private:
    std::string lines_;
};

class RecordView {
public:
    explicit RecordView(const std::string& text) : pairs_(parse_record(text)) {
        for (const auto& [k, v] : pairs_) {
            index_.emplace(k, &v);
        }
    }

    bool has(const std::string& key) const { return index_.count(key) > 0; }

    const std::string& get(const std::string& key) const {
        const auto it = index_.find(key);
        if (it == index_.end()) {
            throw InputError("machine record is missing key '" + key + "'");
        }
        return *it->second;
    }

    std::size_t get_size(const std::string& key) const {
        return static_cast<std::size_t>(std::strtoull(get(key).c_str(), nullptr, 10));
    }
    std::uint64_t get_u64(const std::string& key) const {
        return std::strtoull(get(key).c_str(), nullptr, 10);
    }
    double get_double(const std::string& key) const {
        return std::strtod(get(key).c_str(), nullptr);
    }
    bool get_bool(const std::string& key) const { return get(key) == "1"; }

    void expect(const std::string& key, const std::string& value) const {
        if (get(key) != value) {
            throw InputError("machine record has " + key + " '" + get(key) + "', expected '" +
                             value + "'");
        }
    }

private:
    std::vector<std::pair<std::string, std::string>> pairs_;
    std::unordered_map<std::string, const std::string*> index_;
};

void add_header(RecordWriter& w, const char* record_type) {
    w.add("schema_version", std::string(kRecordSchemaVersion));
    w.add("record_type", std::string(record_type));
    w.add("tool_version", std::string(kToolVersion));
}

std::string step_dir_name(std::size_t index) {
    return "step_" + std::to_string(index);
}

std::string pad_right(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string pad_left(std::string s, std::size_t width) {
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
}

std::string policy_line(const NormalizationPolicy& p) {
    auto onoff = [](bool b) { return b ? "on" : "off"; };
    return std::string("lowercase=") + onoff(p.lowercase) +
           " strip_punctuation=" + onoff(p.strip_punctuation) +
           " collapse_whitespace=" + onoff(p.collapse_whitespace);
}

std::string format_sig(double v, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

}  // namespace

std::string format_full(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string format_fixed1(double v) {
    // Decimal-aware half-away-from-zero; the nudge keeps values that are a
    // hair under a .x5 boundary in binary (like 0.15) rounding the way the
    // printed tables expect.
    double scaled = v * 10.0;
    scaled += scaled >= 0.0 ? 1e-7 : -1e-7;
    const long long r = std::llround(scaled);
    const long long a = r < 0 ? -r : r;
    std::string out = r < 0 ? "-" : "";
    out += std::to_string(a / 10);
    out += '.';
    out += std::to_string(a % 10);
    return out;
}

std::string escape_value(const std::string& v) {
    std::string out;
    out.reserve(v.size());
    for (char c : v) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

std::string unescape_value(const std::string& v) {
    std::string out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != '\\' || i + 1 == v.size()) {
            out += v[i];
            continue;
        }
        switch (v[++i]) {
            case '\\': out += '\\'; break;
            case 't': out += '\t'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            default: out += v[i];
        }
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> parse_record(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        ++line_no;
        auto end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw InputError("machine record line " + std::to_string(line_no) +
                             " has no key/value separator");
        }
        pairs.emplace_back(line.substr(0, tab), unescape_value(line.substr(tab + 1)));
    }
    return pairs;
}

std::string record_type_of(const std::string& text) {
    RecordView view(text);
    view.expect("schema_version", kRecordSchemaVersion);
    return view.get("record_type");
}

std::string to_record(const ComplexityReport& r) {
    RecordWriter w;
    add_header(w, "complexity_report");
    w.add("source_path", r.source_path);
    w.add("policy.lowercase", r.policy.lowercase);
    w.add("policy.strip_punctuation", r.policy.strip_punctuation);
    w.add("policy.collapse_whitespace", r.policy.collapse_whitespace);
    w.add("scope", std::string(to_string(r.scope)));
    w.add("metric", r.metric_tag);
    w.add("seed", r.seed);
    w.add("examples.total", r.total_examples);
    w.add("examples.analyzed", r.analyzed_examples);
    w.add("subsampled", r.subsampled);
    w.add("lexical.vocabulary", r.lexical.vocabulary_size);
    w.add("lexical.unique_transcripts", r.lexical.unique_transcripts);
    for (const auto& [order, bits] : r.lexical.entropy_by_order) {
        w.add("lexical.entropy." + std::to_string(order), bits);
    }
    w.add("lexical.average_entropy", r.lexical.average_entropy);
    {
        std::string orders;
        for (auto o : r.lexical.empty_orders) {
            if (!orders.empty()) orders += ',';
            orders += std::to_string(o);
        }
        w.add("lexical.empty_orders", orders);
    }
    w.add("geometric.count", r.geometric.size());
    for (std::size_t i = 0; i < r.geometric.size(); ++i) {
        const auto& g = r.geometric[i];
        const std::string p = "geometric." + std::to_string(i) + ".";
        w.add(p + "encoder", g.encoder_tag);
        w.add(p + "mst_complexity", g.mst_complexity);
        w.add(p + "mst_degenerate", g.mst_degenerate);
        w.add(p + "ari", g.ari);
        w.add(p + "ari_complexity", g.ari_complexity);
        w.add(p + "ari_degenerate", g.ari_degenerate);
    }
    if (!r.geometric.empty()) {
        // Derived per-measure averages, the bold rows of the printed table.
        std::vector<double> mst, ari;
        for (const auto& g : r.geometric) {
            mst.push_back(g.mst_complexity);
            ari.push_back(g.ari_complexity);
        }
        w.add("geometric.average.mst_complexity", average_geometric(mst));
        w.add("geometric.average.ari_complexity", average_geometric(ari));
    }
    return std::move(w).str();
}

ComplexityReport report_from_record(const std::string& text) {
    RecordView view(text);
    view.expect("schema_version", kRecordSchemaVersion);
    view.expect("record_type", "complexity_report");

    ComplexityReport r;
    r.tool_version = view.get("tool_version");
    r.source_path = view.get("source_path");
    r.policy.lowercase = view.get_bool("policy.lowercase");
    r.policy.strip_punctuation = view.get_bool("policy.strip_punctuation");
    r.policy.collapse_whitespace = view.get_bool("policy.collapse_whitespace");
    r.scope = scope_from_string(view.get("scope"));
    r.metric_tag = view.get("metric");
    r.seed = view.get_u64("seed");
    r.total_examples = view.get_size("examples.total");
    r.analyzed_examples = view.get_size("examples.analyzed");
    r.subsampled = view.get_bool("subsampled");
    r.lexical.vocabulary_size = view.get_size("lexical.vocabulary");
    r.lexical.unique_transcripts = view.get_size("lexical.unique_transcripts");
    for (std::size_t order = 1; order <= 3; ++order) {
        r.lexical.entropy_by_order[order] =
            view.get_double("lexical.entropy." + std::to_string(order));
    }
    r.lexical.average_entropy = view.get_double("lexical.average_entropy");
    {
        const auto& orders = view.get("lexical.empty_orders");
        std::size_t pos = 0;
        while (pos < orders.size()) {
            auto comma = orders.find(',', pos);
            if (comma == std::string::npos) comma = orders.size();
            r.lexical.empty_orders.push_back(
                std::strtoull(orders.substr(pos, comma - pos).c_str(), nullptr, 10));
            pos = comma + 1;
        }
    }
    const auto g_count = view.get_size("geometric.count");
    for (std::size_t i = 0; i < g_count; ++i) {
        const std::string p = "geometric." + std::to_string(i) + ".";
        GeometricMeasures g;
        g.encoder_tag = view.get(p + "encoder");
        g.mst_complexity = view.get_double(p + "mst_complexity");
        g.mst_degenerate = view.get_bool(p + "mst_degenerate");
        g.ari = view.get_double(p + "ari");
        g.ari_complexity = view.get_double(p + "ari_complexity");
        g.ari_degenerate = view.get_bool(p + "ari_degenerate");
        r.geometric.push_back(std::move(g));
    }
    return r;
}

std::string to_record(const CorrelationResult& c) {
    RecordWriter w;
    add_header(w, "correlation_result");
    w.add("complexity_column", c.complexity_column);
    w.add("relative", c.relative);
    w.add("slope", c.slope);
    w.add("intercept", c.intercept);
    w.add("r_squared", c.r_squared);
    w.add("degenerate_constant_y", c.degenerate_constant_y);
    w.add("point.count", c.points.size());
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const std::string p = "point." + std::to_string(i) + ".";
        w.add(p + "x", c.points[i].first);
        w.add(p + "y", c.points[i].second);
    }
    return std::move(w).str();
}

CorrelationResult correlation_from_record(const std::string& text) {
    RecordView view(text);
    view.expect("schema_version", kRecordSchemaVersion);
    view.expect("record_type", "correlation_result");
    CorrelationResult c;
    c.complexity_column = view.get("complexity_column");
    c.relative = view.get_bool("relative");
    c.slope = view.get_double("slope");
    c.intercept = view.get_double("intercept");
    c.r_squared = view.get_double("r_squared");
    c.degenerate_constant_y = view.get_bool("degenerate_constant_y");
    const auto count = view.get_size("point.count");
    for (std::size_t i = 0; i < count; ++i) {
        const std::string p = "point." + std::to_string(i) + ".";
        c.points.emplace_back(view.get_double(p + "x"), view.get_double(p + "y"));
    }
    return c;
}

std::string render_human_table(const ComplexityReport& r) {
    std::ostringstream out;
    out << "semantic complexity report\n";
    out << "  source:   " << r.source_path << "\n";
    out << "  policy:   " << policy_line(r.policy) << "\n";
    out << "  scope:    " << to_string(r.scope) << "   metric: " << r.metric_tag
        << "   seed: " << r.seed << "\n";
    out << "  examples: " << r.total_examples << " total, " << r.analyzed_examples << " analyzed"
        << (r.subsampled ? " (subsampled)" : "") << "\n";
    out << "  tool:     " << kToolName << " " << r.tool_version;
    if (!r.generated_at.empty()) {
        out << "   generated: " << r.generated_at;
    }
    out << "\n";
    if (!r.lexical.empty_orders.empty()) {
        out << "  flags:    entropy undefined (taken as 0) at order";
        if (r.lexical.empty_orders.size() > 1) out << "s";
        for (auto o : r.lexical.empty_orders) out << " " << o;
        out << "\n";
    }
    for (const auto& g : r.geometric) {
        if (g.mst_degenerate) {
            out << "  flags:    degenerate geometry (identical encodings) for " << g.encoder_tag
                << "\n";
        }
        if (g.ari_degenerate) {
            out << "  flags:    single semantic label; ARI pinned for " << g.encoder_tag << "\n";
        }
    }
    out << "\n";

    std::vector<std::pair<std::string, std::string>> rows;
    rows.emplace_back("vocabulary", std::to_string(r.lexical.vocabulary_size));
    rows.emplace_back("unique transcripts", std::to_string(r.lexical.unique_transcripts));
    static const char* kOrderName[] = {"", "unigram", "bigram", "trigram"};
    for (const auto& [order, bits] : r.lexical.entropy_by_order) {
        const std::string name =
            order <= 3 ? kOrderName[order] : ("order-" + std::to_string(order));
        rows.emplace_back("entropy " + name, format_fixed1(bits));
    }
    rows.emplace_back("entropy average", format_fixed1(r.lexical.average_entropy));
    if (!r.geometric.empty()) {
        std::vector<double> mst, ari;
        for (const auto& g : r.geometric) {
            rows.emplace_back("MST complexity [" + g.encoder_tag + "]",
                              format_fixed1(g.mst_complexity));
            mst.push_back(g.mst_complexity);
        }
        rows.emplace_back("MST complexity average", format_fixed1(average_geometric(mst)));
        for (const auto& g : r.geometric) {
            rows.emplace_back("ARI complexity [" + g.encoder_tag + "]",
                              format_fixed1(g.ari_complexity));
            ari.push_back(g.ari_complexity);
        }
        rows.emplace_back("ARI complexity average", format_fixed1(average_geometric(ari)));
    }

    std::size_t name_width = 0, value_width = 0;
    for (const auto& [name, value] : rows) {
        name_width = std::max(name_width, name.size());
        value_width = std::max(value_width, value.size());
    }
    out << "  " << pad_right("measure", name_width) << "  " << pad_left("value", value_width)
        << "\n";
    out << "  " << std::string(name_width + value_width + 2, '-') << "\n";
    for (const auto& [name, value] : rows) {
        out << "  " << pad_right(name, name_width) << "  " << pad_left(value, value_width) << "\n";
    }
    return out.str();
}

std::string render_plot_data(const ComplexityReport& r) {
    std::string out;
    auto row = [&](const std::string& name, const std::string& value) {
        out += name;
        out += '\t';
        out += value;
        out += '\n';
    };
    row("vocabulary", std::to_string(r.lexical.vocabulary_size));
    row("unique_transcripts", std::to_string(r.lexical.unique_transcripts));
    for (const auto& [order, bits] : r.lexical.entropy_by_order) {
        row("entropy_" + std::to_string(order), format_full(bits));
    }
    row("average_entropy", format_full(r.lexical.average_entropy));
    if (!r.geometric.empty()) {
        std::vector<double> mst, ari;
        for (const auto& g : r.geometric) {
            row("mst_complexity[" + g.encoder_tag + "]", format_full(g.mst_complexity));
            row("ari_complexity[" + g.encoder_tag + "]", format_full(g.ari_complexity));
            mst.push_back(g.mst_complexity);
            ari.push_back(g.ari_complexity);
        }
        row("mst_complexity_average", format_full(average_geometric(mst)));
        row("ari_complexity_average", format_full(average_geometric(ari)));
    }
    return out;
}

std::string render_human_table(const CorrelationResult& c) {
    std::ostringstream out;
    out << "correlation fit\n";
    out << "  column:    " << c.complexity_column << "\n";
    out << "  relative:  " << (c.relative ? "yes" : "no") << "\n";
    out << "  points:    " << c.points.size() << "\n";
    out << "  slope:     " << format_sig(c.slope, "%.6g") << "\n";
    out << "  intercept: " << format_sig(c.intercept, "%.6g") << "\n";
    out << "  r_squared: " << format_sig(c.r_squared, "%.4f") << "\n";
    if (c.degenerate_constant_y) {
        out << "  flags:     constant accuracy; the flat line fits exactly\n";
    }
    return out.str();
}

std::string render_plot_data(const CorrelationResult& c) {
    std::string out;
    for (const auto& [x, y] : c.points) {
        out += format_full(x);
        out += '\t';
        out += format_full(y);
        out += '\n';
    }
    return out;
}

std::string trace_manifest_record(const FiltrationTrace& trace) {
    RecordWriter w;
    add_header(w, "filtration_trace");
    w.add("source_path", trace.source_path);
    w.add("config.ngram_order", trace.config.ngram_order);
    w.add("config.removal_fraction", trace.config.removal_fraction);
    w.add("config.steps", trace.config.steps);
    w.add("config.seed", trace.config.seed);
    w.add("aborted", trace.aborted);
    if (trace.aborted) {
        w.add("abort_step", trace.abort_step);
    }
    w.add("step.count", trace.steps.size());
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const auto& s = trace.steps[i];
        const std::string p = "step." + std::to_string(i) + ".";
        w.add(p + "index", s.index);
        w.add(p + "examples", s.surviving_ids.size());
        w.add(p + "removed", s.removed);
        w.add(p + "average_entropy", s.report.lexical.average_entropy);
        w.add(p + "ids", step_dir_name(s.index) + "/ids.txt");
        w.add(p + "report", step_dir_name(s.index) + "/report.mrec");
    }
    return std::move(w).str();
}

TraceManifest trace_manifest_from_record(const std::string& text) {
    RecordView view(text);
    view.expect("schema_version", kRecordSchemaVersion);
    view.expect("record_type", "filtration_trace");
    TraceManifest m;
    m.source_path = view.get("source_path");
    m.config.ngram_order = view.get_size("config.ngram_order");
    m.config.removal_fraction = view.get_double("config.removal_fraction");
    m.config.steps = view.get_size("config.steps");
    m.config.seed = view.get_u64("config.seed");
    m.aborted = view.get_bool("aborted");
    if (m.aborted) {
        m.abort_step = view.get_size("abort_step");
    }
    const auto count = view.get_size("step.count");
    for (std::size_t i = 0; i < count; ++i) {
        const std::string p = "step." + std::to_string(i) + ".";
        TraceManifest::Step s;
        s.index = view.get_size(p + "index");
        s.examples = view.get_size(p + "examples");
        s.removed = view.get_size(p + "removed");
        s.average_entropy = view.get_double(p + "average_entropy");
        s.ids_path = view.get(p + "ids");
        s.report_path = view.get(p + "report");
        m.steps.push_back(std::move(s));
    }
    return m;
}

std::string render_human_table(const TraceManifest& m) {
    std::ostringstream out;
    out << "filtration trace (order " << m.config.ngram_order << ", fraction "
        << format_full(m.config.removal_fraction) << ", steps " << m.config.steps << ", seed "
        << m.config.seed << ")\n";
    out << "  source: " << m.source_path << "\n";
    if (m.aborted) {
        out << "  aborted: step " << m.abort_step << " would have emptied the dataset\n";
    }
    out << "\n";
    out << "  " << pad_left("step", 5) << "  " << pad_left("examples", 9) << "  "
        << pad_left("removed", 8) << "  " << pad_left("avg_entropy", 11) << "\n";
    out << "  " << std::string(39, '-') << "\n";
    for (const auto& s : m.steps) {
        out << "  " << pad_left(std::to_string(s.index), 5) << "  "
            << pad_left(std::to_string(s.examples), 9) << "  "
            << pad_left(std::to_string(s.removed), 8) << "  "
            << pad_left(format_fixed1(s.average_entropy), 11) << "\n";
    }
    return out.str();
}

std::string render_plot_data(const TraceManifest& m) {
    std::string out;
    for (const auto& s : m.steps) {
        out += std::to_string(s.index);
        out += '\t';
        out += format_full(s.average_entropy);
        out += '\n';
    }
    return out;
}

std::string subsample_manifest_record(const std::string& source_path, double keep_fraction,
                                      std::uint64_t seed, std::size_t input_examples,
                                      std::size_t kept_examples) {
    RecordWriter w;
    add_header(w, "subsample_manifest");
    w.add("source_path", source_path);
    w.add("keep_fraction", keep_fraction);
    w.add("seed", seed);
    w.add("examples.input", input_examples);
    w.add("examples.kept", kept_examples);
    w.add("output", std::string("dataset.jsonl"));
    return std::move(w).str();
}

void write_trace(const std::string& dir, const FiltrationTrace& trace) {
    for (const auto& s : trace.steps) {
        const fs::path step_dir = fs::path(dir) / step_dir_name(s.index);
        std::string ids;
        for (const auto& id : s.surviving_ids) {
            ids += id;
            ids += '\n';
        }
        write_file((step_dir / "ids.txt").string(), ids);
        write_file((step_dir / "report.mrec").string(), to_record(s.report));
    }
    write_file((fs::path(dir) / "trace_manifest").string(), trace_manifest_record(trace));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError(path + ": cannot open file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    const fs::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InputError(path + ": cannot open for writing");
    }
    out << content;
    if (!out) {
        throw InputError(path + ": write failed");
    }
}

}  // namespace semcx
