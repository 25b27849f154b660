#include "semcx/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace semcx {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 128 && std::ispunct(u) != 0;
}

char to_lower_ascii(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string line_context(const std::string& path, std::size_t line_no) {
    return path + ":" + std::to_string(line_no);
}

// Splits one delimited line. CSV fields may be double-quoted with "" as the
// embedded-quote escape; TSV fields are taken verbatim.
std::vector<std::string> split_delimited(const std::string& line, char delim,
                                         const std::string& where) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (delim == ',' && c == '"' && field.empty()) {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted) {
        throw InputError(where + ": unterminated quoted field");
    }
    fields.push_back(std::move(field));
    return fields;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

struct RawRecord {
    std::string id;  // empty -> auto-assign
    std::string transcript;
    std::string label;
    std::size_t line_no = 0;
};

std::vector<RawRecord> read_delimited(std::istream& in, const std::string& path) {
    std::string header;
    if (!std::getline(in, header)) {
        throw InputError(path + ": empty file");
    }
    strip_cr(header);
    const char delim = header.find('\t') != std::string::npos ? '\t' : ',';
    const auto names = split_delimited(header, delim, line_context(path, 1));

    int id_col = -1, transcript_col = -1, label_col = -1;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == "id") id_col = static_cast<int>(i);
        else if (names[i] == "transcript") transcript_col = static_cast<int>(i);
        else if (names[i] == "label") label_col = static_cast<int>(i);
    }
    if (transcript_col < 0 || label_col < 0) {
        throw InputError(path + ":1: header must name 'transcript' and 'label' columns (got '" +
                         header + "')");
    }

    std::vector<RawRecord> records;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_delimited(line, delim, line_context(path, line_no));
        const auto need = static_cast<std::size_t>(std::max({id_col, transcript_col, label_col}));
        if (fields.size() <= need) {
            throw InputError(line_context(path, line_no) + ": expected at least " +
                             std::to_string(need + 1) + " fields, got " +
                             std::to_string(fields.size()));
        }
        RawRecord rec;
        rec.line_no = line_no;
        if (id_col >= 0) rec.id = fields[static_cast<std::size_t>(id_col)];
        rec.transcript = fields[static_cast<std::size_t>(transcript_col)];
        rec.label = fields[static_cast<std::size_t>(label_col)];
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<RawRecord> read_jsonl(std::istream& in, const std::string& path) {
    std::vector<RawRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw InputError(line_context(path, line_no) + ": invalid record: " + e.what());
        }
        if (!obj.is_object()) {
            throw InputError(line_context(path, line_no) + ": record is not an object");
        }
        if (!obj.contains("text") || !obj["text"].is_string()) {
            throw InputError(line_context(path, line_no) + ": missing string field 'text'");
        }
        if (!obj.contains("label") || !obj["label"].is_string()) {
            throw InputError(line_context(path, line_no) + ": missing string field 'label'");
        }
        RawRecord rec;
        rec.line_no = line_no;
        rec.transcript = obj["text"].get<std::string>();
        rec.label = obj["label"].get<std::string>();
        if (obj.contains("id")) {
            if (obj["id"].is_string()) {
                rec.id = obj["id"].get<std::string>();
            } else if (obj["id"].is_number_integer()) {
                rec.id = std::to_string(obj["id"].get<long long>());
            } else {
                throw InputError(line_context(path, line_no) + ": field 'id' must be a string");
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace

std::vector<std::string> normalize(std::string_view text, const NormalizationPolicy& policy) {
    std::string cleaned;
    cleaned.reserve(text.size());
    for (char c : text) {
        if (policy.strip_punctuation && is_punct(c)) {
            cleaned += ' ';
        } else if (policy.lowercase) {
            cleaned += to_lower_ascii(c);
        } else {
            cleaned += c;
        }
    }

    // With collapsing, any whitespace run separates tokens; without it, only
    // single literal spaces do.
    std::vector<std::string> tokens;
    std::string token;
    auto flush = [&] {
        if (!token.empty()) {
            tokens.push_back(std::move(token));
            token.clear();
        }
    };
    for (char c : cleaned) {
        const bool sep = policy.collapse_whitespace ? is_space(c) : c == ' ';
        if (sep) {
            flush();
        } else {
            token += c;
        }
    }
    flush();
    return tokens;
}

DatasetFormat detect_format(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError(path + ": cannot open file");
    }
    std::string line;
    while (std::getline(in, line)) {
        strip_cr(line);
        const auto pos = line.find_first_not_of(" \t");
        if (pos == std::string::npos) continue;
        return line[pos] == '{' ? DatasetFormat::LineDelimitedRecords
                                : DatasetFormat::DelimitedColumns;
    }
    throw InputError(path + ": empty file");
}

LoadResult load_dataset(const std::string& path, DatasetFormat format,
                        const NormalizationPolicy& policy) {
    std::ifstream in(path);
    if (!in) {
        throw InputError(path + ": cannot open file");
    }

    auto records = format == DatasetFormat::DelimitedColumns ? read_delimited(in, path)
                                                             : read_jsonl(in, path);

    LoadResult result;
    result.dataset.policy = policy;
    result.dataset.source_path = path;
    result.summary.parsed_records = records.size();

    std::unordered_set<std::string> seen_ids;
    seen_ids.reserve(records.size());
    std::size_t record_index = 0;
    for (auto& rec : records) {
        Example ex;
        ex.id = rec.id.empty() ? std::to_string(record_index) : std::move(rec.id);
        ++record_index;
        if (rec.label.empty()) {
            throw InputError(line_context(path, rec.line_no) + ": empty label");
        }
        if (!seen_ids.insert(ex.id).second) {
            throw InputError(line_context(path, rec.line_no) + ": duplicate id '" + ex.id + "'");
        }
        ex.tokens = normalize(rec.transcript, policy);
        if (ex.tokens.empty()) {
            result.summary.dropped_empty++;
            result.summary.dropped_ids.push_back(ex.id);
            continue;
        }
        ex.transcript = std::move(rec.transcript);
        ex.label = std::move(rec.label);
        result.dataset.examples.push_back(std::move(ex));
    }

    if (result.dataset.empty()) {
        throw InputError(path + ": zero surviving examples after normalization");
    }
    return result;
}

Dataset unique_examples(const Dataset& d) {
    Dataset out;
    out.policy = d.policy;
    out.source_path = d.source_path;
    std::unordered_set<std::string> seen;
    seen.reserve(d.size());
    for (const auto& ex : d.examples) {
        std::string key;
        for (const auto& tok : ex.tokens) {
            key += tok;
            key += '\x1f';
        }
        key += '\x1e';
        key += ex.label;
        if (seen.insert(std::move(key)).second) {
            out.examples.push_back(ex);
        }
    }
    return out;
}

std::string to_jsonl(const Dataset& d) {
    std::string out;
    for (const auto& ex : d.examples) {
        nlohmann::ordered_json obj;
        obj["id"] = ex.id;
        obj["text"] = ex.transcript;
        obj["label"] = ex.label;
        out += obj.dump();
        out += '\n';
    }
    return out;
}

}  // namespace semcx
