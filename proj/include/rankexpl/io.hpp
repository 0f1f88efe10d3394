#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rankexpl/errors.hpp"
#include "rankexpl/index.hpp"
#include "rankexpl/preference.hpp"
#include "rankexpl/tokenizer.hpp"

namespace rankexpl {

/// Shortest round-trip decimal form; deterministic and locale-independent.
inline std::string fmt_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw error("double formatting failed");
    return std::string(buf, end);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw data_error("bad number: '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

/// Writes through a sibling temp file and renames, so readers never observe
/// a half-written file.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    std::filesystem::path target(path);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw data_error("cannot write file: " + tmp.string());
        out << content;
        if (!out) throw data_error("short write: " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

/// One JSON object per line: {"id": "...", "text": "..."}.
inline std::vector<raw_document> load_corpus_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open corpus: " + path);
    std::vector<raw_document> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw data_error("corpus line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("id") || !j.contains("text") ||
            !j["id"].is_string() || !j["text"].is_string())
            throw data_error("corpus line " + std::to_string(line_no) +
                             ": expected {\"id\": string, \"text\": string}");
        docs.push_back({j["id"].get<std::string>(), j["text"].get<std::string>()});
    }
    return docs;
}

inline std::string save_corpus_jsonl(const std::vector<raw_document>& docs) {
    std::string out;
    for (const raw_document& d : docs) {
        nlohmann::json j{{"id", d.doc_id}, {"text", d.text}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

/// query_id<TAB>query text, one per line; blank lines skipped.
inline std::vector<std::pair<std::string, std::string>> load_queries_tsv(const std::string& path) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t line_no = 0;
    for (const std::string& line : read_lines(path)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0)
            throw data_error("query line " + std::to_string(line_no) +
                             ": expected query_id<TAB>text");
        out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return out;
}

inline std::unordered_set<std::string> load_stopwords(const std::string& path) {
    std::unordered_set<std::string> words;
    for (const std::string& line : read_lines(path))
        if (!line.empty()) words.insert(line);
    return words;
}

/// query_id<TAB>term1<TAB>...<TAB>termN per line.
inline std::unordered_map<std::string, std::vector<std::string>> load_intents_tsv(
    const std::string& path) {
    std::unordered_map<std::string, std::vector<std::string>> intents;
    std::size_t line_no = 0;
    for (const std::string& line : read_lines(path)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cols = split_tabs(line);
        if (cols.size() < 2)
            throw data_error("intent line " + std::to_string(line_no) +
                             ": expected query_id and at least one term");
        std::vector<std::string> terms(cols.begin() + 1, cols.end());
        if (!intents.emplace(cols[0], std::move(terms)).second)
            throw data_error("duplicate intent for query " + cols[0]);
    }
    return intents;
}

inline std::string save_intents_tsv(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& intents) {
    std::string out;
    for (const auto& [query_id, terms] : intents) {
        out += query_id;
        for (const std::string& t : terms) {
            out += '\t';
            out += t;
        }
        out += '\n';
    }
    return out;
}

/// Matrix TSV: header "term" then pair ids; one row per candidate term.
inline std::string save_matrix_tsv(const preference_matrix& m) {
    std::string out = "term";
    for (const std::string& id : m.pair_ids) {
        out += '\t';
        out += id;
    }
    out += '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out += m.terms[r];
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out += '\t';
            out += fmt_double(m.at(r, c));
        }
        out += '\n';
    }
    return out;
}

inline preference_matrix load_matrix_tsv(const std::string& path) {
    std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) throw data_error("matrix file is empty: " + path);
    preference_matrix m;
    std::vector<std::string> header = split_tabs(lines[0]);
    if (header.empty() || header[0] != "term")
        throw data_error("matrix header must start with 'term'");
    m.pair_ids.assign(header.begin() + 1, header.end());
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::vector<std::string> cols = split_tabs(lines[i]);
        if (cols.size() != header.size())
            throw data_error("matrix row " + std::to_string(i + 1) + " has " +
                             std::to_string(cols.size()) + " columns, expected " +
                             std::to_string(header.size()));
        m.terms.push_back(cols[0]);
        for (std::size_t c = 1; c < cols.size(); ++c) m.values.push_back(parse_double(cols[c]));
    }
    return m;
}

/// Tokenized corpus snapshot, so every downstream stage sees the exact same
/// index regardless of tokenizer settings at load time.
inline std::string save_index_json(const corpus_index& idx, bool stemming) {
    nlohmann::json docs = nlohmann::json::array();
    for (std::uint32_t d = 0; d < idx.doc_count(); ++d) {
        const document& doc = idx.doc(d);
        docs.push_back({{"id", doc.doc_id}, {"tokens", doc.tokens}});
    }
    nlohmann::json j{{"stemming", stemming}, {"docs", std::move(docs)}};
    return j.dump();
}

inline corpus_index load_index_json(const std::string& path, bool* stemming = nullptr) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open index: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw data_error("index file " + path + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("docs") || !j["docs"].is_array())
        throw data_error("index file " + path + " has no document array");
    if (stemming) *stemming = j.value("stemming", false);
    std::vector<document> docs;
    docs.reserve(j["docs"].size());
    for (const auto& dj : j["docs"]) {
        if (!dj.contains("id") || !dj.contains("tokens"))
            throw data_error("index document entry missing id or tokens");
        document d;
        d.doc_id = dj["id"].get<std::string>();
        d.tokens = dj["tokens"].get<std::vector<std::string>>();
        docs.push_back(std::move(d));
    }
    return corpus_index::build(std::move(docs));
}

}  // namespace rankexpl
