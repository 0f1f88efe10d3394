#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rankexpl/errors.hpp"
#include "rankexpl/ranking.hpp"
#include "rankexpl/tokenizer.hpp"

namespace rankexpl {

struct document {
    std::string doc_id;
    std::vector<std::string> tokens;

    std::uint32_t length() const { return static_cast<std::uint32_t>(tokens.size()); }
};

struct raw_document {
    std::string doc_id;
    std::string text;
};

struct query {
    std::string query_id;
    std::vector<std::string> terms;
};

struct posting {
    std::uint32_t doc = 0;  // document ordinal
    std::uint32_t tf = 0;
};

/// A document as the scorers see it: a term-frequency lookup plus a length.
/// Either a plain view of an indexed document or a perturbed one, where a
/// single term's frequency is overridden and the length adjusted. Replaced
/// occurrences (the OOV marker) are representable as pure length: no scorer
/// ever looks the marker up.
struct doc_view {
    const std::unordered_map<std::uint32_t, std::uint32_t>* counts = nullptr;
    std::uint32_t overlay_term = 0xffffffffu;
    std::uint32_t overlay_tf = 0;
    std::uint32_t length = 0;

    std::uint32_t tf(std::uint32_t term) const {
        if (term == overlay_term) return overlay_tf;
        auto it = counts->find(term);
        return it == counts->end() ? 0 : it->second;
    }
};

/// Standalone counted bag of tokens, for scoring documents that are not in
/// the index (tests, ad-hoc perturbations).
struct counted_doc {
    std::unordered_map<std::uint32_t, std::uint32_t> counts;
    std::uint32_t length = 0;

    doc_view view() const {
        doc_view v;
        v.counts = &counts;
        v.length = length;
        return v;
    }
};

/// Immutable inverted index with the collection statistics every scorer
/// needs. Term and document ordinals are dense and assigned in first-seen
/// order, so they are deterministic for a given corpus ordering.
class corpus_index {
  public:
    static constexpr std::uint32_t npos = 0xffffffffu;

    static corpus_index build(std::vector<document> docs) {
        corpus_index idx;
        idx.docs_ = std::move(docs);
        idx.doc_counts_.resize(idx.docs_.size());
        idx.doc_ids_.reserve(idx.docs_.size());
        for (std::uint32_t d = 0; d < idx.docs_.size(); ++d) {
            const document& doc = idx.docs_[d];
            if (doc.doc_id.empty()) throw data_error("document with empty id");
            if (!idx.doc_ids_.emplace(doc.doc_id, d).second)
                throw data_error("duplicate document id: " + doc.doc_id);
            auto& counts = idx.doc_counts_[d];
            for (const std::string& t : doc.tokens) {
                if (t.empty()) throw data_error("empty token in document " + doc.doc_id);
                ++counts[idx.intern(t)];
            }
            idx.total_tokens_ += doc.tokens.size();
        }
        idx.postings_.resize(idx.terms_.size());
        idx.collection_freq_.assign(idx.terms_.size(), 0);
        for (std::uint32_t d = 0; d < idx.docs_.size(); ++d) {
            for (const std::string& t : idx.docs_[d].tokens) {
                std::uint32_t w = idx.term_ords_.at(t);
                auto& plist = idx.postings_[w];
                if (plist.empty() || plist.back().doc != d) plist.push_back({d, 0});
                ++plist.back().tf;
                ++idx.collection_freq_[w];
            }
        }
        return idx;
    }

    static corpus_index build(const std::vector<raw_document>& raw, const tokenizer& tok) {
        std::vector<document> docs;
        docs.reserve(raw.size());
        for (const raw_document& r : raw) docs.push_back({r.doc_id, tok.tokenize(r.text)});
        return build(std::move(docs));
    }

    std::size_t doc_count() const { return docs_.size(); }
    const document& doc(std::uint32_t ord) const { return docs_[ord]; }

    std::uint32_t doc_ord(const std::string& doc_id) const {
        auto it = doc_ids_.find(doc_id);
        return it == doc_ids_.end() ? npos : it->second;
    }

    std::uint32_t require_doc(const std::string& doc_id) const {
        std::uint32_t d = doc_ord(doc_id);
        if (d == npos) throw data_error("unknown document id: " + doc_id);
        return d;
    }

    std::uint32_t doc_length(std::uint32_t doc) const { return docs_[doc].length(); }

    const std::unordered_map<std::uint32_t, std::uint32_t>& doc_counts(std::uint32_t doc) const {
        return doc_counts_[doc];
    }

    doc_view view(std::uint32_t doc) const {
        doc_view v;
        v.counts = &doc_counts_[doc];
        v.length = doc_length(doc);
        return v;
    }

    /// View of `doc` with every occurrence of `term` replaced by the OOV
    /// marker: tf drops to zero, length stays.
    doc_view reduced_view(std::uint32_t doc, std::uint32_t term) const {
        doc_view v = view(doc);
        v.overlay_term = term;
        v.overlay_tf = 0;
        return v;
    }

    /// View of `doc` with n copies of `term` appended.
    doc_view added_view(std::uint32_t doc, std::uint32_t term, std::uint32_t n) const {
        doc_view v = view(doc);
        v.overlay_term = term;
        auto it = doc_counts_[doc].find(term);
        v.overlay_tf = (it == doc_counts_[doc].end() ? 0 : it->second) + n;
        v.length += n;
        return v;
    }

    /// Counts an arbitrary token sequence against this index's vocabulary.
    /// Unknown tokens (including the OOV marker) contribute length only.
    counted_doc count_tokens(const std::vector<std::string>& tokens) const {
        counted_doc c;
        c.length = static_cast<std::uint32_t>(tokens.size());
        for (const std::string& t : tokens) {
            std::uint32_t w = term_ord(t);
            if (w != npos) ++c.counts[w];
        }
        return c;
    }

    std::size_t vocab_size() const { return terms_.size(); }
    const std::string& term(std::uint32_t ord) const { return terms_[ord]; }

    std::uint32_t term_ord(const std::string& term) const {
        auto it = term_ords_.find(term);
        return it == term_ords_.end() ? npos : it->second;
    }

    const std::vector<posting>& postings(std::uint32_t term) const { return postings_[term]; }

    std::uint32_t doc_freq(std::uint32_t term) const {
        return term == npos ? 0 : static_cast<std::uint32_t>(postings_[term].size());
    }

    std::uint64_t collection_freq(std::uint32_t term) const {
        return term == npos ? 0 : collection_freq_[term];
    }

    std::uint64_t total_tokens() const { return total_tokens_; }

    std::uint32_t tf(std::uint32_t term, std::uint32_t doc) const {
        if (term == npos) return 0;
        const auto& counts = doc_counts_[doc];
        auto it = counts.find(term);
        return it == counts.end() ? 0 : it->second;
    }

    /// Smoothed idf, strictly positive even for terms in every document.
    double idf(std::uint32_t term) const {
        double n = static_cast<double>(doc_count());
        double df = static_cast<double>(doc_freq(term));
        return std::log((n + 1.0) / (df + 1.0)) + 1.0;
    }

    /// Dirichlet-smoothed query-likelihood retrieval over documents sharing
    /// at least one query term: Σ_i log((tf(q_i,d) + μ·cf(q_i)/|D|) / (|d| + μ)).
    /// A term with zero mass in both doc and collection contributes the same
    /// log floor to every document, leaving the order untouched.
    ranking retrieve(const query& q, std::size_t pool_size = 1000, double mu = 2000.0) const {
        if (q.terms.empty()) throw data_error("query " + q.query_id + " is empty");
        std::vector<std::uint32_t> term_ords;
        term_ords.reserve(q.terms.size());
        std::vector<char> seen(docs_.size(), 0);
        std::vector<std::uint32_t> pool;
        for (const std::string& t : q.terms) {
            std::uint32_t w = term_ord(t);
            term_ords.push_back(w);
            if (w == npos) continue;
            for (const posting& p : postings_[w]) {
                if (!seen[p.doc]) {
                    seen[p.doc] = 1;
                    pool.push_back(p.doc);
                }
            }
        }
        std::vector<scored_doc> scored;
        scored.reserve(pool.size());
        double total = static_cast<double>(total_tokens_);
        for (std::uint32_t d : pool) {
            double s = 0.0;
            double len = static_cast<double>(doc_length(d));
            for (std::uint32_t w : term_ords) {
                double num = static_cast<double>(tf(w, d)) +
                             mu * static_cast<double>(collection_freq(w)) / total;
                s += num > 0.0 ? std::log(num / (len + mu)) : log_floor;
            }
            scored.push_back({docs_[d].doc_id, s});
        }
        ranking r = make_ranking(q.query_id, "dirichlet", std::move(scored));
        if (r.size() > pool_size) {
            r.doc_ids.resize(pool_size);
            r.scores.resize(pool_size);
        }
        return r;
    }

    /// Per-term log floor used when both document and collection mass are zero.
    static constexpr double log_floor = -700.0;

  private:
    std::uint32_t intern(const std::string& term) {
        auto it = term_ords_.find(term);
        if (it != term_ords_.end()) return it->second;
        std::uint32_t ord = static_cast<std::uint32_t>(terms_.size());
        terms_.push_back(term);
        term_ords_.emplace(term, ord);
        return ord;
    }

    std::vector<document> docs_;
    std::unordered_map<std::string, std::uint32_t> doc_ids_;
    std::vector<std::unordered_map<std::uint32_t, std::uint32_t>> doc_counts_;
    std::vector<std::string> terms_;
    std::unordered_map<std::string, std::uint32_t> term_ords_;
    std::vector<std::vector<posting>> postings_;
    std::vector<std::uint64_t> collection_freq_;
    std::uint64_t total_tokens_ = 0;
};

}  // namespace rankexpl
