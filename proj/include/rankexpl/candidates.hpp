#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rankexpl/blackbox.hpp"
#include "rankexpl/errors.hpp"
#include "rankexpl/index.hpp"
#include "rankexpl/random.hpp"
#include "rankexpl/ranking.hpp"
#include "rankexpl/tokenizer.hpp"

namespace rankexpl {

struct candidate {
    std::string term;
    double tfidf = 0.0;
    std::optional<double> reduce_delta;  // mean black-box drop under removal
    std::optional<double> add_delta;     // mean black-box gain under addition
    bool in_all_topk = false;            // additive filter had nothing to add to
};

/// Stage-I candidates: pool vocabulary scored by (Σ_{d∈pool} tf(w,d)) · idf(w),
/// top `cap` kept, ties broken lexicographically. Stopwords never occur (the
/// tokenizer removed them); query terms are ordinary candidates.
inline std::vector<candidate> tfidf_candidates(const corpus_index& idx,
                                               const std::vector<std::string>& pool,
                                               std::size_t cap = 1000) {
    if (pool.empty()) throw contract_error("tfidf_candidates: empty document pool");
    std::unordered_map<std::uint32_t, std::uint64_t> pool_tf;
    for (const std::string& doc_id : pool)
        for (const auto& [term_ord, tf] : idx.doc_counts(idx.require_doc(doc_id)))
            pool_tf[term_ord] += tf;
    std::vector<candidate> out;
    out.reserve(pool_tf.size());
    for (const auto& [term_ord, tf] : pool_tf)
        out.push_back({idx.term(term_ord), static_cast<double>(tf) * idx.idf(term_ord)});
    std::sort(out.begin(), out.end(), [](const candidate& a, const candidate& b) {
        if (a.tfidf != b.tfidf) return a.tfidf > b.tfidf;
        return a.term < b.term;
    });
    if (out.size() > cap) out.resize(cap);
    return out;
}

/// Replaces every occurrence of w with the OOV marker; length is preserved,
/// so length normalization cannot react to the removal.
inline std::vector<std::string> perturb_reduce(const std::vector<std::string>& tokens,
                                               const std::string& w) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    bool found = false;
    for (const std::string& t : tokens) {
        if (t == w) {
            found = true;
            out.push_back(oov_token());
        } else {
            out.push_back(t);
        }
    }
    if (!found) throw contract_error("perturb_reduce: term '" + w + "' does not occur");
    return out;
}

/// Appends n copies of w. Position is immaterial to every in-scope scorer.
inline std::vector<std::string> perturb_add(const std::vector<std::string>& tokens,
                                            const std::string& w, std::size_t n) {
    if (n < 1) throw contract_error("perturb_add: n must be at least 1");
    std::vector<std::string> out = tokens;
    out.reserve(tokens.size() + n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(w);
    return out;
}

namespace detail {

inline void sort_by_tfidf(std::vector<candidate>& v) {
    std::sort(v.begin(), v.end(), [](const candidate& a, const candidate& b) {
        if (a.tfidf != b.tfidf) return a.tfidf > b.tfidf;
        return a.term < b.term;
    });
}

inline void sort_by_delta(std::vector<candidate>& v, bool additive) {
    std::sort(v.begin(), v.end(), [additive](const candidate& a, const candidate& b) {
        double da = additive ? *a.add_delta : *a.reduce_delta;
        double db = additive ? *b.add_delta : *b.reduce_delta;
        if (da != db) return da > db;
        if (a.tfidf != b.tfidf) return a.tfidf > b.tfidf;
        return a.term < b.term;
    });
}

}  // namespace detail

/// Stage-II reductive filter: keeps candidates whose removal lowers the
/// black-box score on average. Scores are measured over the top documents to
/// explain plus a seeded sample of the remaining pool, restricted per
/// candidate to documents containing it; candidates the sample never
/// observes are kept conservatively, after all measured positives.
inline std::vector<candidate> reductive_filter(const black_box& bb, const query& q,
                                               const ranking& initial, const ranking& bb_rank,
                                               std::vector<candidate> cands, rng& gen,
                                               std::size_t keep = 500, std::size_t explain_k = 10,
                                               std::size_t extra_docs = 40) {
    if (bb.mode() != agnosticism::weak)
        throw contract_error("document perturbation needs a weakly agnostic black box");
    const corpus_index& idx = bb.index();

    std::size_t n = bb_rank.size();
    std::size_t k = n < explain_k ? n : explain_k;
    std::vector<std::uint32_t> sample;
    sample.reserve(k + extra_docs);
    for (std::size_t i = 0; i < k; ++i) sample.push_back(idx.require_doc(bb_rank.doc_ids[i]));
    if (n > k && extra_docs > 0) {
        auto picks = gen.sample_without_replacement(n - k, extra_docs);
        std::sort(picks.begin(), picks.end());
        for (std::size_t p : picks) sample.push_back(idx.require_doc(bb_rank.doc_ids[k + p]));
    }

    std::vector<double> base(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i)
        base[i] = bb.score(q, initial, idx.view(sample[i]));

    for (candidate& c : cands) {
        std::uint32_t w = idx.term_ord(c.term);
        if (w == corpus_index::npos) continue;
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < sample.size(); ++i) {
            if (idx.tf(w, sample[i]) == 0) continue;
            sum += base[i] - bb.score(q, initial, idx.reduced_view(sample[i], w));
            ++count;
        }
        if (count > 0) c.reduce_delta = sum / static_cast<double>(count);
    }

    std::vector<candidate> positives, unobserved;
    for (candidate& c : cands) {
        if (!c.reduce_delta)
            unobserved.push_back(std::move(c));
        else if (*c.reduce_delta > 0.0)
            positives.push_back(std::move(c));
    }
    detail::sort_by_delta(positives, false);
    detail::sort_by_tfidf(unobserved);
    std::vector<candidate> out = std::move(positives);
    for (candidate& c : unobserved) out.push_back(std::move(c));
    if (out.size() > keep) out.resize(keep);
    return out;
}

/// Stage-II additive filter: keeps candidates whose injection into the top
/// documents missing them raises the black-box score on average. Candidates
/// already present in every top document have nothing to add to and bypass
/// the filter.
inline std::vector<candidate> additive_filter(const black_box& bb, const query& q,
                                              const ranking& initial, const ranking& bb_rank,
                                              std::vector<candidate> cands,
                                              std::size_t keep = 250, std::size_t explain_k = 10,
                                              std::uint32_t n_add = 5) {
    if (bb.mode() != agnosticism::weak)
        throw contract_error("document perturbation needs a weakly agnostic black box");
    if (n_add < 1) throw config_error("additive filter needs n_add >= 1");
    const corpus_index& idx = bb.index();

    std::size_t k = bb_rank.size() < explain_k ? bb_rank.size() : explain_k;
    std::vector<std::uint32_t> topk(k);
    std::vector<double> base(k);
    for (std::size_t i = 0; i < k; ++i) {
        topk[i] = idx.require_doc(bb_rank.doc_ids[i]);
        base[i] = bb.score(q, initial, idx.view(topk[i]));
    }

    std::vector<candidate> positives, bypass;
    for (candidate& c : cands) {
        std::uint32_t w = idx.term_ord(c.term);
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < k; ++i) {
            if (w != corpus_index::npos && idx.tf(w, topk[i]) > 0) continue;
            sum += bb.score(q, initial, idx.added_view(topk[i], w, n_add)) - base[i];
            ++count;
        }
        if (count == 0) {
            c.in_all_topk = true;
            bypass.push_back(std::move(c));
            continue;
        }
        c.add_delta = sum / static_cast<double>(count);
        if (*c.add_delta > 0.0) positives.push_back(std::move(c));
    }

    detail::sort_by_delta(positives, true);
    detail::sort_by_tfidf(bypass);
    std::vector<candidate> out;
    if (bypass.size() >= keep) {
        bypass.resize(keep);
        return bypass;
    }
    out = std::move(positives);
    if (out.size() > keep - bypass.size()) out.resize(keep - bypass.size());
    for (candidate& c : bypass) out.push_back(std::move(c));
    return out;
}

inline std::vector<std::string> candidate_terms(const std::vector<candidate>& cands) {
    std::vector<std::string> out;
    out.reserve(cands.size());
    for (const candidate& c : cands) out.push_back(c.term);
    return out;
}

}  // namespace rankexpl
