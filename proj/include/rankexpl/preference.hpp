#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rankexpl/errors.hpp"
#include "rankexpl/index.hpp"
#include "rankexpl/random.hpp"
#include "rankexpl/rankers.hpp"
#include "rankexpl/ranking.hpp"

namespace rankexpl {

/// An ordered document pair, better-first, stored as 0-based positions in the
/// black-box ranking it was drawn from (better < worse by construction).
struct preference_pair {
    std::uint32_t better = 0;
    std::uint32_t worse = 0;
    bool from_topk = false;
};

enum class sampling_strategy { random_pairs, rank_biased, topk, topk_random, topk_rank_random };

inline const char* to_string(sampling_strategy s) {
    switch (s) {
        case sampling_strategy::random_pairs: return "random";
        case sampling_strategy::rank_biased: return "rank-biased";
        case sampling_strategy::topk: return "topk";
        case sampling_strategy::topk_random: return "topk-random";
        case sampling_strategy::topk_rank_random: return "topk-rank-random";
    }
    throw error("unreachable sampling strategy");
}

inline sampling_strategy parse_strategy(const std::string& name) {
    if (name == "random") return sampling_strategy::random_pairs;
    if (name == "rank-biased") return sampling_strategy::rank_biased;
    if (name == "topk") return sampling_strategy::topk;
    if (name == "topk-random") return sampling_strategy::topk_random;
    if (name == "topk-rank-random") return sampling_strategy::topk_rank_random;
    throw config_error("unknown sampling strategy: " + name);
}

struct pair_sample {
    std::vector<preference_pair> pairs;
    bool exhausted = false;          // fewer distinct pairs than requested
    bool resample_cap_hit = false;   // collision budget spent before filling m
};

/// All k(k−1)/2 pairs among the top k of the ranking; k=10 gives the 45
/// pairs among the documents to explain.
inline std::vector<preference_pair> topk_pairs(const ranking& r, std::size_t k = 10) {
    std::size_t n = r.size() < k ? r.size() : k;
    std::vector<preference_pair> out;
    out.reserve(n * (n - (n ? 1 : 0)) / 2);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) out.push_back({i, j, true});
    return out;
}

namespace detail {

inline std::uint64_t pair_key(std::uint32_t i, std::uint32_t j) {
    return (static_cast<std::uint64_t>(i) << 32) | j;
}

inline std::vector<preference_pair> all_pairs(std::size_t n, std::size_t k_tag) {
    std::vector<preference_pair> out;
    out.reserve(n * (n - (n ? 1 : 0)) / 2);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) out.push_back({i, j, j < k_tag});
    return out;
}

}  // namespace detail

/// Draws m distinct preference pairs from a ranking of n documents.
///
///   random            m uniform pairs
///   rank-biased       pair {i,j} with probability ∝ 1/rank(i) + 1/rank(j),
///                     realized as one endpoint rank-weighted, the other
///                     uniform over the rest
///   topk              the top-k pairs only, m ignored
///   topk-random       top-k pairs plus m uniform pairs
///   topk-rank-random  top-k pairs plus m pairs drawn like rank-biased
///
/// Pairs are deduplicated and redrawn on collision (at most 50·m attempts);
/// requests covering every distinct pair return them all. Deterministic for
/// a given generator state.
inline pair_sample sample_pairs(sampling_strategy strategy, const ranking& r, std::size_t m,
                                rng& gen, std::size_t k = 10) {
    std::size_t n = r.size();
    pair_sample out;
    if (strategy == sampling_strategy::topk) {
        out.pairs = topk_pairs(r, k);
        out.exhausted = n < k;
        return out;
    }

    bool with_topk = strategy == sampling_strategy::topk_random ||
                     strategy == sampling_strategy::topk_rank_random;
    bool rank_weighted = strategy == sampling_strategy::rank_biased ||
                         strategy == sampling_strategy::topk_rank_random;

    std::size_t total_pairs = n * (n - (n ? 1 : 0)) / 2;
    std::size_t base = with_topk ? topk_pairs(r, k).size() : 0;
    if (base + m >= total_pairs) {
        out.pairs = detail::all_pairs(n, with_topk ? (k < n ? k : n) : 0);
        out.exhausted = true;
        return out;
    }

    std::unordered_set<std::uint64_t> seen;
    seen.reserve(base + m);
    if (with_topk) {
        out.pairs = topk_pairs(r, k);
        for (const preference_pair& p : out.pairs) seen.insert(detail::pair_key(p.better, p.worse));
    }

    std::vector<double> cumulative;
    if (rank_weighted) {
        cumulative.reserve(n);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += 1.0 / static_cast<double>(i + 1);
            cumulative.push_back(acc);
        }
    }

    std::size_t attempts = 0, budget = 50 * m;
    std::size_t drawn = 0;
    while (drawn < m) {
        if (attempts++ >= budget) {
            out.resample_cap_hit = true;
            break;
        }
        std::uint32_t a = rank_weighted ? static_cast<std::uint32_t>(gen.weighted(cumulative))
                                        : static_cast<std::uint32_t>(gen.below(n));
        std::uint32_t b = static_cast<std::uint32_t>(gen.below(n - 1));
        if (b >= a) ++b;
        std::uint32_t i = a < b ? a : b;
        std::uint32_t j = a < b ? b : a;
        if (!seen.insert(detail::pair_key(i, j)).second) continue;
        out.pairs.push_back({i, j, false});
        ++drawn;
    }
    return out;
}

/// R_E score difference of a term across an oriented pair; positive when the
/// term is more important to the better document. Exactly antisymmetric.
inline double pair_score(const explanation_ranker& ranker, std::uint32_t term, const doc_view& better,
                         const doc_view& worse) {
    return ranker.term_score(term, better) - ranker.term_score(term, worse);
}

/// Dense candidate-term × preference-pair matrix of pair scores. Rows keep
/// the candidate order handed in; columns keep sample order.
struct preference_matrix {
    std::string query_id;
    std::vector<std::string> terms;     // row labels
    std::vector<std::string> pair_ids;  // column labels, "better>worse"
    std::vector<double> values;         // row-major

    std::size_t rows() const { return terms.size(); }
    std::size_t cols() const { return pair_ids.size(); }
    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
};

inline std::string pair_label(const ranking& r, const preference_pair& p) {
    return r.doc_ids[p.better] + ">" + r.doc_ids[p.worse];
}

inline preference_matrix build_matrix(const explanation_ranker& ranker,
                                      const std::vector<std::string>& candidates,
                                      const std::vector<preference_pair>& pairs,
                                      const ranking& bb) {
    const corpus_index& idx = ranker.index();
    preference_matrix mat;
    mat.query_id = bb.query_id;
    mat.terms = candidates;
    mat.pair_ids.reserve(pairs.size());
    for (const preference_pair& p : pairs) mat.pair_ids.push_back(pair_label(bb, p));

    std::size_t n = bb.size();
    std::vector<std::uint32_t> doc_ords(n);
    std::vector<double> zero_score(n);
    std::unordered_map<std::uint32_t, std::uint32_t> pos_of;
    pos_of.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        doc_ords[i] = idx.require_doc(bb.doc_ids[i]);
        zero_score[i] = ranker.score_for(0, idx.doc_length(doc_ords[i]));
        pos_of.emplace(doc_ords[i], static_cast<std::uint32_t>(i));
    }

    mat.values.resize(candidates.size() * pairs.size());
    std::vector<double> row(n);
    for (std::size_t r = 0; r < candidates.size(); ++r) {
        row = zero_score;
        std::uint32_t w = idx.term_ord(candidates[r]);
        if (w != corpus_index::npos) {
            for (const posting& p : idx.postings(w)) {
                auto it = pos_of.find(p.doc);
                if (it != pos_of.end())
                    row[it->second] = ranker.score_for(p.tf, idx.doc_length(p.doc));
            }
        }
        double* cell = &mat.values[r * pairs.size()];
        for (const preference_pair& p : pairs) *cell++ = row[p.better] - row[p.worse];
    }
    return mat;
}

}  // namespace rankexpl
