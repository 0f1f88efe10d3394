#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "rankexpl/errors.hpp"
#include "rankexpl/index.hpp"
#include "rankexpl/ranking.hpp"

namespace rankexpl {

/// Union of query and expansion terms with set semantics, first occurrence
/// wins: query order, then expansion pick order. Scoring and reporting both
/// use this ordering, keeping float summation reproducible.
inline std::vector<std::string> expansion_terms(const std::vector<std::string>& query_terms,
                                                const std::vector<std::string>& extra) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    out.reserve(query_terms.size() + extra.size());
    for (const std::string& w : query_terms)
        if (seen.insert(w).second) out.push_back(w);
    for (const std::string& w : extra)
        if (seen.insert(w).second) out.push_back(w);
    return out;
}

/// The explanation ranker: additive over terms, each term scored by a
/// Laplace-smoothed log-likelihood log((tf + δ) / (|d| + δ|V|)). Term
/// contributions are exactly independent, which the coverage solver and the
/// pairwise explanation tables rely on.
class explanation_ranker {
  public:
    explicit explanation_ranker(const corpus_index& idx, double delta = 1.0)
        : idx_(&idx), delta_(delta) {
        if (!(delta > 0.0)) throw config_error("explanation ranker needs delta > 0");
        delta_vocab_ = delta_ * static_cast<double>(idx.vocab_size());
    }

    const corpus_index& index() const { return *idx_; }
    double delta() const { return delta_; }

    double score_for(std::uint32_t tf, std::uint32_t length) const {
        return std::log((static_cast<double>(tf) + delta_) /
                        (static_cast<double>(length) + delta_vocab_));
    }

    double term_score(std::uint32_t term, const doc_view& d) const {
        return score_for(d.tf(term), d.length);
    }

    double term_score(const std::string& term, const doc_view& d) const {
        return term_score(idx_->term_ord(term), d);
    }

    double term_score(const std::string& term, const std::string& doc_id) const {
        return term_score(term, idx_->view(idx_->require_doc(doc_id)));
    }

    double score_expanded(const std::vector<std::uint32_t>& terms, const doc_view& d) const {
        double s = 0.0;
        for (std::uint32_t w : terms) s += term_score(w, d);
        return s;
    }

    double score_expanded(const std::vector<std::string>& terms, const doc_view& d) const {
        double s = 0.0;
        for (const std::string& w : terms) s += term_score(w, d);
        return s;
    }

    double score_expanded(const query& q, const std::vector<std::string>& expansion,
                          const doc_view& d) const {
        return score_expanded(expansion_terms(q.terms, expansion), d);
    }

    ranking rank_expanded(const query& q, const std::vector<std::string>& expansion,
                          const std::vector<std::string>& pool) const {
        std::vector<std::string> terms = expansion_terms(q.terms, expansion);
        std::vector<scored_doc> scored;
        scored.reserve(pool.size());
        for (const std::string& doc_id : pool) {
            doc_view d = idx_->view(idx_->require_doc(doc_id));
            scored.push_back({doc_id, score_expanded(terms, d)});
        }
        return make_ranking(q.query_id, "expl", std::move(scored));
    }

  private:
    const corpus_index* idx_;
    double delta_;
    double delta_vocab_;
};

/// Jelinek-Mercer smoothed log likelihood, Σ_i log(α·P_mle(q_i|d) + (1−α)·P(q_i|D)),
/// with α weighting the document probability. Terms carrying zero mass in
/// both models (possible only for perturbation artifacts) hit the log floor,
/// a uniform shift that keeps perturbed-document scoring total.
inline double jm_log_score(const corpus_index& idx, const std::vector<std::uint32_t>& terms,
                           const doc_view& d, double alpha = 0.4) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw config_error("jm smoothing needs 0 < alpha < 1");
    double total = static_cast<double>(idx.total_tokens());
    double s = 0.0;
    for (std::uint32_t w : terms) {
        double p_doc = d.length == 0 ? 0.0 : static_cast<double>(d.tf(w)) / d.length;
        double p_coll = static_cast<double>(idx.collection_freq(w)) / total;
        double p = alpha * p_doc + (1.0 - alpha) * p_coll;
        s += p > 0.0 ? std::log(p) : corpus_index::log_floor;
    }
    return s;
}

inline double jm_log_score(const corpus_index& idx, const std::vector<std::string>& terms,
                           const doc_view& d, double alpha = 0.4) {
    std::vector<std::uint32_t> ords;
    ords.reserve(terms.size());
    for (const std::string& w : terms) ords.push_back(idx.term_ord(w));
    return jm_log_score(idx, ords, d, alpha);
}

}  // namespace rankexpl
