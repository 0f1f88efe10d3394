#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rankexpl/embeddings.hpp"
#include "rankexpl/errors.hpp"
#include "rankexpl/index.hpp"
#include "rankexpl/rankers.hpp"
#include "rankexpl/ranking.hpp"

namespace rankexpl {

enum class agnosticism { weak, strong };

inline const char* to_string(agnosticism a) {
    return a == agnosticism::weak ? "weak" : "strong";
}

inline agnosticism parse_agnosticism(const std::string& name) {
    if (name == "weak") return agnosticism::weak;
    if (name == "strong") return agnosticism::strong;
    throw config_error("unknown agnosticism mode: " + name);
}

/// A ranker under explanation. Always exposes rank(); exposes per-document
/// scores only under weak agnosticism. The glass boxes here also expose the
/// expansion terms they actually use (G_q), the yardstick for explanation
/// accuracy. Expansion terms are derived from the initial retrieval ranking,
/// which callers pass in; results are cached per query id.
class black_box {
  public:
    black_box(const corpus_index& idx, std::string name, agnosticism mode)
        : idx_(&idx), name_(std::move(name)), mode_(mode) {}
    virtual ~black_box() = default;

    black_box(const black_box&) = delete;
    black_box& operator=(const black_box&) = delete;

    const std::string& name() const { return name_; }
    agnosticism mode() const { return mode_; }
    const corpus_index& index() const { return *idx_; }

    /// G_q: exactly the terms the box mixes into its scorer (≤ 10, normally 10).
    const std::vector<std::string>& intent(const query& q, const ranking& initial) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = intent_cache_.find(q.query_id);
        if (it == intent_cache_.end())
            it = intent_cache_.emplace(q.query_id, compute_intent(q, initial)).first;
        return it->second;
    }

    /// Re-ranks the retrieved pool. Scores are computed internally but
    /// stripped from the result under strong agnosticism.
    ranking rank(const query& q, const ranking& initial) const {
        const std::vector<std::string>& g = intent(q, initial);
        std::vector<scored_doc> scored;
        scored.reserve(initial.size());
        for (const std::string& doc_id : initial.doc_ids) {
            doc_view d = idx_->view(idx_->require_doc(doc_id));
            scored.push_back({doc_id, score_doc(q, g, d)});
        }
        ranking r = make_ranking(q.query_id, name_, std::move(scored));
        if (mode_ == agnosticism::strong) r.scores.clear();
        return r;
    }

    /// Per-document score; the weak-agnosticism half of the contract.
    double score(const query& q, const ranking& initial, const doc_view& d) const {
        if (mode_ == agnosticism::strong)
            throw contract_error("black box '" + name_ +
                                 "' is strongly agnostic: per-document scores are unavailable");
        return score_doc(q, intent(q, initial), d);
    }

    double score(const query& q, const ranking& initial, const std::string& doc_id) const {
        return score(q, initial, idx_->view(idx_->require_doc(doc_id)));
    }

  protected:
    virtual std::vector<std::string> compute_intent(const query& q, const ranking& initial) const = 0;
    virtual double score_doc(const query& q, const std::vector<std::string>& intent,
                             const doc_view& d) const = 0;

    const corpus_index* idx_;

  private:
    std::string name_;
    agnosticism mode_;
    mutable std::mutex mu_;
    mutable std::unordered_map<std::string, std::vector<std::string>> intent_cache_;
};

/// Relevance-model weights over the vocabulary of the top-k feedback docs:
/// P(w|R) ∝ Σ_{d ∈ top-k} P_mle(w|d) · Π_i P_jm(q_i|d), normalized to sum 1.
/// Exposed standalone so tests can check the full distribution.
inline std::vector<std::pair<std::string, double>> relevance_model(const corpus_index& idx,
                                                                   const query& q,
                                                                   const ranking& initial,
                                                                   std::size_t feedback_depth,
                                                                   double alpha = 0.4) {
    std::size_t k = initial.size() < feedback_depth ? initial.size() : feedback_depth;
    double total_tokens = static_cast<double>(idx.total_tokens());
    std::map<std::string, double> weights;
    double mass = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        std::uint32_t d = idx.require_doc(initial.doc_ids[i]);
        double len = static_cast<double>(idx.doc_length(d));
        if (len == 0.0) continue;
        double doc_weight = 1.0;
        for (const std::string& t : q.terms) {
            std::uint32_t w = idx.term_ord(t);
            double p_doc = static_cast<double>(idx.tf(w, d)) / len;
            double p_coll = static_cast<double>(idx.collection_freq(w)) / total_tokens;
            doc_weight *= alpha * p_doc + (1.0 - alpha) * p_coll;
        }
        for (const auto& [term_ord, tf] : idx.doc_counts(d)) {
            double contrib = static_cast<double>(tf) / len * doc_weight;
            weights[idx.term(term_ord)] += contrib;
            mass += contrib;
        }
    }
    if (mass <= 0.0)
        throw data_error("relevance model for query " + q.query_id + " has no mass");
    std::vector<std::pair<std::string, double>> out(weights.begin(), weights.end());
    for (auto& [term, weight] : out) weight /= mass;
    return out;
}

/// Pseudo-relevance-feedback box: expands the query with the top terms of
/// the relevance model over the top-k initially retrieved documents, then
/// re-ranks with the Jelinek-Mercer language model over the expanded query.
class rm3_black_box : public black_box {
  public:
    rm3_black_box(const corpus_index& idx, std::size_t feedback_depth, agnosticism mode,
                  double alpha = 0.4, std::size_t n_terms = 10)
        : black_box(idx, "rm3-" + std::to_string(feedback_depth), mode),
          feedback_depth_(feedback_depth),
          alpha_(alpha),
          n_terms_(n_terms) {}

  protected:
    std::vector<std::string> compute_intent(const query& q, const ranking& initial) const override {
        auto weights = relevance_model(*idx_, q, initial, feedback_depth_, alpha_);
        std::sort(weights.begin(), weights.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (weights.size() > n_terms_) weights.resize(n_terms_);
        std::vector<std::string> g;
        g.reserve(weights.size());
        for (auto& [term, weight] : weights) g.push_back(std::move(term));
        return g;
    }

    double score_doc(const query& q, const std::vector<std::string>& intent,
                     const doc_view& d) const override {
        return jm_log_score(*idx_, expansion_terms(q.terms, intent), d, alpha_);
    }

  private:
    std::size_t feedback_depth_;
    double alpha_;
    std::size_t n_terms_;
};

/// Embedding expansion box: G_q are the nearest terms to the mean query
/// vector among the vocabulary of the top-10 initially retrieved documents;
/// scoring is the same expanded-query language model as rm3.
class emb_black_box : public black_box {
  public:
    emb_black_box(const corpus_index& idx, const embedding_table& emb, agnosticism mode,
                  double alpha = 0.4, std::size_t n_terms = 10, std::size_t depth = 10)
        : black_box(idx, "emb", mode), emb_(&emb), alpha_(alpha), n_terms_(n_terms), depth_(depth) {}

  protected:
    std::vector<std::string> compute_intent(const query& q, const ranking& initial) const override {
        std::vector<double> qvec = mean_vector(*emb_, q.terms);
        return nearest_terms(*emb_, qvec, top_doc_vocabulary(*idx_, initial, depth_), n_terms_);
    }

    double score_doc(const query& q, const std::vector<std::string>& intent,
                     const doc_view& d) const override {
        return jm_log_score(*idx_, expansion_terms(q.terms, intent), d, alpha_);
    }

    static std::vector<std::string> top_doc_vocabulary(const corpus_index& idx, const ranking& r,
                                                       std::size_t depth) {
        std::size_t k = r.size() < depth ? r.size() : depth;
        std::unordered_set<std::uint32_t> seen;
        std::vector<std::string> vocab;
        for (std::size_t i = 0; i < k; ++i) {
            std::uint32_t d = idx.require_doc(r.doc_ids[i]);
            for (const auto& [term_ord, tf] : idx.doc_counts(d))
                if (seen.insert(term_ord).second) vocab.push_back(idx.term(term_ord));
        }
        return vocab;
    }

    friend class desm_black_box;

  private:
    const embedding_table* emb_;
    double alpha_;
    std::size_t n_terms_;
    std::size_t depth_;
};

/// Dual-embedding box: mixes a smoothed lexical likelihood with the cosine
/// between an idf-weighted expanded-query vector and a tf·idf-weighted
/// document vector. G_q are the nearest terms to the unexpanded query vector
/// within the top-50 vocabulary.
class desm_black_box : public black_box {
  public:
    desm_black_box(const corpus_index& idx, const embedding_table& emb, agnosticism mode,
                   double gamma = 0.9, double delta = 1.0, std::size_t n_terms = 10,
                   std::size_t truth_depth = 50)
        : black_box(idx, "desm", mode),
          emb_(&emb),
          gamma_(gamma),
          delta_(delta),
          n_terms_(n_terms),
          truth_depth_(truth_depth) {
        if (!(gamma >= 0.0 && gamma <= 1.0)) throw config_error("desm gamma must lie in [0, 1]");
    }

    /// γ·exp(Σ log smoothed MLE over q ∪ G) + (1−γ)·cos(query vec, doc vec).
    double mixed_score(const query& q, const std::vector<std::string>& intent,
                       const doc_view& d) const {
        std::vector<std::string> terms = expansion_terms(q.terms, intent);
        double vocab = static_cast<double>(idx_->vocab_size());
        double log_syntactic = 0.0;
        for (const std::string& t : terms) {
            double tf = static_cast<double>(d.tf(idx_->term_ord(t)));
            log_syntactic += std::log((tf + delta_) / (d.length + delta_ * vocab));
        }
        double semantic = semantic_similarity(terms, d);
        return gamma_ * std::exp(log_syntactic) + (1.0 - gamma_) * semantic;
    }

  protected:
    std::vector<std::string> compute_intent(const query& q, const ranking& initial) const override {
        std::vector<double> idf_weights;
        idf_weights.reserve(q.terms.size());
        for (const std::string& t : q.terms) idf_weights.push_back(idx_->idf(idx_->term_ord(t)));
        std::vector<double> qvec = mean_vector(*emb_, q.terms, &idf_weights);
        return nearest_terms(*emb_, qvec,
                             emb_black_box::top_doc_vocabulary(*idx_, initial, truth_depth_),
                             n_terms_);
    }

    double score_doc(const query& q, const std::vector<std::string>& intent,
                     const doc_view& d) const override {
        return mixed_score(q, intent, d);
    }

  private:
    double semantic_similarity(const std::vector<std::string>& expanded, const doc_view& d) const {
        std::vector<double> qvec;
        try {
            std::vector<double> idf_weights;
            idf_weights.reserve(expanded.size());
            for (const std::string& t : expanded)
                idf_weights.push_back(idx_->idf(idx_->term_ord(t)));
            qvec = mean_vector(*emb_, expanded, &idf_weights);
        } catch (const data_error&) {
            return 0.0;
        }
        std::vector<double> dvec(emb_->dim(), 0.0);
        double total = 0.0;
        auto add = [&](std::uint32_t term_ord, std::uint32_t tf) {
            const std::vector<double>* v = emb_->find(idx_->term(term_ord));
            if (!v) return;
            double w = static_cast<double>(tf) * idx_->idf(term_ord);
            for (std::size_t k = 0; k < dvec.size(); ++k) dvec[k] += w * (*v)[k];
            total += w;
        };
        for (const auto& [term_ord, tf] : *d.counts)
            if (term_ord != d.overlay_term) add(term_ord, tf);
        if (d.overlay_term != corpus_index::npos && d.overlay_tf > 0)
            add(d.overlay_term, d.overlay_tf);
        if (total == 0.0) return 0.0;
        for (double& x : dvec) x /= total;
        return cosine(qvec, dvec);
    }

    const embedding_table* emb_;
    double gamma_;
    double delta_;
    std::size_t n_terms_;
    std::size_t truth_depth_;
};

/// Glass box whose scorer is the explanation ranker itself over a planted
/// intent. With the intent recovered exactly, explanation fidelity is 1 by
/// construction, which pins down the recovery half of the pipeline. Also the
/// adapter for external rankers with known intents supplied via file.
class planted_black_box : public black_box {
  public:
    planted_black_box(const corpus_index& idx,
                      std::unordered_map<std::string, std::vector<std::string>> intents,
                      agnosticism mode, double delta = 1.0, std::string name = "expl")
        : black_box(idx, std::move(name), mode),
          ranker_(idx, delta),
          intents_(std::move(intents)) {}

    const explanation_ranker& ranker() const { return ranker_; }

  protected:
    std::vector<std::string> compute_intent(const query& q, const ranking&) const override {
        auto it = intents_.find(q.query_id);
        if (it == intents_.end())
            throw data_error("no planted intent for query " + q.query_id);
        return it->second;
    }

    double score_doc(const query& q, const std::vector<std::string>& intent,
                     const doc_view& d) const override {
        return ranker_.score_expanded(q, intent, d);
    }

  private:
    explanation_ranker ranker_;
    std::unordered_map<std::string, std::vector<std::string>> intents_;
};

struct black_box_options {
    agnosticism mode = agnosticism::weak;
    double alpha = 0.4;
    double gamma = 0.9;
    double delta = 1.0;
    std::size_t n_terms = 10;
};

inline std::unique_ptr<black_box> make_black_box(
    const std::string& name, const corpus_index& idx, const black_box_options& opt,
    const embedding_table* emb = nullptr,
    const std::unordered_map<std::string, std::vector<std::string>>* intents = nullptr) {
    if (name == "rm3-10" || name == "rm3-20") {
        std::size_t depth = name == "rm3-10" ? 10 : 20;
        return std::make_unique<rm3_black_box>(idx, depth, opt.mode, opt.alpha, opt.n_terms);
    }
    if (name == "emb") {
        if (!emb) throw config_error("black box 'emb' needs an embedding table");
        return std::make_unique<emb_black_box>(idx, *emb, opt.mode, opt.alpha, opt.n_terms);
    }
    if (name == "desm") {
        if (!emb) throw config_error("black box 'desm' needs an embedding table");
        return std::make_unique<desm_black_box>(idx, *emb, opt.mode, opt.gamma, opt.delta,
                                                opt.n_terms);
    }
    if (name == "expl") {
        if (!intents) throw config_error("black box 'expl' needs an intent file");
        return std::make_unique<planted_black_box>(idx, *intents, opt.mode, opt.delta);
    }
    throw config_error("unknown black box: " + name);
}

}  // namespace rankexpl
