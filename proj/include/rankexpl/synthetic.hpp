#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <unordered_map>
#include <vector>

#include "rankexpl/embeddings.hpp"
#include "rankexpl/errors.hpp"
#include "rankexpl/index.hpp"
#include "rankexpl/random.hpp"

namespace rankexpl {

/// Knobs for the generated glass-box corpus. Documents mix a Zipfian
/// background vocabulary with a per-topic term cluster; each document
/// activates only a subset of its topic's terms, so every intent term keeps
/// documents it alone can separate. A small leak plants foreign topic terms
/// in unrelated documents, giving retrieval pools that are not purely
/// topical.
struct synthetic_config {
    std::uint64_t seed = 42;
    std::size_t topics = 25;
    std::size_t docs_per_topic = 100;
    std::size_t topic_terms = 14;
    std::size_t active_terms = 9;
    std::size_t background_vocab = 2000;
    std::size_t min_len = 100;
    std::size_t max_len = 140;
    double topical_fraction = 0.3;
    double leak_probability = 0.3;
    std::size_t min_leak = 3;
    std::size_t max_leak = 6;
    double zipf_exponent = 1.05;
    std::size_t query_count = 25;   // one topic each
    std::size_t intent_terms = 10;  // |G_q|, a prefix of the topic cluster

    void validate() const {
        if (topics == 0 || docs_per_topic == 0) throw config_error("synthetic corpus needs documents");
        if (query_count > topics) throw config_error("more queries than topics");
        if (intent_terms < 2 || intent_terms > topic_terms)
            throw config_error("intent size must lie in [2, topic_terms]");
        if (active_terms == 0 || active_terms > topic_terms)
            throw config_error("active subset must lie in [1, topic_terms]");
        if (min_len > max_len || min_leak > max_leak) throw config_error("bad length range");
        if (!(topical_fraction > 0.0 && topical_fraction < 1.0))
            throw config_error("topical fraction must lie in (0, 1)");
        if (!(leak_probability >= 0.0 && leak_probability <= 1.0))
            throw config_error("leak probability must lie in [0, 1]");
    }
};

struct synthetic_data {
    std::vector<raw_document> docs;
    std::vector<query> queries;  // terms chosen from each topic cluster
    std::unordered_map<std::string, std::vector<std::string>> intents;  // query_id -> G_q
    std::vector<std::string> vocabulary;  // every term the generator can emit
};

namespace detail {

inline std::string zero_padded(const char* prefix, std::size_t value, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, value);
    return buf;
}

}  // namespace detail

inline std::string topic_term_name(std::size_t topic, std::size_t term) {
    return detail::zero_padded("t", topic, 2) + detail::zero_padded("x", term, 2);
}

inline synthetic_data generate_corpus(const synthetic_config& cfg) {
    cfg.validate();
    synthetic_data data;

    std::vector<std::string> background;
    background.reserve(cfg.background_vocab);
    for (std::size_t i = 0; i < cfg.background_vocab; ++i)
        background.push_back(detail::zero_padded("bg", i, 4));

    std::vector<std::vector<std::string>> topic_terms(cfg.topics);
    for (std::size_t t = 0; t < cfg.topics; ++t) {
        topic_terms[t].reserve(cfg.topic_terms);
        for (std::size_t w = 0; w < cfg.topic_terms; ++w)
            topic_terms[t].push_back(topic_term_name(t, w));
    }

    std::vector<double> zipf_cumulative;
    zipf_cumulative.reserve(cfg.background_vocab);
    double acc = 0.0;
    for (std::size_t r = 1; r <= cfg.background_vocab; ++r) {
        acc += 1.0 / std::pow(static_cast<double>(r), cfg.zipf_exponent);
        zipf_cumulative.push_back(acc);
    }

    rng gen(derive_seed(cfg.seed, "corpus"));
    std::size_t doc_total = cfg.topics * cfg.docs_per_topic;
    data.docs.reserve(doc_total);
    for (std::size_t i = 0; i < doc_total; ++i) {
        std::size_t topic = i / cfg.docs_per_topic;
        std::size_t len = cfg.min_len + gen.below(cfg.max_len - cfg.min_len + 1);

        auto active_picks = gen.sample_without_replacement(cfg.topic_terms, cfg.active_terms);
        const auto& cluster = topic_terms[topic];

        std::vector<std::string> tokens;
        tokens.reserve(len);
        if (cfg.leak_probability > 0.0 && cfg.topics > 1 &&
            gen.unit() < cfg.leak_probability) {
            std::size_t foreign = gen.below(cfg.topics - 1);
            if (foreign >= topic) ++foreign;
            std::size_t leak_len = cfg.min_leak + gen.below(cfg.max_leak - cfg.min_leak + 1);
            if (leak_len > len) leak_len = len;
            for (std::size_t j = 0; j < leak_len; ++j)
                tokens.push_back(topic_terms[foreign][gen.below(cfg.topic_terms)]);
        }
        while (tokens.size() < len) {
            if (gen.unit() < cfg.topical_fraction)
                tokens.push_back(cluster[active_picks[gen.below(active_picks.size())]]);
            else
                tokens.push_back(background[gen.weighted(zipf_cumulative)]);
        }

        std::string text;
        text.reserve(len * 8);
        for (std::size_t j = 0; j < tokens.size(); ++j) {
            if (j) text.push_back(' ');
            text += tokens[j];
        }
        data.docs.push_back({detail::zero_padded("d", i, 5), std::move(text)});
    }

    for (std::size_t qi = 0; qi < cfg.query_count; ++qi) {
        query q;
        q.query_id = detail::zero_padded("q", qi, 2);
        q.terms = {topic_term_name(qi, 0), topic_term_name(qi, 1)};
        std::vector<std::string> g;
        g.reserve(cfg.intent_terms);
        for (std::size_t w = 0; w < cfg.intent_terms; ++w) g.push_back(topic_term_name(qi, w));
        data.intents.emplace(q.query_id, std::move(g));
        data.queries.push_back(std::move(q));
    }

    data.vocabulary.reserve(cfg.background_vocab + cfg.topics * cfg.topic_terms);
    for (auto& cluster : topic_terms)
        for (auto& w : cluster) data.vocabulary.push_back(w);
    for (auto& w : background) data.vocabulary.push_back(w);
    return data;
}

/// Deterministic pseudo-random unit vectors, one per word, derived from the
/// seed and the word alone. A stand-in for pre-trained vectors in tests.
inline embedding_table synthetic_embeddings(const std::vector<std::string>& words,
                                            std::size_t dim, std::uint64_t seed) {
    if (dim == 0) throw config_error("embedding dimension must be positive");
    embedding_table table;
    for (const std::string& w : words) {
        rng gen(derive_seed(seed, "embed", w));
        std::vector<double> v(dim);
        double norm = 0.0;
        for (double& x : v) {
            x = gaussian(gen);
            norm += x * x;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) norm = 1.0;
        for (double& x : v) x /= norm;
        table.insert(w, std::move(v));
    }
    return table;
}

}  // namespace rankexpl
