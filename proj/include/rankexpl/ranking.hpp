#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rankexpl/errors.hpp"

namespace rankexpl {

struct scored_doc {
    std::string doc_id;
    double score = 0.0;
};

/// An ordered result list. Scores are present under weak agnosticism and
/// absent under strong agnosticism, where only the order is observable.
struct ranking {
    std::string query_id;
    std::string origin;
    std::vector<std::string> doc_ids;          // best first
    std::vector<double> scores;                // empty when hidden

    bool has_scores() const { return !scores.empty(); }
    std::size_t size() const { return doc_ids.size(); }

    double score_at(std::size_t i) const {
        if (!has_scores()) throw contract_error("ranking '" + origin + "' carries no scores");
        return scores[i];
    }

    /// 1-based rank of a document, as in rank(d) below.
    std::optional<std::size_t> rank_of(const std::string& doc_id) const {
        for (std::size_t i = 0; i < doc_ids.size(); ++i)
            if (doc_ids[i] == doc_id) return i + 1;
        return std::nullopt;
    }

    std::unordered_map<std::string, std::size_t> rank_map() const {
        std::unordered_map<std::string, std::size_t> m;
        m.reserve(doc_ids.size());
        for (std::size_t i = 0; i < doc_ids.size(); ++i) m.emplace(doc_ids[i], i + 1);
        return m;
    }

    ranking without_scores() const {
        ranking r = *this;
        r.scores.clear();
        return r;
    }
};

/// Sorts by score descending, doc_id ascending on ties, and packs the result.
inline ranking make_ranking(std::string query_id, std::string origin,
                            std::vector<scored_doc> scored) {
    std::sort(scored.begin(), scored.end(), [](const scored_doc& a, const scored_doc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    ranking r;
    r.query_id = std::move(query_id);
    r.origin = std::move(origin);
    r.doc_ids.reserve(scored.size());
    r.scores.reserve(scored.size());
    for (auto& sd : scored) {
        r.doc_ids.push_back(std::move(sd.doc_id));
        r.scores.push_back(sd.score);
    }
    return r;
}

}  // namespace rankexpl
