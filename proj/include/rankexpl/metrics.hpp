#pragma once

#include <cstddef>
#include <string>
#include <unordered_set>
#include <vector>

#include "rankexpl/errors.hpp"
#include "rankexpl/ranking.hpp"

namespace rankexpl {

struct eval_record {
    std::string query_id;
    double accuracy = 0.0;
    double local_fidelity = 0.0;
    double global_fidelity = 0.0;
    double recall_ci = 0.0;
    double recall_cii = 0.0;
};

/// Kendall's τ-a over aligned score vectors; tied pairs contribute 0 through
/// the zero sign. τ = (2 / (n(n−1))) Σ_{i<j} sgn(x_i−x_j)·sgn(y_i−y_j).
inline double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw contract_error("kendall_tau: length mismatch");
    std::size_t n = x.size();
    if (n < 2) throw error("kendall_tau undefined for fewer than 2 items");
    auto sgn = [](double a, double b) { return (a > b) - (a < b); };
    long long acc = 0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) acc += sgn(x[i], x[j]) * sgn(y[i], y[j]);
    return 2.0 * static_cast<double>(acc) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

/// τ between a black-box ranking and explanation scores aligned with its doc
/// order, over the top k documents. Black boxes that hide scores contribute
/// negated rank positions, which preserve every sign comparison of the true
/// order.
inline double ranking_fidelity(const ranking& bb, const std::vector<double>& expl_scores,
                               std::size_t k) {
    if (expl_scores.size() != bb.size())
        throw contract_error("ranking_fidelity: score vector does not match ranking");
    std::size_t n = bb.size() < k ? bb.size() : k;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = bb.has_scores() ? bb.scores[i] : -static_cast<double>(i + 1);
        y[i] = expl_scores[i];
    }
    return kendall_tau(x, y);
}

inline double overlap_fraction(const std::vector<std::string>& terms,
                               const std::vector<std::string>& ground_truth) {
    if (ground_truth.empty()) throw contract_error("empty ground-truth intent");
    std::unordered_set<std::string> truth(ground_truth.begin(), ground_truth.end());
    std::unordered_set<std::string> seen;
    std::size_t hits = 0;
    for (const std::string& w : terms)
        if (truth.count(w) && seen.insert(w).second) ++hits;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

/// Fraction of the ground-truth intent recovered by the selected terms.
inline double accuracy(const std::vector<std::string>& selected,
                       const std::vector<std::string>& ground_truth) {
    return overlap_fraction(selected, ground_truth);
}

/// Fraction of the ground-truth intent present in a candidate set.
inline double recall(const std::vector<std::string>& candidates,
                     const std::vector<std::string>& ground_truth) {
    return overlap_fraction(candidates, ground_truth);
}

}  // namespace rankexpl
