#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rankexpl/errors.hpp"
#include "rankexpl/preference.hpp"

namespace rankexpl {

struct selection {
    std::vector<std::string> terms;   // pick order (greedy) or sorted (exact)
    std::vector<std::size_t> rows;    // matrix rows of those terms, same order
    std::vector<char> chosen;         // boolean vector over all matrix rows
    long long coverage = 0;

    std::size_t size() const { return rows.size(); }
};

/// Column sums of the selected rows, accumulated in ascending row order so
/// the result is independent of pick order.
inline std::vector<double> aggregate_rows(const preference_matrix& m,
                                          std::vector<std::size_t> rows) {
    std::sort(rows.begin(), rows.end());
    std::vector<double> y(m.cols(), 0.0);
    for (std::size_t r : rows) {
        const double* cell = &m.values[r * m.cols()];
        for (std::size_t j = 0; j < m.cols(); ++j) y[j] += cell[j];
    }
    return y;
}

/// Preference coverage: the number of pairs whose aggregate score over the
/// selected terms is strictly positive. A column summing to exactly zero is
/// not covered.
inline long long pcov(const preference_matrix& m, const std::vector<std::size_t>& rows) {
    std::vector<double> y = aggregate_rows(m, rows);
    long long covered = 0;
    for (double v : y) covered += v > 0.0;
    return covered;
}

inline long long pcov(const preference_matrix& m, const std::vector<char>& chosen) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < chosen.size(); ++r)
        if (chosen[r]) rows.push_back(r);
    return pcov(m, rows);
}

inline long long pcov(const preference_matrix& m, const selection& s) {
    return pcov(m, s.rows);
}

/// Coverage gained (or lost: the objective is not submodular) by adding row
/// w to the current selection.
inline long long utility(const preference_matrix& m, const std::vector<std::size_t>& current,
                         std::size_t w) {
    std::vector<std::size_t> with = current;
    with.push_back(w);
    return pcov(m, with) - pcov(m, current);
}

/// Sum of a row's positive entries; the greedy tie-break.
inline double psum(const preference_matrix& m, std::size_t row) {
    const double* cell = &m.values[row * m.cols()];
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j)
        if (cell[j] > 0.0) s += cell[j];
    return s;
}

/// Greedy maximum-preference-coverage selection. Each step takes the row
/// with the highest utility, breaking ties by psum then lexicographic term,
/// and stops at the budget or when no remaining row has strictly positive
/// utility. Fully deterministic.
inline selection greedy_select(const preference_matrix& m, std::size_t budget = 10) {
    selection sel;
    sel.chosen.assign(m.rows(), 0);
    if (budget < 1) throw config_error("selection budget must be at least 1");
    if (m.rows() == 0 || m.cols() == 0) return sel;

    std::vector<double> row_psum(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) row_psum[r] = psum(m, r);

    std::vector<double> y(m.cols(), 0.0);
    while (sel.rows.size() < budget) {
        bool have_best = false;
        std::size_t best = 0;
        long long best_u = 0;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (sel.chosen[r]) continue;
            const double* cell = &m.values[r * m.cols()];
            long long u = 0;
            for (std::size_t j = 0; j < m.cols(); ++j)
                u += (y[j] + cell[j] > 0.0) - (y[j] > 0.0);
            if (!have_best || u > best_u ||
                (u == best_u && (row_psum[r] > row_psum[best] ||
                                 (row_psum[r] == row_psum[best] && m.terms[r] < m.terms[best])))) {
                have_best = true;
                best = r;
                best_u = u;
            }
        }
        if (!have_best || best_u <= 0) break;
        sel.chosen[best] = 1;
        sel.rows.push_back(best);
        sel.terms.push_back(m.terms[best]);
        const double* cell = &m.values[best * m.cols()];
        for (std::size_t j = 0; j < m.cols(); ++j) y[j] += cell[j];
    }
    sel.coverage = pcov(m, sel.rows);
    return sel;
}

/// Exhaustive optimum over all selections of size ≤ budget; the validation
/// oracle for greedy_select. Among coverage maxima, returns the
/// lexicographically least sorted term set (the empty set when nothing
/// achieves positive coverage). Guarded to small instances.
inline selection exact_select(const preference_matrix& m, std::size_t budget) {
    constexpr std::size_t max_rows = 22;
    if (m.rows() > max_rows)
        throw config_error("exhaustive selection is limited to " + std::to_string(max_rows) +
                           " candidates; use the greedy solver for larger instances");
    if (budget < 1) throw config_error("selection budget must be at least 1");

    selection best;
    best.chosen.assign(m.rows(), 0);
    std::vector<std::string> best_sorted;

    std::size_t n = m.rows();
    std::size_t kmax = budget < n ? budget : n;
    std::vector<std::size_t> rows;
    for (std::size_t k = 1; k <= kmax; ++k) {
        // Gosper's hack: all n-bit masks with exactly k bits set.
        std::uint32_t mask = (1u << k) - 1;
        std::uint32_t limit = n == 32 ? 0xffffffffu : (1u << n);
        while (mask < limit) {
            rows.clear();
            for (std::size_t r = 0; r < n; ++r)
                if (mask & (1u << r)) rows.push_back(r);
            long long cov = pcov(m, rows);
            if (cov > best.coverage) {
                best.coverage = cov;
                best.rows = rows;
                best_sorted.clear();
                for (std::size_t r : rows) best_sorted.push_back(m.terms[r]);
                std::sort(best_sorted.begin(), best_sorted.end());
            } else if (cov == best.coverage && cov > 0) {
                std::vector<std::string> sorted;
                for (std::size_t r : rows) sorted.push_back(m.terms[r]);
                std::sort(sorted.begin(), sorted.end());
                if (std::lexicographical_compare(sorted.begin(), sorted.end(),
                                                 best_sorted.begin(), best_sorted.end())) {
                    best.rows = rows;
                    best_sorted = std::move(sorted);
                }
            }
            std::uint32_t c = mask & static_cast<std::uint32_t>(-static_cast<std::int32_t>(mask));
            std::uint32_t r_bits = mask + c;
            mask = (((r_bits ^ mask) >> 2) / c) | r_bits;
        }
    }

    best.terms = best_sorted;
    for (std::size_t r : best.rows) best.chosen[r] = 1;
    std::sort(best.rows.begin(), best.rows.end());
    return best;
}

}  // namespace rankexpl
