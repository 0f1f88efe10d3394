#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rankexpl/errors.hpp"

namespace rankexpl {

class embedding_table {
  public:
    static embedding_table parse(std::istream& in) {
        embedding_table table;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::string word;
            ls >> word;
            std::vector<double> vec;
            double x;
            while (ls >> x) {
                if (!std::isfinite(x))
                    throw data_error("non-finite embedding value at line " +
                                     std::to_string(line_no));
                vec.push_back(x);
            }
            if (!ls.eof())
                throw data_error("malformed embedding line " + std::to_string(line_no));
            if (word.empty() || vec.empty())
                throw data_error("malformed embedding line " + std::to_string(line_no));
            if (table.dim_ == 0)
                table.dim_ = vec.size();
            else if (vec.size() != table.dim_)
                throw data_error("embedding dimensionality mismatch at line " +
                                 std::to_string(line_no) + ": expected " +
                                 std::to_string(table.dim_) + ", got " +
                                 std::to_string(vec.size()));
            table.vectors_[std::move(word)] = std::move(vec);
        }
        if (table.vectors_.empty()) throw data_error("embedding file has no entries");
        return table;
    }

    static embedding_table load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw data_error("cannot open embedding file: " + path);
        return parse(in);
    }

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return vectors_.size(); }

    bool has(const std::string& word) const { return vectors_.count(word) != 0; }

    const std::vector<double>* find(const std::string& word) const {
        auto it = vectors_.find(word);
        return it == vectors_.end() ? nullptr : &it->second;
    }

    void insert(std::string word, std::vector<double> vec) {
        if (vec.empty()) throw data_error("empty embedding vector");
        if (dim_ == 0) dim_ = vec.size();
        if (vec.size() != dim_) throw data_error("embedding dimensionality mismatch on insert");
        vectors_[std::move(word)] = std::move(vec);
    }

  private:
    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// Cosine similarity; zero vectors compare as 0 so degenerate documents rank
/// last instead of aborting a run.
inline double cosine(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) throw contract_error("cosine: dimensionality mismatch");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

/// Weighted arithmetic mean of the embedded terms; terms without vectors are
/// skipped. weights == nullptr gives the unweighted mean.
inline std::vector<double> mean_vector(const embedding_table& table,
                                       const std::vector<std::string>& terms,
                                       const std::vector<double>* weights = nullptr) {
    if (weights && weights->size() != terms.size())
        throw contract_error("mean_vector: weight count does not match term count");
    std::vector<double> sum(table.dim(), 0.0);
    double total = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::vector<double>* v = table.find(terms[i]);
        if (!v) continue;
        double w = weights ? (*weights)[i] : 1.0;
        for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += w * (*v)[k];
        total += w;
        any = true;
    }
    if (!any) throw data_error("mean_vector: no term has an embedding");
    if (total == 0.0) throw data_error("mean_vector: zero total weight");
    for (double& x : sum) x /= total;
    return sum;
}

/// Top-n terms of `allowed` by cosine to v, descending, ties lexicographic.
/// Terms without embeddings are ignored; fewer than n eligible terms returns
/// them all. Exhaustive scan, no approximation.
inline std::vector<std::string> nearest_terms(const embedding_table& table,
                                              const std::vector<double>& v,
                                              const std::vector<std::string>& allowed,
                                              std::size_t n) {
    std::unordered_set<std::string> seen;
    std::vector<std::pair<double, std::string>> scored;
    scored.reserve(allowed.size());
    for (const std::string& w : allowed) {
        if (!seen.insert(w).second) continue;
        const std::vector<double>* e = table.find(w);
        if (!e) continue;
        scored.emplace_back(cosine(v, *e), w);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    if (scored.size() > n) scored.resize(n);
    std::vector<std::string> out;
    out.reserve(scored.size());
    for (auto& [s, w] : scored) out.push_back(std::move(w));
    return out;
}

}  // namespace rankexpl
