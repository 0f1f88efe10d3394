#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rankexpl/blackbox.hpp"
#include "rankexpl/candidates.hpp"
#include "rankexpl/embeddings.hpp"
#include "rankexpl/errors.hpp"
#include "rankexpl/index.hpp"
#include "rankexpl/io.hpp"
#include "rankexpl/metrics.hpp"
#include "rankexpl/preference.hpp"
#include "rankexpl/random.hpp"
#include "rankexpl/rankers.hpp"
#include "rankexpl/solver.hpp"
#include "rankexpl/tokenizer.hpp"

namespace rankexpl {

struct experiment_config {
    std::string corpus_path;
    std::string index_path;
    std::string query_path;
    std::string embeddings_path;
    std::string intents_path;
    std::string stopwords_path;
    std::string out_dir = "out";

    std::string blackbox = "rm3-10";
    agnosticism mode = agnosticism::weak;
    sampling_strategy strategy = sampling_strategy::topk_random;
    std::size_t features = 0;  // 0 picks the mode default below

    std::size_t pool_size = 1000;
    std::size_t explain_k = 10;
    std::size_t budget = 10;
    std::size_t cap_stage1 = 1000;
    std::size_t cap_reduce = 500;
    std::size_t cap_add = 250;
    std::size_t reductive_extra_docs = 40;
    std::uint32_t n_add = 5;

    double delta = 1.0;
    double alpha = 0.4;
    double mu = 2000.0;
    double gamma = 0.9;

    bool stemming = false;
    std::uint64_t seed = 42;
    unsigned threads = 0;  // 0 = hardware concurrency
    std::vector<std::size_t> feature_grid;  // empty = {effective_features()}

    std::size_t effective_features() const {
        if (features) return features;
        return mode == agnosticism::strong ? 2500 : 500;
    }

    std::vector<std::size_t> effective_grid() const {
        return feature_grid.empty() ? std::vector<std::size_t>{effective_features()}
                                    : feature_grid;
    }

    void validate() const {
        if (pool_size == 0 || explain_k == 0 || budget == 0) throw config_error("pool, k and budget must be positive");
        if (cap_stage1 == 0 || cap_reduce == 0 || cap_add == 0) throw config_error("candidate caps must be positive");
        if (!(delta > 0.0)) throw config_error("delta must be positive");
        if (!(alpha > 0.0 && alpha < 1.0)) throw config_error("alpha must lie in (0, 1)");
        if (!(mu > 0.0)) throw config_error("mu must be positive");
        if (!(gamma >= 0.0 && gamma <= 1.0)) throw config_error("gamma must lie in [0, 1]");
        if (n_add == 0) throw config_error("n_add must be positive");
    }

    /// Stable hash of everything that shapes an explanation, stamped into
    /// every persisted artifact.
    std::string fingerprint() const {
        std::string s;
        s += "bb=" + blackbox;
        s += ";mode=" + std::string(to_string(mode));
        s += ";sampling=" + std::string(to_string(strategy));
        s += ";m=" + std::to_string(effective_features());
        s += ";pool=" + std::to_string(pool_size);
        s += ";k=" + std::to_string(explain_k);
        s += ";budget=" + std::to_string(budget);
        s += ";caps=" + std::to_string(cap_stage1) + "," + std::to_string(cap_reduce) + "," +
             std::to_string(cap_add);
        s += ";extra=" + std::to_string(reductive_extra_docs);
        s += ";nadd=" + std::to_string(n_add);
        s += ";delta=" + fmt_double(delta);
        s += ";alpha=" + fmt_double(alpha);
        s += ";mu=" + fmt_double(mu);
        s += ";gamma=" + fmt_double(gamma);
        s += ";stem=" + std::to_string(stemming);
        s += ";seed=" + std::to_string(seed);
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(fnv1a(s)));
        return buf;
    }
};

/// Everything an experiment needs, constructed once: index, tokenizer,
/// embeddings, black box, explanation ranker. Immutable during a run, so
/// queries can be processed concurrently.
class experiment_context {
  public:
    static std::unique_ptr<experiment_context> load(experiment_config cfg) {
        cfg.validate();
        auto ctx = std::unique_ptr<experiment_context>(new experiment_context(std::move(cfg)));
        const experiment_config& c = ctx->cfg_;
        if (!c.stopwords_path.empty()) ctx->tok_ = tokenizer(load_stopwords(c.stopwords_path));
        if (!c.index_path.empty()) {
            bool stemming = false;
            ctx->idx_ = std::make_unique<corpus_index>(load_index_json(c.index_path, &stemming));
            ctx->tok_.set_stemming(stemming);
        } else if (!c.corpus_path.empty()) {
            ctx->tok_.set_stemming(c.stemming);
            ctx->idx_ = std::make_unique<corpus_index>(
                corpus_index::build(load_corpus_jsonl(c.corpus_path), ctx->tok_));
        } else {
            throw config_error("either a corpus or an index file is required");
        }
        if (!c.embeddings_path.empty())
            ctx->emb_ = std::make_unique<embedding_table>(embedding_table::load(c.embeddings_path));
        if (!c.intents_path.empty()) ctx->planted_ = load_intents_tsv(c.intents_path);
        ctx->finish_setup();
        return ctx;
    }

    /// In-memory construction for tests and the synthetic suite.
    static std::unique_ptr<experiment_context> from_data(
        experiment_config cfg, std::vector<raw_document> docs,
        std::unordered_map<std::string, std::vector<std::string>> planted = {},
        std::unique_ptr<embedding_table> emb = nullptr) {
        cfg.validate();
        auto ctx = std::unique_ptr<experiment_context>(new experiment_context(std::move(cfg)));
        ctx->tok_.set_stemming(ctx->cfg_.stemming);
        ctx->idx_ = std::make_unique<corpus_index>(corpus_index::build(docs, ctx->tok_));
        ctx->planted_ = std::move(planted);
        ctx->emb_ = std::move(emb);
        ctx->finish_setup();
        return ctx;
    }

    const experiment_config& config() const { return cfg_; }
    const corpus_index& index() const { return *idx_; }
    const tokenizer& tok() const { return tok_; }
    const black_box& bb() const { return *bb_; }
    const explanation_ranker& ranker() const { return *ranker_; }
    const embedding_table* embeddings() const { return emb_.get(); }

    query make_query(const std::string& query_id, const std::string& text) const {
        query q{query_id, tok_.tokenize(text)};
        if (q.terms.empty()) throw data_error("query " + query_id + " is empty after tokenization");
        return q;
    }

  private:
    explicit experiment_context(experiment_config cfg) : cfg_(std::move(cfg)) {}

    void finish_setup() {
        black_box_options opt;
        opt.mode = cfg_.mode;
        opt.alpha = cfg_.alpha;
        opt.gamma = cfg_.gamma;
        opt.delta = cfg_.delta;
        bb_ = make_black_box(cfg_.blackbox, *idx_, opt, emb_.get(),
                             planted_.empty() ? nullptr : &planted_);
        ranker_.emplace(*idx_, cfg_.delta);
    }

    experiment_config cfg_;
    tokenizer tok_;
    std::unique_ptr<corpus_index> idx_;
    std::unique_ptr<embedding_table> emb_;
    std::unordered_map<std::string, std::vector<std::string>> planted_;
    std::unique_ptr<black_box> bb_;
    std::optional<explanation_ranker> ranker_;
};

/// Per-query state shared by every sampling strategy and feature count:
/// retrieval, black-box ranking, ground-truth intent and the candidate
/// pipeline never depend on either.
struct query_workspace {
    query q;
    ranking initial;
    ranking bb_rank;
    std::vector<std::string> intent;
    std::vector<candidate> stage1;
    std::vector<candidate> final_candidates;
    double recall_ci = 0.0;
    double recall_cii = 0.0;
};

inline query_workspace prepare_query(const experiment_context& ctx, query q) {
    const experiment_config& cfg = ctx.config();
    query_workspace ws;
    ws.q = std::move(q);
    ws.initial = ctx.index().retrieve(ws.q, cfg.pool_size, cfg.mu);
    if (ws.initial.size() < 2)
        throw data_error("query " + ws.q.query_id + " retrieved fewer than 2 documents");
    ws.bb_rank = ctx.bb().rank(ws.q, ws.initial);
    ws.intent = ctx.bb().intent(ws.q, ws.initial);
    ws.stage1 = tfidf_candidates(ctx.index(), ws.initial.doc_ids, cfg.cap_stage1);
    if (cfg.mode == agnosticism::weak) {
        rng doc_gen(derive_seed(cfg.seed, "doc-sample", ws.q.query_id));
        std::vector<candidate> reduced =
            reductive_filter(ctx.bb(), ws.q, ws.initial, ws.bb_rank, ws.stage1, doc_gen,
                             cfg.cap_reduce, cfg.explain_k, cfg.reductive_extra_docs);
        ws.final_candidates =
            additive_filter(ctx.bb(), ws.q, ws.initial, ws.bb_rank, std::move(reduced),
                            cfg.cap_add, cfg.explain_k, cfg.n_add);
    } else {
        ws.final_candidates = ws.stage1;
    }
    ws.recall_ci = recall(candidate_terms(ws.stage1), ws.intent);
    ws.recall_cii = recall(candidate_terms(ws.final_candidates), ws.intent);
    return ws;
}

struct solve_result {
    selection sel;
    preference_matrix matrix;
    eval_record rec;
    bool pairs_exhausted = false;
    bool resample_cap_hit = false;
};

/// Samples pairs, builds the matrix, selects T_q and scores the explanation
/// for one (strategy, feature count) cell.
inline solve_result solve_query(const experiment_context& ctx, const query_workspace& ws,
                                sampling_strategy strategy, std::size_t m) {
    const experiment_config& cfg = ctx.config();
    rng gen(derive_seed(cfg.seed, "sampling",
                        ws.q.query_id + "|" + to_string(strategy) + "|" + std::to_string(m)));
    pair_sample sample = sample_pairs(strategy, ws.bb_rank, m, gen, cfg.explain_k);
    if (sample.pairs.empty())
        throw data_error("query " + ws.q.query_id + " produced no preference pairs");

    solve_result out;
    out.pairs_exhausted = sample.exhausted;
    out.resample_cap_hit = sample.resample_cap_hit;
    out.matrix = build_matrix(ctx.ranker(), candidate_terms(ws.final_candidates), sample.pairs,
                              ws.bb_rank);
    out.sel = greedy_select(out.matrix, cfg.budget);

    std::vector<std::string> expanded = expansion_terms(ws.q.terms, out.sel.terms);
    std::vector<double> expl_scores(ws.bb_rank.size());
    for (std::size_t i = 0; i < ws.bb_rank.size(); ++i) {
        doc_view d = ctx.index().view(ctx.index().require_doc(ws.bb_rank.doc_ids[i]));
        expl_scores[i] = ctx.ranker().score_expanded(expanded, d);
    }

    out.rec.query_id = ws.q.query_id;
    out.rec.accuracy = accuracy(out.sel.terms, ws.intent);
    out.rec.local_fidelity = ranking_fidelity(ws.bb_rank, expl_scores, cfg.explain_k);
    out.rec.global_fidelity = ranking_fidelity(ws.bb_rank, expl_scores, ws.bb_rank.size());
    out.rec.recall_ci = ws.recall_ci;
    out.rec.recall_cii = ws.recall_cii;
    return out;
}

struct explanation {
    std::string query_id;
    std::vector<std::string> query_terms;
    std::string blackbox;
    std::string mode;
    std::string strategy;
    std::size_t features = 0;
    std::uint64_t seed = 0;
    double delta = 1.0;
    std::string fingerprint;

    std::vector<std::string> terms;  // T_q in pick order
    long long coverage = 0;
    std::vector<std::string> pair_ids;
    std::vector<std::vector<double>> rows;  // matrix rows of T_q terms
    std::vector<std::string> intent;
    std::vector<std::string> candidates;
    eval_record eval;
    std::vector<std::string> bb_doc_ids;
    std::vector<double> bb_scores;  // absent under strong agnosticism
};

inline explanation make_explanation(const experiment_context& ctx, const query_workspace& ws,
                                    const solve_result& solved) {
    const experiment_config& cfg = ctx.config();
    explanation e;
    e.query_id = ws.q.query_id;
    e.query_terms = ws.q.terms;
    e.blackbox = cfg.blackbox;
    e.mode = to_string(cfg.mode);
    e.strategy = to_string(cfg.strategy);
    e.features = cfg.effective_features();
    e.seed = cfg.seed;
    e.delta = cfg.delta;
    e.fingerprint = cfg.fingerprint();
    e.terms = solved.sel.terms;
    e.coverage = solved.sel.coverage;
    e.pair_ids = solved.matrix.pair_ids;
    e.rows.reserve(solved.sel.rows.size());
    for (std::size_t r : solved.sel.rows) {
        const double* cell = &solved.matrix.values[r * solved.matrix.cols()];
        e.rows.emplace_back(cell, cell + solved.matrix.cols());
    }
    e.intent = ws.intent;
    e.candidates = candidate_terms(ws.final_candidates);
    e.eval = solved.rec;
    e.bb_doc_ids = ws.bb_rank.doc_ids;
    e.bb_scores = ws.bb_rank.scores;
    return e;
}

/// Full pipeline for a single query under the configured strategy.
inline explanation explain_query(const experiment_context& ctx, const query& q) {
    query_workspace ws = prepare_query(ctx, q);
    solve_result solved =
        solve_query(ctx, ws, ctx.config().strategy, ctx.config().effective_features());
    return make_explanation(ctx, ws, solved);
}

inline std::string save_explanation_json(const explanation& e) {
    nlohmann::json j;
    j["query_id"] = e.query_id;
    j["query_terms"] = e.query_terms;
    j["blackbox"] = e.blackbox;
    j["mode"] = e.mode;
    j["strategy"] = e.strategy;
    j["features"] = e.features;
    j["seed"] = e.seed;
    j["delta"] = e.delta;
    j["fingerprint"] = e.fingerprint;
    j["terms"] = e.terms;
    j["coverage"] = e.coverage;
    j["pair_ids"] = e.pair_ids;
    j["rows"] = e.rows;
    j["intent"] = e.intent;
    j["candidates"] = e.candidates;
    j["eval"] = {{"accuracy", e.eval.accuracy},
                 {"local_fidelity", e.eval.local_fidelity},
                 {"global_fidelity", e.eval.global_fidelity},
                 {"recall_ci", e.eval.recall_ci},
                 {"recall_cii", e.eval.recall_cii}};
    j["bb_doc_ids"] = e.bb_doc_ids;
    if (!e.bb_scores.empty()) j["bb_scores"] = e.bb_scores;
    return j.dump(2);
}

inline explanation load_explanation_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open explanation: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw data_error("explanation file " + path + ": " + ex.what());
    }
    explanation e;
    try {
        e.query_id = j.at("query_id").get<std::string>();
        e.query_terms = j.at("query_terms").get<std::vector<std::string>>();
        e.blackbox = j.at("blackbox").get<std::string>();
        e.mode = j.at("mode").get<std::string>();
        e.strategy = j.at("strategy").get<std::string>();
        e.features = j.at("features").get<std::size_t>();
        e.seed = j.at("seed").get<std::uint64_t>();
        e.delta = j.at("delta").get<double>();
        e.fingerprint = j.at("fingerprint").get<std::string>();
        e.terms = j.at("terms").get<std::vector<std::string>>();
        e.coverage = j.at("coverage").get<long long>();
        e.pair_ids = j.at("pair_ids").get<std::vector<std::string>>();
        e.rows = j.at("rows").get<std::vector<std::vector<double>>>();
        e.intent = j.at("intent").get<std::vector<std::string>>();
        e.candidates = j.at("candidates").get<std::vector<std::string>>();
        e.eval.query_id = e.query_id;
        e.eval.accuracy = j.at("eval").at("accuracy").get<double>();
        e.eval.local_fidelity = j.at("eval").at("local_fidelity").get<double>();
        e.eval.global_fidelity = j.at("eval").at("global_fidelity").get<double>();
        e.eval.recall_ci = j.at("eval").at("recall_ci").get<double>();
        e.eval.recall_cii = j.at("eval").at("recall_cii").get<double>();
        e.bb_doc_ids = j.at("bb_doc_ids").get<std::vector<std::string>>();
        if (j.contains("bb_scores")) e.bb_scores = j.at("bb_scores").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& ex) {
        throw data_error("explanation file " + path + ": " + ex.what());
    }
    return e;
}

struct pair_contribution {
    std::string term;
    double better_score = 0.0;
    double worse_score = 0.0;
    double diff = 0.0;
};

struct pair_explanation {
    std::string better_doc;
    std::string worse_doc;
    std::vector<pair_contribution> rows;
    double better_total = 0.0;
    double worse_total = 0.0;
    double diff_total = 0.0;
};

/// Per-term contribution table for one concordant document pair: how much
/// each term of q ∪ T_q gives to either side, and the exact decomposition of
/// the score difference. Discordant pairs are refused: the explanation
/// cannot account for an order it disagrees with.
inline pair_explanation explain_pair(const explanation& e, const explanation_ranker& ranker,
                                     const std::string& doc_a, const std::string& doc_b) {
    if (doc_a == doc_b) throw data_error("a pair needs two distinct documents");
    std::size_t pos_a = std::string::npos, pos_b = std::string::npos;
    for (std::size_t i = 0; i < e.bb_doc_ids.size(); ++i) {
        if (e.bb_doc_ids[i] == doc_a) pos_a = i;
        if (e.bb_doc_ids[i] == doc_b) pos_b = i;
    }
    if (pos_a == std::string::npos || pos_b == std::string::npos)
        throw data_error("both documents must belong to the explained pool");

    const std::string& better = pos_a < pos_b ? doc_a : doc_b;
    const std::string& worse = pos_a < pos_b ? doc_b : doc_a;
    const corpus_index& idx = ranker.index();
    doc_view better_view = idx.view(idx.require_doc(better));
    doc_view worse_view = idx.view(idx.require_doc(worse));

    std::vector<std::string> terms = expansion_terms(e.query_terms, e.terms);
    pair_explanation out;
    out.better_doc = better;
    out.worse_doc = worse;
    out.rows.reserve(terms.size());
    for (const std::string& w : terms) {
        pair_contribution row;
        row.term = w;
        row.better_score = ranker.term_score(w, better_view);
        row.worse_score = ranker.term_score(w, worse_view);
        row.diff = row.better_score - row.worse_score;
        out.better_total += row.better_score;
        out.worse_total += row.worse_score;
        out.diff_total += row.diff;
        out.rows.push_back(std::move(row));
    }

    bool expl_concordant = out.better_total > out.worse_total ||
                           (out.better_total == out.worse_total && better < worse);
    if (!expl_concordant)
        throw data_error("pair " + better + " > " + worse +
                         " is discordant: the explanation ranker scores them " +
                         fmt_double(out.better_total) + " vs " + fmt_double(out.worse_total) +
                         " and cannot explain this order");
    return out;
}

inline const std::vector<sampling_strategy>& all_strategies() {
    static const std::vector<sampling_strategy> order = {
        sampling_strategy::random_pairs, sampling_strategy::rank_biased, sampling_strategy::topk,
        sampling_strategy::topk_random, sampling_strategy::topk_rank_random};
    return order;
}

struct eval_row {
    std::string strategy;
    std::size_t features = 0;
    eval_record rec;
};

struct strategy_mean {
    std::string strategy;
    std::size_t features = 0;
    std::size_t queries = 0;
    eval_record mean;
};

struct experiment_report {
    std::vector<eval_row> rows;    // strategy-major, then features, then query order
    std::vector<strategy_mean> means;
    std::vector<std::pair<std::string, std::string>> skipped;  // query_id, reason
    std::vector<explanation> explanations;  // configured strategy and m, query order
};

namespace detail {

template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    if (threads > n) threads = static_cast<unsigned>(n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        workers.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (std::thread& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

/// Runs the whole pipeline over a query set: every sampling strategy at
/// every feature count of the grid, sharing the per-query preparation.
/// Queries run in parallel; every aggregate is assembled in query order, so
/// the report is identical however the threads interleave.
inline experiment_report run_experiment(const experiment_context& ctx,
                                        const std::vector<query>& queries) {
    const experiment_config& cfg = ctx.config();
    std::vector<std::size_t> grid = cfg.effective_grid();

    struct per_query {
        bool ok = false;
        std::string reason;
        std::unordered_map<std::string, eval_record> cells;  // strategy|m -> record
        std::optional<explanation> expl;
    };
    std::vector<per_query> results(queries.size());

    detail::parallel_for(queries.size(), cfg.threads, [&](std::size_t qi) {
        per_query& r = results[qi];
        try {
            query_workspace ws = prepare_query(ctx, queries[qi]);
            for (sampling_strategy strategy : all_strategies()) {
                for (std::size_t m : grid) {
                    solve_result solved = solve_query(ctx, ws, strategy, m);
                    r.cells.emplace(std::string(to_string(strategy)) + "|" + std::to_string(m),
                                    solved.rec);
                    if (strategy == cfg.strategy && m == cfg.effective_features())
                        r.expl = make_explanation(ctx, ws, solved);
                }
            }
            r.ok = true;
        } catch (const error& e) {
            r.ok = false;
            r.reason = e.what();
        }
    });

    experiment_report report;
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        if (!results[qi].ok)
            report.skipped.emplace_back(queries[qi].query_id, results[qi].reason);
        else if (results[qi].expl)
            report.explanations.push_back(std::move(*results[qi].expl));
    }

    for (sampling_strategy strategy : all_strategies()) {
        for (std::size_t m : grid) {
            std::string key = std::string(to_string(strategy)) + "|" + std::to_string(m);
            strategy_mean mean;
            mean.strategy = to_string(strategy);
            mean.features = m;
            for (std::size_t qi = 0; qi < queries.size(); ++qi) {
                if (!results[qi].ok) continue;
                const eval_record& rec = results[qi].cells.at(key);
                report.rows.push_back({mean.strategy, m, rec});
                mean.mean.accuracy += rec.accuracy;
                mean.mean.local_fidelity += rec.local_fidelity;
                mean.mean.global_fidelity += rec.global_fidelity;
                mean.mean.recall_ci += rec.recall_ci;
                mean.mean.recall_cii += rec.recall_cii;
                ++mean.queries;
            }
            if (mean.queries) {
                double n = static_cast<double>(mean.queries);
                mean.mean.accuracy /= n;
                mean.mean.local_fidelity /= n;
                mean.mean.global_fidelity /= n;
                mean.mean.recall_ci /= n;
                mean.mean.recall_cii /= n;
            }
            report.means.push_back(std::move(mean));
        }
    }
    return report;
}

inline std::string save_eval_tsv(const experiment_report& report) {
    std::string out =
        "query_id\tsampling\tfeatures\taccuracy\tlocal_fidelity\tglobal_fidelity\trecall_ci\trecall_cii\n";
    for (const eval_row& row : report.rows) {
        out += row.rec.query_id;
        out += '\t';
        out += row.strategy;
        out += '\t';
        out += std::to_string(row.features);
        out += '\t';
        out += fmt_double(row.rec.accuracy);
        out += '\t';
        out += fmt_double(row.rec.local_fidelity);
        out += '\t';
        out += fmt_double(row.rec.global_fidelity);
        out += '\t';
        out += fmt_double(row.rec.recall_ci);
        out += '\t';
        out += fmt_double(row.rec.recall_cii);
        out += '\n';
    }
    return out;
}

inline std::string save_means_tsv(const experiment_report& report) {
    std::string out =
        "sampling\tfeatures\tqueries\taccuracy\tlocal_fidelity\tglobal_fidelity\trecall_ci\trecall_cii\n";
    for (const strategy_mean& m : report.means) {
        out += m.strategy;
        out += '\t';
        out += std::to_string(m.features);
        out += '\t';
        out += std::to_string(m.queries);
        out += '\t';
        out += fmt_double(m.mean.accuracy);
        out += '\t';
        out += fmt_double(m.mean.local_fidelity);
        out += '\t';
        out += fmt_double(m.mean.global_fidelity);
        out += '\t';
        out += fmt_double(m.mean.recall_ci);
        out += '\t';
        out += fmt_double(m.mean.recall_cii);
        out += '\n';
    }
    return out;
}

/// Plot-ready summary: one line per (strategy, feature count).
inline std::string save_features_csv(const experiment_report& report) {
    std::string out = "sampling,features,accuracy,local_fidelity,global_fidelity\n";
    for (const strategy_mean& m : report.means) {
        out += m.strategy;
        out += ',';
        out += std::to_string(m.features);
        out += ',';
        out += fmt_double(m.mean.accuracy);
        out += ',';
        out += fmt_double(m.mean.local_fidelity);
        out += ',';
        out += fmt_double(m.mean.global_fidelity);
        out += '\n';
    }
    return out;
}

inline std::string save_skipped_tsv(const experiment_report& report) {
    std::string out = "query_id\treason\n";
    for (const auto& [query_id, reason] : report.skipped) {
        out += query_id;
        out += '\t';
        out += reason;
        out += '\n';
    }
    return out;
}

/// Writes every artifact of a run under out_dir. File names carry the black
/// box and mode so runs can share a directory.
inline void write_report(const experiment_context& ctx, const experiment_report& report) {
    const experiment_config& cfg = ctx.config();
    std::string tag = cfg.blackbox + "_" + to_string(cfg.mode);
    std::string dir = cfg.out_dir;
    write_file_atomic(dir + "/eval_" + tag + ".tsv", save_eval_tsv(report));
    write_file_atomic(dir + "/means_" + tag + ".tsv", save_means_tsv(report));
    write_file_atomic(dir + "/features_" + tag + ".csv", save_features_csv(report));
    if (!report.skipped.empty())
        write_file_atomic(dir + "/skipped_" + tag + ".tsv", save_skipped_tsv(report));
    std::vector<std::pair<std::string, std::vector<std::string>>> intents;
    intents.reserve(report.explanations.size());
    for (const explanation& e : report.explanations) {
        write_file_atomic(dir + "/explanations/" + tag + "_" + e.query_id + ".json",
                          save_explanation_json(e));
        intents.emplace_back(e.query_id, e.intent);
    }
    write_file_atomic(dir + "/intents_" + tag + ".tsv", save_intents_tsv(intents));
}

}  // namespace rankexpl
