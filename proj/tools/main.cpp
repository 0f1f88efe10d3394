// Command line front end: indexing, explanation, evaluation, matrix solving,
// pairwise drill-down, candidate inspection and synthetic data generation.

#include <cstdio>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>

#include <rankexpl/rankexpl.hpp>

namespace {

using namespace rankexpl;

struct cli_options {
    experiment_config cfg;
    std::string mode = "weak";
    std::string sampling = "topk-random";
    std::string caps = "1000,500,250";
    std::string grid;
    std::string query_id;
};

std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string item = text.substr(start, comma == std::string::npos ? comma : comma - start);
        try {
            std::size_t used = 0;
            out.push_back(std::stoull(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw config_error(std::string(what) + ": cannot parse '" + item + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

void add_context_options(CLI::App* cmd, cli_options& opt, bool with_experiment) {
    cmd->add_option("--corpus", opt.cfg.corpus_path, "corpus as JSON lines with id and text");
    cmd->add_option("--index", opt.cfg.index_path, "pre-built index JSON (alternative to --corpus)");
    cmd->add_option("--queries", opt.cfg.query_path, "queries TSV: id<TAB>text");
    cmd->add_option("--stopwords", opt.cfg.stopwords_path, "stopword list, one word per line");
    cmd->add_flag("--stem", opt.cfg.stemming, "stem tokens when indexing a corpus");
    if (!with_experiment) return;
    cmd->add_option("--blackbox", opt.cfg.blackbox, "ranker to explain: rm3-10, rm3-20, emb, desm, expl")
        ->capture_default_str();
    cmd->add_option("--mode", opt.mode, "agnosticism: weak or strong")->capture_default_str();
    cmd->add_option("--sampling", opt.sampling,
                    "pair sampling: random, rank-biased, topk, topk-random, topk-rank-random")
        ->capture_default_str();
    cmd->add_option("--features", opt.cfg.features, "preference pairs to sample (0 = mode default)");
    cmd->add_option("--caps", opt.caps, "candidate caps: stage1,reductive,additive")
        ->capture_default_str();
    cmd->add_option("--seed", opt.cfg.seed, "master seed")->capture_default_str();
    cmd->add_option("--budget", opt.cfg.budget, "max explanation terms")->capture_default_str();
    cmd->add_option("--k", opt.cfg.explain_k, "explained prefix of the ranking")
        ->capture_default_str();
    cmd->add_option("--pool", opt.cfg.pool_size, "retrieval pool size")->capture_default_str();
    cmd->add_option("--delta", opt.cfg.delta, "explanation ranker smoothing")->capture_default_str();
    cmd->add_option("--alpha", opt.cfg.alpha, "query likelihood interpolation")
        ->capture_default_str();
    cmd->add_option("--mu", opt.cfg.mu, "retrieval smoothing")->capture_default_str();
    cmd->add_option("--gamma", opt.cfg.gamma, "desm mixing weight")->capture_default_str();
    cmd->add_option("--n-add", opt.cfg.n_add, "copies appended by the additive probe")
        ->capture_default_str();
    cmd->add_option("--embeddings", opt.cfg.embeddings_path, "word vectors, text format");
    cmd->add_option("--intents", opt.cfg.intents_path, "planted intents TSV for the expl box");
    cmd->add_option("--threads", opt.cfg.threads, "worker threads (0 = all cores)");
    cmd->add_option("--grid", opt.grid, "feature counts for the sweep, comma separated");
    cmd->add_option("--out-dir", opt.cfg.out_dir, "output directory")->capture_default_str();
}

void finalize(cli_options& opt) {
    opt.cfg.mode = parse_agnosticism(opt.mode);
    opt.cfg.strategy = parse_strategy(opt.sampling);
    std::vector<std::size_t> caps = parse_size_list(opt.caps, "--caps");
    if (caps.size() != 3) throw config_error("--caps needs exactly three values");
    opt.cfg.cap_stage1 = caps[0];
    opt.cfg.cap_reduce = caps[1];
    opt.cfg.cap_add = caps[2];
    if (!opt.grid.empty()) opt.cfg.feature_grid = parse_size_list(opt.grid, "--grid");
    opt.cfg.validate();
}

std::vector<query> load_query_set(const experiment_context& ctx, const std::string& path,
                                  const std::string& only_id) {
    if (path.empty()) throw config_error("--queries is required");
    std::vector<query> out;
    for (const auto& [id, text] : load_queries_tsv(path)) {
        if (!only_id.empty() && id != only_id) continue;
        out.push_back(ctx.make_query(id, text));
    }
    if (out.empty())
        throw data_error(only_id.empty() ? "query file is empty"
                                         : "query " + only_id + " not found");
    return out;
}

int cmd_index(const cli_options& opt, const std::string& out_path) {
    if (opt.cfg.corpus_path.empty()) throw config_error("--corpus is required");
    tokenizer tok = opt.cfg.stopwords_path.empty()
                        ? tokenizer()
                        : tokenizer(load_stopwords(opt.cfg.stopwords_path));
    tok.set_stemming(opt.cfg.stemming);
    corpus_index idx = corpus_index::build(load_corpus_jsonl(opt.cfg.corpus_path), tok);
    write_file_atomic(out_path, save_index_json(idx, opt.cfg.stemming));
    std::printf("indexed %zu documents, %zu terms, %llu tokens\n", idx.doc_count(),
                idx.vocab_size(), static_cast<unsigned long long>(idx.total_tokens()));
    return 0;
}

int cmd_explain(const cli_options& opt, bool save_matrix) {
    auto ctx = experiment_context::load(opt.cfg);
    std::vector<query> queries = load_query_set(*ctx, opt.cfg.query_path, opt.query_id);
    std::string tag = opt.cfg.blackbox + "_" + to_string(opt.cfg.mode);
    for (const query& q : queries) {
        query_workspace ws = prepare_query(*ctx, q);
        solve_result solved = solve_query(*ctx, ws, opt.cfg.strategy, opt.cfg.effective_features());
        explanation e = make_explanation(*ctx, ws, solved);
        std::string base = opt.cfg.out_dir + "/explanations/" + tag + "_" + q.query_id;
        write_file_atomic(base + ".json", save_explanation_json(e));
        if (save_matrix) write_file_atomic(base + ".matrix.tsv", save_matrix_tsv(solved.matrix));
        std::printf("%s\tcoverage=%lld/%zu\tterms=", q.query_id.c_str(), e.coverage,
                    e.pair_ids.size());
        for (std::size_t i = 0; i < e.terms.size(); ++i)
            std::printf("%s%s", i ? "," : "", e.terms[i].c_str());
        std::printf("\n");
    }
    return 0;
}

int cmd_evaluate(const cli_options& opt) {
    auto ctx = experiment_context::load(opt.cfg);
    std::vector<query> queries = load_query_set(*ctx, opt.cfg.query_path, opt.query_id);
    experiment_report report = run_experiment(*ctx, queries);
    write_report(*ctx, report);
    std::fputs(save_means_tsv(report).c_str(), stdout);
    if (!report.skipped.empty())
        std::fprintf(stderr, "skipped %zu queries, see skipped TSV\n", report.skipped.size());
    return 0;
}

int cmd_solve(const std::string& matrix_path, std::size_t budget, bool exact) {
    preference_matrix m = load_matrix_tsv(matrix_path);
    selection sel = exact ? exact_select(m, budget) : greedy_select(m, budget);
    std::printf("coverage\t%lld\nof_pairs\t%zu\nterms", sel.coverage, m.cols());
    for (const std::string& t : sel.terms) std::printf("\t%s", t.c_str());
    std::printf("\n");
    return 0;
}

int cmd_pair(const cli_options& opt, const std::string& expl_path, const std::string& doc_a,
             const std::string& doc_b) {
    explanation e = load_explanation_json(expl_path);
    experiment_config cfg = opt.cfg;
    cfg.delta = e.delta;
    // Only the index and the explanation ranker matter here; pick a black box
    // with no extra inputs so loading stays cheap.
    cfg.blackbox = "rm3-10";
    cfg.intents_path.clear();
    cfg.embeddings_path.clear();
    if (cfg.index_path.empty() && cfg.corpus_path.empty())
        throw config_error("pair tables need --corpus or --index");
    auto ctx = experiment_context::load(cfg);
    pair_explanation table = explain_pair(e, ctx->ranker(), doc_a, doc_b);
    std::printf("pair\t%s > %s\n", table.better_doc.c_str(), table.worse_doc.c_str());
    std::printf("term\tbetter\tworse\tdiff\n");
    for (const pair_contribution& row : table.rows)
        std::printf("%s\t%s\t%s\t%s\n", row.term.c_str(), fmt_double(row.better_score).c_str(),
                    fmt_double(row.worse_score).c_str(), fmt_double(row.diff).c_str());
    std::printf("total\t%s\t%s\t%s\n", fmt_double(table.better_total).c_str(),
                fmt_double(table.worse_total).c_str(), fmt_double(table.diff_total).c_str());
    return 0;
}

int cmd_candidates(const cli_options& opt) {
    auto ctx = experiment_context::load(opt.cfg);
    std::vector<query> queries = load_query_set(*ctx, opt.cfg.query_path, opt.query_id);
    std::string tag = opt.cfg.blackbox + "_" + to_string(opt.cfg.mode);
    for (const query& q : queries) {
        query_workspace ws = prepare_query(*ctx, q);
        std::string out = "stage\tterm\ttfidf\treduce_delta\tadd_delta\tin_all_topk\n";
        auto emit = [&](const char* stage, const candidate& c) {
            out += stage;
            out += '\t';
            out += c.term;
            out += '\t';
            out += fmt_double(c.tfidf);
            out += '\t';
            out += c.reduce_delta ? fmt_double(*c.reduce_delta) : std::string();
            out += '\t';
            out += c.add_delta ? fmt_double(*c.add_delta) : std::string();
            out += '\t';
            out += c.in_all_topk ? "1" : "0";
            out += '\n';
        };
        std::unordered_set<std::string> in_final;
        for (const candidate& c : ws.final_candidates) {
            in_final.insert(c.term);
            emit("cii", c);
        }
        for (const candidate& c : ws.stage1)
            if (!in_final.count(c.term)) emit("ci", c);
        write_file_atomic(opt.cfg.out_dir + "/candidates_" + tag + "_" + q.query_id + ".tsv", out);
        std::printf("%s\tci=%zu\tcii=%zu\trecall_ci=%s\trecall_cii=%s\n", q.query_id.c_str(),
                    ws.stage1.size(), ws.final_candidates.size(),
                    fmt_double(ws.recall_ci).c_str(), fmt_double(ws.recall_cii).c_str());
    }
    return 0;
}

int cmd_synth(const synthetic_config& scfg, const std::string& out_dir, std::size_t dim) {
    synthetic_data data = generate_corpus(scfg);
    write_file_atomic(out_dir + "/corpus.jsonl", save_corpus_jsonl(data.docs));
    std::string queries;
    for (const query& q : data.queries) {
        queries += q.query_id;
        queries += '\t';
        for (std::size_t i = 0; i < q.terms.size(); ++i) {
            if (i) queries += ' ';
            queries += q.terms[i];
        }
        queries += '\n';
    }
    write_file_atomic(out_dir + "/queries.tsv", queries);
    std::vector<std::pair<std::string, std::vector<std::string>>> intents;
    for (const query& q : data.queries) intents.emplace_back(q.query_id, data.intents.at(q.query_id));
    write_file_atomic(out_dir + "/intents.tsv", save_intents_tsv(intents));
    embedding_table emb = synthetic_embeddings(data.vocabulary, dim, scfg.seed);
    std::string vectors;
    for (const std::string& w : data.vocabulary) {
        vectors += w;
        for (double x : *emb.find(w)) {
            vectors += ' ';
            vectors += fmt_double(x);
        }
        vectors += '\n';
    }
    write_file_atomic(out_dir + "/embeddings.txt", vectors);
    std::printf("wrote %zu documents, %zu queries to %s\n", data.docs.size(), data.queries.size(),
                out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"preference-coverage explanations for text rankers"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value configuration file");
    app.allow_config_extras(CLI::config_extras_mode::error);

    cli_options opt;
    std::string out_path = "index.json";
    std::string matrix_path, expl_path, doc_a, doc_b;
    std::size_t solve_budget = 10;
    bool exact = false, save_matrix = false;
    synthetic_config scfg;
    std::string synth_dir = "synth";
    std::size_t synth_dim = 32;

    CLI::App* c_index = app.add_subcommand("index", "tokenize a corpus and save the index");
    add_context_options(c_index, opt, false);
    c_index->add_option("--out", out_path, "index output path")->capture_default_str();

    CLI::App* c_explain = app.add_subcommand("explain", "explain queries and save the results");
    add_context_options(c_explain, opt, true);
    c_explain->add_option("--query-id", opt.query_id, "explain a single query");
    c_explain->add_flag("--save-matrix", save_matrix, "also save each preference matrix");

    CLI::App* c_eval = app.add_subcommand(
        "evaluate", "sweep every sampling strategy and write evaluation tables");
    add_context_options(c_eval, opt, true);
    c_eval->add_option("--query-id", opt.query_id, "evaluate a single query");

    CLI::App* c_solve = app.add_subcommand("solve", "select terms from a saved matrix");
    c_solve->add_option("--matrix", matrix_path, "preference matrix TSV")->required();
    c_solve->add_option("--budget", solve_budget, "max terms")->capture_default_str();
    c_solve->add_flag("--exact", exact, "exhaustive instead of greedy");

    CLI::App* c_pair = app.add_subcommand("pair", "per-term table for one document pair");
    add_context_options(c_pair, opt, false);
    c_pair->add_option("--explanation", expl_path, "saved explanation JSON")->required();
    c_pair->add_option("--doc-a", doc_a)->required();
    c_pair->add_option("--doc-b", doc_b)->required();

    CLI::App* c_cand = app.add_subcommand("candidates", "run the candidate pipeline only");
    add_context_options(c_cand, opt, true);
    c_cand->add_option("--query-id", opt.query_id, "single query");

    CLI::App* c_synth = app.add_subcommand("synth", "generate a glass-box benchmark");
    c_synth->add_option("--out-dir", synth_dir, "output directory")->capture_default_str();
    c_synth->add_option("--seed", scfg.seed, "generator seed")->capture_default_str();
    c_synth->add_option("--topics", scfg.topics)->capture_default_str();
    c_synth->add_option("--docs-per-topic", scfg.docs_per_topic)->capture_default_str();
    c_synth->add_option("--queries", scfg.query_count)->capture_default_str();
    c_synth->add_option("--dim", synth_dim, "embedding dimensionality")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_index->parsed()) return cmd_index(opt, out_path);
        if (c_solve->parsed()) return cmd_solve(matrix_path, solve_budget, exact);
        if (c_pair->parsed()) return cmd_pair(opt, expl_path, doc_a, doc_b);
        if (c_synth->parsed()) return cmd_synth(scfg, synth_dir, synth_dim);
        finalize(opt);
        if (c_explain->parsed()) return cmd_explain(opt, save_matrix);
        if (c_eval->parsed()) return cmd_evaluate(opt);
        if (c_cand->parsed()) return cmd_candidates(opt);
    } catch (const rankexpl::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const rankexpl::contract_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const rankexpl::data_error& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const rankexpl::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
