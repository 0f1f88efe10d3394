// Acceptance gate: every release property in one binary, one verdict line
// each, nonzero exit if any fails.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <rankexpl/rankexpl.hpp>

using namespace rankexpl;

namespace {

struct timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

bool g_all_pass = true;

void verdict(int criterion, bool pass, const std::string& detail, double secs) {
    std::printf("[%s] %d: %s (%.2fs)\n", pass ? "PASS" : "FAIL", criterion, detail.c_str(), secs);
    if (!pass) g_all_pass = false;
}

corpus_index worked_example() {
    std::vector<document> docs = {
        {"d1", {"health", "hazards", "medicine", "medicine", "asbestos", "exposure"}},
        {"d2", {"health", "hazards", "medicine", "handle", "chemical", "exposure"}},
        {"d3", {"health", "hazards", "safety", "chemical", "asbestos", "exposure"}},
        {"d4", {"health", "medicine", "medicine", "handle", "hazards", "dust"}},
    };
    return corpus_index::build(std::move(docs));
}

// 1. Coverage counts on the four-document worked example: every document
//    pair, rows for medicine and handle.
void criterion_coverage_counts() {
    timer t;
    corpus_index idx = worked_example();
    explanation_ranker ranker(idx);
    ranking r = make_ranking("q1", "bb", {{"d1", 4.0}, {"d2", 3.0}, {"d3", 2.0}, {"d4", 1.0}});
    std::vector<preference_pair> pairs = topk_pairs(r);
    preference_matrix m = build_matrix(ranker, {"medicine", "handle"}, pairs, r);

    long long cov_med = pcov(m, std::vector<std::size_t>{0});
    long long cov_both = pcov(m, std::vector<std::size_t>{0, 1});
    bool pass = cov_med == 3 && cov_both == 2;
    verdict(1, pass,
            "worked-example coverage: pcov({medicine})=" + std::to_string(cov_med) +
                " pcov({medicine,handle})=" + std::to_string(cov_both) +
                " expected 3 and 2",
            t.seconds());
}

// 2. Greedy never beats the exhaustive optimum and matches it on most
//    random instances.
void criterion_greedy_vs_exact() {
    timer t;
    rng gen(derive_seed(42, "acceptance", "greedy-exact"));
    int instances = 200, sound = 0, equal = 0;
    int bucket_hi = 0, bucket_mid = 0, bucket_low = 0;  // [0.9,1), [0.75,0.9), <0.75
    for (int i = 0; i < instances; ++i) {
        std::size_t rows = 2 + gen.below(11);  // 2..12
        std::size_t cols = 2 + gen.below(15);  // 2..16
        preference_matrix m;
        m.pair_ids.resize(cols);
        for (std::size_t c = 0; c < cols; ++c) m.pair_ids[c] = "p" + std::to_string(c);
        // Mirror real candidate sets: a few broadly positive rows (terms the
        // ranking actually rewards) among sign-mixed noise rows.
        for (std::size_t r = 0; r < rows; ++r) {
            m.terms.push_back("w" + std::to_string(r));
            bool good = gen.unit() < 0.3;
            for (std::size_t c = 0; c < cols; ++c) {
                double v;
                if (good)
                    v = gen.unit() < 0.2 ? 0.0 : gen.unit();
                else
                    v = gen.unit() < 0.25 ? 0.0 : 2.0 * gen.unit() - 1.0;
                m.values.push_back(v);
            }
        }
        selection gr = greedy_select(m, 4);
        selection ex = exact_select(m, 4);
        if (gr.coverage <= ex.coverage) ++sound;
        if (gr.coverage == ex.coverage) {
            ++equal;
        } else {
            double ratio = ex.coverage == 0
                               ? 1.0
                               : static_cast<double>(gr.coverage) / static_cast<double>(ex.coverage);
            if (ratio >= 0.9)
                ++bucket_hi;
            else if (ratio >= 0.75)
                ++bucket_mid;
            else
                ++bucket_low;
        }
    }
    bool pass = sound == instances && equal >= instances * 8 / 10;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "greedy vs exact on %d matrices: sound=%d equal=%d ratio dist "
                  "{1.0:%d [0.9,1):%d [0.75,0.9):%d <0.75:%d}",
                  instances, sound, equal, equal, bucket_hi, bucket_mid, bucket_low);
    verdict(2, pass, buf, t.seconds());
}

struct glass_box_stats {
    double acc_topk = 0.0, acc_tkr = 0.0;
    double lf_topk = 0.0, lf_tkr = 0.0;
};

// 3. Planted-intent recovery under weak agnosticism. The box scores with the
//    explanation ranker itself over ten known terms, so accuracy and recall
//    are measured against real ground truth.
void criterion_glass_box_recovery(const synthetic_data& data, explanation* first_expl) {
    timer t;
    experiment_config cfg;
    cfg.blackbox = "expl";
    cfg.mode = agnosticism::weak;
    cfg.strategy = sampling_strategy::topk_random;
    cfg.features = 500;
    auto ctx = experiment_context::from_data(cfg, data.docs, data.intents);

    double acc = 0.0, gfid = 0.0, rci = 0.0, rcii = 0.0;
    std::size_t n = 0;
    for (const query& q : data.queries) {
        query_workspace ws = prepare_query(*ctx, q);
        solve_result sr = solve_query(*ctx, ws, sampling_strategy::topk_random, 500);
        acc += sr.rec.accuracy;
        gfid += sr.rec.global_fidelity;
        rci += sr.rec.recall_ci;
        rcii += sr.rec.recall_cii;
        ++n;
        if (first_expl && n == 1) *first_expl = make_explanation(*ctx, ws, sr);
    }
    acc /= n;
    gfid /= n;
    rci /= n;
    rcii /= n;
    bool pass = acc >= 0.8 && gfid >= 0.9 && rci == 1.0 && rcii == 1.0;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "glass-box recovery over %zu queries: accuracy=%.4f (>=0.8) "
                  "global_fidelity=%.4f (>=0.9) recall_ci=%.4f recall_cii=%.4f (both ==1)",
                  n, acc, gfid, rci, rcii);
    verdict(3, pass, buf, t.seconds());
}

// 4. Sampling trade-off: pairs confined to the top documents buy local
//    fidelity at the price of intent accuracy. Uses a feedback-model box
//    whose smoothing differs from the explanation ranker's, so neither
//    strategy can simply clone the scorer.
void criterion_sampling_tradeoff(const synthetic_data& data) {
    timer t;
    experiment_config cfg;
    cfg.blackbox = "rm3-10";
    cfg.mode = agnosticism::weak;
    cfg.features = 500;
    auto ctx = experiment_context::from_data(cfg, data.docs, data.intents);

    glass_box_stats s;
    std::size_t n = 0;
    for (const query& q : data.queries) {
        query_workspace ws = prepare_query(*ctx, q);
        solve_result topk = solve_query(*ctx, ws, sampling_strategy::topk, 500);
        solve_result tkr = solve_query(*ctx, ws, sampling_strategy::topk_random, 500);
        s.acc_topk += topk.rec.accuracy;
        s.acc_tkr += tkr.rec.accuracy;
        s.lf_topk += topk.rec.local_fidelity;
        s.lf_tkr += tkr.rec.local_fidelity;
        ++n;
    }
    double dn = static_cast<double>(n);
    s.acc_topk /= dn;
    s.acc_tkr /= dn;
    s.lf_topk /= dn;
    s.lf_tkr /= dn;
    bool pass = s.lf_topk > s.lf_tkr + 0.05 && s.acc_tkr > s.acc_topk + 0.05;
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "sampling trade-off: local_fidelity topk=%.4f vs topk-random=%.4f "
                  "(margin>0.05), accuracy topk-random=%.4f vs topk=%.4f (margin>0.05)",
                  s.lf_topk, s.lf_tkr, s.acc_tkr, s.acc_topk);
    verdict(4, pass, buf, t.seconds());
}

// 5. Rank-correlation identities, including invariance under strictly
//    monotone transforms of the scores.
void criterion_tau_identities() {
    timer t;
    std::vector<double> x, rev;
    for (int i = 0; i < 20; ++i) x.push_back(static_cast<double>(i));
    rev.assign(x.rbegin(), x.rend());

    bool pass = kendall_tau(x, x) == 1.0 && kendall_tau(x, rev) == -1.0;
    std::vector<double> a = {1.0, 2.0, 3.0}, b = {1.0, 3.0, 2.0};
    pass = pass && std::abs(kendall_tau(a, b) - 1.0 / 3.0) <= 1e-12;

    rng gen(derive_seed(42, "acceptance", "tau"));
    int invariant = 0, trials = 1000;
    for (int i = 0; i < trials; ++i) {
        std::vector<double> u(20), v(20);
        for (double& e : u) e = gaussian(gen);
        for (double& e : v) e = gaussian(gen);
        double base = kendall_tau(u, v);
        std::vector<double> warped(u.size()), shifted(u.size());
        for (std::size_t j = 0; j < u.size(); ++j) {
            warped[j] = std::exp(u[j]);
            shifted[j] = 3.0 * u[j] + 7.0;
        }
        if (kendall_tau(warped, v) == base && kendall_tau(shifted, v) == base) ++invariant;
    }
    pass = pass && invariant == trials;
    verdict(5, pass,
            "kendall tau identities and monotone invariance on " + std::to_string(trials) +
                " random vectors: invariant=" + std::to_string(invariant),
            t.seconds());
}

// 6. Ten documents give exactly 45 ordered top pairs.
void criterion_pair_count() {
    timer t;
    std::vector<scored_doc> docs;
    for (int i = 0; i < 30; ++i)
        docs.push_back({"d" + std::to_string(i), 30.0 - i});
    ranking r = make_ranking("q", "bb", std::move(docs));
    std::size_t count = topk_pairs(r, 10).size();
    verdict(6, count == 45, "topk_pairs(k=10) yields " + std::to_string(count) + " pairs, expected 45",
            t.seconds());
}

// 7. Two identically configured runs write byte-identical artifacts.
void criterion_determinism() {
    timer t;
    synthetic_config scfg;
    scfg.topics = 4;
    scfg.docs_per_topic = 25;
    scfg.background_vocab = 300;
    scfg.min_len = 40;
    scfg.max_len = 60;
    scfg.query_count = 4;
    scfg.intent_terms = 6;
    synthetic_data data = generate_corpus(scfg);

    std::filesystem::path root = std::filesystem::temp_directory_path() /
                                 ("rankexpl-acceptance-" + std::to_string(::getpid()));
    std::filesystem::remove_all(root);

    auto run = [&](const char* sub) {
        experiment_config cfg;
        cfg.blackbox = "expl";
        cfg.mode = agnosticism::weak;
        cfg.features = 100;
        cfg.threads = 2;
        cfg.out_dir = (root / sub).string();
        auto ctx = experiment_context::from_data(cfg, data.docs, data.intents);
        write_report(*ctx, run_experiment(*ctx, data.queries));
        return cfg.out_dir;
    };
    std::string dir_a = run("a");
    std::string dir_b = run("b");

    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    };
    std::vector<std::string> rel_a;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir_a))
        if (entry.is_regular_file())
            rel_a.push_back(std::filesystem::relative(entry.path(), dir_a).string());
    std::sort(rel_a.begin(), rel_a.end());

    bool pass = !rel_a.empty();
    std::size_t files = 0;
    for (const std::string& rel : rel_a) {
        std::filesystem::path pa = std::filesystem::path(dir_a) / rel;
        std::filesystem::path pb = std::filesystem::path(dir_b) / rel;
        if (!std::filesystem::exists(pb) || slurp(pa) != slurp(pb)) {
            pass = false;
            break;
        }
        ++files;
    }
    std::filesystem::remove_all(root);
    verdict(7, pass,
            "determinism: " + std::to_string(files) + " artifacts byte-identical across reruns",
            t.seconds());
}

// 8. Pair tables add up: per-term contributions reproduce the score
//    difference to 1e-9.
void criterion_pair_additivity(const explanation& e, const explanation_ranker& ranker) {
    timer t;
    rng gen(derive_seed(42, "acceptance", "pairs"));
    int collected = 0, attempts = 0;
    double worst = 0.0;
    bool pass = e.bb_doc_ids.size() >= 2;
    while (pass && collected < 100 && attempts < 10000) {
        ++attempts;
        std::size_t i = gen.below(e.bb_doc_ids.size());
        std::size_t j = gen.below(e.bb_doc_ids.size());
        if (i == j) continue;
        pair_explanation p;
        try {
            p = explain_pair(e, ranker, e.bb_doc_ids[i], e.bb_doc_ids[j]);
        } catch (const data_error&) {
            continue;  // discordant pair: the table refuses it by design
        }
        double sum = 0.0;
        for (const pair_contribution& row : p.rows) sum += row.diff;
        double gap = std::abs(sum - (p.better_total - p.worse_total));
        if (gap > worst) worst = gap;
        if (gap > 1e-9) pass = false;
        ++collected;
    }
    pass = pass && collected == 100;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "pair-table additivity on %d concordant pairs: worst gap %.3e (<=1e-9)",
                  collected, worst);
    verdict(8, pass, buf, t.seconds());
}

}  // namespace

int main() {
    criterion_coverage_counts();
    criterion_greedy_vs_exact();

    // Shared corpus for criteria 3 and 4.  Defaults give 2500 docs and a
    // 2000-word background vocabulary; the overrides below spread document
    // lengths and thin per-document topic usage so that top-10 neighbourhoods
    // stay distinguishable.
    synthetic_config scfg;
    scfg.active_terms = 6;
    scfg.min_len = 60;
    scfg.max_len = 200;
    scfg.topical_fraction = 0.45;
    synthetic_data data = generate_corpus(scfg);
    explanation first_expl;
    criterion_glass_box_recovery(data, &first_expl);
    criterion_sampling_tradeoff(data);

    criterion_tau_identities();
    criterion_pair_count();
    criterion_determinism();

    experiment_config cfg;
    cfg.blackbox = "expl";
    auto ctx = experiment_context::from_data(cfg, data.docs, data.intents);
    criterion_pair_additivity(first_expl, ctx->ranker());

    std::printf("%s\n", g_all_pass ? "ACCEPTANCE: all criteria passed"
                                   : "ACCEPTANCE: criteria failed");
    return g_all_pass ? 0 : 1;
}
