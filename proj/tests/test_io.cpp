#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

#include <rankexpl/io.hpp>
#include <rankexpl/random.hpp>

using namespace rankexpl;

namespace {

struct temp_dir {
    std::filesystem::path path;
    temp_dir() {
        path = std::filesystem::temp_directory_path() /
               ("rankexpl-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~temp_dir() { std::filesystem::remove_all(path); }
    static std::size_t& counter() {
        static std::size_t n = 0;
        return n;
    }
    std::string file(const char* name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("fmt_double round trips arbitrary doubles exactly") {
    rng gen(99);
    for (int i = 0; i < 2000; ++i) {
        std::uint64_t bits = gen.next();
        double v;
        static_assert(sizeof v == sizeof bits);
        std::memcpy(&v, &bits, sizeof v);
        if (std::isnan(v) || std::isinf(v)) continue;
        double back = parse_double(fmt_double(v));
        CHECK(back == v);
    }
    CHECK(fmt_double(0.0) == "0");
    CHECK(fmt_double(-1.5) == "-1.5");
    CHECK(parse_double("1e-3") == 0.001);
    CHECK_THROWS_AS(parse_double("1.5x"), data_error);
    CHECK_THROWS_AS(parse_double(""), data_error);
}

TEST_CASE("split_tabs keeps empty fields") {
    CHECK(split_tabs("a\tb\tc") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_tabs("a\t\tc") == std::vector<std::string>{"a", "", "c"});
    CHECK(split_tabs("") == std::vector<std::string>{""});
    CHECK(split_tabs("solo") == std::vector<std::string>{"solo"});
}

TEST_CASE("read_lines strips carriage returns and demands the file exists") {
    temp_dir dir;
    write_file_atomic(dir.file("x.txt"), "one\r\ntwo\n\nthree");
    auto lines = read_lines(dir.file("x.txt"));
    CHECK(lines == std::vector<std::string>{"one", "two", "", "three"});
    CHECK_THROWS_AS(read_lines(dir.file("missing.txt")), data_error);
}

TEST_CASE("atomic writes create parent directories and leave no temp files") {
    temp_dir dir;
    std::string target = (dir.path / "a" / "b" / "out.txt").string();
    write_file_atomic(target, "payload");
    CHECK(read_lines(target) == std::vector<std::string>{"payload"});
    std::size_t entries = 0;
    for ([[maybe_unused]] auto& e : std::filesystem::directory_iterator(dir.path / "a" / "b"))
        ++entries;
    CHECK(entries == 1);
}

TEST_CASE("corpus jsonl round trips, including awkward text") {
    temp_dir dir;
    std::vector<raw_document> docs = {
        {"d1", "plain text"},
        {"d2", "tabs\tand \"quotes\" and \\backslashes\\"},
        {"d3", ""},
    };
    write_file_atomic(dir.file("c.jsonl"), save_corpus_jsonl(docs));
    auto back = load_corpus_jsonl(dir.file("c.jsonl"));
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        CHECK(back[i].doc_id == docs[i].doc_id);
        CHECK(back[i].text == docs[i].text);
    }
}

TEST_CASE("corpus jsonl rejects malformed lines with positions") {
    temp_dir dir;
    write_file_atomic(dir.file("bad.jsonl"), "{\"id\": \"d1\", \"text\": \"ok\"}\nnot json\n");
    CHECK_THROWS_WITH(load_corpus_jsonl(dir.file("bad.jsonl")),
                      Catch::Matchers::ContainsSubstring("line 2"));
    write_file_atomic(dir.file("bad2.jsonl"), "{\"id\": 3, \"text\": \"ok\"}\n");
    CHECK_THROWS_AS(load_corpus_jsonl(dir.file("bad2.jsonl")), data_error);
    write_file_atomic(dir.file("bad3.jsonl"), "{\"id\": \"d1\"}\n");
    CHECK_THROWS_AS(load_corpus_jsonl(dir.file("bad3.jsonl")), data_error);
}

TEST_CASE("query tsv keeps order and validates shape") {
    temp_dir dir;
    write_file_atomic(dir.file("q.tsv"), "q1\thealth hazards\n\nq2\tasbestos exposure\n");
    auto queries = load_queries_tsv(dir.file("q.tsv"));
    REQUIRE(queries.size() == 2);
    CHECK(queries[0] == std::pair<std::string, std::string>{"q1", "health hazards"});
    CHECK(queries[1].first == "q2");

    write_file_atomic(dir.file("bad.tsv"), "no tab here\n");
    CHECK_THROWS_AS(load_queries_tsv(dir.file("bad.tsv")), data_error);
    write_file_atomic(dir.file("bad2.tsv"), "\tleading tab\n");
    CHECK_THROWS_AS(load_queries_tsv(dir.file("bad2.tsv")), data_error);
}

TEST_CASE("stopword files are one word per line") {
    temp_dir dir;
    write_file_atomic(dir.file("s.txt"), "the\n\nof\nand\n");
    auto words = load_stopwords(dir.file("s.txt"));
    CHECK(words == std::unordered_set<std::string>{"the", "of", "and"});
}

TEST_CASE("intents tsv round trips and rejects duplicates") {
    temp_dir dir;
    std::vector<std::pair<std::string, std::vector<std::string>>> intents = {
        {"q1", {"medicine", "handle"}},
        {"q2", {"asbestos"}},
    };
    write_file_atomic(dir.file("g.tsv"), save_intents_tsv(intents));
    auto back = load_intents_tsv(dir.file("g.tsv"));
    REQUIRE(back.size() == 2);
    CHECK(back.at("q1") == std::vector<std::string>{"medicine", "handle"});
    CHECK(back.at("q2") == std::vector<std::string>{"asbestos"});

    write_file_atomic(dir.file("dup.tsv"), "q1\ta\nq1\tb\n");
    CHECK_THROWS_AS(load_intents_tsv(dir.file("dup.tsv")), data_error);
    write_file_atomic(dir.file("short.tsv"), "q1\n");
    CHECK_THROWS_AS(load_intents_tsv(dir.file("short.tsv")), data_error);
}

TEST_CASE("matrix tsv round trips bit for bit") {
    preference_matrix m;
    m.query_id = "q1";
    m.terms = {"medicine", "handle"};
    m.pair_ids = {"d1>d2", "d1>d3", "d2>d3"};
    m.values = {0.40546510810816438, -1.0986122886681098, 0.0, 1.5, -2.25, 1e-17};

    temp_dir dir;
    write_file_atomic(dir.file("m.tsv"), save_matrix_tsv(m));
    preference_matrix back = load_matrix_tsv(dir.file("m.tsv"));
    CHECK(back.terms == m.terms);
    CHECK(back.pair_ids == m.pair_ids);
    REQUIRE(back.values.size() == m.values.size());
    for (std::size_t i = 0; i < m.values.size(); ++i) CHECK(back.values[i] == m.values[i]);
}

TEST_CASE("matrix tsv validates the header and row widths") {
    temp_dir dir;
    write_file_atomic(dir.file("h.tsv"), "wrong\td1>d2\nmedicine\t0.5\n");
    CHECK_THROWS_AS(load_matrix_tsv(dir.file("h.tsv")), data_error);
    write_file_atomic(dir.file("w.tsv"), "term\td1>d2\td1>d3\nmedicine\t0.5\n");
    CHECK_THROWS_AS(load_matrix_tsv(dir.file("w.tsv")), data_error);
    write_file_atomic(dir.file("e.tsv"), "");
    CHECK_THROWS_AS(load_matrix_tsv(dir.file("e.tsv")), data_error);
}

TEST_CASE("index snapshots preserve tokenization and stemming flag") {
    std::vector<document> docs = {
        {"d1", {"health", "hazard", "medicin", "medicin"}},
        {"d2", {"health", "chemic"}},
    };
    corpus_index idx = corpus_index::build(std::move(docs));

    temp_dir dir;
    write_file_atomic(dir.file("i.json"), save_index_json(idx, true));
    bool stemming = false;
    corpus_index back = load_index_json(dir.file("i.json"), &stemming);
    CHECK(stemming);
    CHECK(back.doc_count() == 2);
    CHECK(back.vocab_size() == idx.vocab_size());
    CHECK(back.total_tokens() == idx.total_tokens());
    CHECK(back.doc(back.require_doc("d1")).tokens ==
          std::vector<std::string>{"health", "hazard", "medicin", "medicin"});
    CHECK(back.tf(back.term_ord("medicin"), back.require_doc("d1")) == 2);

    write_file_atomic(dir.file("bad.json"), "{\"stemming\": false}");
    CHECK_THROWS_AS(load_index_json(dir.file("bad.json")), data_error);
    CHECK_THROWS_AS(load_index_json(dir.file("missing.json")), data_error);
}
