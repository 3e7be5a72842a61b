#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "widgetfuzz/example_store.hpp"

using namespace widgetfuzz;

namespace {

WidgetContext make_context(const std::string& widget, const std::string& nearby = "") {
    WidgetContext context;
    context.app_name = "app";
    context.page_name = "Page";
    context.input_widget = widget;
    context.nearby_widgets = nearby;
    return context;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/widgetfuzz_test_" + name) {
        std::remove(path.c_str());
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("embedding is deterministic, 300-dim, and L2-normalized") {
    ContextEmbedding a = embed("Font Size on settings page");
    ContextEmbedding b = embed("Font Size on settings page");
    CHECK(a == b);
    CHECK(a.size() == 300);
    double norm = 0;
    for (double v : a) norm += v * v;
    CHECK(std::abs(std::sqrt(norm) - 1.0) < 1e-12);
}

TEST_CASE("embedding tokenization is case-insensitive and splits on non-alnum") {
    CHECK(embed("Font-Size!") == embed("font size"));
    CHECK(embed("a,b;c") == embed("A B C"));
}

TEST_CASE("empty-token text embeds to the zero vector") {
    ContextEmbedding zero = embed("  ;;; ");
    for (double v : zero) CHECK(v == 0.0);
    CHECK(cosine_similarity(zero, embed("something")) == 0.0);
}

TEST_CASE("cosine similarity is 1 for identical and bounded") {
    ContextEmbedding a = embed("password field login");
    CHECK(std::abs(cosine_similarity(a, a) - 1.0) < 1e-12);
    ContextEmbedding b = embed("quantity checkout cart");
    double sim = cosine_similarity(a, b);
    CHECK(sim <= 1.0 + 1e-12);
    CHECK(sim >= -1.0 - 1e-12);
}

TEST_CASE("context query text concatenates the four context fields") {
    WidgetContext context = make_context("Amount", "Transfer;Send");
    CHECK(context_query_text(context) == "app Page Amount Transfer;Send");
}

TEST_CASE("record JSONL round-trip preserves all fields") {
    ExampleRecord record;
    record.record_id = 7;
    record.context = make_context("Coupon", "Apply");
    record.context.dynamic_hint = "invalid code";
    record.mutation_rule = "inject sql meta characters";
    record.buggy_input = "'; --";
    record.source = RecordSource::runtime;

    ExampleRecord round = record_from_json_line(record_to_json_line(record), 1);
    CHECK(round.record_id == 7);
    CHECK(round.context.input_widget == "Coupon");
    CHECK(round.context.dynamic_hint == "invalid code");
    CHECK(round.mutation_rule == record.mutation_rule);
    CHECK(round.buggy_input == "'; --");
    CHECK(round.source == RecordSource::runtime);
}

TEST_CASE("null mutation rule survives the round-trip") {
    ExampleRecord record;
    record.record_id = 1;
    record.context = make_context("City");
    record.buggy_input = "-1";
    std::string line = record_to_json_line(record);
    CHECK(line.find("\"mutation_rule\":null") != std::string::npos);
    CHECK(!record_from_json_line(line, 1).mutation_rule.has_value());
}

TEST_CASE("malformed records carry the line number") {
    CHECK_THROWS_AS(record_from_json_line("{", 3), MalformedRecord);
    CHECK_THROWS_AS(record_from_json_line(R"({"context":{}})", 4), MalformedRecord);
    // empty buggy_input is rejected
    CHECK_THROWS_AS(
        record_from_json_line(R"({"context":{},"buggy_input":""})", 5), MalformedRecord);
    try {
        record_from_json_line("{", 3);
    } catch (const MalformedRecord& e) {
        CHECK(std::string(e.what()).find("record 3") != std::string::npos);
    }
}

TEST_CASE("load_seed_dataset reads the shipped 50-record seed file") {
    ExampleStore store = ExampleStore::load_seed_dataset("data/seed_examples.jsonl");
    CHECK(store.size() == 50);
    for (const auto& record : store.records()) {
        CHECK(!record.mutation_rule.has_value());
        CHECK(!record.buggy_input.empty());
        CHECK(record.source == RecordSource::seed);
    }
    // record ids are reassigned sequentially on load
    CHECK(store.records().front().record_id == 1);
    CHECK(store.records().back().record_id == 50);
}

TEST_CASE("add_record appends to the backing file and reloads") {
    TempFile file("store.jsonl");
    {
        std::ofstream out(file.path);
        ExampleRecord seed;
        seed.record_id = 1;
        seed.context = make_context("Email");
        seed.buggy_input = "a@";
        out << record_to_json_line(seed) << "\n";
    }
    ExampleStore store = ExampleStore::open(file.path);
    CHECK(store.size() == 1);
    long id = store.add_record(make_context("Password"), "pad to 40 chars",
                               std::string(40, 'x'));
    CHECK(id == 2);

    ExampleStore reloaded = ExampleStore::open(file.path);
    REQUIRE(reloaded.size() == 2);
    CHECK(reloaded.records()[1].mutation_rule == std::string("pad to 40 chars"));
    CHECK(reloaded.records()[1].source == RecordSource::runtime);
}

TEST_CASE("retrieval ranks the matching context first") {
    ExampleStore store;
    store.add_record(make_context("Quantity", "Cart;Items"), "negate", "-3");
    store.add_record(make_context("Email", "Sign in"), "truncate", "a@");
    store.add_record(make_context("Password", "Sign in"), "nul byte", "x");

    auto top = store.retrieve_top_k(make_context("Email", "Sign in"), 2);
    REQUIRE(top.size() == 2);
    CHECK(top[0].context.input_widget == "Email");
}

TEST_CASE("retrieval clamps k to the store size and rejects k < 1") {
    ExampleStore store;
    store.add_record(make_context("A"), "r", "x");
    CHECK(store.retrieve_top_k(make_context("A"), 10).size() == 1);
    CHECK_THROWS_AS(store.retrieve_top_k(make_context("A"), 0), std::invalid_argument);
}

TEST_CASE("score ties break toward the earlier record") {
    ExampleStore store;
    store.add_record(make_context("Same Widget"), "r1", "x1");
    store.add_record(make_context("Same Widget"), "r2", "x2");
    auto scored = store.retrieve_top_k_scored(make_context("Same Widget"), 2);
    REQUIRE(scored.size() == 2);
    CHECK(scored[0].first == scored[1].first);
    CHECK(scored[0].second.record_id == 1);
    CHECK(scored[1].second.record_id == 2);
}

TEST_CASE("a custom embedder replaces the default for old and new records") {
    ExampleStore store;
    store.add_record(make_context("A"), "r", "x");
    store.set_embedder([](const std::string& text) {
        ContextEmbedding v{};
        v[0] = text.size();  // rank by text length
        return v;
    });
    store.add_record(make_context("BBBB"), "r", "y");
    auto scored = store.retrieve_top_k_scored(make_context("anything"), 2);
    REQUIRE(scored.size() == 2);
    // under this embedder every vector points the same way
    CHECK(std::abs(scored[0].first - 1.0) < 1e-12);
}
