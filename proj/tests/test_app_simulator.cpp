#include <doctest.h>

#include <random>

#include "widgetfuzz/app_simulator.hpp"
#include "widgetfuzz/hierarchy_io.hpp"

using namespace widgetfuzz;
using nlohmann::json;

namespace {

const char* kTwoPageSpec = R"({
  "app_name": "demo",
  "pages": [
    {
      "activity_name": "FirstActivity",
      "widgets": [{"id": "w_amount", "descriptor": "Amount", "neighbors": ["Amount"]}],
      "rules": [
        {"kind": "must_parse_decimal", "widget": "w_amount",
         "hint": "enter a valid amount"},
        {"kind": "min_value", "widget": "w_amount", "value": 1,
         "hint": "amount must be at least 1", "visibility": "explicit"}
      ],
      "crashes": [
        {"crash_id": "comma_parse", "message": "NumberFormatException",
         "condition": ["contains", "w_amount", ","]}
      ],
      "success_transition": "DoneActivity"
    },
    {
      "activity_name": "DoneActivity",
      "widgets": [{"id": "w_note", "descriptor": "Note", "neighbors": []}],
      "rules": [],
      "crashes": []
    }
  ]
})";

ConstraintRule rule_of(RuleKind kind) {
    ConstraintRule rule;
    rule.kind = kind;
    rule.widget = "w";
    return rule;
}

}  // namespace

TEST_CASE("app spec loading validates structure and references") {
    AppSpec spec = AppSpec::from_json_text(kTwoPageSpec);
    CHECK(spec.app_name == "demo");
    REQUIRE(spec.pages.size() == 2);
    CHECK(spec.pages[0].rules.size() == 2);
    CHECK(spec.pages[0].rules[1].visibility == RuleVisibility::explicit_rule);
    CHECK(spec.pages[0].success_transition == std::string("DoneActivity"));
    CHECK(!spec.pages[1].success_transition.has_value());

    CHECK_THROWS_AS(AppSpec::from_json_text("nope"), AppSpecError);
    CHECK_THROWS_AS(AppSpec::from_json_text(R"({"app_name":"a","pages":[]})"), AppSpecError);
    // duplicate widget id
    CHECK_THROWS_AS(AppSpec::from_json_text(R"({"app_name":"a","pages":[{
        "activity_name":"A","widgets":[{"id":"w","descriptor":"d"},
        {"id":"w","descriptor":"d"}]}]})"),
                    AppSpecError);
    // rule referencing an undeclared widget
    CHECK_THROWS_AS(AppSpec::from_json_text(R"({"app_name":"a","pages":[{
        "activity_name":"A","widgets":[{"id":"w","descriptor":"d"}],
        "rules":[{"kind":"max_len","widget":"ghost","n":3,"hint":"h"}]}]})"),
                    AppSpecError);
    // crash condition referencing an undeclared widget
    CHECK_THROWS_AS(AppSpec::from_json_text(R"({"app_name":"a","pages":[{
        "activity_name":"A","widgets":[{"id":"w","descriptor":"d"}],
        "crashes":[{"crash_id":"c","condition":["<",["num","ghost"],0]}]}]})"),
                    AppSpecError);
    // malformed crash expression is rejected at load time
    CHECK_THROWS_AS(AppSpec::from_json_text(R"({"app_name":"a","pages":[{
        "activity_name":"A","widgets":[{"id":"w","descriptor":"d"}],
        "crashes":[{"crash_id":"c","condition":["bogus_op","w"]}]}]})"),
                    AppSpecError);
    CHECK_THROWS_AS(AppSpec::from_file("/nonexistent.json"), AppSpecError);
}

TEST_CASE("rule_violated covers every rule kind") {
    std::map<std::string, std::string> v;

    v = {{"w", "12"}};
    CHECK(!rule_violated(rule_of(RuleKind::must_parse_int), v));
    v = {{"w", "1.5"}};
    CHECK(rule_violated(rule_of(RuleKind::must_parse_int), v));
    CHECK(!rule_violated(rule_of(RuleKind::must_parse_decimal), v));
    v = {{"w", "abc"}};
    CHECK(rule_violated(rule_of(RuleKind::must_parse_decimal), v));

    v = {{"w", "hello world"}};
    CHECK(!rule_violated(rule_of(RuleKind::pure_text), v));
    v = {{"w", "hello!"}};
    CHECK(rule_violated(rule_of(RuleKind::pure_text), v));

    v = {{"w", "0042"}};
    CHECK(!rule_violated(rule_of(RuleKind::pure_digits), v));
    v = {{"w", ""}};
    CHECK(rule_violated(rule_of(RuleKind::pure_digits), v));
    v = {{"w", "-1"}};
    CHECK(rule_violated(rule_of(RuleKind::pure_digits), v));

    ConstraintRule min_rule = rule_of(RuleKind::min_value);
    min_rule.value = 1;
    v = {{"w", "1"}};
    CHECK(!rule_violated(min_rule, v));
    v = {{"w", "0.5"}};
    CHECK(rule_violated(min_rule, v));
    v = {{"w", "x"}};
    CHECK(rule_violated(min_rule, v));  // unparseable counts as violated

    ConstraintRule max_rule = rule_of(RuleKind::max_value);
    max_rule.value = 120;
    v = {{"w", "120"}};
    CHECK(!rule_violated(max_rule, v));
    v = {{"w", "121"}};
    CHECK(rule_violated(max_rule, v));

    ConstraintRule min_len = rule_of(RuleKind::min_len);
    min_len.n = 3;
    v = {{"w", "abc"}};
    CHECK(!rule_violated(min_len, v));
    v = {{"w", "ab"}};
    CHECK(rule_violated(min_len, v));

    ConstraintRule max_len = rule_of(RuleKind::max_len);
    max_len.n = 3;
    v = {{"w", "abc"}};
    CHECK(!rule_violated(max_len, v));
    v = {{"w", "abcd"}};
    CHECK(rule_violated(max_len, v));

    ConstraintRule req = rule_of(RuleKind::requires_class);
    req.char_class = "upper";
    v = {{"w", "Secret1"}};
    CHECK(!rule_violated(req, v));
    v = {{"w", "secret1"}};
    CHECK(rule_violated(req, v));
    req.char_class = "digit";
    CHECK(!rule_violated(req, v));
    v = {{"w", "secret"}};
    CHECK(rule_violated(req, v));
    req.char_class = "special";
    v = {{"w", "a b"}};
    CHECK(rule_violated(req, v));  // space is not special
    v = {{"w", "a_b"}};
    CHECK(!rule_violated(req, v));

    ConstraintRule forbid = rule_of(RuleKind::forbids_chars);
    forbid.chars = "<>";
    v = {{"w", "name"}};
    CHECK(!rule_violated(forbid, v));
    v = {{"w", "<b>"}};
    CHECK(rule_violated(forbid, v));

    ConstraintRule unique = rule_of(RuleKind::unique_in);
    unique.unique_set = {"admin", "root"};
    v = {{"w", "alice"}};
    CHECK(!rule_violated(unique, v));
    v = {{"w", "admin"}};
    CHECK(rule_violated(unique, v));

    ConstraintRule less = rule_of(RuleKind::less_than);
    less.other = "o";
    v = {{"w", "80"}, {"o", "120"}};
    CHECK(!rule_violated(less, v));
    v = {{"w", "120"}, {"o", "120"}};
    CHECK(rule_violated(less, v));
    v = {{"w", "x"}, {"o", "120"}};
    CHECK(rule_violated(less, v));

    ConstraintRule sum = rule_of(RuleKind::sum_equals);
    sum.widgets = {"a", "b"};
    sum.total_widget = "t";
    v = {{"a", "30"}, {"b", "70"}, {"t", "100"}};
    CHECK(!rule_violated(sum, v));
    v = {{"a", "30"}, {"b", "70"}, {"t", "99"}};
    CHECK(rule_violated(sum, v));
    v = {{"a", "x"}, {"b", "70"}, {"t", "100"}};
    CHECK(rule_violated(sum, v));

    ConstraintRule before = rule_of(RuleKind::date_before);
    before.other = "o";
    v = {{"w", "2025-03-01"}, {"o", "2025-03-15"}};
    CHECK(!rule_violated(before, v));
    v = {{"w", "2025-03-15"}, {"o", "2025-03-15"}};
    CHECK(rule_violated(before, v));
    v = {{"w", "2025-13-01"}, {"o", "2025-03-15"}};
    CHECK(rule_violated(before, v));  // invalid date counts as violated

    ConstraintRule eq = rule_of(RuleKind::equals);
    eq.other = "o";
    v = {{"w", "x"}, {"o", "x"}};
    CHECK(!rule_violated(eq, v));
    v = {{"w", "x"}, {"o", "y"}};
    CHECK(rule_violated(eq, v));

    ConstraintRule neq = rule_of(RuleKind::non_equal);
    neq.other = "o";
    CHECK(!rule_violated(neq, v));
    v = {{"w", "x"}, {"o", "x"}};
    CHECK(rule_violated(neq, v));
}

TEST_CASE("eval_condition covers the predicate language") {
    std::map<std::string, std::string> v = {{"w", "-18"}, {"t", "abc%sdef"}};
    CHECK(eval_condition(json::parse(R"(["<", ["num","w"], 0])"), v));
    CHECK(!eval_condition(json::parse(R"([">", ["num","w"], 0])"), v));
    CHECK(eval_condition(json::parse(R"(["==", ["len","t"], 8])"), v));
    CHECK(eval_condition(json::parse(R"(["contains", "t", "%s"])"), v));
    CHECK(eval_condition(json::parse(R"(["contains_class", "t", "format_specifier"])"), v));
    CHECK(!eval_condition(json::parse(R"(["contains_class", "w", "emoji"])"), v));
    CHECK(eval_condition(json::parse(R"(["len_exceeds", "t", 5])"), v));
    CHECK(!eval_condition(json::parse(R"(["len_exceeds", "t", 8])"), v));
    CHECK(eval_condition(json::parse(R"(["unguarded_parse", "t", "int"])"), v));
    CHECK(!eval_condition(json::parse(R"(["unguarded_parse", "w", "decimal"])"), v));
    CHECK(eval_condition(
        json::parse(R"(["and", ["<", ["num","w"], 0], ["contains","t","%s"]])"), v));
    CHECK(eval_condition(
        json::parse(R"(["or", [">", ["num","w"], 0], ["contains","t","%s"]])"), v));
    CHECK(eval_condition(json::parse(R"(["not", [">", ["num","w"], 0]])"), v));
    // comparisons against an unparseable number are false, not errors
    CHECK(!eval_condition(json::parse(R"(["<", ["num","t"], 0])"), v));
    CHECK_THROWS_AS(eval_condition(json::parse(R"(["mystery", "w"])"), v), AppSpecError);
}

TEST_CASE("observe renders widgets, labels, and explicit hints") {
    Simulator sim(AppSpec::from_json_text(kTwoPageSpec));
    GuiPage page = sim.observe();
    CHECK(page.app_name == "demo");
    CHECK(page.activity_name == "FirstActivity");

    auto widgets = identify_input_widgets(page);
    REQUIRE(widgets.size() == 1);
    CHECK(widgets[0].widget_id == "FirstActivity/w_amount");
    CHECK(widgets[0].descriptor == "Amount");

    // the explicit rule's hint is a visible label; the implicit one is not
    std::string serialized = serialize_hierarchy(page);
    CHECK(serialized.find("amount must be at least 1") != std::string::npos);
    CHECK(serialized.find("enter a valid amount") == std::string::npos);
}

TEST_CASE("submission outcomes: transition, rejection with hint, crash") {
    Simulator sim(AppSpec::from_json_text(kTwoPageSpec));

    SUBCASE("valid input transitions to the next page") {
        auto outcome = sim.submit({{"w_amount", "12.50"}});
        CHECK(outcome.kind == SubmissionOutcome::Kind::page_transition);
        CHECK(outcome.next_activity == "DoneActivity");
        CHECK(sim.observe().activity_name == "DoneActivity");
    }
    SUBCASE("terminal pages report a sentinel transition") {
        sim.submit({{"w_amount", "12.50"}});
        auto outcome = sim.submit({{"w_note", "anything"}});
        CHECK(outcome.kind == SubmissionOutcome::Kind::page_transition);
        CHECK(outcome.next_activity == "<terminal>");
    }
    SUBCASE("rejection surfaces the hint as a new page node") {
        GuiPage before = sim.observe();
        auto outcome = sim.submit({{"w_amount", "abc"}});
        CHECK(outcome.kind == SubmissionOutcome::Kind::rejected);
        CHECK(outcome.violated_hint == "enter a valid amount");
        auto hint = diff_pages(before, outcome.after_page, "abc");
        REQUIRE(hint.has_value());
        CHECK(hint->hint == "enter a valid amount");
    }
    SUBCASE("consecutive rejections stay observable through the page diff") {
        for (int i = 0; i < 5; ++i) {
            GuiPage before = sim.observe();
            auto outcome = sim.submit({{"w_amount", "abc"}});
            REQUIRE(outcome.kind == SubmissionOutcome::Kind::rejected);
            auto hint = diff_pages(before, outcome.after_page, "abc");
            REQUIRE(hint.has_value());
            CHECK(hint->hint == "enter a valid amount");
        }
    }
    SUBCASE("rules fire in declaration order") {
        auto outcome = sim.submit({{"w_amount", "0.5"}});
        CHECK(outcome.violated_hint == "amount must be at least 1");
    }
    SUBCASE("crash wins and the simulator enters the crash state") {
        auto outcome = sim.submit({{"w_amount", "1,000"}});
        CHECK(outcome.kind == SubmissionOutcome::Kind::crash);
        CHECK(outcome.crash_id == "comma_parse");
        CHECK(sim.crashed());
        CHECK(sim.observe().activity_name == "CrashState");
        CHECK_THROWS_AS(sim.submit({{"w_amount", "1"}}), std::logic_error);
        sim.reset();
        CHECK(!sim.crashed());
        CHECK(sim.observe().activity_name == "FirstActivity");
        REQUIRE(sim.crash_log().size() == 1);  // preserved across reset
        CHECK(sim.crash_log()[0] == "comma_parse");
    }
    SUBCASE("unknown widget keys are rejected, missing ones default to empty") {
        CHECK_THROWS_AS(sim.submit({{"ghost", "1"}}), UnknownWidget);
        auto outcome = sim.submit({});  // w_amount defaults to ""
        CHECK(outcome.kind == SubmissionOutcome::Kind::rejected);
    }
}

TEST_CASE("crash predicates always take precedence over rules") {
    // the same input violates a rule and matches a crash predicate
    Simulator sim(AppSpec::from_json_text(kTwoPageSpec));
    std::mt19937 rng(7);
    for (int i = 0; i < 200; ++i) {
        std::string value = std::to_string(static_cast<int>(rng() % 100)) + ",abc";
        auto outcome = sim.submit({{"w_amount", value}});
        CHECK(outcome.kind == SubmissionOutcome::Kind::crash);
        sim.reset();
    }
}
