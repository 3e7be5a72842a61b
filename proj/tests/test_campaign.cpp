#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <memory>

#include "widgetfuzz/campaign.hpp"

using namespace widgetfuzz;

namespace {

const char* kFontSpec = R"({
  "app_name": "fontpad",
  "pages": [{
    "activity_name": "MainActivity",
    "widgets": [{"id": "w_size", "descriptor": "Font Size", "neighbors": ["Font Size"]}],
    "rules": [{"kind": "must_parse_int", "widget": "w_size",
               "hint": "please enter a number"}],
    "crashes": [{"crash_id": "neg_font_size", "message": "textSize must be >= 0",
                 "condition": ["<", ["num", "w_size"], 0]}]
  }]
})";

const char* kValidResponse =
    "Constraints: the font size must be a whole number\nThe input is \"18\"";

std::string generator_script(const std::string& program) {
    return "Mutation rule: negate the value\nTest generator:\n" + program +
           "\nEnd generator.\n";
}

CampaignConfig simulated_config() {
    CampaignConfig config;
    config.clock = ClockMode::simulated;
    return config;
}

std::shared_ptr<Provider> script(const std::string& valid, const std::string& generator) {
    nlohmann::json doc;
    doc["fontpad/valid"] = {valid};
    doc["fontpad/generator"] = {generator};
    return MockProvider::from_script_text(doc.dump());
}

}  // namespace

TEST_CASE("config file loading applies defaults and rejects bad values") {
    CampaignConfig defaults;
    CHECK(defaults.attempt_budget == 30);
    CHECK(defaults.time_budget_seconds == 1800.0);
    CHECK(defaults.k_examples == 5);
    CHECK(defaults.batch_size == 10);

    const char* path = "/tmp/widgetfuzz_test_config.json";
    {
        std::ofstream out(path);
        out << R"({"attempt_budget": 7, "clock": "simulated"})";
    }
    CampaignConfig loaded = CampaignConfig::from_file(path);
    CHECK(loaded.attempt_budget == 7);
    CHECK(loaded.clock == ClockMode::simulated);
    CHECK(loaded.k_examples == 5);  // untouched fields keep defaults

    {
        std::ofstream out(path);
        out << R"({"attempt_budget": -1})";
    }
    CHECK_THROWS_AS(CampaignConfig::from_file(path), std::runtime_error);
    CHECK_THROWS_AS(CampaignConfig::from_file("/nonexistent.json"), std::runtime_error);
    std::remove(path);
}

TEST_CASE("the simulated clock only advances when charged") {
    CampaignClock clock(ClockMode::simulated);
    CHECK(clock.elapsed_seconds() == 0.0);
    clock.charge(5.0);
    clock.charge(1.0);
    CHECK(clock.elapsed_seconds() == 6.0);

    CampaignClock wall(ClockMode::wall);
    wall.charge(100.0);  // no-op for the wall clock
    CHECK(wall.elapsed_seconds() < 1.0);
}

TEST_CASE("report aggregates charge undetected targets with the full budget") {
    CampaignReport report;
    report.attempt_budget = 30;
    report.time_budget_seconds = 1800.0;
    TargetReport hit;
    hit.detected = true;
    hit.attempts_used = 4;
    hit.elapsed_seconds = 60.0;
    TargetReport miss;
    miss.detected = false;
    miss.attempts_used = 12;
    miss.elapsed_seconds = 200.0;
    report.targets = {hit, miss};

    CHECK(report.bug_rate() == 0.5);
    CHECK(report.mean_attempts() == doctest::Approx((4 + 30) / 2.0));
    CHECK(report.mean_minutes() == doctest::Approx((1.0 + 30.0) / 2.0));

    std::string table = report.to_table();
    CHECK(table.find("Bug(%): 50.00") != std::string::npos);
    CHECK(table.find("Attempt(#): 17.00") != std::string::npos);
    CHECK(table.find("Min(#): 15.50") != std::string::npos);
}

TEST_CASE("a campaign detects the crash and records the example") {
    AppSpec spec = AppSpec::from_json_text(kFontSpec);
    ExampleStore store;
    CampaignRunner runner(simulated_config(),
                          script(kValidResponse,
                                 generator_script("rule: negate\ntarget: MainActivity/w_size\n"
                                                  "base: MainActivity/w_size = \"18\"\n"
                                                  "op: number_negate()\nbatch: 5")),
                          store);
    TargetReport report = runner.run_target(spec);
    CHECK(report.detected);
    CHECK(report.crash_id == "neg_font_size");
    CHECK(report.attempts_used == 1);
    REQUIRE(report.rounds.size() == 1);
    CHECK(report.rounds[0].outcomes == std::vector<std::string>{"crash:neg_font_size"});
    // 1 valid call + 1 generator call at 5s, 1 probe + 1 submission at 1s
    CHECK(report.elapsed_seconds == doctest::Approx(12.0));

    REQUIRE(store.size() == 1);
    CHECK(store.records()[0].mutation_rule == std::string("negate the value"));
    CHECK(store.records()[0].buggy_input == "-18");
    CHECK(store.records()[0].source == RecordSource::runtime);
}

TEST_CASE("duplicate inputs within a run are skipped without spending attempts") {
    AppSpec spec = AppSpec::from_json_text(kFontSpec);
    ExampleStore store;
    CampaignConfig config = simulated_config();
    config.llm_call_cap = 6;
    // the generator re-emits the valid input plus one fresh non-crashing value
    CampaignRunner runner(
        config,
        script(kValidResponse,
               generator_script("rule: noop\ntarget: MainActivity/w_size\n"
                                "base: MainActivity/w_size = \"18\"\n"
                                "op: set(value=$V)\naxis: $V in [18, 21]\nbatch: 5")),
        store);
    TargetReport report = runner.run_target(spec);
    CHECK(!report.detected);
    REQUIRE(!report.rounds.empty());
    CHECK(report.rounds[0].outcomes ==
          std::vector<std::string>{"duplicate_skipped", "accepted"});
    // later rounds re-emit both values; neither costs an attempt
    CHECK(report.attempts_used == 1);
    CHECK(report.failure_reason.find("call cap") != std::string::npos);
}

TEST_CASE("unusable generator output ends the target with a reason") {
    AppSpec spec = AppSpec::from_json_text(kFontSpec);
    ExampleStore store;
    CampaignRunner runner(simulated_config(), script(kValidResponse, "no markers at all"),
                          store);
    TargetReport report = runner.run_target(spec);
    CHECK(!report.detected);
    CHECK(report.failure_reason.find("generator unusable") != std::string::npos);
    CHECK(report.attempts_used == 0);
}

TEST_CASE("a crash during the valid-input probe counts as a detection") {
    AppSpec spec = AppSpec::from_json_text(kFontSpec);
    ExampleStore store;
    CampaignRunner runner(
        simulated_config(),
        script("Constraints: a number\nThe input is \"-5\"", "unused"), store);
    TargetReport report = runner.run_target(spec);
    CHECK(report.detected);
    CHECK(report.crash_id == "neg_font_size");
    CHECK(report.attempts_used == 0);  // the probe is not an unusual-input attempt
}

TEST_CASE("rejected valid-input probes feed the dynamic hint back into the prompt") {
    AppSpec spec = AppSpec::from_json_text(kFontSpec);
    ExampleStore store;
    nlohmann::json doc;
    doc["fontpad/valid"] = {
        "Constraints: free text\nThe input is \"large\"",  // rejected, hint shown
        "Constraints: a number\nThe input is \"18\""};
    doc["fontpad/generator"] = {generator_script(
        "rule: negate\ntarget: MainActivity/w_size\n"
        "base: MainActivity/w_size = \"18\"\nop: number_negate()")};
    CampaignRunner runner(simulated_config(), MockProvider::from_script_text(doc.dump()),
                          store);
    TargetReport report = runner.run_target(spec);
    CHECK(report.detected);  // recovery after the rejection still finds the crash
}

TEST_CASE("a zero attempt budget short-circuits the target") {
    AppSpec spec = AppSpec::from_json_text(kFontSpec);
    ExampleStore store;
    CampaignConfig config = simulated_config();
    config.attempt_budget = 0;
    CampaignRunner runner(config, script(kValidResponse, "unused"), store);
    TargetReport report = runner.run_target(spec);
    CHECK(!report.detected);
    CHECK(report.attempts_used == 0);
    CHECK(!report.failure_reason.empty());
}

TEST_CASE("run_suite aggregates targets and reports are deterministic") {
    AppSpec spec = AppSpec::from_json_text(kFontSpec);
    auto run_once = [&] {
        ExampleStore store;
        CampaignRunner runner(
            simulated_config(),
            script(kValidResponse,
                   generator_script("rule: negate\ntarget: MainActivity/w_size\n"
                                    "base: MainActivity/w_size = \"18\"\n"
                                    "op: number_negate()")),
            store);
        return runner.run_suite({spec, spec});
    };
    CampaignReport a = run_once();
    CampaignReport b = run_once();
    CHECK(a.targets.size() == 2);
    CHECK(a.bug_rate() == 1.0);
    CHECK(a.to_json() == b.to_json());
    CHECK(a.to_table() == b.to_table());
}
