#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "widgetfuzz/app_simulator.hpp"
#include "widgetfuzz/example_store.hpp"
#include "widgetfuzz/llm_gateway.hpp"
#include "widgetfuzz/mutation_dsl.hpp"
#include "widgetfuzz/prompt_engine.hpp"

namespace widgetfuzz {

struct ValidInputUnobtainable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ClockMode { wall, simulated };

struct CampaignConfig {
    int attempt_budget = 30;
    double time_budget_seconds = 1800.0;
    int k_examples = 5;
    int batch_size = 10;
    int valid_input_retry_cap = 5;
    int feedback_window = 10;
    int llm_call_cap = 60;  // per target
    ClockMode clock = ClockMode::wall;
    double sim_submission_seconds = 1.0;
    double sim_llm_call_seconds = 5.0;
    size_t prompt_char_budget = kDefaultPromptCharBudget;
    int parse_retry_cap = 3;

    static CampaignConfig from_file(const std::string& path);
};

// Wall or synthetic clock; the synthetic one makes timed runs reproducible.
class CampaignClock {
public:
    explicit CampaignClock(ClockMode mode);
    void charge(double seconds);  // no-op under wall clock
    double elapsed_seconds() const;

private:
    ClockMode mode_;
    double simulated_ = 0.0;
    long long wall_start_ns_ = 0;
};

struct RoundLog {
    std::string mutation_rule;
    std::vector<dsl::UnusualInput> batch;
    std::vector<std::string> outcomes;  // one entry per batch element
};

struct TargetReport {
    std::string app_name;
    std::string activity_name;
    bool detected = false;
    std::string crash_id;
    int attempts_used = 0;
    double elapsed_seconds = 0.0;
    std::vector<RoundLog> rounds;
    std::string failure_reason;  // set when the target stopped abnormally
    std::vector<std::map<std::string, std::string>> submission_log;  // unusual inputs only
};

struct CampaignReport {
    std::vector<TargetReport> targets;
    int attempt_budget = 30;
    double time_budget_seconds = 1800.0;

    double bug_rate() const;
    // undetected targets contribute their full budget to both means
    double mean_attempts() const;
    double mean_minutes() const;

    std::string to_json() const;
    std::string to_table() const;
};

struct ValidInputResult {
    std::vector<std::pair<std::string, std::string>> valid_input;  // widget_id -> value
    std::string inferred_constraints;
    std::optional<std::string> crash_id;  // the valid-input probe itself crashed
};

class CampaignRunner {
public:
    CampaignRunner(CampaignConfig config, std::shared_ptr<Provider> provider,
                   ExampleStore& store,
                   const PromptTemplates& templates = PromptTemplates::defaults());

    ValidInputResult acquire_valid_input(Simulator& sim, CappedProvider& provider);
    TargetReport run_target(const AppSpec& spec);
    CampaignReport run_suite(const std::vector<AppSpec>& specs);

private:
    CampaignConfig config_;
    std::shared_ptr<Provider> provider_;
    ExampleStore& store_;
    PromptEngine engine_;
    CampaignClock* clock_ = nullptr;  // active target's clock

    std::string seed_tag(const AppSpec& spec, const std::string& purpose) const;
    std::string llm_call(CappedProvider& provider, const std::string& prompt,
                         const std::string& tag);
};

}  // namespace widgetfuzz
