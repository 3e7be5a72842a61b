#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "widgetfuzz/widget_model.hpp"

namespace widgetfuzz {

struct AppSpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownWidget : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RuleKind {
    must_parse_int, must_parse_decimal, pure_text, pure_digits,
    min_value, max_value, min_len, max_len, requires_class, forbids_chars,
    unique_in, less_than, sum_equals, date_before, equals, non_equal
};

enum class RuleVisibility { explicit_rule, implicit_rule };

struct ConstraintRule {
    RuleKind kind;
    std::string widget;
    std::string other;                  // less_than/date_before/equals/non_equal
    std::vector<std::string> widgets;   // sum_equals parts
    std::string total_widget;
    double value = 0.0;                 // min_value/max_value
    long n = 0;                         // min_len/max_len
    std::string char_class;             // upper|digit|special
    std::string chars;                  // forbids_chars
    std::vector<std::string> unique_set;
    std::string hint_text;
    RuleVisibility visibility = RuleVisibility::implicit_rule;
};

// Boolean prefix expression over submitted strings, e.g.
//   ["<", ["num", "w_size"], 0]
// with "and"/"or"/"not", comparisons over ["num", w] / ["len", w] / literals,
// and predicates contains, contains_class, len_exceeds, unguarded_parse.
struct CrashPredicate {
    std::string crash_id;
    std::string message;
    nlohmann::json condition;
};

struct WidgetSpec {
    std::string id;
    std::string descriptor;
    std::vector<std::string> neighbors;
};

struct PageSpec {
    std::string activity_name;
    std::vector<WidgetSpec> widgets;
    std::vector<ConstraintRule> rules;
    std::vector<CrashPredicate> crashes;
    std::optional<std::string> success_transition;  // nullopt = terminal
};

struct AppSpec {
    std::string app_name;
    std::vector<PageSpec> pages;

    static AppSpec from_json_text(const std::string& text);
    static AppSpec from_file(const std::string& path);
};

struct SubmissionOutcome {
    enum class Kind { page_transition, rejected, crash };
    Kind kind;
    std::string next_activity;  // page_transition
    GuiPage after_page;         // rejected: snapshot containing the hint node
    std::string violated_hint;  // rejected
    std::string crash_id;       // crash
    std::string message;        // crash
};

bool rule_violated(const ConstraintRule& rule, const std::map<std::string, std::string>& values);
bool eval_condition(const nlohmann::json& expr, const std::map<std::string, std::string>& values);

// Deterministic single-page-at-a-time app under test. Crash predicates win
// over constraint rules; the first violated rule surfaces its hint as a new
// page node.
class Simulator {
public:
    explicit Simulator(AppSpec spec);

    GuiPage observe() const;
    SubmissionOutcome submit(const std::map<std::string, std::string>& assignment);
    void reset();

    bool crashed() const { return crashed_; }
    const std::vector<std::string>& crash_log() const { return crash_log_; }
    const AppSpec& spec() const { return spec_; }
    const PageSpec& current_page() const { return spec_.pages[page_index_]; }

private:
    AppSpec spec_;
    size_t page_index_ = 0;
    bool crashed_ = false;
    std::string pending_hint_;  // hint text shown by the last rejection
    size_t rejection_count_ = 0;
    std::vector<std::string> crash_log_;
};

}  // namespace widgetfuzz
