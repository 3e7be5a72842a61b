#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "widgetfuzz/example_store.hpp"
#include "widgetfuzz/mutation_dsl.hpp"
#include "widgetfuzz/widget_model.hpp"

namespace widgetfuzz {

struct EmptyContexts : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingValidInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Execution feedback carried into the next generator round: inputs that
// crashed the app and the most recent ones that did not.
struct FeedbackBundle {
    std::vector<std::pair<dsl::UnusualInput, std::string>> crash_inputs;
    std::vector<std::pair<dsl::UnusualInput, std::string>> non_trigger_inputs;

    bool empty() const { return crash_inputs.empty() && non_trigger_inputs.empty(); }
};

// Named template texts with {placeholder} substitution, loadable from a
// plain-text file so the exact prompt wording is auditable.
class PromptTemplates {
public:
    static const PromptTemplates& defaults();
    static PromptTemplates load(const std::string& path);

    std::string render(const std::string& name,
                       const std::map<std::string, std::string>& vars) const;
    const std::string& raw(const std::string& name) const;
    std::string dump() const;

private:
    std::map<std::string, std::string> templates_;
};

struct ValidInputPrompt {
    std::string rendered;
    std::string context_section;
    std::string candidate_constraints_section;
    std::string question_section;
};

struct GeneratorPrompt {
    std::string rendered;
    std::string examples_section;       // may be empty
    std::string inferred_constraints_section;
    std::string valid_input_section;
    std::string feedback_section;       // may be empty
    std::string question_section;
};

enum class QuestionVariant { first_round, next_round };

constexpr size_t kDefaultPromptCharBudget = 12000;

class PromptEngine {
public:
    explicit PromptEngine(const PromptTemplates& templates = PromptTemplates::defaults(),
                          size_t char_budget = kDefaultPromptCharBudget,
                          int batch_size = dsl::kDefaultBatchSize)
        : templates_(templates), char_budget_(char_budget), batch_size_(batch_size) {}

    ValidInputPrompt build_valid_input_prompt(
        const std::vector<WidgetContext>& contexts,
        const std::vector<ConstraintCatalogEntry>& catalog) const;

    // valid_input is ordered widget_id -> value. Sections render in the order
    // examples, inferred constraints, valid input, feedback, question. When
    // the rendered prompt exceeds the char budget, examples are dropped
    // last-first, then feedback entries oldest-first.
    GeneratorPrompt build_generator_prompt(
        const std::string& inferred_constraints,
        const std::vector<std::pair<std::string, std::string>>& valid_input,
        const FeedbackBundle& feedback, const std::vector<ExampleRecord>& examples,
        QuestionVariant variant) const;

private:
    const PromptTemplates& templates_;
    size_t char_budget_;
    int batch_size_;

    GeneratorPrompt render_generator_prompt(
        const std::string& inferred_constraints,
        const std::vector<std::pair<std::string, std::string>>& valid_input,
        const FeedbackBundle& feedback, const std::vector<ExampleRecord>& examples,
        QuestionVariant variant) const;
};

}  // namespace widgetfuzz
