#include "widgetfuzz/prompt_engine.hpp"

#include <fstream>
#include <sstream>

namespace widgetfuzz {

namespace {

const char* const kDefaultTemplateText = R"(## Prompt templates. '@name' starts a template; the body runs to the next '@'.
## Placeholders use {name} syntax.

@p1_header
We want to test the text input widgets on {page_name} page of {app_name} app which has {widget_count} text inputs.
@p1_widget
The {ordinal} input widget is '{descriptor}', its context is '{nearby}'.
@p1_widget_hint
The {ordinal} input widget is '{descriptor}', its context is '{nearby}', and its dynamic hint is '{hint}' (shown after inputting '{provoking}').
@p2_catalog
There are {explicit_count} explicit intra-constraints: {explicit_list}; {implicit_count} implicit intra-constraints: {implicit_list}; {inter_count} inter-constraints: {inter_list}.
@p3_question
Please generate a valid input based on the above information and provide the inferred constraints of each input. Answer with 'Constraints: ...' followed by one line 'The input is "..."' per widget, in widget order.
@example_block
Example {index}:
Widget context: {context}
Mutation rule: {rule}
Buggy input: {buggy}
@gen_constraints
The inferred constraints are: {constraints}
@gen_valid_input
The valid input is: {assignments}
@gen_feedback_crash_header
The following inputs already triggered a crash, do not repeat them:
@gen_feedback_miss_header
The following unusual inputs did not trigger a crash, consider other mutation rules:
@gen_feedback_entry
- input {assignment} (mutation rule: {rule})
@gen_question
Please generate a mutation rule for the valid input above, then produce a test generator following that rule whose execution yields {batch_size} unusual text inputs. Reply with 'Mutation rule:' then 'Test generator:' then the generator program then 'End generator.'.
@gen_question_next_suffix
 Produce a different mutation rule than those above.
)";

std::string ordinal_word(size_t index) {
    static const char* const words[] = {"first", "second", "third",   "fourth", "fifth",
                                        "sixth", "seventh", "eighth", "ninth",  "tenth"};
    if (index < 10) return words[index];
    return std::to_string(index + 1) + "th";
}

std::string join_catalog(const std::vector<ConstraintCatalogEntry>& entries) {
    std::string out;
    for (size_t i = 0; i < entries.size(); ++i) {
        if (i > 0) out += " ";
        out += "(" + std::to_string(i + 1) + ") " + entries[i].description;
    }
    return out;
}

std::string describe_assignment(const std::map<std::string, std::string>& assignment) {
    std::string out;
    for (const auto& [id, value] : assignment) {
        if (!out.empty()) out += ", ";
        out += id + " = \"" + value + "\"";
    }
    return out;
}

}  // namespace

const PromptTemplates& PromptTemplates::defaults() {
    static PromptTemplates templates = [] {
        PromptTemplates t;
        std::istringstream stream(kDefaultTemplateText);
        std::string line, name, body;
        auto flush = [&] {
            if (name.empty()) return;
            if (!body.empty() && body.back() == '\n') body.pop_back();
            t.templates_[name] = body;
        };
        while (std::getline(stream, line)) {
            if (line.rfind("##", 0) == 0) continue;
            if (!line.empty() && line[0] == '@') {
                flush();
                name = line.substr(1);
                body.clear();
            } else if (!name.empty()) {
                body += line;
                body += '\n';
            }
        }
        flush();
        return t;
    }();
    return templates;
}

PromptTemplates PromptTemplates::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open template file: " + path);
    std::ostringstream text;
    text << in.rdbuf();

    PromptTemplates t = defaults();  // file entries override defaults
    std::istringstream stream(text.str());
    std::string line, name, body;
    auto flush = [&] {
        if (name.empty()) return;
        if (!body.empty() && body.back() == '\n') body.pop_back();
        t.templates_[name] = body;
    };
    while (std::getline(stream, line)) {
        if (line.rfind("##", 0) == 0) continue;
        if (!line.empty() && line[0] == '@') {
            flush();
            name = line.substr(1);
            body.clear();
        } else if (!name.empty()) {
            body += line;
            body += '\n';
        }
    }
    flush();
    return t;
}

const std::string& PromptTemplates::raw(const std::string& name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw std::out_of_range("unknown template: " + name);
    return it->second;
}

std::string PromptTemplates::render(const std::string& name,
                                    const std::map<std::string, std::string>& vars) const {
    const std::string& tmpl = raw(name);
    std::string out;
    for (size_t i = 0; i < tmpl.size(); ++i) {
        if (tmpl[i] == '{') {
            size_t close = tmpl.find('}', i);
            if (close != std::string::npos) {
                std::string key = tmpl.substr(i + 1, close - i - 1);
                auto it = vars.find(key);
                if (it != vars.end()) {
                    out += it->second;
                    i = close;
                    continue;
                }
            }
        }
        out += tmpl[i];
    }
    return out;
}

std::string PromptTemplates::dump() const {
    std::ostringstream out;
    for (const auto& [name, body] : templates_) {
        out << "@" << name << "\n" << body << "\n";
    }
    return out.str();
}

ValidInputPrompt PromptEngine::build_valid_input_prompt(
    const std::vector<WidgetContext>& contexts,
    const std::vector<ConstraintCatalogEntry>& catalog) const {
    if (contexts.empty()) throw EmptyContexts("no widget contexts for valid-input prompt");

    ValidInputPrompt prompt;
    prompt.context_section = templates_.render(
        "p1_header", {{"page_name", contexts.front().page_name},
                      {"app_name", contexts.front().app_name},
                      {"widget_count", std::to_string(contexts.size())}});
    for (size_t i = 0; i < contexts.size(); ++i) {
        const auto& ctx = contexts[i];
        std::map<std::string, std::string> vars = {{"ordinal", ordinal_word(i)},
                                                   {"descriptor", ctx.input_widget},
                                                   {"nearby", ctx.nearby_widgets}};
        if (ctx.dynamic_hint.empty()) {
            prompt.context_section += " " + templates_.render("p1_widget", vars);
        } else {
            vars["hint"] = ctx.dynamic_hint;
            vars["provoking"] = ctx.hint_provoking_input;
            prompt.context_section += " " + templates_.render("p1_widget_hint", vars);
        }
    }

    auto explicit_entries = std::vector<ConstraintCatalogEntry>{};
    auto implicit_entries = std::vector<ConstraintCatalogEntry>{};
    auto inter_entries = std::vector<ConstraintCatalogEntry>{};
    for (const auto& entry : catalog) {
        switch (entry.category) {
            case ConstraintCategory::intra_explicit: explicit_entries.push_back(entry); break;
            case ConstraintCategory::intra_implicit: implicit_entries.push_back(entry); break;
            case ConstraintCategory::inter: inter_entries.push_back(entry); break;
        }
    }
    prompt.candidate_constraints_section = templates_.render(
        "p2_catalog", {{"explicit_count", std::to_string(explicit_entries.size())},
                       {"explicit_list", join_catalog(explicit_entries)},
                       {"implicit_count", std::to_string(implicit_entries.size())},
                       {"implicit_list", join_catalog(implicit_entries)},
                       {"inter_count", std::to_string(inter_entries.size())},
                       {"inter_list", join_catalog(inter_entries)}});

    prompt.question_section = templates_.render("p3_question", {});

    prompt.rendered = prompt.context_section + "\n" + prompt.candidate_constraints_section + "\n" +
                      prompt.question_section;
    return prompt;
}

GeneratorPrompt PromptEngine::render_generator_prompt(
    const std::string& inferred_constraints,
    const std::vector<std::pair<std::string, std::string>>& valid_input,
    const FeedbackBundle& feedback, const std::vector<ExampleRecord>& examples,
    QuestionVariant variant) const {
    GeneratorPrompt prompt;

    for (size_t i = 0; i < examples.size(); ++i) {
        const auto& record = examples[i];
        if (i > 0) prompt.examples_section += "\n";
        prompt.examples_section += templates_.render(
            "example_block",
            {{"index", std::to_string(i + 1)},
             {"context", context_query_text(record.context)},
             {"rule", record.mutation_rule ? *record.mutation_rule : std::string("unknown")},
             {"buggy", record.buggy_input}});
    }

    prompt.inferred_constraints_section =
        templates_.render("gen_constraints", {{"constraints", inferred_constraints}});

    std::string assignments;
    for (const auto& [id, value] : valid_input) {
        if (!assignments.empty()) assignments += ", ";
        assignments += id + " = \"" + value + "\"";
    }
    prompt.valid_input_section =
        templates_.render("gen_valid_input", {{"assignments", assignments}});

    if (!feedback.empty()) {
        std::string section;
        if (!feedback.crash_inputs.empty()) {
            section += templates_.render("gen_feedback_crash_header", {});
            for (const auto& [input, rule] : feedback.crash_inputs) {
                section += "\n" + templates_.render(
                                      "gen_feedback_entry",
                                      {{"assignment", describe_assignment(input.assignment)},
                                       {"rule", rule}});
            }
        }
        if (!feedback.non_trigger_inputs.empty()) {
            if (!section.empty()) section += "\n";
            section += templates_.render("gen_feedback_miss_header", {});
            for (const auto& [input, rule] : feedback.non_trigger_inputs) {
                section += "\n" + templates_.render(
                                      "gen_feedback_entry",
                                      {{"assignment", describe_assignment(input.assignment)},
                                       {"rule", rule}});
            }
        }
        prompt.feedback_section = section;
    }

    prompt.question_section =
        templates_.render("gen_question", {{"batch_size", std::to_string(batch_size_)}});
    if (variant == QuestionVariant::next_round) {
        prompt.question_section += templates_.render("gen_question_next_suffix", {});
    }

    auto append = [&](const std::string& section) {
        if (section.empty()) return;
        if (!prompt.rendered.empty()) prompt.rendered += "\n";
        prompt.rendered += section;
    };
    append(prompt.examples_section);
    append(prompt.inferred_constraints_section);
    append(prompt.valid_input_section);
    append(prompt.feedback_section);
    append(prompt.question_section);
    return prompt;
}

GeneratorPrompt PromptEngine::build_generator_prompt(
    const std::string& inferred_constraints,
    const std::vector<std::pair<std::string, std::string>>& valid_input,
    const FeedbackBundle& feedback, const std::vector<ExampleRecord>& examples,
    QuestionVariant variant) const {
    if (inferred_constraints.empty() || valid_input.empty()) {
        throw MissingValidInput("generator prompt requires inferred constraints and valid input");
    }

    std::vector<ExampleRecord> kept_examples = examples;
    FeedbackBundle kept_feedback = feedback;
    GeneratorPrompt prompt = render_generator_prompt(inferred_constraints, valid_input,
                                                     kept_feedback, kept_examples, variant);
    // over budget: drop examples last-first, then feedback oldest-first
    while (prompt.rendered.size() > char_budget_) {
        if (!kept_examples.empty()) {
            kept_examples.pop_back();
        } else if (!kept_feedback.non_trigger_inputs.empty()) {
            kept_feedback.non_trigger_inputs.erase(kept_feedback.non_trigger_inputs.begin());
        } else if (!kept_feedback.crash_inputs.empty()) {
            kept_feedback.crash_inputs.erase(kept_feedback.crash_inputs.begin());
        } else {
            break;
        }
        prompt = render_generator_prompt(inferred_constraints, valid_input, kept_feedback,
                                         kept_examples, variant);
    }
    return prompt;
}

}  // namespace widgetfuzz
