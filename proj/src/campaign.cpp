#include "widgetfuzz/campaign.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "widgetfuzz/hierarchy_io.hpp"

namespace widgetfuzz {

namespace {

using nlohmann::json;

double round4(double value) { return std::round(value * 10000.0) / 10000.0; }

std::string buggy_input_text(const dsl::UnusualInput& input) {
    if (input.assignment.size() == 1) return input.assignment.begin()->second;
    std::string out;
    for (const auto& [id, value] : input.assignment) {
        if (!out.empty()) out += "; ";
        out += id + "=" + value;
    }
    return out;
}

struct TargetView {
    std::vector<InputWidget> widgets;
    std::vector<WidgetContext> contexts;
    std::map<std::string, std::string> widget_to_sim;  // widget_id -> resource_id
};

TargetView inspect_target(Simulator& sim) {
    GuiPage page = sim.observe();
    TargetView view;
    view.widgets = identify_input_widgets(page);
    for (const auto& widget : view.widgets) {
        view.contexts.push_back(extract_widget_context(page, widget));
        view.widget_to_sim[widget.widget_id] = resolve_path(page, widget.node_path).resource_id;
    }
    return view;
}

// assignment keyed by widget_id -> assignment keyed by the simulator's ids
std::map<std::string, std::string> translate_assignment(
    const std::map<std::string, std::string>& assignment,
    const std::map<std::string, std::string>& widget_to_sim) {
    std::map<std::string, std::string> out;
    for (const auto& [id, value] : assignment) {
        auto it = widget_to_sim.find(id);
        out[it != widget_to_sim.end() ? it->second : id] = value;
    }
    return out;
}

}  // namespace

CampaignConfig CampaignConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("invalid config JSON: ") + e.what());
    }
    CampaignConfig config;
    config.attempt_budget = doc.value("attempt_budget", config.attempt_budget);
    config.time_budget_seconds = doc.value("time_budget_seconds", config.time_budget_seconds);
    config.k_examples = doc.value("k_examples", config.k_examples);
    config.batch_size = doc.value("batch_size", config.batch_size);
    config.valid_input_retry_cap = doc.value("valid_input_retry_cap", config.valid_input_retry_cap);
    config.feedback_window = doc.value("feedback_window", config.feedback_window);
    config.llm_call_cap = doc.value("llm_call_cap", config.llm_call_cap);
    config.clock = doc.value("clock", "wall") == std::string("simulated") ? ClockMode::simulated
                                                                          : ClockMode::wall;
    config.sim_submission_seconds =
        doc.value("sim_submission_seconds", config.sim_submission_seconds);
    config.sim_llm_call_seconds = doc.value("sim_llm_call_seconds", config.sim_llm_call_seconds);
    config.prompt_char_budget = doc.value("prompt_char_budget", config.prompt_char_budget);
    if (config.attempt_budget < 0 || config.time_budget_seconds <= 0 || config.k_examples < 0 ||
        config.batch_size < 1 || config.valid_input_retry_cap < 1 ||
        config.feedback_window < 1 || config.llm_call_cap < 1) {
        throw std::runtime_error("config values out of range");
    }
    return config;
}

CampaignClock::CampaignClock(ClockMode mode) : mode_(mode) {
    if (mode_ == ClockMode::wall) {
        wall_start_ns_ = std::chrono::steady_clock::now().time_since_epoch().count();
    }
}

void CampaignClock::charge(double seconds) {
    if (mode_ == ClockMode::simulated) simulated_ += seconds;
}

double CampaignClock::elapsed_seconds() const {
    if (mode_ == ClockMode::simulated) return simulated_;
    auto now_ns = std::chrono::steady_clock::now().time_since_epoch().count();
    return static_cast<double>(now_ns - wall_start_ns_) / 1e9;
}

double CampaignReport::bug_rate() const {
    if (targets.empty()) return 0.0;
    size_t detected = std::count_if(targets.begin(), targets.end(),
                                    [](const TargetReport& t) { return t.detected; });
    return static_cast<double>(detected) / static_cast<double>(targets.size());
}

double CampaignReport::mean_attempts() const {
    if (targets.empty()) return 0.0;
    double sum = 0;
    for (const auto& target : targets) {
        sum += target.detected ? target.attempts_used : attempt_budget;
    }
    return sum / static_cast<double>(targets.size());
}

double CampaignReport::mean_minutes() const {
    if (targets.empty()) return 0.0;
    double sum = 0;
    for (const auto& target : targets) {
        sum += (target.detected ? target.elapsed_seconds : time_budget_seconds) / 60.0;
    }
    return sum / static_cast<double>(targets.size());
}

std::string CampaignReport::to_json() const {
    json doc;
    doc["targets"] = json::array();
    for (const auto& target : targets) {
        json entry;
        entry["app_name"] = target.app_name;
        entry["activity_name"] = target.activity_name;
        entry["detected"] = target.detected;
        entry["crash_id"] = target.crash_id;
        entry["attempts_used"] = target.attempts_used;
        entry["elapsed_seconds"] = round4(target.elapsed_seconds);
        entry["failure_reason"] = target.failure_reason;
        entry["rounds"] = json::array();
        for (const auto& round : target.rounds) {
            json round_doc;
            round_doc["mutation_rule"] = round.mutation_rule;
            round_doc["outcomes"] = round.outcomes;
            round_doc["batch"] = json::array();
            for (const auto& input : round.batch) {
                round_doc["batch"].push_back(input.assignment);
            }
            entry["rounds"].push_back(std::move(round_doc));
        }
        doc["targets"].push_back(std::move(entry));
    }
    doc["aggregates"] = {{"bug_rate", round4(bug_rate())},
                         {"mean_attempts", round4(mean_attempts())},
                         {"mean_minutes", round4(mean_minutes())}};
    doc["settings"] = {{"attempt_budget", attempt_budget},
                       {"time_budget_seconds", time_budget_seconds}};
    return doc.dump(2);
}

std::string CampaignReport::to_table() const {
    std::ostringstream out;
    out << std::left << std::setw(30) << "Target" << std::setw(10) << "Bug" << std::setw(12)
        << "Attempt(#)" << "Min(#)\n";
    for (const auto& target : targets) {
        std::ostringstream minutes;
        minutes << std::fixed << std::setprecision(2) << target.elapsed_seconds / 60.0;
        out << std::left << std::setw(30) << (target.app_name + "/" + target.activity_name)
            << std::setw(10) << (target.detected ? "yes" : "no") << std::setw(12)
            << target.attempts_used << minutes.str() << "\n";
    }
    out << std::fixed << std::setprecision(2);
    out << "Bug(%): " << bug_rate() * 100.0 << "  Attempt(#): " << mean_attempts()
        << "  Min(#): " << mean_minutes() << "\n";
    return out.str();
}

CampaignRunner::CampaignRunner(CampaignConfig config, std::shared_ptr<Provider> provider,
                               ExampleStore& store, const PromptTemplates& templates)
    : config_(std::move(config)),
      provider_(std::move(provider)),
      store_(store),
      engine_(templates, config_.prompt_char_budget, config_.batch_size) {}

std::string CampaignRunner::seed_tag(const AppSpec& spec, const std::string& purpose) const {
    return spec.app_name + "/" + purpose;
}

std::string CampaignRunner::llm_call(CappedProvider& provider, const std::string& prompt,
                                     const std::string& tag) {
    CompletionRequest request;
    request.prompt = prompt;
    request.seed_tag = tag;
    std::string raw = provider.complete(request);
    if (clock_) clock_->charge(config_.sim_llm_call_seconds);
    return raw;
}

ValidInputResult CampaignRunner::acquire_valid_input(Simulator& sim, CappedProvider& provider) {
    const std::string tag = seed_tag(sim.spec(), "valid");
    TargetView view = inspect_target(sim);
    if (view.widgets.empty()) throw ValidInputUnobtainable("page has no input widgets");

    std::vector<std::string> widget_ids;
    for (const auto& widget : view.widgets) widget_ids.push_back(widget.widget_id);

    std::vector<WidgetContext> contexts = view.contexts;
    for (int attempt = 0; attempt < config_.valid_input_retry_cap; ++attempt) {
        ValidInputPrompt prompt = engine_.build_valid_input_prompt(contexts, constraint_catalog());

        ValidInputResponse response;
        bool parsed = false;
        for (int retry = 0; retry <= config_.parse_retry_cap && !parsed; ++retry) {
            std::string raw = llm_call(provider, prompt.rendered, tag);
            try {
                response = parse_valid_input_response(raw, widget_ids);
                parsed = true;
            } catch (const ParseMiss&) {
                if (retry == config_.parse_retry_cap) throw;
            }
        }

        std::map<std::string, std::string> assignment(response.valid_input.begin(),
                                                      response.valid_input.end());
        GuiPage before = sim.observe();
        SubmissionOutcome outcome =
            sim.submit(translate_assignment(assignment, view.widget_to_sim));
        if (clock_) clock_->charge(config_.sim_submission_seconds);

        if (outcome.kind == SubmissionOutcome::Kind::crash) {
            ValidInputResult result;
            result.valid_input = response.valid_input;
            result.inferred_constraints = response.inferred_constraints;
            result.crash_id = outcome.crash_id;
            return result;
        }
        if (outcome.kind == SubmissionOutcome::Kind::page_transition) {
            sim.reset();
            ValidInputResult result;
            result.valid_input = response.valid_input;
            result.inferred_constraints = response.inferred_constraints;
            return result;
        }

        // rejected: capture the dynamic hint and fold it into the contexts
        auto hint = diff_pages(before, outcome.after_page, buggy_input_text({assignment, "", {}, ""}));
        sim.reset();
        if (hint) {
            for (size_t i = 0; i < contexts.size(); ++i) {
                contexts[i].dynamic_hint = hint->hint;
                contexts[i].hint_provoking_input = assignment[widget_ids[i]];
            }
        }
    }
    throw ValidInputUnobtainable("retry cap reached without a page transition");
}

TargetReport CampaignRunner::run_target(const AppSpec& spec) {
    TargetReport report;
    report.app_name = spec.app_name;
    report.activity_name = spec.pages.front().activity_name;

    Simulator sim(spec);
    CampaignClock clock(config_.clock);
    clock_ = &clock;
    CappedProvider provider(provider_, config_.llm_call_cap);

    auto finish = [&] {
        report.elapsed_seconds = clock.elapsed_seconds();
        clock_ = nullptr;
    };

    if (config_.attempt_budget == 0) {
        report.failure_reason = "attempt budget is zero";
        finish();
        return report;
    }

    TargetView view;
    ValidInputResult valid;
    try {
        view = inspect_target(sim);
        valid = acquire_valid_input(sim, provider);
    } catch (const std::exception& e) {
        report.failure_reason = e.what();
        finish();
        return report;
    }
    if (valid.crash_id) {
        // the valid-input probe itself crashed the app
        report.detected = true;
        report.crash_id = *valid.crash_id;
        finish();
        return report;
    }

    const WidgetContext& query_context = view.contexts.front();
    const std::string tag = seed_tag(spec, "generator");

    FeedbackBundle feedback;
    std::set<std::map<std::string, std::string>> submitted;
    submitted.insert(std::map<std::string, std::string>(valid.valid_input.begin(),
                                                        valid.valid_input.end()));

    int round = 0;
    while (report.attempts_used < config_.attempt_budget &&
           clock.elapsed_seconds() < config_.time_budget_seconds) {
        std::vector<ExampleRecord> examples;
        if (config_.k_examples > 0 && store_.size() > 0) {
            examples = store_.retrieve_top_k(query_context, config_.k_examples);
        }
        GeneratorPrompt prompt = engine_.build_generator_prompt(
            valid.inferred_constraints, valid.valid_input, feedback, examples,
            round == 0 ? QuestionVariant::first_round : QuestionVariant::next_round);

        dsl::GeneratorProgram program;
        std::string mutation_rule;
        bool have_program = false;
        try {
            for (int retry = 0; retry <= config_.parse_retry_cap && !have_program; ++retry) {
                std::string raw = llm_call(provider, prompt.rendered, tag);
                try {
                    GeneratorResponse response = parse_generator_response(raw);
                    program = dsl::parse_program(response.program_source);
                    mutation_rule = response.mutation_rule;
                    have_program = true;
                } catch (const ParseMiss&) {
                    if (retry == config_.parse_retry_cap) throw;
                } catch (const dsl::DslError&) {
                    if (retry == config_.parse_retry_cap) throw;
                }
            }
        } catch (const BudgetExhausted& e) {
            report.failure_reason = e.what();
            break;
        } catch (const std::exception& e) {
            report.failure_reason = std::string("generator unusable: ") + e.what();
            break;
        }

        RoundLog log;
        log.mutation_rule = mutation_rule;
        log.batch = dsl::execute_program(program);

        bool stop = false;
        for (const auto& input : log.batch) {
            if (submitted.count(input.assignment)) {
                log.outcomes.push_back("duplicate_skipped");
                continue;
            }
            if (report.attempts_used >= config_.attempt_budget ||
                clock.elapsed_seconds() >= config_.time_budget_seconds) {
                log.outcomes.push_back("budget_exhausted");
                stop = true;
                break;
            }

            SubmissionOutcome outcome;
            try {
                outcome = sim.submit(translate_assignment(input.assignment, view.widget_to_sim));
            } catch (const UnknownWidget&) {
                log.outcomes.push_back("unknown_widget_skipped");
                continue;
            }
            ++report.attempts_used;
            clock.charge(config_.sim_submission_seconds);
            submitted.insert(input.assignment);
            report.submission_log.push_back(input.assignment);

            if (outcome.kind == SubmissionOutcome::Kind::crash) {
                log.outcomes.push_back("crash:" + outcome.crash_id);
                report.detected = true;
                report.crash_id = outcome.crash_id;
                store_.add_record(query_context, mutation_rule, buggy_input_text(input));
                stop = true;
                break;
            }
            log.outcomes.push_back(outcome.kind == SubmissionOutcome::Kind::rejected
                                       ? "rejected"
                                       : "accepted");
            sim.reset();
            feedback.non_trigger_inputs.emplace_back(input, mutation_rule);
            if (feedback.non_trigger_inputs.size() >
                static_cast<size_t>(config_.feedback_window)) {
                feedback.non_trigger_inputs.erase(feedback.non_trigger_inputs.begin());
            }
        }
        report.rounds.push_back(std::move(log));
        if (stop && report.detected) break;
        if (stop) break;
        ++round;
    }

    finish();
    return report;
}

CampaignReport CampaignRunner::run_suite(const std::vector<AppSpec>& specs) {
    CampaignReport report;
    report.attempt_budget = config_.attempt_budget;
    report.time_budget_seconds = config_.time_budget_seconds;
    for (const auto& spec : specs) {
        report.targets.push_back(run_target(spec));
    }
    return report;
}

}  // namespace widgetfuzz
