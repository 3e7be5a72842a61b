#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace widgetfuzz {

struct ProviderUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseMiss : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CompletionRequest {
    std::string prompt;
    double temperature = 0.7;
    int max_tokens = 1024;
    std::string seed_tag;  // mock routing key
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string complete(const CompletionRequest& request) = 0;
};

// Scripted, fully deterministic provider. The script maps a seed_tag to an
// ordered response list; repeated calls cycle through the list. An entry may
// instead hold conditional cases matched against the prompt text:
//   {"cases": [{"contains": [..], "not_contains": [..], "responses": [..]}],
//    "default": [..]}
class MockProvider : public Provider {
public:
    static std::unique_ptr<MockProvider> from_script_file(const std::string& path);
    static std::unique_ptr<MockProvider> from_script_text(const std::string& text);

    std::string complete(const CompletionRequest& request) override;

private:
    struct Case {
        std::vector<std::string> contains;
        std::vector<std::string> not_contains;
        std::vector<std::string> responses;
    };
    struct Entry {
        std::vector<Case> cases;
        std::vector<std::string> defaults;
    };

    std::map<std::string, Entry> script_;
    std::map<std::string, size_t> cursor_;  // per (seed_tag, case) cycling state
    std::mutex mutex_;
};

// HTTP chat-completions provider configured from the environment:
// WIDGETFUZZ_ENDPOINT, WIDGETFUZZ_API_KEY, WIDGETFUZZ_MODEL.
class LiveProvider : public Provider {
public:
    static std::unique_ptr<LiveProvider> from_env();
    std::string complete(const CompletionRequest& request) override;

private:
    LiveProvider(std::string endpoint, std::string api_key, std::string model);
    std::string endpoint_;
    std::string api_key_;
    std::string model_;
};

// Enforces a per-campaign call cap in front of any provider.
class CappedProvider : public Provider {
public:
    CappedProvider(std::shared_ptr<Provider> inner, int call_cap)
        : inner_(std::move(inner)), call_cap_(call_cap) {}

    std::string complete(const CompletionRequest& request) override;
    int calls_made() const { return calls_; }
    void reset_cap() { calls_ = 0; }

private:
    std::shared_ptr<Provider> inner_;
    int call_cap_;
    int calls_ = 0;
};

struct ValidInputResponse {
    std::vector<std::pair<std::string, std::string>> valid_input;  // widget_id -> value
    std::string inferred_constraints;
    std::string raw;
};

struct GeneratorResponse {
    std::string mutation_rule;
    std::string program_source;
    std::string raw;
};

// Marker lists are configurable; these are the defaults.
struct ParserMarkers {
    std::vector<std::string> constraint_markers = {"constraints", "constraint:"};
    std::vector<std::string> input_markers = {
        "the valid input is", "valid input is", "the input is", "input is",
        "the valid input",    "valid input",    "the input"};
    std::string rule_marker = "mutation rule";
    std::string generator_marker = "test generator";
    std::string terminator = "end generator.";
};

// Keyword-anchored extraction, case-insensitive. Values are quoted strings or
// line remainders after each input marker, assigned to widgets in order.
ValidInputResponse parse_valid_input_response(const std::string& raw,
                                              const std::vector<std::string>& expected_widgets,
                                              const ParserMarkers& markers = {});

GeneratorResponse parse_generator_response(const std::string& raw,
                                           const ParserMarkers& markers = {});

// Canonical rendering that parse_generator_response inverts.
std::string render_generator_response(const std::string& mutation_rule,
                                      const std::string& program_source);

}  // namespace widgetfuzz
