#include "widgetfuzz/llm_gateway.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

namespace widgetfuzz {

namespace {

using nlohmann::json;

std::string to_lower(const std::string& text) {
    std::string out = text;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(const std::string& s) {
    size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string trim_clause(const std::string& s) {
    std::string out = trim(s);
    while (!out.empty() && (out.back() == '.' || out.back() == ':')) out.pop_back();
    return trim(out);
}

// Earliest occurrence of any marker at or after `from`; the longest marker
// wins at equal positions. Returns (position, marker length) or npos.
std::pair<size_t, size_t> find_marker(const std::string& haystack_lower,
                                      const std::vector<std::string>& markers, size_t from) {
    size_t best_pos = std::string::npos, best_len = 0;
    for (const auto& marker : markers) {
        size_t pos = haystack_lower.find(to_lower(marker), from);
        if (pos == std::string::npos) continue;
        if (pos < best_pos || (pos == best_pos && marker.size() > best_len)) {
            best_pos = pos;
            best_len = marker.size();
        }
    }
    return {best_pos, best_len};
}

size_t skip_separators(const std::string& text, size_t pos) {
    while (pos < text.size() &&
           (text[pos] == ':' || text[pos] == ' ' || text[pos] == '\t')) {
        ++pos;
    }
    return pos;
}

}  // namespace

ValidInputResponse parse_valid_input_response(const std::string& raw,
                                              const std::vector<std::string>& expected_widgets,
                                              const ParserMarkers& markers) {
    if (raw.empty()) throw ParseMiss("empty response");
    const std::string lower = to_lower(raw);

    auto [c_pos, c_len] = find_marker(lower, markers.constraint_markers, 0);
    if (c_pos == std::string::npos) throw ParseMiss("no constraints marker in response");
    size_t c_end = skip_separators(raw, c_pos + c_len);

    auto [first_input_pos, first_input_len] = find_marker(lower, markers.input_markers, c_end);
    if (first_input_pos == std::string::npos) throw ParseMiss("no input marker in response");

    ValidInputResponse response;
    response.raw = raw;
    response.inferred_constraints = trim_clause(raw.substr(c_end, first_input_pos - c_end));
    if (response.inferred_constraints.empty()) throw ParseMiss("empty constraints section");

    std::vector<std::string> values;
    size_t search_from = first_input_pos;
    while (values.size() < expected_widgets.size()) {
        auto [pos, len] = find_marker(lower, markers.input_markers, search_from);
        if (pos == std::string::npos) break;
        size_t value_start = skip_separators(raw, pos + len);
        if (value_start < raw.size() && raw[value_start] == '"') {
            size_t close = raw.find('"', value_start + 1);
            if (close == std::string::npos) throw ParseMiss("unterminated quoted input value");
            values.push_back(raw.substr(value_start + 1, close - value_start - 1));
            search_from = close + 1;
        } else {
            size_t eol = raw.find('\n', value_start);
            if (eol == std::string::npos) eol = raw.size();
            values.push_back(trim(raw.substr(value_start, eol - value_start)));
            search_from = eol;
        }
    }
    if (values.size() < expected_widgets.size()) {
        throw ParseMiss("expected " + std::to_string(expected_widgets.size()) +
                        " input values, found " + std::to_string(values.size()));
    }
    for (size_t i = 0; i < expected_widgets.size(); ++i) {
        response.valid_input.emplace_back(expected_widgets[i], values[i]);
    }
    return response;
}

GeneratorResponse parse_generator_response(const std::string& raw, const ParserMarkers& markers) {
    if (raw.empty()) throw ParseMiss("empty response");
    const std::string lower = to_lower(raw);

    size_t rule_pos = lower.find(to_lower(markers.rule_marker));
    if (rule_pos == std::string::npos) throw ParseMiss("no mutation-rule marker");
    size_t rule_start = skip_separators(raw, rule_pos + markers.rule_marker.size());

    size_t gen_pos = lower.find(to_lower(markers.generator_marker), rule_start);
    if (gen_pos == std::string::npos) throw ParseMiss("no test-generator marker");
    size_t gen_start = skip_separators(raw, gen_pos + markers.generator_marker.size());

    size_t end_pos = lower.find(to_lower(markers.terminator), gen_start);
    if (end_pos == std::string::npos) end_pos = raw.size();

    GeneratorResponse response;
    response.raw = raw;
    response.mutation_rule = trim(raw.substr(rule_start, gen_pos - rule_start));
    response.program_source = trim(raw.substr(gen_start, end_pos - gen_start));
    if (response.mutation_rule.empty()) throw ParseMiss("empty mutation rule");
    if (response.program_source.empty()) throw ParseMiss("empty generator program");
    return response;
}

std::string render_generator_response(const std::string& mutation_rule,
                                      const std::string& program_source) {
    return "Mutation rule: " + mutation_rule + "\nTest generator:\n" + program_source +
           "\nEnd generator.\n";
}

std::unique_ptr<MockProvider> MockProvider::from_script_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ProviderUnavailable("cannot open mock script: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return from_script_text(text.str());
}

std::unique_ptr<MockProvider> MockProvider::from_script_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ProviderUnavailable(std::string("invalid mock script: ") + e.what());
    }
    if (!doc.is_object()) throw ProviderUnavailable("mock script must be a JSON object");

    auto provider = std::make_unique<MockProvider>();
    for (const auto& [tag, value] : doc.items()) {
        Entry entry;
        if (value.is_array()) {
            entry.defaults = value.get<std::vector<std::string>>();
        } else if (value.is_object()) {
            if (value.contains("cases")) {
                for (const auto& c : value["cases"]) {
                    Case parsed;
                    if (c.contains("contains"))
                        parsed.contains = c["contains"].get<std::vector<std::string>>();
                    if (c.contains("not_contains"))
                        parsed.not_contains = c["not_contains"].get<std::vector<std::string>>();
                    parsed.responses = c.at("responses").get<std::vector<std::string>>();
                    entry.cases.push_back(std::move(parsed));
                }
            }
            if (value.contains("default")) {
                entry.defaults = value["default"].get<std::vector<std::string>>();
            }
        } else {
            throw ProviderUnavailable("mock script entry for '" + tag +
                                      "' must be a list or an object");
        }
        provider->script_[tag] = std::move(entry);
    }
    return provider;
}

std::string MockProvider::complete(const CompletionRequest& request) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = script_.find(request.seed_tag);
    if (it == script_.end()) {
        throw ProviderUnavailable("no mock script entry for seed_tag '" + request.seed_tag + "'");
    }
    const Entry& entry = it->second;

    const std::vector<std::string>* responses = nullptr;
    std::string cursor_key = request.seed_tag + "#default";
    for (size_t i = 0; i < entry.cases.size(); ++i) {
        const Case& c = entry.cases[i];
        bool match = std::all_of(c.contains.begin(), c.contains.end(),
                                 [&](const std::string& needle) {
                                     return request.prompt.find(needle) != std::string::npos;
                                 }) &&
                     std::none_of(c.not_contains.begin(), c.not_contains.end(),
                                  [&](const std::string& needle) {
                                      return request.prompt.find(needle) != std::string::npos;
                                  });
        if (match) {
            responses = &c.responses;
            cursor_key = request.seed_tag + "#case" + std::to_string(i);
            break;
        }
    }
    if (responses == nullptr) responses = &entry.defaults;
    if (responses->empty()) {
        throw ProviderUnavailable("mock script has no response for seed_tag '" +
                                  request.seed_tag + "'");
    }
    size_t& cursor = cursor_[cursor_key];
    const std::string& response = (*responses)[cursor % responses->size()];
    ++cursor;
    return response;
}

LiveProvider::LiveProvider(std::string endpoint, std::string api_key, std::string model)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)), model_(std::move(model)) {}

std::unique_ptr<LiveProvider> LiveProvider::from_env() {
    const char* endpoint = std::getenv("WIDGETFUZZ_ENDPOINT");
    const char* api_key = std::getenv("WIDGETFUZZ_API_KEY");
    const char* model = std::getenv("WIDGETFUZZ_MODEL");
    if (!endpoint || !*endpoint || !api_key || !*api_key) {
        throw ProviderUnavailable(
            "live provider needs WIDGETFUZZ_ENDPOINT and WIDGETFUZZ_API_KEY");
    }
    return std::unique_ptr<LiveProvider>(
        new LiveProvider(endpoint, api_key, model && *model ? model : "gpt-3.5-turbo"));
}

std::string LiveProvider::complete(const CompletionRequest& request) {
    // endpoint is "http://host[:port]"; path is the chat-completions route
    httplib::Client client(endpoint_);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);

    json body = {{"model", model_},
                 {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
                 {"temperature", request.temperature},
                 {"max_tokens", request.max_tokens}};
    httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
    auto result = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
    if (!result) throw ProviderUnavailable("live provider request failed");
    if (result->status != 200) {
        throw ProviderUnavailable("live provider returned status " +
                                  std::to_string(result->status));
    }
    try {
        json response = json::parse(result->body);
        return response.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw ProviderUnavailable(std::string("malformed provider response: ") + e.what());
    }
}

std::string CappedProvider::complete(const CompletionRequest& request) {
    if (calls_ >= call_cap_) {
        throw BudgetExhausted("LLM call cap reached (" + std::to_string(call_cap_) + ")");
    }
    ++calls_;
    return inner_->complete(request);
}

}  // namespace widgetfuzz
