#include "widgetfuzz/app_simulator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "widgetfuzz/mutation_dsl.hpp"

namespace widgetfuzz {

namespace {

using nlohmann::json;

const std::map<std::string, RuleKind>& rule_kinds() {
    static const std::map<std::string, RuleKind> kinds = {
        {"must_parse_int", RuleKind::must_parse_int},
        {"must_parse_decimal", RuleKind::must_parse_decimal},
        {"pure_text", RuleKind::pure_text},
        {"pure_digits", RuleKind::pure_digits},
        {"min_value", RuleKind::min_value},
        {"max_value", RuleKind::max_value},
        {"min_len", RuleKind::min_len},
        {"max_len", RuleKind::max_len},
        {"requires_class", RuleKind::requires_class},
        {"forbids_chars", RuleKind::forbids_chars},
        {"unique_in", RuleKind::unique_in},
        {"less_than", RuleKind::less_than},
        {"sum_equals", RuleKind::sum_equals},
        {"date_before", RuleKind::date_before},
        {"equals", RuleKind::equals},
        {"non_equal", RuleKind::non_equal},
    };
    return kinds;
}

std::string value_of(const std::map<std::string, std::string>& values, const std::string& id) {
    auto it = values.find(id);
    return it == values.end() ? "" : it->second;
}

bool parses_int(const std::string& text) {
    if (text.empty()) return false;
    size_t i = (text[0] == '+' || text[0] == '-') ? 1 : 0;
    if (i == text.size()) return false;
    for (; i < text.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
    }
    return true;
}

// ISO 8601 calendar date, YYYY-MM-DD
bool is_iso_date(const std::string& text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
    for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
    }
    int month = (text[5] - '0') * 10 + (text[6] - '0');
    int day = (text[8] - '0') * 10 + (text[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

bool has_class_member(const std::string& text, const std::string& char_class) {
    for (unsigned char c : text) {
        if (char_class == "upper" && std::isupper(c)) return true;
        if (char_class == "digit" && std::isdigit(c)) return true;
        if (char_class == "special" && !std::isalnum(c) && c != ' ') return true;
    }
    return false;
}

double eval_number(const json& expr, const std::map<std::string, std::string>& values) {
    if (expr.is_number()) return expr.get<double>();
    if (expr.is_array() && expr.size() == 2 && expr[0].is_string()) {
        std::string op = expr[0].get<std::string>();
        std::string widget = expr[1].get<std::string>();
        if (op == "num") {
            auto parsed = dsl::parse_decimal(value_of(values, widget));
            return parsed ? *parsed : std::nan("");
        }
        if (op == "len") {
            return static_cast<double>(value_of(values, widget).size());
        }
    }
    throw AppSpecError("bad numeric expression: " + expr.dump());
}

void collect_widget_refs(const json& expr, std::vector<std::string>& out) {
    if (!expr.is_array() || expr.empty() || !expr[0].is_string()) return;
    std::string op = expr[0].get<std::string>();
    if ((op == "num" || op == "len") && expr.size() == 2) {
        out.push_back(expr[1].get<std::string>());
        return;
    }
    if ((op == "contains" || op == "contains_class" || op == "len_exceeds" ||
         op == "unguarded_parse") &&
        expr.size() >= 2 && expr[1].is_string()) {
        out.push_back(expr[1].get<std::string>());
        return;
    }
    for (size_t i = 1; i < expr.size(); ++i) collect_widget_refs(expr[i], out);
}

}  // namespace

bool eval_condition(const json& expr, const std::map<std::string, std::string>& values) {
    if (!expr.is_array() || expr.empty() || !expr[0].is_string()) {
        throw AppSpecError("bad condition expression: " + expr.dump());
    }
    std::string op = expr[0].get<std::string>();

    if (op == "and" || op == "or") {
        bool result = (op == "and");
        for (size_t i = 1; i < expr.size(); ++i) {
            bool v = eval_condition(expr[i], values);
            result = (op == "and") ? (result && v) : (result || v);
        }
        return result;
    }
    if (op == "not") {
        if (expr.size() != 2) throw AppSpecError("'not' takes one operand");
        return !eval_condition(expr[1], values);
    }
    if (op == "<" || op == "<=" || op == ">" || op == ">=" || op == "==" || op == "!=") {
        if (expr.size() != 3) throw AppSpecError("comparison takes two operands");
        double a = eval_number(expr[1], values);
        double b = eval_number(expr[2], values);
        if (std::isnan(a) || std::isnan(b)) return false;
        if (op == "<") return a < b;
        if (op == "<=") return a <= b;
        if (op == ">") return a > b;
        if (op == ">=") return a >= b;
        if (op == "==") return a == b;
        return a != b;
    }
    if (op == "contains") {
        return value_of(values, expr.at(1).get<std::string>())
                   .find(expr.at(2).get<std::string>()) != std::string::npos;
    }
    if (op == "contains_class") {
        const std::string text = value_of(values, expr.at(1).get<std::string>());
        for (const auto& member : dsl::charset_table(expr.at(2).get<std::string>())) {
            if (text.find(member) != std::string::npos) return true;
        }
        return false;
    }
    if (op == "len_exceeds") {
        return value_of(values, expr.at(1).get<std::string>()).size() >
               static_cast<size_t>(expr.at(2).get<long>());
    }
    if (op == "unguarded_parse") {
        // true when a parser invoked on the raw string would throw
        const std::string text = value_of(values, expr.at(1).get<std::string>());
        const std::string type = expr.at(2).get<std::string>();
        if (type == "int") return !parses_int(text);
        if (type == "decimal") return !dsl::parse_decimal(text).has_value();
        throw AppSpecError("unguarded_parse type must be int or decimal");
    }
    throw AppSpecError("unknown condition op: " + op);
}

bool rule_violated(const ConstraintRule& rule, const std::map<std::string, std::string>& values) {
    const std::string v = value_of(values, rule.widget);
    switch (rule.kind) {
        case RuleKind::must_parse_int:
            return !parses_int(v);
        case RuleKind::must_parse_decimal:
            return !dsl::parse_decimal(v).has_value();
        case RuleKind::pure_text:
            return std::any_of(v.begin(), v.end(), [](unsigned char c) {
                return !std::isalnum(c) && c != ' ';
            });
        case RuleKind::pure_digits:
            return v.empty() || std::any_of(v.begin(), v.end(), [](unsigned char c) {
                       return !std::isdigit(c);
                   });
        case RuleKind::min_value: {
            auto num = dsl::parse_decimal(v);
            return !num || *num < rule.value;
        }
        case RuleKind::max_value: {
            auto num = dsl::parse_decimal(v);
            return !num || *num > rule.value;
        }
        case RuleKind::min_len:
            return v.size() < static_cast<size_t>(rule.n);
        case RuleKind::max_len:
            return v.size() > static_cast<size_t>(rule.n);
        case RuleKind::requires_class:
            return !has_class_member(v, rule.char_class);
        case RuleKind::forbids_chars:
            return v.find_first_of(rule.chars) != std::string::npos;
        case RuleKind::unique_in:
            return std::find(rule.unique_set.begin(), rule.unique_set.end(), v) !=
                   rule.unique_set.end();
        case RuleKind::less_than: {
            auto a = dsl::parse_decimal(v);
            auto b = dsl::parse_decimal(value_of(values, rule.other));
            return !a || !b || !(*a < *b);
        }
        case RuleKind::sum_equals: {
            double sum = 0;
            for (const auto& part : rule.widgets) {
                auto num = dsl::parse_decimal(value_of(values, part));
                if (!num) return true;
                sum += *num;
            }
            auto total = dsl::parse_decimal(value_of(values, rule.total_widget));
            return !total || std::abs(sum - *total) > 1e-9;
        }
        case RuleKind::date_before: {
            const std::string other = value_of(values, rule.other);
            if (!is_iso_date(v) || !is_iso_date(other)) return true;
            return !(v < other);  // ISO dates compare lexicographically
        }
        case RuleKind::equals:
            return v != value_of(values, rule.other);
        case RuleKind::non_equal:
            return v == value_of(values, rule.other);
    }
    return false;
}

AppSpec AppSpec::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw AppSpecError("cannot open app spec: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return from_json_text(text.str());
}

AppSpec AppSpec::from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw AppSpecError(std::string("invalid app spec JSON: ") + e.what());
    }

    AppSpec spec;
    try {
        spec.app_name = doc.at("app_name").get<std::string>();
        for (const auto& page_doc : doc.at("pages")) {
            PageSpec page;
            page.activity_name = page_doc.at("activity_name").get<std::string>();

            std::set<std::string> declared;
            for (const auto& widget_doc : page_doc.at("widgets")) {
                WidgetSpec widget;
                widget.id = widget_doc.at("id").get<std::string>();
                widget.descriptor = widget_doc.at("descriptor").get<std::string>();
                if (widget_doc.contains("neighbors")) {
                    widget.neighbors = widget_doc["neighbors"].get<std::vector<std::string>>();
                }
                if (!declared.insert(widget.id).second) {
                    throw AppSpecError("duplicate widget id: " + widget.id);
                }
                page.widgets.push_back(std::move(widget));
            }

            auto check_declared = [&](const std::string& id) {
                if (!declared.count(id)) {
                    throw AppSpecError("rule references undeclared widget: " + id);
                }
            };

            for (const auto& rule_doc : page_doc.value("rules", json::array())) {
                ConstraintRule rule;
                std::string kind = rule_doc.at("kind").get<std::string>();
                auto it = rule_kinds().find(kind);
                if (it == rule_kinds().end()) throw AppSpecError("unknown rule kind: " + kind);
                rule.kind = it->second;
                rule.hint_text = rule_doc.at("hint").get<std::string>();
                rule.visibility = rule_doc.value("visibility", "implicit") == "explicit"
                                      ? RuleVisibility::explicit_rule
                                      : RuleVisibility::implicit_rule;
                if (rule.kind == RuleKind::sum_equals) {
                    rule.widgets = rule_doc.at("widgets").get<std::vector<std::string>>();
                    rule.total_widget = rule_doc.at("total").get<std::string>();
                    for (const auto& id : rule.widgets) check_declared(id);
                    check_declared(rule.total_widget);
                    rule.widget = rule.widgets.empty() ? "" : rule.widgets.front();
                } else {
                    rule.widget = rule_doc.at("widget").get<std::string>();
                    check_declared(rule.widget);
                }
                switch (rule.kind) {
                    case RuleKind::min_value:
                    case RuleKind::max_value:
                        rule.value = rule_doc.at("value").get<double>();
                        break;
                    case RuleKind::min_len:
                    case RuleKind::max_len:
                        rule.n = rule_doc.at("n").get<long>();
                        break;
                    case RuleKind::requires_class:
                        rule.char_class = rule_doc.at("class").get<std::string>();
                        break;
                    case RuleKind::forbids_chars:
                        rule.chars = rule_doc.at("chars").get<std::string>();
                        break;
                    case RuleKind::unique_in:
                        rule.unique_set = rule_doc.at("set").get<std::vector<std::string>>();
                        break;
                    case RuleKind::less_than:
                    case RuleKind::date_before:
                    case RuleKind::equals:
                    case RuleKind::non_equal:
                        rule.other = rule_doc.at("other").get<std::string>();
                        check_declared(rule.other);
                        break;
                    default:
                        break;
                }
                page.rules.push_back(std::move(rule));
            }

            for (const auto& crash_doc : page_doc.value("crashes", json::array())) {
                CrashPredicate predicate;
                predicate.crash_id = crash_doc.at("crash_id").get<std::string>();
                predicate.message = crash_doc.value("message", "app has stopped");
                predicate.condition = crash_doc.at("condition");
                std::vector<std::string> refs;
                collect_widget_refs(predicate.condition, refs);
                for (const auto& id : refs) check_declared(id);
                // reject malformed expressions at load time
                std::map<std::string, std::string> dummy;
                for (const auto& id : declared) dummy[id] = "0";
                eval_condition(predicate.condition, dummy);
                page.crashes.push_back(std::move(predicate));
            }

            if (page_doc.contains("success_transition") &&
                !page_doc["success_transition"].is_null()) {
                page.success_transition = page_doc["success_transition"].get<std::string>();
            }
            spec.pages.push_back(std::move(page));
        }
    } catch (const json::exception& e) {
        throw AppSpecError(std::string("invalid app spec: ") + e.what());
    }
    if (spec.pages.empty()) throw AppSpecError("app spec has no pages");
    return spec;
}

Simulator::Simulator(AppSpec spec) : spec_(std::move(spec)) {}

GuiPage Simulator::observe() const {
    GuiPage page;
    page.app_name = spec_.app_name;

    if (crashed_) {
        page.activity_name = "CrashState";
        page.root = {"android.widget.TextView", "crash_banner", "app has stopped", "",
                     {0, 0, 1080, 1920}, {}};
        return page;
    }

    const PageSpec& current = spec_.pages[page_index_];
    page.activity_name = current.activity_name;
    page.root = {"android.widget.FrameLayout", "", "", "", {0, 0, 1080, 1920}, {}};

    int y = 100;
    for (const auto& widget : current.widgets) {
        ViewNode row{"android.widget.LinearLayout", "", "", "", {0, y, 1080, y + 90}, {}};
        int x = 0;
        auto add_label = [&](const std::string& text) {
            row.children.push_back({"android.widget.TextView", "", text, "",
                                    {x, y, x + 200, y + 90}, {}});
            x += 210;
        };
        for (const auto& neighbor : widget.neighbors) add_label(neighbor);
        // explicit rules surface their hint statically next to the widget
        for (const auto& rule : current.rules) {
            if (rule.visibility == RuleVisibility::explicit_rule && rule.widget == widget.id) {
                add_label(rule.hint_text);
            }
        }
        row.children.push_back({"android.widget.EditText", widget.id, "", widget.descriptor,
                                {x, y, 1080, y + 90}, {}});
        page.root.children.push_back(std::move(row));
        y += 100;
    }

    if (!pending_hint_.empty()) {
        // bounds shift with the rejection count so consecutive hints are
        // distinct nodes under the (class, resource_id, bounds) identity
        int offset = static_cast<int>(rejection_count_ % 40);
        page.root.children.push_back({"android.widget.TextView", "dynamic_hint", pending_hint_,
                                      "", {0, 1800 + offset, 1080, 1860 + offset}, {}});
    }
    return page;
}

SubmissionOutcome Simulator::submit(const std::map<std::string, std::string>& assignment) {
    if (crashed_) throw std::logic_error("simulator is in crash state; reset() first");

    const PageSpec& current = spec_.pages[page_index_];
    std::set<std::string> declared;
    for (const auto& widget : current.widgets) declared.insert(widget.id);
    for (const auto& [id, value] : assignment) {
        if (!declared.count(id)) throw UnknownWidget("unknown widget in submission: " + id);
    }
    std::map<std::string, std::string> values;
    for (const auto& id : declared) values[id] = value_of(assignment, id);

    SubmissionOutcome outcome;
    for (const auto& predicate : current.crashes) {
        if (eval_condition(predicate.condition, values)) {
            crashed_ = true;
            crash_log_.push_back(predicate.crash_id);
            outcome.kind = SubmissionOutcome::Kind::crash;
            outcome.crash_id = predicate.crash_id;
            outcome.message = predicate.message;
            return outcome;
        }
    }
    for (const auto& rule : current.rules) {
        if (rule_violated(rule, values)) {
            pending_hint_ = rule.hint_text;
            ++rejection_count_;
            outcome.kind = SubmissionOutcome::Kind::rejected;
            outcome.violated_hint = rule.hint_text;
            outcome.after_page = observe();
            return outcome;
        }
    }

    pending_hint_.clear();
    outcome.kind = SubmissionOutcome::Kind::page_transition;
    if (current.success_transition) {
        outcome.next_activity = *current.success_transition;
        for (size_t i = 0; i < spec_.pages.size(); ++i) {
            if (spec_.pages[i].activity_name == *current.success_transition) {
                page_index_ = i;
                break;
            }
        }
    } else {
        outcome.next_activity = "<terminal>";
    }
    return outcome;
}

void Simulator::reset() {
    page_index_ = 0;
    crashed_ = false;
    pending_hint_.clear();
    // crash_log_ is preserved across resets
}

}  // namespace widgetfuzz
