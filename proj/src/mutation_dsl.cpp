#include "widgetfuzz/mutation_dsl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

namespace widgetfuzz::dsl {

namespace {

std::string trim(const std::string& s) {
    size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string unquote(const std::string& token, int line) {
    if (token.size() < 2 || token.front() != '"' || token.back() != '"') {
        throw DslSyntaxError(line, "expected quoted string, got '" + token + "'");
    }
    std::string out;
    for (size_t i = 1; i + 1 < token.size(); ++i) {
        char c = token[i];
        if (c != '\\') {
            out += c;
            continue;
        }
        if (i + 2 >= token.size() + 1) throw DslSyntaxError(line, "dangling escape");
        char esc = token[++i];
        switch (esc) {
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            case 'r': out += '\r'; break;
            case '0': out += '\0'; break;
            default: throw DslSyntaxError(line, std::string("unknown escape \\") + esc);
        }
    }
    return out;
}

std::string quote(const std::string& value) {
    std::string out = "\"";
    for (char c : value) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            case '\0': out += "\\0"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

// Splits on commas that are outside quoted strings.
std::vector<std::string> split_commas(const std::string& text, int line) {
    std::vector<std::string> parts;
    std::string current;
    bool in_quotes = false;
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            current += c;
            if (c == '\\' && i + 1 < text.size()) {
                current += text[++i];
            } else if (c == '"') {
                in_quotes = false;
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
            current += c;
        } else if (c == ',') {
            parts.push_back(trim(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (in_quotes) throw DslSyntaxError(line, "unterminated string");
    if (!trim(current).empty() || !parts.empty()) parts.push_back(trim(current));
    return parts;
}

struct ResolvedOp {
    enum class Kind {
        set, append, prepend, insert, repeat, truncate, pad, case_flip, empty,
        number_negate, number_scale, number_set, digits, charset_inject, swap,
        violate_order
    };
    enum class Pos { start, end, middle, index };

    Kind kind = Kind::empty;
    std::string text;
    double num = 0.0;
    long count = 0;
    char pad_char = ' ';
    Pos pos = Pos::end;
    long pos_index = 0;
    std::string charset;
    std::string widget_a;
    std::string widget_b;
};

const std::map<std::string, std::vector<std::string>>& op_signatures() {
    static const std::map<std::string, std::vector<std::string>> sigs = {
        {"set", {"value"}},
        {"append", {"text"}},
        {"prepend", {"text"}},
        {"insert", {"pos", "text"}},
        {"repeat", {"count"}},
        {"truncate", {"count"}},
        {"pad", {"count", "char"}},
        {"case_flip", {}},
        {"empty", {}},
        {"number_negate", {}},
        {"number_scale", {"factor"}},
        {"number_set", {"value"}},
        {"digits", {"count"}},
        {"charset_inject", {"class", "count", "pos"}},
        {"swap", {"wa", "wb"}},
        {"violate_order", {"w_lo", "w_hi", "delta"}},
    };
    return sigs;
}

ResolvedOp::Kind kind_of(const std::string& name, int line) {
    static const std::map<std::string, ResolvedOp::Kind> kinds = {
        {"set", ResolvedOp::Kind::set},
        {"append", ResolvedOp::Kind::append},
        {"prepend", ResolvedOp::Kind::prepend},
        {"insert", ResolvedOp::Kind::insert},
        {"repeat", ResolvedOp::Kind::repeat},
        {"truncate", ResolvedOp::Kind::truncate},
        {"pad", ResolvedOp::Kind::pad},
        {"case_flip", ResolvedOp::Kind::case_flip},
        {"empty", ResolvedOp::Kind::empty},
        {"number_negate", ResolvedOp::Kind::number_negate},
        {"number_scale", ResolvedOp::Kind::number_scale},
        {"number_set", ResolvedOp::Kind::number_set},
        {"digits", ResolvedOp::Kind::digits},
        {"charset_inject", ResolvedOp::Kind::charset_inject},
        {"swap", ResolvedOp::Kind::swap},
        {"violate_order", ResolvedOp::Kind::violate_order},
    };
    auto it = kinds.find(name);
    if (it == kinds.end()) throw UnknownOp(line, "unknown op '" + name + "'");
    return it->second;
}

std::string resolve_token(const std::string& token, const std::string& axis_var,
                          const std::string& axis_value) {
    if (!axis_var.empty() && token == "$" + axis_var) return axis_value;
    return token;
}

std::string as_string(const std::string& token, int line) {
    if (!token.empty() && token.front() == '"') return unquote(token, line);
    return token;
}

double as_number(const std::string& token, int line) {
    std::string bare = token;
    if (!bare.empty() && bare.front() == '"') bare = unquote(bare, line);
    auto value = parse_decimal(bare);
    if (!value) throw DslSyntaxError(line, "expected number, got '" + token + "'");
    return *value;
}

long as_count(const std::string& token, int line) {
    double value = as_number(token, line);
    if (value < 0 || value != std::floor(value)) {
        throw DslSyntaxError(line, "expected non-negative integer, got '" + token + "'");
    }
    return static_cast<long>(std::min(value, 1e9));
}

void resolve_pos(ResolvedOp& op, const std::string& token, int line) {
    if (token == "start") {
        op.pos = ResolvedOp::Pos::start;
    } else if (token == "end") {
        op.pos = ResolvedOp::Pos::end;
    } else if (token == "middle") {
        op.pos = ResolvedOp::Pos::middle;
    } else {
        op.pos = ResolvedOp::Pos::index;
        op.pos_index = as_count(token, line);
    }
}

std::string as_widget(const std::string& token, const std::vector<std::string>& targets,
                      int line) {
    if (std::find(targets.begin(), targets.end(), token) == targets.end()) {
        throw UnboundWidget(line, "widget '" + token + "' is not a target");
    }
    return token;
}

ResolvedOp resolve_op(const OpCall& call, const std::vector<std::string>& targets,
                      const std::string& axis_var, const std::string& axis_value) {
    auto sig_it = op_signatures().find(call.name);
    if (sig_it == op_signatures().end()) throw UnknownOp(call.line, "unknown op '" + call.name + "'");
    const auto& params = sig_it->second;

    std::map<std::string, std::string> values;
    size_t positional = 0;
    for (const auto& [key, raw] : call.args) {
        std::string param;
        if (key.empty()) {
            if (positional >= params.size()) {
                throw DslSyntaxError(call.line, "too many arguments for " + call.name);
            }
            param = params[positional++];
        } else {
            if (std::find(params.begin(), params.end(), key) == params.end()) {
                throw DslSyntaxError(call.line, "unknown argument '" + key + "' for " + call.name);
            }
            param = key;
        }
        if (values.count(param)) throw DslSyntaxError(call.line, "duplicate argument '" + param + "'");
        values[param] = resolve_token(raw, axis_var, axis_value);
    }
    if (values.size() != params.size()) {
        throw DslSyntaxError(call.line, call.name + " expects " + std::to_string(params.size()) +
                                            " argument(s)");
    }

    ResolvedOp op;
    op.kind = kind_of(call.name, call.line);
    int line = call.line;
    switch (op.kind) {
        case ResolvedOp::Kind::set:
            op.text = as_string(values["value"], line);
            break;
        case ResolvedOp::Kind::append:
        case ResolvedOp::Kind::prepend:
            op.text = as_string(values["text"], line);
            break;
        case ResolvedOp::Kind::insert:
            resolve_pos(op, values["pos"], line);
            op.text = as_string(values["text"], line);
            break;
        case ResolvedOp::Kind::repeat:
        case ResolvedOp::Kind::truncate:
        case ResolvedOp::Kind::digits:
            op.count = as_count(values["count"], line);
            break;
        case ResolvedOp::Kind::pad: {
            op.count = as_count(values["count"], line);
            std::string ch = as_string(values["char"], line);
            if (ch.size() != 1) throw DslSyntaxError(line, "pad char must be one character");
            op.pad_char = ch[0];
            break;
        }
        case ResolvedOp::Kind::case_flip:
        case ResolvedOp::Kind::empty:
        case ResolvedOp::Kind::number_negate:
            break;
        case ResolvedOp::Kind::number_scale:
            op.num = as_number(values["factor"], line);
            break;
        case ResolvedOp::Kind::number_set:
            op.num = as_number(values["value"], line);
            break;
        case ResolvedOp::Kind::charset_inject:
            op.charset = as_string(values["class"], line);
            if (!is_charset_class(op.charset)) {
                throw DslSyntaxError(line, "unknown charset class '" + op.charset + "'");
            }
            op.count = as_count(values["count"], line);
            resolve_pos(op, values["pos"], line);
            break;
        case ResolvedOp::Kind::swap:
            op.widget_a = as_widget(as_string(values["wa"], line), targets, line);
            op.widget_b = as_widget(as_string(values["wb"], line), targets, line);
            break;
        case ResolvedOp::Kind::violate_order:
            op.widget_a = as_widget(as_string(values["w_lo"], line), targets, line);
            op.widget_b = as_widget(as_string(values["w_hi"], line), targets, line);
            op.num = as_number(values["delta"], line);
            break;
    }
    return op;
}

size_t insert_index(ResolvedOp::Pos pos, long pos_index, size_t len) {
    switch (pos) {
        case ResolvedOp::Pos::start: return 0;
        case ResolvedOp::Pos::end: return len;
        case ResolvedOp::Pos::middle: return len / 2;
        case ResolvedOp::Pos::index:
            return std::min(static_cast<size_t>(pos_index), len);
    }
    return len;
}

void cap_length(std::string& value) {
    if (value.size() > kMaxInputLength) value.resize(kMaxInputLength);
}

// Applies a string-level op to one value; numeric ops return false when the
// current value does not parse as a decimal.
bool apply_to_value(const ResolvedOp& op, std::string& value) {
    switch (op.kind) {
        case ResolvedOp::Kind::set:
            value = op.text;
            break;
        case ResolvedOp::Kind::append:
            value += op.text;
            break;
        case ResolvedOp::Kind::prepend:
            value = op.text + value;
            break;
        case ResolvedOp::Kind::insert:
            value.insert(insert_index(op.pos, op.pos_index, value.size()), op.text);
            break;
        case ResolvedOp::Kind::repeat: {
            std::string unit = value;
            value.clear();
            for (long i = 0; i < op.count && value.size() < kMaxInputLength; ++i) {
                value += unit;
            }
            break;
        }
        case ResolvedOp::Kind::truncate:
            if (value.size() > static_cast<size_t>(op.count)) value.resize(op.count);
            break;
        case ResolvedOp::Kind::pad: {
            size_t target_len = std::min(static_cast<size_t>(op.count), kMaxInputLength);
            if (value.size() < target_len) value.append(target_len - value.size(), op.pad_char);
            break;
        }
        case ResolvedOp::Kind::case_flip:
            for (char& c : value) {
                unsigned char u = static_cast<unsigned char>(c);
                if (std::isupper(u)) c = static_cast<char>(std::tolower(u));
                else if (std::islower(u)) c = static_cast<char>(std::toupper(u));
            }
            break;
        case ResolvedOp::Kind::empty:
            value.clear();
            break;
        case ResolvedOp::Kind::number_negate: {
            auto num = parse_decimal(value);
            if (!num) return false;
            value = format_number(-*num);
            break;
        }
        case ResolvedOp::Kind::number_scale: {
            auto num = parse_decimal(value);
            if (!num) return false;
            value = format_number(*num * op.num);
            break;
        }
        case ResolvedOp::Kind::number_set:
            value = format_number(op.num);
            break;
        case ResolvedOp::Kind::digits: {
            static const std::string cycle = "1234567890";
            value.clear();
            for (long i = 0; i < op.count && value.size() < kMaxInputLength; ++i) {
                value += cycle[i % cycle.size()];
            }
            break;
        }
        case ResolvedOp::Kind::charset_inject: {
            const auto& table = charset_table(op.charset);
            std::string injection;
            for (long i = 0; i < op.count; ++i) injection += table[i % table.size()];
            value.insert(insert_index(op.pos, op.pos_index, value.size()), injection);
            break;
        }
        default:
            break;
    }
    cap_length(value);
    return true;
}

void apply_op(const ResolvedOp& op, const OpCall& call,
              const std::vector<std::string>& targets,
              std::map<std::string, std::string>& assignment,
              std::vector<std::string>& trace) {
    if (op.kind == ResolvedOp::Kind::swap) {
        std::swap(assignment[op.widget_a], assignment[op.widget_b]);
        trace.push_back("swap " + op.widget_a + " <-> " + op.widget_b);
        return;
    }
    if (op.kind == ResolvedOp::Kind::violate_order) {
        auto hi = parse_decimal(assignment[op.widget_b]);
        if (!hi) {
            trace.push_back("violate_order inapplicable on " + op.widget_b + " (non-numeric)");
            return;
        }
        assignment[op.widget_a] = format_number(*hi + op.num);
        cap_length(assignment[op.widget_a]);
        trace.push_back("violate_order " + op.widget_a + " > " + op.widget_b);
        return;
    }
    for (const auto& widget : targets) {
        if (apply_to_value(op, assignment[widget])) {
            trace.push_back(call.name + " on " + widget);
        } else {
            trace.push_back(call.name + " inapplicable on " + widget + " (non-numeric)");
        }
    }
}

// Number of times $var appears as a whole argument token across all ops.
int count_axis_references(const std::vector<OpCall>& ops, const std::string& var) {
    int count = 0;
    for (const auto& op : ops) {
        for (const auto& [key, value] : op.args) {
            if (value == "$" + var) ++count;
        }
    }
    return count;
}

}  // namespace

const std::vector<std::string>& charset_table(const std::string& class_name) {
    static const std::map<std::string, std::vector<std::string>> tables = {
        {"control", {std::string(1, '\0'), "\x01", "\x08", "\x1b", "\x7f"}},
        {"null_byte", {std::string(1, '\0')}},
        {"emoji", {"\xF0\x9F\x98\x80", "\xF0\x9F\x94\xA5", "\xF0\x9F\x92\xA5"}},
        {"rtl_override", {"\xE2\x80\xAE"}},
        {"combining", {"\xCC\x81", "\xCC\x80", "\xE2\x83\x97"}},
        {"sql_meta", {"'", "\"", ";", "--", "/*"}},
        {"format_specifier", {"%s", "%n", "{0}"}},
        {"whitespace", {" ", "\t", "\n", "\r"}},
        {"punctuation", {"!", "@", "#", "$", "%", "&", "*"}},
    };
    auto it = tables.find(class_name);
    if (it == tables.end()) {
        throw std::invalid_argument("unknown charset class: " + class_name);
    }
    return it->second;
}

bool is_charset_class(const std::string& class_name) {
    static const std::set<std::string> names = {
        "control", "null_byte", "emoji", "rtl_override", "combining",
        "sql_meta", "format_specifier", "whitespace", "punctuation"};
    return names.count(class_name) > 0;
}

std::optional<double> parse_decimal(const std::string& text) {
    std::string trimmed = trim(text);
    if (trimmed.empty()) return std::nullopt;
    const char* begin = trimmed.c_str();
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end != begin + trimmed.size()) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

std::string format_number(double value) {
    if (value == 0.0) value = 0.0;  // normalize -0
    if (value == std::floor(value) && std::abs(value) < 9.0e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(value));
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", value);
    return buf;
}

GeneratorProgram parse_program(const std::string& source) {
    GeneratorProgram program;
    program.batch_size = 0;  // 0 = not yet set
    bool have_rule = false, have_targets = false, have_batch = false;

    std::istringstream stream(source);
    std::string raw_line;
    int line_no = 0;
    while (std::getline(stream, raw_line)) {
        ++line_no;
        std::string line = trim(raw_line);
        if (line.empty() || line[0] == '#') continue;

        size_t colon = line.find(':');
        if (colon == std::string::npos) throw DslSyntaxError(line_no, "expected 'directive: ...'");
        std::string directive = trim(line.substr(0, colon));
        std::string rest = trim(line.substr(colon + 1));

        if (directive == "rule") {
            if (have_rule) throw DslSyntaxError(line_no, "duplicate rule line");
            if (rest.empty()) throw DslSyntaxError(line_no, "rule text is empty");
            program.rule = rest;
            have_rule = true;
        } else if (directive == "target") {
            if (have_targets) throw DslSyntaxError(line_no, "duplicate target line");
            for (const auto& id : split_commas(rest, line_no)) {
                if (id.empty()) throw DslSyntaxError(line_no, "empty target id");
                program.targets.push_back(id);
            }
            if (program.targets.empty()) throw DslSyntaxError(line_no, "target list is empty");
            std::set<std::string> unique(program.targets.begin(), program.targets.end());
            if (unique.size() != program.targets.size()) {
                throw DslSyntaxError(line_no, "duplicate target id");
            }
            have_targets = true;
        } else if (directive == "base") {
            size_t eq = rest.find('=');
            if (eq == std::string::npos) throw DslSyntaxError(line_no, "expected 'base: id = \"...\"'");
            std::string id = trim(rest.substr(0, eq));
            std::string value = unquote(trim(rest.substr(eq + 1)), line_no);
            if (id.empty()) throw DslSyntaxError(line_no, "empty base id");
            if (program.base.count(id)) throw DslSyntaxError(line_no, "duplicate base for " + id);
            program.base[id] = value;
        } else if (directive == "op") {
            OpCall call;
            call.line = line_no;
            size_t paren = rest.find('(');
            if (paren == std::string::npos) {
                call.name = rest;
            } else {
                if (rest.back() != ')') throw DslSyntaxError(line_no, "missing closing ')'");
                call.name = trim(rest.substr(0, paren));
                std::string arg_text = rest.substr(paren + 1, rest.size() - paren - 2);
                for (const auto& piece : split_commas(arg_text, line_no)) {
                    if (piece.empty()) throw DslSyntaxError(line_no, "empty argument");
                    size_t eq = std::string::npos;
                    if (piece.front() != '"') eq = piece.find('=');
                    if (eq == std::string::npos) {
                        call.args.emplace_back("", piece);
                    } else {
                        call.args.emplace_back(trim(piece.substr(0, eq)),
                                               trim(piece.substr(eq + 1)));
                    }
                }
            }
            if (call.name.empty()) throw DslSyntaxError(line_no, "missing op name");
            program.ops.push_back(std::move(call));
        } else if (directive == "axis") {
            if (program.axis) throw DslSyntaxError(line_no, "duplicate axis line");
            // axis: $NAME in [v1, v2, ...]
            size_t in_pos = rest.find(" in ");
            if (rest.empty() || rest[0] != '$' || in_pos == std::string::npos) {
                throw DslSyntaxError(line_no, "expected 'axis: $NAME in [v1, v2, ...]'");
            }
            Axis axis;
            axis.var = trim(rest.substr(1, in_pos - 1));
            if (axis.var.empty()) throw DslSyntaxError(line_no, "empty axis variable");
            std::string list = trim(rest.substr(in_pos + 4));
            if (list.size() < 2 || list.front() != '[' || list.back() != ']') {
                throw DslSyntaxError(line_no, "axis values must be in [...]");
            }
            for (const auto& value : split_commas(list.substr(1, list.size() - 2), line_no)) {
                if (value.empty()) throw DslSyntaxError(line_no, "empty axis value");
                axis.values.push_back(value);
            }
            if (axis.values.empty()) throw DslSyntaxError(line_no, "axis value list is empty");
            program.axis = std::move(axis);
        } else if (directive == "batch") {
            if (have_batch) throw DslSyntaxError(line_no, "duplicate batch line");
            long n = as_count(rest, line_no);
            if (n < 1) throw DslSyntaxError(line_no, "batch must be >= 1");
            program.batch_size = static_cast<int>(n);
            have_batch = true;
        } else {
            throw DslSyntaxError(line_no, "unknown directive '" + directive + "'");
        }
    }

    if (!have_rule) throw DslSyntaxError(line_no, "missing rule line");
    if (!have_targets) throw DslSyntaxError(line_no, "missing target line");
    if (!have_batch) program.batch_size = kDefaultBatchSize;

    for (const auto& target : program.targets) {
        if (!program.base.count(target)) {
            throw UnboundWidget(line_no, "target '" + target + "' has no base value");
        }
    }
    for (const auto& [id, value] : program.base) {
        if (std::find(program.targets.begin(), program.targets.end(), id) ==
            program.targets.end()) {
            throw UnboundWidget(line_no, "base widget '" + id + "' is not a target");
        }
    }
    if (program.ops.size() > static_cast<size_t>(kMaxOpsPerProgram)) {
        throw DslSyntaxError(line_no, "too many ops (limit " +
                                          std::to_string(kMaxOpsPerProgram) + ")");
    }

    if (program.axis) {
        int refs = count_axis_references(program.ops, program.axis->var);
        if (refs != 1) {
            throw DslSyntaxError(line_no, "axis variable $" + program.axis->var +
                                              " must appear exactly once among op args");
        }
        // type-check every axis value against the op signatures
        for (const auto& value : program.axis->values) {
            for (const auto& op : program.ops) {
                resolve_op(op, program.targets, program.axis->var, value);
            }
        }
    } else {
        for (const auto& op : program.ops) {
            for (const auto& [key, value] : op.args) {
                if (!value.empty() && value[0] == '$') {
                    throw DslSyntaxError(op.line, "axis variable used without axis line");
                }
            }
            resolve_op(op, program.targets, "", "");
        }
    }
    return program;
}

std::string pretty_print(const GeneratorProgram& program) {
    std::ostringstream out;
    out << "rule: " << program.rule << "\n";
    out << "target: ";
    for (size_t i = 0; i < program.targets.size(); ++i) {
        if (i > 0) out << ", ";
        out << program.targets[i];
    }
    out << "\n";
    for (const auto& target : program.targets) {
        out << "base: " << target << " = " << quote(program.base.at(target)) << "\n";
    }
    for (const auto& op : program.ops) {
        out << "op: " << op.name << "(";
        for (size_t i = 0; i < op.args.size(); ++i) {
            if (i > 0) out << ", ";
            if (!op.args[i].first.empty()) out << op.args[i].first << "=";
            out << op.args[i].second;
        }
        out << ")\n";
    }
    if (program.axis) {
        out << "axis: $" << program.axis->var << " in [";
        for (size_t i = 0; i < program.axis->values.size(); ++i) {
            if (i > 0) out << ", ";
            out << program.axis->values[i];
        }
        out << "]\n";
    }
    out << "batch: " << program.batch_size << "\n";
    return out.str();
}

std::vector<UnusualInput> execute_program(const GeneratorProgram& program) {
    std::vector<std::string> axis_values =
        program.axis ? program.axis->values : std::vector<std::string>{""};
    const std::string axis_var = program.axis ? program.axis->var : "";

    std::vector<UnusualInput> batch;
    std::set<std::map<std::string, std::string>> seen;
    for (const auto& axis_value : axis_values) {
        if (batch.size() >= static_cast<size_t>(program.batch_size)) break;
        UnusualInput input;
        input.rule = program.rule;
        input.axis_value = program.axis ? axis_value : "";
        input.assignment = program.base;
        for (const auto& call : program.ops) {
            ResolvedOp op = resolve_op(call, program.targets, axis_var, axis_value);
            apply_op(op, call, program.targets, input.assignment, input.op_trace);
        }
        for (auto& [id, value] : input.assignment) cap_length(value);
        if (seen.insert(input.assignment).second) batch.push_back(std::move(input));
    }
    return batch;
}

}  // namespace widgetfuzz::dsl
