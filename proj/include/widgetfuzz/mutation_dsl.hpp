#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace widgetfuzz::dsl {

struct DslError : std::runtime_error {
    int line;
    DslError(int line_, const std::string& reason)
        : std::runtime_error("line " + std::to_string(line_) + ": " + reason), line(line_) {}
};

struct DslSyntaxError : DslError {
    using DslError::DslError;
};

struct UnknownOp : DslError {
    using DslError::DslError;
};

struct UnboundWidget : DslError {
    using DslError::DslError;
};

constexpr int kMaxOpsPerProgram = 32;
constexpr size_t kMaxInputLength = 65536;
constexpr int kDefaultBatchSize = 10;

// One parsed `op:` line. Arguments are kept as source tokens (quoted strings
// keep their quotes) so pretty-printing is the exact inverse of parsing.
struct OpCall {
    std::string name;
    // key is "" for positional arguments
    std::vector<std::pair<std::string, std::string>> args;
    int line = 0;

    friend bool operator==(const OpCall& a, const OpCall& b) {
        return a.name == b.name && a.args == b.args;
    }
};

struct Axis {
    std::string var;  // without the leading '$'
    std::vector<std::string> values;

    friend bool operator==(const Axis&, const Axis&) = default;
};

struct GeneratorProgram {
    std::string rule;
    std::vector<std::string> targets;
    std::map<std::string, std::string> base;
    std::vector<OpCall> ops;
    std::optional<Axis> axis;
    int batch_size = kDefaultBatchSize;

    friend bool operator==(const GeneratorProgram&, const GeneratorProgram&) = default;
};

struct UnusualInput {
    std::map<std::string, std::string> assignment;
    std::string rule;
    std::vector<std::string> op_trace;
    std::string axis_value;  // "" when the program has no axis
};

GeneratorProgram parse_program(const std::string& source);
std::string pretty_print(const GeneratorProgram& program);

// Pure and total: numeric ops on non-numeric values are skipped and recorded
// in the op trace; every value is capped at kMaxInputLength.
std::vector<UnusualInput> execute_program(const GeneratorProgram& program);

// Deterministic character tables used by charset_inject and by the
// simulator's contains_class predicate.
const std::vector<std::string>& charset_table(const std::string& class_name);
bool is_charset_class(const std::string& class_name);

std::optional<double> parse_decimal(const std::string& text);
std::string format_number(double value);

}  // namespace widgetfuzz::dsl
