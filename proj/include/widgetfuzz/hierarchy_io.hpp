#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "widgetfuzz/widget_model.hpp"

namespace widgetfuzz {

struct MalformedSnapshot : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WidgetNotInPage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DynamicHint {
    std::string hint;
    std::string provoking_input;
};

// Page-snapshot schema (JSON): {app_name, activity_name, root} with node
// objects {class, resource_id, text, hint, bounds:[l,t,r,b], children:[...]}.
// Missing string fields become "".
GuiPage parse_hierarchy(const std::string& snapshot);
std::string serialize_hierarchy(const GuiPage& page);

// Pre-order walk; a node is an input widget when its class contains one of
// the input keywords or its hint text is non-empty.
std::vector<InputWidget> identify_input_widgets(const GuiPage& page);

WidgetContext extract_widget_context(const GuiPage& page, const InputWidget& widget);

// Texts of nodes present in `after` but not in `before`, joined with "; ".
// Node identity is (class, resource_id, bounds).
std::optional<DynamicHint> diff_pages(const GuiPage& before, const GuiPage& after,
                                      const std::string& provoking_input);

}  // namespace widgetfuzz
