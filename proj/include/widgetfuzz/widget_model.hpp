#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace widgetfuzz {

struct Bounds {
    int left = 0;
    int top = 0;
    int right = 0;
    int bottom = 0;

    bool valid() const { return left <= right && top <= bottom; }
    int height() const { return bottom - top; }

    friend bool operator==(const Bounds&, const Bounds&) = default;
};

// One node of a view-hierarchy dump. String fields default to "".
struct ViewNode {
    std::string node_class;
    std::string resource_id;
    std::string text;
    std::string hint_text;
    Bounds bounds;
    std::vector<ViewNode> children;
};

constexpr int kMaxTreeDepth = 100;

struct GuiPage {
    std::string app_name;
    std::string activity_name;
    ViewNode root;
};

// Index path from the root: node = root, then node = node.children[i] per step.
using NodePath = std::vector<int>;

struct InputWidget {
    std::string widget_id;
    std::string descriptor;  // first non-empty of hint_text, resource_id, text
    NodePath node_path;
};

struct WidgetContext {
    std::string app_name;
    std::string page_name;
    std::string input_widget;   // descriptor
    std::string nearby_widgets; // ';'-joined texts
    std::string dynamic_hint;
    std::string hint_provoking_input;
};

enum class ConstraintCategory { intra_explicit, intra_implicit, inter };

struct ConstraintCatalogEntry {
    ConstraintCategory category;
    std::string description;
};

// Fixed catalog of candidate constraints: 5 explicit intra, 5 implicit intra,
// 7 inter entries.
const std::vector<ConstraintCatalogEntry>& constraint_catalog();

std::vector<ConstraintCatalogEntry> catalog_entries(ConstraintCategory category);

// Resolves a node path inside a page; throws std::out_of_range when the path
// does not exist.
const ViewNode& resolve_path(const GuiPage& page, const NodePath& path);

std::string widget_id_for(const std::string& activity_name,
                          const std::string& resource_id,
                          const NodePath& path);

}  // namespace widgetfuzz
