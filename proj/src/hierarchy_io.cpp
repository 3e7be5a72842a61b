#include "widgetfuzz/hierarchy_io.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

namespace widgetfuzz {

namespace {

using nlohmann::json;

const char* const kInputClassKeywords[] = {
    "EditText", "AutoCompleteTextView", "TextInputEditText", "SearchView"};

std::string get_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return "";
    if (!it->is_string()) throw MalformedSnapshot(std::string("field '") + key + "' is not a string");
    return it->get<std::string>();
}

ViewNode parse_node(const json& obj, int depth) {
    if (depth > kMaxTreeDepth) throw MalformedSnapshot("tree depth exceeds limit");
    if (!obj.is_object()) throw MalformedSnapshot("node is not an object");

    ViewNode node;
    node.node_class = get_string(obj, "class");
    node.resource_id = get_string(obj, "resource_id");
    node.text = get_string(obj, "text");
    node.hint_text = get_string(obj, "hint");

    if (auto it = obj.find("bounds"); it != obj.end() && !it->is_null()) {
        if (!it->is_array() || it->size() != 4) throw MalformedSnapshot("bounds must be [l,t,r,b]");
        for (const auto& v : *it) {
            if (!v.is_number_integer()) throw MalformedSnapshot("bounds must be integers");
        }
        node.bounds = {(*it)[0].get<int>(), (*it)[1].get<int>(), (*it)[2].get<int>(),
                       (*it)[3].get<int>()};
    }
    if (!node.bounds.valid()) throw MalformedSnapshot("degenerate bounds");

    if (auto it = obj.find("children"); it != obj.end() && !it->is_null()) {
        if (!it->is_array()) throw MalformedSnapshot("children must be an array");
        for (const auto& child : *it) {
            node.children.push_back(parse_node(child, depth + 1));
        }
    }
    return node;
}

json node_to_json(const ViewNode& node) {
    json obj;
    obj["class"] = node.node_class;
    obj["resource_id"] = node.resource_id;
    obj["text"] = node.text;
    obj["hint"] = node.hint_text;
    obj["bounds"] = {node.bounds.left, node.bounds.top, node.bounds.right, node.bounds.bottom};
    obj["children"] = json::array();
    for (const auto& child : node.children) {
        obj["children"].push_back(node_to_json(child));
    }
    return obj;
}

bool is_input_node(const ViewNode& node) {
    for (const char* keyword : kInputClassKeywords) {
        if (node.node_class.find(keyword) != std::string::npos) return true;
    }
    return !node.hint_text.empty();
}

std::string descriptor_of(const ViewNode& node) {
    if (!node.hint_text.empty()) return node.hint_text;
    if (!node.resource_id.empty()) return node.resource_id;
    if (!node.text.empty()) return node.text;
    return node.node_class;
}

std::string text_or_id(const ViewNode& node) {
    return node.text.empty() ? node.resource_id : node.text;
}

void walk(const ViewNode& node, NodePath& path,
          const std::function<void(const ViewNode&, const NodePath&)>& visit) {
    visit(node, path);
    for (size_t i = 0; i < node.children.size(); ++i) {
        path.push_back(static_cast<int>(i));
        walk(node.children[i], path, visit);
        path.pop_back();
    }
}

// Vertical intervals overlap by at least half the smaller height.
bool same_horizontal_axis(const Bounds& a, const Bounds& b) {
    int overlap = std::min(a.bottom, b.bottom) - std::max(a.top, b.top);
    int smaller = std::min(a.height(), b.height());
    if (smaller <= 0) return overlap >= 0;
    return overlap * 2 >= smaller;
}

void collect_leaves(const ViewNode& node, const ViewNode* exclude,
                    std::vector<const ViewNode*>& out) {
    if (node.children.empty()) {
        if (&node != exclude) out.push_back(&node);
        return;
    }
    for (const auto& child : node.children) collect_leaves(child, exclude, out);
}

using NodeIdentity = std::tuple<std::string, std::string, int, int, int, int>;

NodeIdentity identity_of(const ViewNode& node) {
    return {node.node_class, node.resource_id, node.bounds.left, node.bounds.top,
            node.bounds.right, node.bounds.bottom};
}

}  // namespace

GuiPage parse_hierarchy(const std::string& snapshot) {
    json doc;
    try {
        doc = json::parse(snapshot);
    } catch (const json::parse_error& e) {
        throw MalformedSnapshot(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw MalformedSnapshot("top level must be an object");

    GuiPage page;
    page.app_name = get_string(doc, "app_name");
    page.activity_name = get_string(doc, "activity_name");
    if (page.app_name.empty() || page.activity_name.empty()) {
        throw MalformedSnapshot("app_name and activity_name must be non-empty");
    }
    auto it = doc.find("root");
    if (it == doc.end()) throw MalformedSnapshot("missing root node");
    page.root = parse_node(*it, 1);
    return page;
}

std::string serialize_hierarchy(const GuiPage& page) {
    json doc;
    doc["app_name"] = page.app_name;
    doc["activity_name"] = page.activity_name;
    doc["root"] = node_to_json(page.root);
    return doc.dump(2);
}

std::vector<InputWidget> identify_input_widgets(const GuiPage& page) {
    std::vector<InputWidget> widgets;
    NodePath path;
    walk(page.root, path, [&](const ViewNode& node, const NodePath& p) {
        if (!is_input_node(node)) return;
        InputWidget widget;
        widget.descriptor = descriptor_of(node);
        widget.node_path = p;
        widget.widget_id = widget_id_for(page.activity_name, node.resource_id, p);
        widgets.push_back(std::move(widget));
    });
    return widgets;
}

WidgetContext extract_widget_context(const GuiPage& page, const InputWidget& widget) {
    const ViewNode* target = nullptr;
    try {
        target = &resolve_path(page, widget.node_path);
    } catch (const std::out_of_range&) {
        throw WidgetNotInPage("widget path does not resolve: " + widget.widget_id);
    }
    if (descriptor_of(*target) != widget.descriptor) {
        throw WidgetNotInPage("widget does not match page node: " + widget.widget_id);
    }

    std::vector<std::string> nearby;
    std::set<std::string> seen;
    auto add = [&](const std::string& text) {
        if (text.empty() || text == widget.descriptor) return;
        if (seen.insert(text).second) nearby.push_back(text);
    };

    const ViewNode* parent = nullptr;
    if (!widget.node_path.empty()) {
        NodePath parent_path(widget.node_path.begin(), widget.node_path.end() - 1);
        parent = &resolve_path(page, parent_path);
        add(text_or_id(*parent));
        std::vector<const ViewNode*> leaves;
        collect_leaves(*parent, target, leaves);
        for (const ViewNode* leaf : leaves) add(text_or_id(*leaf));
    }

    NodePath path;
    walk(page.root, path, [&](const ViewNode& node, const NodePath&) {
        if (&node == target || &node == parent) return;
        if (same_horizontal_axis(node.bounds, target->bounds)) add(text_or_id(node));
    });

    WidgetContext context;
    context.app_name = page.app_name;
    context.page_name = page.activity_name;
    context.input_widget = widget.descriptor;
    for (size_t i = 0; i < nearby.size(); ++i) {
        if (i > 0) context.nearby_widgets += ";";
        context.nearby_widgets += nearby[i];
    }
    return context;
}

std::optional<DynamicHint> diff_pages(const GuiPage& before, const GuiPage& after,
                                      const std::string& provoking_input) {
    std::map<NodeIdentity, int> known;
    NodePath path;
    walk(before.root, path, [&](const ViewNode& node, const NodePath&) {
        known[identity_of(node)]++;
    });

    std::vector<std::string> texts;
    walk(after.root, path, [&](const ViewNode& node, const NodePath&) {
        auto it = known.find(identity_of(node));
        if (it != known.end() && it->second > 0) {
            it->second--;
            return;
        }
        if (!node.text.empty()) texts.push_back(node.text);
    });

    if (texts.empty()) return std::nullopt;
    DynamicHint hint;
    for (size_t i = 0; i < texts.size(); ++i) {
        if (i > 0) hint.hint += "; ";
        hint.hint += texts[i];
    }
    hint.provoking_input = provoking_input;
    return hint;
}

}  // namespace widgetfuzz
