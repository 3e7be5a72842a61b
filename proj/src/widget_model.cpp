#include "widgetfuzz/widget_model.hpp"

#include <sstream>

namespace widgetfuzz {

const std::vector<ConstraintCatalogEntry>& constraint_catalog() {
    static const std::vector<ConstraintCatalogEntry> catalog = {
        // 5 explicit intra-widget constraints
        {ConstraintCategory::intra_explicit, "Pure text (without special characters)"},
        {ConstraintCategory::intra_explicit, "Pure digits (numbers only)"},
        {ConstraintCategory::intra_explicit, "Decimal number with fractional part allowed"},
        {ConstraintCategory::intra_explicit, "Date in a fixed format (YYYY-MM-DD)"},
        {ConstraintCategory::intra_explicit, "Currency amount with at most two decimals"},
        // 5 implicit intra-widget constraints
        {ConstraintCategory::intra_implicit, "Limited string length"},
        {ConstraintCategory::intra_implicit, "Required character classes (e.g. upper case, digit)"},
        {ConstraintCategory::intra_implicit, "Uniqueness (value already in use is rejected)"},
        {ConstraintCategory::intra_implicit, "Non-negative value"},
        {ConstraintCategory::intra_implicit, "Value inside a bounded range"},
        // 7 inter-widget constraints
        {ConstraintCategory::inter, "Less-than ordering between two fields (e.g. minimum < maximum)"},
        {ConstraintCategory::inter, "Sum of item fields equals a total field"},
        {ConstraintCategory::inter, "One date must be before another (e.g. departure before arrival)"},
        {ConstraintCategory::inter, "Confirmation field must equal the original field"},
        {ConstraintCategory::inter, "Two fields must not be equal"},
        {ConstraintCategory::inter, "A field is enabled only when another field is filled"},
        {ConstraintCategory::inter, "Format consistency across related fields"},
    };
    return catalog;
}

std::vector<ConstraintCatalogEntry> catalog_entries(ConstraintCategory category) {
    std::vector<ConstraintCatalogEntry> out;
    for (const auto& entry : constraint_catalog()) {
        if (entry.category == category) out.push_back(entry);
    }
    return out;
}

const ViewNode& resolve_path(const GuiPage& page, const NodePath& path) {
    const ViewNode* node = &page.root;
    for (int index : path) {
        if (index < 0 || static_cast<size_t>(index) >= node->children.size()) {
            throw std::out_of_range("node path does not resolve in page");
        }
        node = &node->children[static_cast<size_t>(index)];
    }
    return *node;
}

std::string widget_id_for(const std::string& activity_name,
                          const std::string& resource_id,
                          const NodePath& path) {
    if (!resource_id.empty()) {
        return activity_name + "/" + resource_id;
    }
    std::ostringstream id;
    id << activity_name << "/idx";
    for (int index : path) id << "." << index;
    return id.str();
}

}  // namespace widgetfuzz
