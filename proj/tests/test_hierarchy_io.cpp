#include <doctest.h>

#include <random>

#include "widgetfuzz/hierarchy_io.hpp"

using namespace widgetfuzz;

namespace {

const char* kSnapshot = R"json({
  "app_name": "fontpad",
  "activity_name": "MainActivity",
  "root": {
    "class": "android.widget.FrameLayout",
    "bounds": [0, 0, 1080, 1920],
    "children": [
      {"class": "android.widget.LinearLayout", "bounds": [0, 100, 1080, 190],
       "children": [
         {"class": "android.widget.TextView", "text": "Size (pt)",
          "bounds": [0, 100, 200, 190]},
         {"class": "android.widget.EditText", "resource_id": "w_size",
          "hint": "Font Size", "bounds": [210, 100, 1080, 190]}
       ]},
      {"class": "android.widget.Button", "text": "Apply",
       "bounds": [0, 300, 1080, 390]}
    ]
  }
})json";

GuiPage random_page(std::mt19937& rng) {
    GuiPage page;
    page.app_name = "randapp";
    page.activity_name = "RandActivity";
    page.root = {"android.widget.FrameLayout", "", "", "", {0, 0, 1080, 1920}, {}};
    std::uniform_int_distribution<int> child_count(0, 4);
    std::uniform_int_distribution<int> coord(0, 500);
    int n = child_count(rng);
    for (int i = 0; i < n; ++i) {
        int left = coord(rng), top = coord(rng);
        ViewNode node{"android.widget.TextView", "id" + std::to_string(rng() % 6),
                      "text" + std::to_string(rng() % 6), "",
                      {left, top, left + 1 + coord(rng), top + 1 + coord(rng)}, {}};
        int m = child_count(rng) / 2;
        for (int j = 0; j < m; ++j) {
            int l2 = coord(rng), t2 = coord(rng);
            node.children.push_back({"android.widget.EditText", "", "", "h",
                                     {l2, t2, l2 + 10, t2 + 10}, {}});
        }
        page.root.children.push_back(std::move(node));
    }
    return page;
}

bool nodes_equal(const ViewNode& a, const ViewNode& b) {
    if (a.node_class != b.node_class || a.resource_id != b.resource_id || a.text != b.text ||
        a.hint_text != b.hint_text || !(a.bounds == b.bounds) ||
        a.children.size() != b.children.size()) {
        return false;
    }
    for (size_t i = 0; i < a.children.size(); ++i) {
        if (!nodes_equal(a.children[i], b.children[i])) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("parse_hierarchy reads the snapshot schema") {
    GuiPage page = parse_hierarchy(kSnapshot);
    CHECK(page.app_name == "fontpad");
    CHECK(page.activity_name == "MainActivity");
    CHECK(page.root.children.size() == 2);
    CHECK(page.root.children[0].children[1].resource_id == "w_size");
    CHECK(page.root.children[0].children[1].hint_text == "Font Size");
    CHECK(page.root.children[0].children[0].bounds == Bounds{0, 100, 200, 190});
}

TEST_CASE("parse_hierarchy rejects malformed snapshots") {
    CHECK_THROWS_AS(parse_hierarchy("not json"), MalformedSnapshot);
    CHECK_THROWS_AS(parse_hierarchy("[1,2]"), MalformedSnapshot);
    CHECK_THROWS_AS(parse_hierarchy(R"({"app_name":"a","activity_name":"b"})"),
                    MalformedSnapshot);
    CHECK_THROWS_AS(parse_hierarchy(R"({"app_name":"","activity_name":"b","root":{}})"),
                    MalformedSnapshot);
    // degenerate bounds (right < left)
    CHECK_THROWS_AS(
        parse_hierarchy(
            R"({"app_name":"a","activity_name":"b","root":{"bounds":[10,0,0,5]}})"),
        MalformedSnapshot);
    // bounds with the wrong arity
    CHECK_THROWS_AS(
        parse_hierarchy(
            R"({"app_name":"a","activity_name":"b","root":{"bounds":[1,2,3]}})"),
        MalformedSnapshot);
}

TEST_CASE("serialize then parse is the identity on random pages") {
    std::mt19937 rng(1234);
    for (int i = 0; i < 200; ++i) {
        GuiPage page = random_page(rng);
        GuiPage round = parse_hierarchy(serialize_hierarchy(page));
        CHECK(round.app_name == page.app_name);
        CHECK(round.activity_name == page.activity_name);
        REQUIRE(nodes_equal(round.root, page.root));
    }
}

TEST_CASE("identify_input_widgets finds inputs by class or hint") {
    GuiPage page = parse_hierarchy(kSnapshot);
    auto widgets = identify_input_widgets(page);
    REQUIRE(widgets.size() == 1);
    CHECK(widgets[0].widget_id == "MainActivity/w_size");
    CHECK(widgets[0].descriptor == "Font Size");
    CHECK(widgets[0].node_path == NodePath{0, 1});
}

TEST_CASE("descriptor falls back from hint to resource_id to text to class") {
    GuiPage page;
    page.app_name = "a";
    page.activity_name = "A";
    page.root = {"root", "", "", "", {0, 0, 100, 100}, {}};
    page.root.children.push_back({"x.EditText", "", "", "", {0, 0, 10, 10}, {}});
    page.root.children.push_back({"x.EditText", "", "label", "", {0, 20, 10, 30}, {}});
    page.root.children.push_back({"x.EditText", "rid", "label", "", {0, 40, 10, 50}, {}});
    page.root.children.push_back({"x.EditText", "rid2", "label", "the hint",
                                  {0, 60, 10, 70}, {}});
    auto widgets = identify_input_widgets(page);
    REQUIRE(widgets.size() == 4);
    CHECK(widgets[0].descriptor == "x.EditText");
    CHECK(widgets[1].descriptor == "label");
    CHECK(widgets[2].descriptor == "rid");
    CHECK(widgets[3].descriptor == "the hint");
    CHECK(widgets[0].widget_id == "A/idx.0");
}

TEST_CASE("extract_widget_context collects aligned and sibling texts") {
    GuiPage page = parse_hierarchy(kSnapshot);
    auto widgets = identify_input_widgets(page);
    WidgetContext context = extract_widget_context(page, widgets[0]);
    CHECK(context.app_name == "fontpad");
    CHECK(context.page_name == "MainActivity");
    CHECK(context.input_widget == "Font Size");
    // the label shares the horizontal axis; the button does not
    CHECK(context.nearby_widgets.find("Size (pt)") != std::string::npos);
    CHECK(context.nearby_widgets.find("Apply") == std::string::npos);
}

TEST_CASE("extract_widget_context rejects a widget from another page") {
    GuiPage page = parse_hierarchy(kSnapshot);
    InputWidget ghost;
    ghost.widget_id = "MainActivity/ghost";
    ghost.descriptor = "ghost";
    ghost.node_path = {0, 0};  // resolves, but descriptor does not match
    CHECK_THROWS_AS(extract_widget_context(page, ghost), WidgetNotInPage);
    ghost.node_path = {9};  // does not resolve at all
    CHECK_THROWS_AS(extract_widget_context(page, ghost), WidgetNotInPage);
}

TEST_CASE("diff_pages returns the texts of new nodes only") {
    GuiPage before = parse_hierarchy(kSnapshot);
    GuiPage after = before;
    CHECK(!diff_pages(before, after, "x").has_value());

    after.root.children.push_back({"android.widget.TextView", "err",
                                   "please enter a number", "", {0, 500, 1080, 560}, {}});
    auto hint = diff_pages(before, after, "abc");
    REQUIRE(hint.has_value());
    CHECK(hint->hint == "please enter a number");
    CHECK(hint->provoking_input == "abc");
}

TEST_CASE("diff_pages identity is class, resource_id, and bounds") {
    GuiPage before = parse_hierarchy(kSnapshot);
    GuiPage after = before;
    // same identity, different text: not reported as new
    after.root.children[1].text = "Different";
    CHECK(!diff_pages(before, after, "").has_value());
    // moved node is a new identity
    after.root.children[1].bounds.top += 5;
    after.root.children[1].bounds.bottom += 5;
    auto hint = diff_pages(before, after, "");
    REQUIRE(hint.has_value());
    CHECK(hint->hint == "Different");
}

TEST_CASE("diff_pages joins multiple new texts and counts duplicates") {
    GuiPage before = parse_hierarchy(kSnapshot);
    GuiPage after = before;
    after.root.children.push_back({"t", "", "first", "", {0, 500, 10, 510}, {}});
    after.root.children.push_back({"t", "", "second", "", {0, 520, 10, 530}, {}});
    auto hint = diff_pages(before, after, "");
    REQUIRE(hint.has_value());
    CHECK(hint->hint == "first; second");

    // a duplicated identical node counts beyond the before multiset
    GuiPage dup = before;
    dup.root.children.push_back(before.root.children[1]);
    auto dup_hint = diff_pages(before, dup, "");
    REQUIRE(dup_hint.has_value());
    CHECK(dup_hint->hint == "Apply");
}

TEST_CASE("diff_pages never reports removed-only changes") {
    std::mt19937 rng(99);
    for (int i = 0; i < 100; ++i) {
        GuiPage before = random_page(rng);
        GuiPage after = before;
        if (!after.root.children.empty()) after.root.children.pop_back();
        CHECK(!diff_pages(before, after, "").has_value());
    }
}
