#include "widgetfuzz/example_store.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace widgetfuzz {

namespace {

using nlohmann::json;

// FNV-1a, 64-bit
uint64_t fnv1a(const std::string& token) {
    uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : token) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

}  // namespace

ContextEmbedding embed(const std::string& context_text) {
    ContextEmbedding vec{};
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        uint64_t hash = fnv1a(token);
        int bucket = static_cast<int>(hash % kEmbeddingDim);
        double sign = ((hash >> 32) & 1) ? 1.0 : -1.0;
        vec[bucket] += sign;
        token.clear();
    };
    for (unsigned char c : context_text) {
        if (std::isalnum(c)) {
            token += static_cast<char>(std::tolower(c));
        } else {
            flush();
        }
    }
    flush();

    double norm = std::sqrt(std::inner_product(vec.begin(), vec.end(), vec.begin(), 0.0));
    if (norm > 0.0) {
        for (double& v : vec) v /= norm;
    }
    return vec;
}

double cosine_similarity(const ContextEmbedding& a, const ContextEmbedding& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (int i = 0; i < kEmbeddingDim; ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::string context_query_text(const WidgetContext& context) {
    return context.app_name + " " + context.page_name + " " + context.input_widget + " " +
           context.nearby_widgets;
}

std::string record_to_json_line(const ExampleRecord& record) {
    json obj;
    obj["record_id"] = record.record_id;
    obj["source"] = record.source == RecordSource::seed ? "seed" : "runtime";
    obj["context"] = {{"app_name", record.context.app_name},
                      {"page_name", record.context.page_name},
                      {"input_widget", record.context.input_widget},
                      {"nearby_widgets", record.context.nearby_widgets},
                      {"dynamic_hint", record.context.dynamic_hint}};
    if (record.mutation_rule) {
        obj["mutation_rule"] = *record.mutation_rule;
    } else {
        obj["mutation_rule"] = nullptr;
    }
    obj["buggy_input"] = record.buggy_input;
    return obj.dump();
}

ExampleRecord record_from_json_line(const std::string& line, size_t line_no) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw MalformedRecord("record " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    try {
        ExampleRecord record;
        record.record_id = obj.value("record_id", 0L);
        std::string source = obj.value("source", "seed");
        record.source = source == "runtime" ? RecordSource::runtime : RecordSource::seed;
        const auto& ctx = obj.at("context");
        record.context.app_name = ctx.value("app_name", "");
        record.context.page_name = ctx.value("page_name", "");
        record.context.input_widget = ctx.value("input_widget", "");
        record.context.nearby_widgets = ctx.value("nearby_widgets", "");
        record.context.dynamic_hint = ctx.value("dynamic_hint", "");
        if (obj.contains("mutation_rule") && !obj["mutation_rule"].is_null()) {
            record.mutation_rule = obj["mutation_rule"].get<std::string>();
        }
        record.buggy_input = obj.at("buggy_input").get<std::string>();
        if (record.buggy_input.empty()) {
            throw MalformedRecord("record " + std::to_string(line_no) + ": empty buggy_input");
        }
        return record;
    } catch (const json::exception& e) {
        throw MalformedRecord("record " + std::to_string(line_no) + ": " + e.what());
    }
}

ExampleStore ExampleStore::open(const std::string& path) {
    ExampleStore store = load_seed_dataset(path);
    store.path_ = path;
    return store;
}

ExampleStore ExampleStore::load_seed_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedRecord("cannot open store file: " + path);

    ExampleStore store;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ExampleRecord record = record_from_json_line(line, line_no);
        record.record_id = static_cast<long>(store.records_.size()) + 1;
        store.embeddings_.push_back(store.embed_record(record));
        store.records_.push_back(std::move(record));
    }
    return store;
}

void ExampleStore::set_embedder(Embedder embedder) {
    embedder_ = std::move(embedder);
    embeddings_.clear();
    for (const auto& record : records_) {
        embeddings_.push_back(embed_record(record));
    }
}

ContextEmbedding ExampleStore::embed_record(const ExampleRecord& record) const {
    const std::string text = context_query_text(record.context);
    return embedder_ ? embedder_(text) : embed(text);
}

long ExampleStore::add_record(const WidgetContext& context, const std::string& mutation_rule,
                              const std::string& buggy_input) {
    ExampleRecord record;
    record.record_id = static_cast<long>(records_.size()) + 1;
    record.context = context;
    record.mutation_rule = mutation_rule;
    record.buggy_input = buggy_input;
    record.source = RecordSource::runtime;

    if (!path_.empty()) {
        std::ofstream out(path_, std::ios::app);
        if (!out) throw StorageFailure("cannot open store file for append: " + path_);
        out << record_to_json_line(record) << "\n";
        if (!out) throw StorageFailure("write failed: " + path_);
    }
    embeddings_.push_back(embed_record(record));
    records_.push_back(record);
    return record.record_id;
}

std::vector<ExampleRecord> ExampleStore::retrieve_top_k(const WidgetContext& query, int k) const {
    std::vector<ExampleRecord> top;
    for (auto& [score, record] : retrieve_top_k_scored(query, k)) {
        top.push_back(std::move(record));
    }
    return top;
}

std::vector<std::pair<double, ExampleRecord>> ExampleStore::retrieve_top_k_scored(
    const WidgetContext& query, int k) const {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    ContextEmbedding query_vec =
        embedder_ ? embedder_(context_query_text(query)) : embed(context_query_text(query));

    std::vector<std::pair<double, size_t>> scored;
    scored.reserve(records_.size());
    for (size_t i = 0; i < records_.size(); ++i) {
        scored.emplace_back(cosine_similarity(query_vec, embeddings_[i]), i);
    }
    // highest similarity first; ties go to the smaller record_id
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    std::vector<std::pair<double, ExampleRecord>> top;
    for (size_t i = 0; i < scored.size() && top.size() < static_cast<size_t>(k); ++i) {
        top.emplace_back(scored[i].first, records_[scored[i].second]);
    }
    return top;
}

}  // namespace widgetfuzz
