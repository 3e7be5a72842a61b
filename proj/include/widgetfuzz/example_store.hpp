#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "widgetfuzz/widget_model.hpp"

namespace widgetfuzz {

struct MalformedRecord : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StorageFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RecordSource { seed, runtime };

struct ExampleRecord {
    long record_id = 0;
    WidgetContext context;
    std::optional<std::string> mutation_rule;  // null for mined seed records
    std::string buggy_input;
    RecordSource source = RecordSource::seed;
};

constexpr int kEmbeddingDim = 300;
using ContextEmbedding = std::array<double, kEmbeddingDim>;

// Deterministic hashed bag-of-words embedding: lowercase, split on
// non-alphanumerics, signed hash into 300 buckets, L2-normalized.
// Zero vector only for text with no tokens.
ContextEmbedding embed(const std::string& context_text);

double cosine_similarity(const ContextEmbedding& a, const ContextEmbedding& b);

// Text fed to the embedder for a widget context.
std::string context_query_text(const WidgetContext& context);

using Embedder = std::function<ContextEmbedding(const std::string&)>;

// Append-only store persisted one JSON record per line. Single writer,
// concurrent readers of a loaded snapshot.
class ExampleStore {
public:
    ExampleStore() = default;

    // In-memory store persisted to `path` on every add.
    static ExampleStore open(const std::string& path);
    static ExampleStore load_seed_dataset(const std::string& path);

    long add_record(const WidgetContext& context, const std::string& mutation_rule,
                    const std::string& buggy_input);

    std::vector<ExampleRecord> retrieve_top_k(const WidgetContext& query, int k) const;
    std::vector<std::pair<double, ExampleRecord>> retrieve_top_k_scored(const WidgetContext& query,
                                                                        int k) const;

    const std::vector<ExampleRecord>& records() const { return records_; }
    size_t size() const { return records_.size(); }

    void set_embedder(Embedder embedder);

private:
    std::vector<ExampleRecord> records_;
    std::vector<ContextEmbedding> embeddings_;
    std::string path_;  // empty = in-memory only
    Embedder embedder_;

    ContextEmbedding embed_record(const ExampleRecord& record) const;
};

std::string record_to_json_line(const ExampleRecord& record);
ExampleRecord record_from_json_line(const std::string& line, size_t line_no);

}  // namespace widgetfuzz
