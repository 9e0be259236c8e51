#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "proxyforge/embedding.hpp"
#include "proxyforge/formats.hpp"

namespace proxyforge {

struct EvalItem {
    std::string sample_id;
    std::string class_id;
    Vec embedding;
    double min_side_px = 0.0;
    bool has_text = false; // class name contains "_text"

    static EvalItem from_record(const VectorRecord& r);
};

std::vector<EvalItem> items_from_records(const Dataset& records);

struct Prediction {
    std::string query_id;
    std::string true_class;
    std::string predicted_class;
};

struct RecallResult {
    double recall = 0.0;
    std::vector<Prediction> predictions;
};

// Partition recall values; a partition with no queries is absent rather
// than zero. predictions always covers the query-vs-gallery run.
struct EvalReport {
    std::optional<double> query_vs_gallery;
    std::optional<double> all_vs_all;
    std::optional<double> text;
    std::optional<double> small;
    std::optional<double> large;
    double nmi = 0.0;
    std::vector<Prediction> predictions;
};

// Per class, up to per_class items become queries and the rest gallery; at
// least one item per class stays in the gallery, singleton classes go
// entirely to the gallery. Deterministic under seed.
std::pair<std::vector<EvalItem>, std::vector<EvalItem>> split_query_gallery(
    const std::vector<EvalItem>& items, int per_class, std::uint64_t seed);

// Ranks the reference by normalized squared distance ascending, ties broken
// by ascending sample_id; a reference item sharing the query's sample_id is
// skipped (second-closest rule). Returns the winning item's class.
std::string nearest_neighbor(const EvalItem& query, const std::vector<EvalItem>& reference);

// Fraction of queries whose nearest reference neighbor has the true class,
// plus the per-query (true, predicted) pairs.
RecallResult recall_at_1(const std::vector<EvalItem>& queries,
                         const std::vector<EvalItem>& reference);

// query-vs-gallery, all-vs-all over the union, and text/small/large query
// subsets against the gallery; small means min_side_px <= small_max_px.
// NMI is computed over the union with k = number of distinct classes.
EvalReport partition_report(const std::vector<EvalItem>& queries,
                            const std::vector<EvalItem>& gallery, double small_max_px = 70.0,
                            std::uint64_t seed = 0);

// Seeded Lloyd k-means over the points (restarts, capped iterations);
// returns the assignment of the best restart by total inertia.
std::vector<int> kmeans_assign(const std::vector<Vec>& points, int k, int restarts, int max_iters,
                               std::uint64_t seed);

// Normalized mutual information (arithmetic-mean normalization) between two
// assignments of the same items.
double nmi_from_assignments(const std::vector<int>& a, const std::vector<int>& b);

// Clusters L2-normalized embeddings with k-means (k = num_clusters, 10
// restarts, up to 100 iterations) and scores the clustering against labels.
double nmi_score(const std::vector<Vec>& embeddings, const std::vector<std::string>& labels,
                 int num_clusters, std::uint64_t seed);

std::string report_to_json(const EvalReport& report, const std::string& config_hash_hex);

} // namespace proxyforge
