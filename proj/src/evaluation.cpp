#include "proxyforge/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "json.hpp"
#include "proxyforge/errors.hpp"
#include "proxyforge/rng.hpp"
#include "proxyforge/util.hpp"

namespace proxyforge {

EvalItem EvalItem::from_record(const VectorRecord& r) {
    EvalItem item;
    item.sample_id = r.id;
    item.class_id = r.class_name;
    item.embedding = r.vec;
    item.min_side_px = r.min_side_px;
    item.has_text = r.class_name.find("_text") != std::string::npos;
    return item;
}

std::vector<EvalItem> items_from_records(const Dataset& records) {
    std::vector<EvalItem> items;
    items.reserve(records.size());
    for (const auto& r : records) items.push_back(EvalItem::from_record(r));
    return items;
}

namespace {

void check_unique_ids(const std::vector<EvalItem>& items, const char* what) {
    std::set<std::string> seen;
    for (const auto& item : items) {
        if (!seen.insert(item.sample_id).second) {
            throw ValidationError(std::string(what) + ": duplicate sample id " + item.sample_id);
        }
    }
}

} // namespace

std::pair<std::vector<EvalItem>, std::vector<EvalItem>> split_query_gallery(
    const std::vector<EvalItem>& items, int per_class, std::uint64_t seed) {
    if (items.empty()) throw EmptySetError("split_query_gallery: no items");
    if (per_class < 1) throw ValidationError("split_query_gallery: per_class must be >= 1");
    check_unique_ids(items, "split_query_gallery");

    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < items.size(); ++i) by_class[items[i].class_id].push_back(i);

    std::vector<bool> is_query(items.size(), false);
    for (const auto& [class_id, indices] : by_class) {
        if (indices.size() < 2) continue; // singleton classes stay in the gallery
        const std::size_t want =
            std::min<std::size_t>(static_cast<std::size_t>(per_class), indices.size() - 1);
        Rng rng(derive_seed(seed, "qsplit:" + class_id));
        for (std::size_t pick : rng.choose(indices.size(), want)) is_query[indices[pick]] = true;
    }

    std::vector<EvalItem> queries, gallery;
    for (std::size_t i = 0; i < items.size(); ++i) {
        (is_query[i] ? queries : gallery).push_back(items[i]);
    }
    return {std::move(queries), std::move(gallery)};
}

std::string nearest_neighbor(const EvalItem& query, const std::vector<EvalItem>& reference) {
    if (reference.empty()) throw EmptyReferenceError("nearest_neighbor: empty reference set");
    const EvalItem* best = nullptr;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& ref : reference) {
        if (ref.sample_id == query.sample_id) continue; // second-closest rule
        const double d = proxy_distance(query.embedding, ref.embedding);
        if (best == nullptr || d < best_dist || (d == best_dist && ref.sample_id < best->sample_id)) {
            best = &ref;
            best_dist = d;
        }
    }
    if (best == nullptr) {
        throw EmptyReferenceError("nearest_neighbor: no reference item besides the query itself");
    }
    return best->class_id;
}

RecallResult recall_at_1(const std::vector<EvalItem>& queries,
                         const std::vector<EvalItem>& reference) {
    RecallResult result;
    if (queries.empty()) throw EmptySetError("recall_at_1: no queries");
    result.predictions.reserve(queries.size());
    std::size_t hits = 0;
    for (const auto& q : queries) {
        std::string predicted = nearest_neighbor(q, reference);
        if (predicted == q.class_id) ++hits;
        result.predictions.push_back({q.sample_id, q.class_id, std::move(predicted)});
    }
    result.recall = static_cast<double>(hits) / static_cast<double>(queries.size());
    return result;
}

namespace {

std::optional<double> subset_recall(const std::vector<EvalItem>& queries,
                                    const std::vector<EvalItem>& reference,
                                    std::vector<Prediction>* predictions_out = nullptr) {
    if (queries.empty() || reference.empty()) return std::nullopt;
    // A single item querying only itself has no admissible neighbor.
    if (reference.size() == 1 && queries.size() == 1 &&
        queries.front().sample_id == reference.front().sample_id) {
        return std::nullopt;
    }
    RecallResult r = recall_at_1(queries, reference);
    if (predictions_out) *predictions_out = std::move(r.predictions);
    return r.recall;
}

} // namespace

EvalReport partition_report(const std::vector<EvalItem>& queries,
                            const std::vector<EvalItem>& gallery, double small_max_px,
                            std::uint64_t seed) {
    check_unique_ids(queries, "partition_report queries");
    check_unique_ids(gallery, "partition_report gallery");

    EvalReport report;
    report.query_vs_gallery = subset_recall(queries, gallery, &report.predictions);

    std::vector<EvalItem> united = queries;
    united.insert(united.end(), gallery.begin(), gallery.end());
    report.all_vs_all = subset_recall(united, united);

    std::vector<EvalItem> text_q, small_q, large_q;
    for (const auto& q : queries) {
        if (q.has_text) text_q.push_back(q);
        (q.min_side_px <= small_max_px ? small_q : large_q).push_back(q);
    }
    report.text = subset_recall(text_q, gallery);
    report.small = subset_recall(small_q, gallery);
    report.large = subset_recall(large_q, gallery);

    if (!united.empty()) {
        std::vector<Vec> embeddings;
        std::vector<std::string> labels;
        embeddings.reserve(united.size());
        labels.reserve(united.size());
        for (const auto& item : united) {
            embeddings.push_back(item.embedding);
            labels.push_back(item.class_id);
        }
        std::set<std::string> classes(labels.begin(), labels.end());
        report.nmi = nmi_score(embeddings, labels, static_cast<int>(classes.size()),
                               derive_seed(seed, "nmi"));
    }
    return report;
}

namespace {

double sq_dist(const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

// One Lloyd run from a random distinct-point initialization. Returns total
// inertia; assignment written in place.
double kmeans_once(const std::vector<Vec>& points, int k, int max_iters, Rng& rng,
                   std::vector<int>& assign) {
    const std::size_t n = points.size();
    const std::size_t dim = points.front().size();
    std::vector<Vec> centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    for (std::size_t pick : rng.choose(n, static_cast<std::size_t>(k))) {
        centroids.push_back(points[pick]);
    }

    assign.assign(n, -1);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(points[i], centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = sq_dist(points[i], centroids[static_cast<std::size_t>(c)]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        std::vector<Vec> sums(static_cast<std::size_t>(k), Vec(dim, 0.0));
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(assign[i]);
            for (std::size_t t = 0; t < dim; ++t) sums[c][t] += points[i][t];
            ++counts[c];
        }
        for (int c = 0; c < k; ++c) {
            const auto cu = static_cast<std::size_t>(c);
            if (counts[cu] == 0) continue; // empty cluster keeps its centroid
            for (std::size_t t = 0; t < dim; ++t) {
                centroids[cu][t] = sums[cu][t] / static_cast<double>(counts[cu]);
            }
        }
    }

    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        inertia += sq_dist(points[i], centroids[static_cast<std::size_t>(assign[i])]);
    }
    return inertia;
}

} // namespace

std::vector<int> kmeans_assign(const std::vector<Vec>& points, int k, int restarts, int max_iters,
                               std::uint64_t seed) {
    if (points.empty()) throw EmptySetError("kmeans: no points");
    if (k < 1) throw ValidationError("kmeans: k must be >= 1");
    if (static_cast<std::size_t>(k) > points.size()) {
        throw ValidationError("kmeans: k exceeds the number of points");
    }

    std::vector<int> best_assign, assign;
    double best_inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Rng rng(derive_seed(seed, "kmeans:" + std::to_string(r)));
        const double inertia = kmeans_once(points, k, max_iters, rng, assign);
        if (inertia < best_inertia) {
            best_inertia = inertia;
            best_assign = assign;
        }
    }
    return best_assign;
}

double nmi_from_assignments(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) {
        throw CountMismatchError("nmi: assignment lengths differ");
    }
    if (a.empty()) throw EmptySetError("nmi: no items");
    const double n = static_cast<double>(a.size());

    std::map<int, double> pa, pb;
    std::map<std::pair<int, int>, double> joint;
    for (std::size_t i = 0; i < a.size(); ++i) {
        pa[a[i]] += 1.0;
        pb[b[i]] += 1.0;
        joint[{a[i], b[i]}] += 1.0;
    }

    double ha = 0.0, hb = 0.0, mi = 0.0;
    for (auto& [label, count] : pa) {
        const double p = count / n;
        ha -= p * std::log(p);
    }
    for (auto& [label, count] : pb) {
        const double p = count / n;
        hb -= p * std::log(p);
    }
    for (auto& [labels, count] : joint) {
        const double pj = count / n;
        const double px = pa[labels.first] / n;
        const double py = pb[labels.second] / n;
        mi += pj * std::log(pj / (px * py));
    }

    const double denom = 0.5 * (ha + hb);
    if (denom <= 0.0) return 1.0; // both sides constant: perfect agreement
    const double value = mi / denom;
    return std::clamp(value, 0.0, 1.0);
}

double nmi_score(const std::vector<Vec>& embeddings, const std::vector<std::string>& labels,
                 int num_clusters, std::uint64_t seed) {
    if (embeddings.size() != labels.size()) {
        throw CountMismatchError("nmi_score: embeddings and labels differ in length");
    }
    if (embeddings.empty()) throw EmptySetError("nmi_score: no items");

    std::vector<Vec> normalized;
    normalized.reserve(embeddings.size());
    for (const auto& e : embeddings) normalized.push_back(l2_normalize(e));

    const int k = std::min<int>(num_clusters, static_cast<int>(embeddings.size()));
    std::vector<int> clusters = kmeans_assign(normalized, k, 10, 100, seed);

    std::map<std::string, int> label_index;
    std::vector<int> truth(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = label_index.try_emplace(labels[i], static_cast<int>(label_index.size()));
        truth[i] = it->second;
    }
    return nmi_from_assignments(clusters, truth);
}

std::string report_to_json(const EvalReport& report, const std::string& config_hash_hex) {
    nlohmann::json j;
    auto put = [&j](const char* key, const std::optional<double>& v) {
        if (v) {
            j[key] = *v;
        } else {
            j[key] = nullptr;
        }
    };
    put("query_vs_gallery", report.query_vs_gallery);
    put("all_vs_all", report.all_vs_all);
    put("text", report.text);
    put("small", report.small);
    put("large", report.large);
    j["nmi"] = report.nmi;
    if (!config_hash_hex.empty()) j["config_hash"] = config_hash_hex;
    auto preds = nlohmann::json::array();
    for (const auto& p : report.predictions) {
        preds.push_back({{"query_id", p.query_id}, {"true", p.true_class}, {"pred", p.predicted_class}});
    }
    j["predictions"] = std::move(preds);
    return j.dump(2) + "\n";
}

} // namespace proxyforge
