#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace proxyforge {

// One annotated logo crop in a composite-dataset manifest.
struct ManifestRecord {
    std::string image_id;
    std::string source_dataset;
    std::string class_name;
    double x = 0.0, y = 0.0, w = 0.0, h = 0.0; // bbox, pixels
    int image_w = 0, image_h = 0;
    std::string content_hash; // hash of the cropped region, caller-supplied

    double min_side() const { return w < h ? w : h; }
    // Throws ValidationError when the bbox is degenerate or out of bounds.
    void validate() const;
};

using Manifest = std::vector<ManifestRecord>;

std::string manifest_record_to_json(const ManifestRecord& r);
ManifestRecord manifest_record_from_json(const std::string& line);
void save_manifest(const Manifest& records, const std::string& path);
Manifest load_manifest(const std::string& path);

// Lower-cases, maps "-" and " " to "_", deletes "'".
std::string normalize_class_name(const std::string& name);

// old name -> canonical name; single-step lookups, so no canonical name may
// itself be a key.
using MergeMap = std::map<std::string, std::string>;

MergeMap default_merge_map();
void validate_merge_map(const MergeMap& m);
std::string apply_merge_map(const std::string& name, const MergeMap& m);

MergeMap merge_map_from_json(const std::string& text);
std::string merge_map_to_json(const MergeMap& m);

// normalize_class_name + merge map over every record.
Manifest canonicalize_classes(const Manifest& records, const MergeMap& m);

// Within each class keeps one record per content_hash — the record minimal
// by (source_dataset, image_id); cross-class duplicates are retained. Input
// order is preserved for the records kept.
Manifest dedup_within_class(const Manifest& records);

struct FilterStats {
    std::size_t dropped_small_bbox = 0;
    std::size_t dropped_small_class_records = 0;
    std::size_t classes_dropped = 0;
};

// Drops records with min bbox side < min_side_px, then whole classes left
// with fewer than min_instances records, in that order.
Manifest filter_records(const Manifest& records, double min_side_px = 10.0,
                        int min_instances = 20, FilterStats* stats = nullptr);

enum class Split { train, val, test };
std::string split_name(Split s);
Split split_from_name(const std::string& name);

struct SplitFractions {
    double train = 0.64;
    double val = 0.16;
    double test = 0.20;
};

// Class-level open-set assignment: no class spans two splits.
struct SplitPlan {
    std::map<std::string, Split> assignment;
};

std::string split_plan_to_json(const SplitPlan& plan);
SplitPlan split_plan_from_json(const std::string& text);

// Classes below small_class_min samples always train; the remaining classes
// are shuffled under seed, then floor(val_frac*E) go to val, floor(
// test_frac*E) to test, and the rest to train.
SplitPlan plan_open_set_split(const Manifest& records, const SplitFractions& fractions,
                              int small_class_min, std::uint64_t seed);

} // namespace proxyforge
