#include "proxyforge/dataset_tools.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"
#include "proxyforge/errors.hpp"
#include "proxyforge/formats.hpp"
#include "proxyforge/rng.hpp"
#include "proxyforge/util.hpp"

namespace proxyforge {

void ManifestRecord::validate() const {
    if (!(w > 0.0) || !(h > 0.0)) {
        throw ValidationError("manifest record " + image_id + ": bbox sides must be positive");
    }
    if (x < 0.0 || y < 0.0 || x + w > static_cast<double>(image_w) ||
        y + h > static_cast<double>(image_h)) {
        throw ValidationError("manifest record " + image_id + ": bbox exceeds image bounds");
    }
}

std::string manifest_record_to_json(const ManifestRecord& r) {
    nlohmann::json j;
    j["image_id"] = r.image_id;
    j["source_dataset"] = r.source_dataset;
    j["class_name"] = r.class_name;
    j["bbox"] = {r.x, r.y, r.w, r.h};
    j["image_w"] = r.image_w;
    j["image_h"] = r.image_h;
    j["content_hash"] = r.content_hash;
    return j.dump();
}

ManifestRecord manifest_record_from_json(const std::string& line) {
    ManifestRecord r;
    try {
        auto j = nlohmann::json::parse(line);
        r.image_id = j.at("image_id").get<std::string>();
        r.source_dataset = j.at("source_dataset").get<std::string>();
        r.class_name = j.at("class_name").get<std::string>();
        auto bbox = j.at("bbox");
        if (!bbox.is_array() || bbox.size() != 4) {
            throw ValidationError("manifest record: bbox must be [x, y, w, h]");
        }
        r.x = bbox[0].get<double>();
        r.y = bbox[1].get<double>();
        r.w = bbox[2].get<double>();
        r.h = bbox[3].get<double>();
        r.image_w = j.at("image_w").get<int>();
        r.image_h = j.at("image_h").get<int>();
        r.content_hash = j.at("content_hash").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("manifest record: ") + e.what());
    }
    return r;
}

void save_manifest(const Manifest& records, const std::string& path) {
    std::ostringstream out;
    for (const auto& r : records) out << manifest_record_to_json(r) << '\n';
    write_text_file(path, out.str());
}

Manifest load_manifest(const std::string& path) {
    std::istringstream in(read_text_file(path));
    Manifest records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(manifest_record_from_json(line));
        } catch (const ValidationError& e) {
            throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

std::string normalize_class_name(const std::string& name) {
    std::string out;
    out.reserve(name.size());
    for (unsigned char c : name) {
        if (c == '\'') continue;
        if (c == '-' || c == ' ') {
            out.push_back('_');
        } else {
            out.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    if (out.empty()) throw EmptyNameError("class name empty after normalization: \"" + name + "\"");
    return out;
}

MergeMap default_merge_map() {
    return {
        {"lv", "louisvuitton"},
        {"cocacola", "coca_cola"},
        {"northface", "the_north_face"},
    };
}

void validate_merge_map(const MergeMap& m) {
    for (const auto& [from, to] : m) {
        if (from == to) throw ValidationError("merge map: " + from + " maps to itself");
        if (m.count(to)) {
            throw ValidationError("merge map: canonical name " + to + " is itself remapped");
        }
    }
}

std::string apply_merge_map(const std::string& name, const MergeMap& m) {
    auto it = m.find(name);
    return it == m.end() ? name : it->second;
}

MergeMap merge_map_from_json(const std::string& text) {
    MergeMap m;
    try {
        auto j = nlohmann::json::parse(text);
        if (!j.is_object()) throw ValidationError("merge map JSON: not an object");
        for (const auto& [from, to] : j.items()) m[from] = to.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("merge map JSON: ") + e.what());
    }
    validate_merge_map(m);
    return m;
}

std::string merge_map_to_json(const MergeMap& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [from, to] : m) j[from] = to;
    return j.dump(2) + "\n";
}

Manifest canonicalize_classes(const Manifest& records, const MergeMap& m) {
    validate_merge_map(m);
    Manifest out = records;
    for (auto& r : out) r.class_name = apply_merge_map(normalize_class_name(r.class_name), m);
    return out;
}

Manifest dedup_within_class(const Manifest& records) {
    // winner per (class, hash) = record minimal by (source_dataset, image_id)
    std::map<std::pair<std::string, std::string>, std::size_t> winner;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto key = std::make_pair(records[i].class_name, records[i].content_hash);
        auto [it, inserted] = winner.try_emplace(key, i);
        if (!inserted) {
            const auto& cur = records[it->second];
            const auto& cand = records[i];
            if (std::tie(cand.source_dataset, cand.image_id) <
                std::tie(cur.source_dataset, cur.image_id)) {
                it->second = i;
            }
        }
    }
    std::vector<bool> keep(records.size(), false);
    for (const auto& [key, idx] : winner) keep[idx] = true;
    Manifest out;
    out.reserve(winner.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (keep[i]) out.push_back(records[i]);
    }
    return out;
}

Manifest filter_records(const Manifest& records, double min_side_px, int min_instances,
                        FilterStats* stats) {
    Manifest sized;
    sized.reserve(records.size());
    std::size_t dropped_small = 0;
    for (const auto& r : records) {
        if (r.min_side() < min_side_px) {
            ++dropped_small;
        } else {
            sized.push_back(r);
        }
    }

    std::map<std::string, std::size_t> counts;
    for (const auto& r : sized) ++counts[r.class_name];
    std::set<std::string> dropped_classes;
    for (const auto& [class_name, count] : counts) {
        if (count < static_cast<std::size_t>(min_instances)) dropped_classes.insert(class_name);
    }

    Manifest out;
    out.reserve(sized.size());
    std::size_t dropped_by_class = 0;
    for (auto& r : sized) {
        if (dropped_classes.count(r.class_name)) {
            ++dropped_by_class;
        } else {
            out.push_back(std::move(r));
        }
    }
    if (stats) {
        stats->dropped_small_bbox = dropped_small;
        stats->dropped_small_class_records = dropped_by_class;
        stats->classes_dropped = dropped_classes.size();
    }
    return out;
}

std::string split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    throw ValidationError("split: unknown value");
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::train;
    if (name == "val") return Split::val;
    if (name == "test") return Split::test;
    throw ValidationError("split: unknown name \"" + name + "\"");
}

std::string split_plan_to_json(const SplitPlan& plan) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [class_name, split] : plan.assignment) j[class_name] = split_name(split);
    return j.dump(2) + "\n";
}

SplitPlan split_plan_from_json(const std::string& text) {
    SplitPlan plan;
    try {
        auto j = nlohmann::json::parse(text);
        if (!j.is_object()) throw ValidationError("split plan JSON: not an object");
        for (const auto& [class_name, split] : j.items()) {
            plan.assignment[class_name] = split_from_name(split.get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("split plan JSON: ") + e.what());
    }
    return plan;
}

SplitPlan plan_open_set_split(const Manifest& records, const SplitFractions& fractions,
                              int small_class_min, std::uint64_t seed) {
    if (fractions.train < 0.0 || fractions.val < 0.0 || fractions.test < 0.0 ||
        std::abs(fractions.train + fractions.val + fractions.test - 1.0) > 1e-9) {
        throw InvalidFractionsError("split fractions must be nonnegative and sum to 1");
    }

    std::map<std::string, std::size_t> counts;
    for (const auto& r : records) ++counts[r.class_name];

    SplitPlan plan;
    std::vector<std::string> eligible;
    for (const auto& [class_name, count] : counts) {
        if (count < static_cast<std::size_t>(small_class_min)) {
            plan.assignment[class_name] = Split::train;
        } else {
            eligible.push_back(class_name);
        }
    }

    Rng rng(derive_seed(seed, "open-set-split"));
    rng.shuffle(eligible);
    const std::size_t e = eligible.size();
    const std::size_t n_val = static_cast<std::size_t>(
        std::floor(fractions.val * static_cast<double>(e)));
    const std::size_t n_test = static_cast<std::size_t>(
        std::floor(fractions.test * static_cast<double>(e)));
    for (std::size_t i = 0; i < e; ++i) {
        Split s = Split::train;
        if (i < n_val) {
            s = Split::val;
        } else if (i < n_val + n_test) {
            s = Split::test;
        }
        plan.assignment[eligible[i]] = s;
    }
    return plan;
}

} // namespace proxyforge
