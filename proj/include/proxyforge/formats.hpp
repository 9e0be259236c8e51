#pragma once

#include <string>
#include <vector>

#include "proxyforge/embedding.hpp"

namespace proxyforge {

// One embedded sample as stored in embedding-set files:
//   {"id": ..., "class": ..., "min_side_px": ..., "vec": [...]}
struct VectorRecord {
    std::string id;
    std::string class_name;
    double min_side_px = 0.0;
    Vec vec;
};

using Dataset = std::vector<VectorRecord>;

std::string record_to_json(const VectorRecord& r);
VectorRecord record_from_json(const std::string& line);

// JSON lines, one record per line. Doubles are written in shortest exact
// round-trip form, so nothing is lost on reload.
void save_dataset(const Dataset& records, const std::string& path);
Dataset load_dataset(const std::string& path);

// Whole-file helpers; throw IoError on failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// FNV-1a over the canonical (sorted-key, compact) form of a JSON config
// document, as a 16-digit hex string. Embedded in every output artifact.
std::string config_hash(const std::string& config_json);

// Sidecar "<path>.meta.json" carrying the config hash for files whose own
// format has no room for one (JSONL, strict-format maps).
void write_meta_sidecar(const std::string& path, const std::string& config_hash_hex);

} // namespace proxyforge
