#include "proxyforge/formats.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "proxyforge/errors.hpp"
#include "proxyforge/util.hpp"

namespace proxyforge {

std::string record_to_json(const VectorRecord& r) {
    nlohmann::json j;
    j["id"] = r.id;
    j["class"] = r.class_name;
    j["min_side_px"] = r.min_side_px;
    j["vec"] = r.vec;
    return j.dump();
}

VectorRecord record_from_json(const std::string& line) {
    VectorRecord r;
    try {
        auto j = nlohmann::json::parse(line);
        r.id = j.at("id").get<std::string>();
        r.class_name = j.at("class").get<std::string>();
        r.min_side_px = j.at("min_side_px").get<double>();
        r.vec = j.at("vec").get<Vec>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("embedding record: ") + e.what());
    }
    return r;
}

void save_dataset(const Dataset& records, const std::string& path) {
    std::ostringstream out;
    for (const auto& r : records) out << record_to_json(r) << '\n';
    write_text_file(path, out.str());
}

Dataset load_dataset(const std::string& path) {
    std::istringstream in(read_text_file(path));
    Dataset records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(record_from_json(line));
        } catch (const ValidationError& e) {
            throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed for " + path);
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + path);
}

std::string config_hash(const std::string& config_json) {
    std::string canonical;
    try {
        canonical = nlohmann::json::parse(config_json).dump();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config hash: invalid JSON: ") + e.what());
    }
    return to_hex(fnv1a64(canonical));
}

void write_meta_sidecar(const std::string& path, const std::string& config_hash_hex) {
    nlohmann::json j;
    j["config_hash"] = config_hash_hex;
    write_text_file(path + ".meta.json", j.dump(2) + "\n");
}

} // namespace proxyforge
