#include "proxyforge/mining.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"
#include "proxyforge/errors.hpp"

namespace proxyforge {

int ConfusionMatrix::index_of(const std::string& class_name) const {
    auto it = std::find(classes.begin(), classes.end(), class_name);
    return it == classes.end() ? -1 : static_cast<int>(it - classes.begin());
}

const std::vector<std::string>& HardNegativeMap::negatives_for(const std::string& class_name) const {
    static const std::vector<std::string> kEmpty;
    auto it = entries.find(class_name);
    return it == entries.end() ? kEmpty : it->second;
}

void HardNegativeMap::add(const std::string& class_name, std::vector<std::string> negatives) {
    for (const auto& n : negatives) {
        if (n == class_name) {
            throw ValidationError("HardNegativeMap: class " + class_name + " maps to itself");
        }
    }
    entries[class_name] = std::move(negatives);
}

ConfusionMatrix build_confusion_matrix(
    const std::vector<std::pair<std::string, std::string>>& predictions,
    const std::vector<std::string>& classes) {
    ConfusionMatrix c;
    c.classes = classes;
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < classes.size(); ++i) index[classes[i]] = static_cast<int>(i);

    const std::size_t k = classes.size();
    std::vector<std::vector<double>> counts(k, std::vector<double>(k, 0.0));
    for (const auto& [truth, pred] : predictions) {
        auto ti = index.find(truth);
        auto pi = index.find(pred);
        if (ti == index.end()) throw UnknownClassError("build_confusion_matrix: unknown true class " + truth);
        if (pi == index.end()) throw UnknownClassError("build_confusion_matrix: unknown predicted class " + pred);
        counts[static_cast<std::size_t>(ti->second)][static_cast<std::size_t>(pi->second)] += 1.0;
    }

    c.rows.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        double total = std::accumulate(counts[i].begin(), counts[i].end(), 0.0);
        if (total > 0.0) {
            for (std::size_t j = 0; j < k; ++j) c.rows[i][j] = counts[i][j] / total;
        }
    }
    return c;
}

int levenshtein(std::string_view a, std::string_view b) {
    const std::size_t n = a.size(), m = b.size();
    if (n == 0) return static_cast<int>(m);
    if (m == 0) return static_cast<int>(n);
    std::vector<int> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= m; ++j) {
            int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

HardNegativeMap build_hard_negative_map(const ConfusionMatrix& c, double alpha1, double alpha2,
                                        int lev_min) {
    if (alpha1 > alpha2) {
        throw InvalidThresholdsError("build_hard_negative_map: alpha1 > alpha2");
    }
    if (alpha1 < 0.0 || alpha2 > 1.0 || lev_min < 0) {
        throw InvalidThresholdsError("build_hard_negative_map: thresholds out of range");
    }
    HardNegativeMap h;
    const std::size_t k = c.classes.size();
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<std::string> negatives;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            double v = c.rows[i][j];
            if (v < alpha1 || v > alpha2) continue;
            if (levenshtein(c.classes[i], c.classes[j]) <= lev_min) continue;
            negatives.push_back(c.classes[j]);
        }
        if (!negatives.empty()) h.add(c.classes[i], std::move(negatives));
    }
    return h;
}

SubmatrixComparison compare_submatrices(const ConfusionMatrix& before, const ConfusionMatrix& after,
                                        const std::vector<std::string>& cohort) {
    SubmatrixComparison cmp;
    cmp.cohort = cohort;
    const std::size_t s = cohort.size();
    std::vector<int> bi(s), ai(s);
    for (std::size_t i = 0; i < s; ++i) {
        bi[i] = before.index_of(cohort[i]);
        ai[i] = after.index_of(cohort[i]);
        if (bi[i] < 0 || ai[i] < 0) {
            throw UnknownClassError("compare_submatrices: class " + cohort[i] + " missing from a matrix");
        }
    }
    cmp.before.assign(s, std::vector<double>(s, 0.0));
    cmp.after.assign(s, std::vector<double>(s, 0.0));
    cmp.delta.assign(s, std::vector<double>(s, 0.0));
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < s; ++j) {
            double b = before.rows[static_cast<std::size_t>(bi[i])][static_cast<std::size_t>(bi[j])];
            double a = after.rows[static_cast<std::size_t>(ai[i])][static_cast<std::size_t>(ai[j])];
            cmp.before[i][j] = b;
            cmp.after[i][j] = a;
            cmp.delta[i][j] = a - b;
        }
        cmp.diagonal_mass_delta += cmp.delta[i][i];
    }
    return cmp;
}

std::string confusion_to_json(const ConfusionMatrix& c) {
    nlohmann::json j;
    j["classes"] = c.classes;
    j["rows"] = c.rows;
    return j.dump();
}

ConfusionMatrix confusion_from_json(const std::string& text) {
    ConfusionMatrix c;
    try {
        auto j = nlohmann::json::parse(text);
        c.classes = j.at("classes").get<std::vector<std::string>>();
        c.rows = j.at("rows").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("confusion matrix JSON: ") + e.what());
    }
    if (c.rows.size() != c.classes.size()) {
        throw ValidationError("confusion matrix JSON: row count differs from class count");
    }
    for (const auto& row : c.rows) {
        if (row.size() != c.classes.size()) {
            throw ValidationError("confusion matrix JSON: ragged rows");
        }
    }
    return c;
}

std::string map_to_json(const HardNegativeMap& h) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, negatives] : h.entries) {
        if (!negatives.empty()) j[name] = negatives;
    }
    return j.dump(2);
}

HardNegativeMap map_from_json(const std::string& text) {
    HardNegativeMap h;
    try {
        auto j = nlohmann::json::parse(text);
        if (!j.is_object()) throw ValidationError("hard-negative map JSON: not an object");
        for (const auto& [name, value] : j.items()) {
            h.add(name, value.get<std::vector<std::string>>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("hard-negative map JSON: ") + e.what());
    }
    return h;
}

} // namespace proxyforge
