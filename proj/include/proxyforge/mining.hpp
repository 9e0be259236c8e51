#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace proxyforge {

// Row-normalized retrieval confusion matrix. Rows with no predictions stay
// all-zero rather than erroring; small validation splits legitimately miss
// classes.
struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<double>> rows;

    int index_of(const std::string& class_name) const;
};

// Mapping h from a class to its set of difficult negative classes.
// Never maps a class to itself.
struct HardNegativeMap {
    std::map<std::string, std::vector<std::string>> entries;

    // Empty vector when the class has no entry.
    const std::vector<std::string>& negatives_for(const std::string& class_name) const;

    bool empty() const { return entries.empty(); }
    void add(const std::string& class_name, std::vector<std::string> negatives);
};

// rows[i][j] = count(true=i, pred=j) / count(true=i). Class names outside
// `classes` are rejected.
ConfusionMatrix build_confusion_matrix(
    const std::vector<std::pair<std::string, std::string>>& predictions,
    const std::vector<std::string>& classes);

// Unit-cost edit distance (insert, delete, substitute).
int levenshtein(std::string_view a, std::string_view b);

// h(y_i) = { y_j : j != i, alpha1 <= C[i][j] <= alpha2, lev(y_i, y_j) > lev_min }.
// The band keeps out too-easy negatives below alpha1 and likely label noise
// above alpha2; the edit-distance filter drops near-identical names.
HardNegativeMap build_hard_negative_map(const ConfusionMatrix& c, double alpha1 = 0.05,
                                        double alpha2 = 0.35, int lev_min = 2);

// Cohort-restricted before/after comparison of two confusion matrices.
struct SubmatrixComparison {
    std::vector<std::string> cohort;
    std::vector<std::vector<double>> before;
    std::vector<std::vector<double>> after;
    std::vector<std::vector<double>> delta;
    double diagonal_mass_delta = 0.0;
};

SubmatrixComparison compare_submatrices(const ConfusionMatrix& before,
                                        const ConfusionMatrix& after,
                                        const std::vector<std::string>& cohort);

// JSON wire formats: map as {class: [class, ...]} with sorted keys and empty
// entries omitted; matrix as {"classes": [...], "rows": [[...]]}.
std::string confusion_to_json(const ConfusionMatrix& c);
ConfusionMatrix confusion_from_json(const std::string& text);
std::string map_to_json(const HardNegativeMap& h);
HardNegativeMap map_from_json(const std::string& text);

} // namespace proxyforge
