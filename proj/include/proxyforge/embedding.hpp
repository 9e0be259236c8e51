#pragma once

#include <map>
#include <string>
#include <vector>

namespace proxyforge {

// Embedding coordinates. Dimension is fixed per experiment; all vectors
// entering a comparison must share it.
using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);

// v / ||v||_2. Zero vectors are hard errors, never clamped.
Vec l2_normalize(const Vec& v);

// d(z1, z2) = || z1/||z1|| - z2/||z2|| ||_2^2, in [0, 4].
// Symmetric and invariant to positive rescaling of either argument.
double proxy_distance(const Vec& z1, const Vec& z2);

// log g(z1, z2) = -d(z1, z2) / sigma. Canonical representation for the
// losses; similarity() is the convenience view exp(-d/sigma).
double log_similarity(const Vec& z1, const Vec& z2, double sigma);
double similarity(const Vec& z1, const Vec& z2, double sigma);

// Chain rule through u = z/||z||: given dL/du, produce dL/dz.
// dL/dz = (dL/du - (u . dL/du) u) / ||z||
Vec normalize_backward(const Vec& z, const Vec& unit, const Vec& grad_unit);

// One trainable proxy vector per positive class.
struct ProxyTable {
    std::vector<std::string> class_ids;
    std::vector<Vec> vectors;

    // Validates dimension consistency and nonzero norm.
    void add(const std::string& class_id, Vec v);

    // -1 when the class has no proxy.
    int index_of(const std::string& class_id) const;

    const Vec& proxy(const std::string& class_id) const;

    std::size_t size() const { return vectors.size(); }
    int dim() const { return vectors.empty() ? 0 : static_cast<int>(vectors.front().size()); }

private:
    std::map<std::string, int> index_;
};

} // namespace proxyforge
