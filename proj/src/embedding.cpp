#include "proxyforge/embedding.hpp"

#include <cmath>

#include "proxyforge/errors.hpp"

namespace proxyforge {

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) {
        throw DimensionMismatchError("dot: dimensions " + std::to_string(a.size()) +
                                     " vs " + std::to_string(b.size()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

Vec l2_normalize(const Vec& v) {
    double n = norm2(v);
    if (n == 0.0) throw ZeroVectorError("l2_normalize: zero vector");
    if (!std::isfinite(n)) throw ZeroVectorError("l2_normalize: non-finite norm");
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
    return out;
}

double proxy_distance(const Vec& z1, const Vec& z2) {
    if (z1.size() != z2.size()) {
        throw DimensionMismatchError("proxy_distance: dimensions " + std::to_string(z1.size()) +
                                     " vs " + std::to_string(z2.size()));
    }
    Vec u1 = l2_normalize(z1);
    Vec u2 = l2_normalize(z2);
    double s = 0.0;
    for (std::size_t i = 0; i < u1.size(); ++i) {
        double d = u1[i] - u2[i];
        s += d * d;
    }
    return s;
}

double log_similarity(const Vec& z1, const Vec& z2, double sigma) {
    if (sigma <= 0.0) throw ValidationError("log_similarity: sigma must be positive");
    return -proxy_distance(z1, z2) / sigma;
}

double similarity(const Vec& z1, const Vec& z2, double sigma) {
    return std::exp(log_similarity(z1, z2, sigma));
}

Vec normalize_backward(const Vec& z, const Vec& unit, const Vec& grad_unit) {
    double n = norm2(z);
    if (n == 0.0) throw ZeroVectorError("normalize_backward: zero vector");
    double proj = dot(unit, grad_unit);
    Vec out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = (grad_unit[i] - proj * unit[i]) / n;
    }
    return out;
}

void ProxyTable::add(const std::string& class_id, Vec v) {
    if (index_.count(class_id)) {
        throw ValidationError("ProxyTable: duplicate proxy for class " + class_id);
    }
    if (!vectors.empty() && v.size() != vectors.front().size()) {
        throw DimensionMismatchError("ProxyTable: proxy dimension " + std::to_string(v.size()) +
                                     " differs from table dimension " +
                                     std::to_string(vectors.front().size()));
    }
    if (norm2(v) == 0.0) {
        throw ZeroVectorError("ProxyTable: zero-norm proxy for class " + class_id);
    }
    index_[class_id] = static_cast<int>(vectors.size());
    class_ids.push_back(class_id);
    vectors.push_back(std::move(v));
}

int ProxyTable::index_of(const std::string& class_id) const {
    auto it = index_.find(class_id);
    return it == index_.end() ? -1 : it->second;
}

const Vec& ProxyTable::proxy(const std::string& class_id) const {
    int i = index_of(class_id);
    if (i < 0) throw UnknownClassError("ProxyTable: no proxy for class " + class_id);
    return vectors[static_cast<std::size_t>(i)];
}

} // namespace proxyforge
