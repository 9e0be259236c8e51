#include "proxyforge/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "proxyforge/errors.hpp"

namespace proxyforge {

namespace {

double log_sum_exp(const std::vector<double>& s) {
    double m = *std::max_element(s.begin(), s.end());
    double acc = 0.0;
    for (double v : s) acc += std::exp(v - m);
    return m + std::log(acc);
}

bool contains(const std::vector<std::string>& v, const std::string& x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

// One entry of an item's softmax candidate set: either a proxy (by table
// index) or another batch embedding (by batch index).
struct Candidate {
    bool is_proxy;
    std::size_t index;
};

// Shared NCA softmax core. With labels == nullptr this is the plain loss:
// every item gets a loss term and candidates are the proxies alone. With
// labels, positive-class items get loss terms and their candidate sets grow
// by hard-negative and background batch embeddings; both paths are the same
// code, so the no-map/no-background case reduces exactly.
LossResult nca_core(const std::vector<BatchItem>& batch, const ProxyTable& proxies,
                    const LabelSpace* labels, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ValidationError("loss: sigma must be positive and finite");
    }
    if (batch.empty()) throw EmptyBatchError("loss: empty batch");

    const std::size_t n = batch.size();
    const std::size_t p = proxies.size();
    const std::size_t dim =
        p > 0 ? static_cast<std::size_t>(proxies.dim()) : batch.front().embedding.size();
    for (const auto& item : batch) {
        if (item.embedding.size() != dim) {
            throw DimensionMismatchError("loss: embedding for sample " + item.sample_id +
                                         " has dimension " + std::to_string(item.embedding.size()) +
                                         ", expected " + std::to_string(dim));
        }
    }

    std::vector<Vec> item_unit(n);
    for (std::size_t i = 0; i < n; ++i) item_unit[i] = l2_normalize(batch[i].embedding);
    std::vector<Vec> proxy_unit(p);
    for (std::size_t j = 0; j < p; ++j) proxy_unit[j] = l2_normalize(proxies.vectors[j]);

    std::vector<std::size_t> loss_items;
    loss_items.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string& c = batch[i].class_id;
        if (labels) {
            bool pos = labels->is_positive(c);
            bool bg = labels->is_background(c);
            if (!pos && !bg) {
                throw UnknownClassError("loss: class " + c + " is in neither label set");
            }
            if (bg != (batch[i].role == Role::background)) {
                throw ValidationError("loss: role of sample " + batch[i].sample_id +
                                      " disagrees with its class being background");
            }
            if (!pos) continue;
        }
        if (proxies.index_of(c) < 0) {
            throw UnknownClassError("loss: no proxy for class " + c);
        }
        loss_items.push_back(i);
    }
    if (loss_items.empty()) throw EmptyBatchError("loss: no item has a positive class");

    const double scale = 1.0 / static_cast<double>(loss_items.size());
    std::vector<Vec> grad_item_unit(n, Vec(dim, 0.0));
    std::vector<Vec> grad_proxy_unit(p, Vec(dim, 0.0));
    std::vector<double> item_loss(n, std::numeric_limits<double>::quiet_NaN());
    double total = 0.0;

    std::vector<Candidate> cands;
    std::vector<double> s;
    for (std::size_t i : loss_items) {
        const Vec& u = item_unit[i];
        const std::size_t pos_cand = static_cast<std::size_t>(proxies.index_of(batch[i].class_id));

        cands.clear();
        for (std::size_t j = 0; j < p; ++j) cands.push_back({true, j});
        if (labels) {
            const auto& negs = labels->hard_negative_map.negatives_for(batch[i].class_id);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const std::string& cj = batch[j].class_id;
                if (labels->is_background(cj) ||
                    (labels->is_positive(cj) && contains(negs, cj))) {
                    cands.push_back({false, j});
                }
            }
        }

        s.assign(cands.size(), 0.0);
        for (std::size_t k = 0; k < cands.size(); ++k) {
            const Vec& o = cands[k].is_proxy ? proxy_unit[cands[k].index] : item_unit[cands[k].index];
            double d = 0.0;
            for (std::size_t t = 0; t < dim; ++t) {
                double diff = u[t] - o[t];
                d += diff * diff;
            }
            s[k] = -d / sigma;
        }

        const double lse = log_sum_exp(s);
        item_loss[i] = -s[pos_cand] + lse;
        total += item_loss[i] * scale;

        // d(loss_i)/d(s_k) = softmax(s)_k - [k == positive]; chain through
        // s_k = -|u - o_k|^2 / sigma.
        Vec& gu = grad_item_unit[i];
        for (std::size_t k = 0; k < cands.size(); ++k) {
            const double w = std::exp(s[k] - lse);
            const double coeff = (w - (k == pos_cand ? 1.0 : 0.0)) * scale * (-2.0 / sigma);
            if (coeff == 0.0) continue;
            const Vec& o = cands[k].is_proxy ? proxy_unit[cands[k].index] : item_unit[cands[k].index];
            Vec& go =
                cands[k].is_proxy ? grad_proxy_unit[cands[k].index] : grad_item_unit[cands[k].index];
            for (std::size_t t = 0; t < dim; ++t) {
                double diff = u[t] - o[t];
                gu[t] += coeff * diff;
                go[t] -= coeff * diff;
            }
        }
    }

    LossResult r;
    r.loss = total;
    r.item_losses = std::move(item_loss);
    r.grad_embeddings.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        r.grad_embeddings[i] = normalize_backward(batch[i].embedding, item_unit[i], grad_item_unit[i]);
    }
    r.grad_proxies.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        r.grad_proxies[j] = normalize_backward(proxies.vectors[j], proxy_unit[j], grad_proxy_unit[j]);
    }
    return r;
}

} // namespace

bool LabelSpace::is_positive(const std::string& class_id) const {
    return contains(positive_classes, class_id);
}

bool LabelSpace::is_background(const std::string& class_id) const {
    return contains(background_classes, class_id);
}

void LabelSpace::validate() const {
    std::set<std::string> pos(positive_classes.begin(), positive_classes.end());
    std::set<std::string> bg(background_classes.begin(), background_classes.end());
    if (pos.size() != positive_classes.size()) {
        throw ValidationError("label space: duplicate positive class");
    }
    if (bg.size() != background_classes.size()) {
        throw ValidationError("label space: duplicate background class");
    }
    for (const auto& c : positive_classes) {
        if (bg.count(c)) throw ValidationError("label space: class " + c + " is in both sets");
    }
    for (const auto& [key, negs] : hard_negative_map.entries) {
        for (const auto& c : negs) {
            if (!pos.count(c) && !bg.count(c)) {
                throw ValidationError("label space: hard negative " + c + " of " + key +
                                      " is in neither class set");
            }
        }
    }
}

LossResult proxynca_pp_loss(const BatchItem& item, const ProxyTable& proxies, double sigma) {
    return nca_core({item}, proxies, nullptr, sigma);
}

LossResult proxynca_pp_batch(const std::vector<BatchItem>& batch, const ProxyTable& proxies,
                             double sigma) {
    return nca_core(batch, proxies, nullptr, sigma);
}

LossResult proxyncahn_pp_loss(const std::vector<BatchItem>& batch, const ProxyTable& proxies,
                              const LabelSpace& labels, double sigma) {
    labels.validate();
    return nca_core(batch, proxies, &labels, sigma);
}

LossResult alignment_loss(const std::vector<Vec>& image_embs, const std::vector<Vec>& text_embs,
                          double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw ValidationError("alignment_loss: tau must be positive and finite");
    }
    if (image_embs.size() != text_embs.size()) {
        throw CountMismatchError("alignment_loss: " + std::to_string(image_embs.size()) +
                                 " image embeddings vs " + std::to_string(text_embs.size()) +
                                 " text embeddings");
    }
    const std::size_t n = image_embs.size();
    if (n == 0) throw EmptyBatchError("alignment_loss: empty batch");
    const std::size_t dim = image_embs.front().size();
    for (const auto& v : image_embs) {
        if (v.size() != dim) throw DimensionMismatchError("alignment_loss: ragged image embeddings");
    }
    for (const auto& v : text_embs) {
        if (v.size() != dim) throw DimensionMismatchError("alignment_loss: ragged text embeddings");
    }

    std::vector<Vec> u(n), v(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = l2_normalize(image_embs[i]);
    for (std::size_t j = 0; j < n; ++j) v[j] = l2_normalize(text_embs[j]);

    std::vector<std::vector<double>> S(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) S[i][j] = dot(u[i], v[j]) / tau;
    }

    // G[i][j] = d(loss)/d(S[i][j]); rows and columns each contribute a
    // softmax-minus-target term weighted by 1/(2n).
    const double w = 0.5 / static_cast<double>(n);
    std::vector<std::vector<double>> G(n, std::vector<double>(n, 0.0));
    double loss = 0.0;
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lse = log_sum_exp(S[i]);
        loss += (-S[i][i] + lse) * w;
        for (std::size_t j = 0; j < n; ++j) {
            G[i][j] += (std::exp(S[i][j] - lse) - (i == j ? 1.0 : 0.0)) * w;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = S[i][j];
        const double lse = log_sum_exp(col);
        loss += (-S[j][j] + lse) * w;
        for (std::size_t i = 0; i < n; ++i) {
            G[i][j] += (std::exp(S[i][j] - lse) - (i == j ? 1.0 : 0.0)) * w;
        }
    }

    std::vector<Vec> grad_u(n, Vec(dim, 0.0)), grad_v(n, Vec(dim, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double g = G[i][j] / tau;
            if (g == 0.0) continue;
            for (std::size_t t = 0; t < dim; ++t) {
                grad_u[i][t] += g * v[j][t];
                grad_v[j][t] += g * u[i][t];
            }
        }
    }

    LossResult r;
    r.loss = loss;
    r.grad_embeddings.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        r.grad_embeddings[i] = normalize_backward(image_embs[i], u[i], grad_u[i]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        r.grad_embeddings[n + j] = normalize_backward(text_embs[j], v[j], grad_v[j]);
    }
    return r;
}

} // namespace proxyforge
