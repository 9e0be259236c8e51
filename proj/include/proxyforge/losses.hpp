#pragma once

#include <string>
#include <vector>

#include "proxyforge/embedding.hpp"
#include "proxyforge/mining.hpp"

namespace proxyforge {

// Role of an item inside a training batch. Background items never receive a
// loss term of their own; they only enter other items' denominators.
enum class Role { seed, hard_negative, background };

struct BatchItem {
    std::string sample_id;
    std::string class_id;
    Vec embedding; // raw network output, normalized inside the losses
    Role role = Role::seed;
};

// Scalar loss plus gradients with respect to every raw input vector.
// grad_embeddings is aligned with the batch (for alignment_loss: images
// first, then texts); grad_proxies is aligned with the ProxyTable order.
// item_losses is aligned with the batch for the NCA-style losses; items
// that contribute no loss term of their own (background-class items) hold
// NaN there, and alignment_loss leaves the vector empty.
struct LossResult {
    double loss = 0.0;
    std::vector<Vec> grad_embeddings;
    std::vector<Vec> grad_proxies;
    std::vector<double> item_losses;
};

// Positive classes, optional background classes, and the hard-negative map
// used by the HN variant of the loss.
struct LabelSpace {
    std::vector<std::string> positive_classes;
    std::vector<std::string> background_classes;
    HardNegativeMap hard_negative_map;

    bool is_positive(const std::string& class_id) const;
    bool is_background(const std::string& class_id) const;

    // Throws ValidationError if the two class sets overlap or contain
    // duplicates, or if a map value names a class outside both sets.
    void validate() const;
};

// loss = -log(g(f, z_pos) / sum_z g(f, z)) over all proxies z, computed in
// log space. Gradients cover the item embedding and every proxy.
LossResult proxynca_pp_loss(const BatchItem& item, const ProxyTable& proxies, double sigma);

// Mean of proxynca_pp_loss over the batch, with gradients accumulated per
// item and per proxy.
LossResult proxynca_pp_batch(const std::vector<BatchItem>& batch, const ProxyTable& proxies,
                             double sigma);

// Hard-negative variant: each positive-class item's denominator additionally
// sums g(f_i, f_j) over batch embeddings whose class is a hard negative of
// the item's class, plus g(f_i, f_j) over all background-class batch
// embeddings. Mean over items with a positive class; background items get
// gradients only through the denominators they appear in.
LossResult proxyncahn_pp_loss(const std::vector<BatchItem>& batch, const ProxyTable& proxies,
                              const LabelSpace& labels, double sigma);

// Symmetric InfoNCE over the NxN scaled dot-product matrix of normalized
// image/text embeddings with diagonal targets:
//   loss = 1/2 (mean_i rowCE_i + mean_j colCE_j)
// grad_embeddings holds N image gradients followed by N text gradients.
LossResult alignment_loss(const std::vector<Vec>& image_embs, const std::vector<Vec>& text_embs,
                          double tau);

} // namespace proxyforge
