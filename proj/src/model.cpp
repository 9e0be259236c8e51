#include "proxyforge/model.hpp"

#include <cmath>

#include "proxyforge/errors.hpp"
#include "proxyforge/util.hpp"

namespace proxyforge {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

void check_layer(const AffineLayer& l, const char* what) {
    if (l.in_dim <= 0 || l.out_dim <= 0 ||
        l.weight.size() != static_cast<std::size_t>(l.in_dim) * static_cast<std::size_t>(l.out_dim) ||
        l.bias.size() != static_cast<std::size_t>(l.out_dim)) {
        throw ValidationError(std::string(what) + ": inconsistent layer shape");
    }
}
} // namespace

AffineLayer AffineLayer::zeros(int in_dim, int out_dim) {
    AffineLayer l;
    l.in_dim = in_dim;
    l.out_dim = out_dim;
    l.weight.assign(static_cast<std::size_t>(in_dim) * static_cast<std::size_t>(out_dim), 0.0);
    l.bias.assign(static_cast<std::size_t>(out_dim), 0.0);
    return l;
}

Vec AffineLayer::apply(const Vec& x) const {
    if (x.size() != static_cast<std::size_t>(in_dim)) {
        throw DimensionMismatchError("affine layer: input has dimension " +
                                     std::to_string(x.size()) + ", expected " +
                                     std::to_string(in_dim));
    }
    Vec y(static_cast<std::size_t>(out_dim));
    for (int r = 0; r < out_dim; ++r) {
        const double* row = weight.data() + static_cast<std::size_t>(r) * in_dim;
        double acc = bias[static_cast<std::size_t>(r)];
        for (int c = 0; c < in_dim; ++c) acc += row[c] * x[static_cast<std::size_t>(c)];
        y[static_cast<std::size_t>(r)] = acc;
    }
    return y;
}

double gelu(double x) { return x * 0.5 * std::erfc(-x * kInvSqrt2); }

double gelu_grad(double x) {
    const double cdf = 0.5 * std::erfc(-x * kInvSqrt2);
    const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
    return cdf + x * pdf;
}

EmbedderModel::EmbedderModel(const ModelConfig& config) : cfg(config) {
    if (cfg.input_dim < 1 || cfg.embedding_dim < 1) {
        throw ValidationError("model: input_dim and embedding_dim must be positive");
    }
    for (int w : cfg.trunk_sizes) {
        if (w < 1) throw ValidationError("model: trunk widths must be positive");
    }
    Rng rng(derive_seed(cfg.init_seed, "model-init"));
    int in_dim = cfg.input_dim;
    auto init_layer = [&rng](int in, int out) {
        AffineLayer l = AffineLayer::zeros(in, out);
        const double scale = 1.0 / std::sqrt(static_cast<double>(in));
        for (double& w : l.weight) w = scale * rng.normal();
        return l;
    };
    for (int width : cfg.trunk_sizes) {
        trunk.push_back(init_layer(in_dim, width));
        in_dim = width;
    }
    fc = init_layer(in_dim, cfg.embedding_dim);
}

Vec EmbedderModel::forward(const Vec& x) const {
    Vec a = x;
    for (const auto& layer : trunk) {
        Vec z = layer.apply(a);
        for (double& v : z) v = gelu(v);
        a = std::move(z);
    }
    return fc.apply(a);
}

Vec EmbedderModel::forward_trace(const Vec& x, Trace& trace) const {
    trace.act.clear();
    trace.pre.clear();
    trace.act.push_back(x);
    for (const auto& layer : trunk) {
        Vec z = layer.apply(trace.act.back());
        trace.pre.push_back(z);
        for (double& v : z) v = gelu(v);
        trace.act.push_back(std::move(z));
    }
    return fc.apply(trace.act.back());
}

void EmbedderModel::backward(const Trace& trace, const Vec& grad_out, ModelGrads& grads) const {
    if (trace.act.size() != trunk.size() + 1 || trace.pre.size() != trunk.size()) {
        throw ValidationError("model backward: trace does not match the trunk depth");
    }
    if (grad_out.size() != static_cast<std::size_t>(fc.out_dim)) {
        throw DimensionMismatchError("model backward: output gradient has wrong dimension");
    }
    if (grads.trunk.size() != trunk.size()) {
        throw ValidationError("model backward: gradient holder does not match the model");
    }

    // fc: d/dW = grad_out (outer) act.back(); propagate g = W^T grad_out.
    const Vec& fc_in = trace.act.back();
    for (int r = 0; r < fc.out_dim; ++r) {
        const double g = grad_out[static_cast<std::size_t>(r)];
        double* wrow = grads.fc.weight.data() + static_cast<std::size_t>(r) * fc.in_dim;
        for (int c = 0; c < fc.in_dim; ++c) wrow[c] += g * fc_in[static_cast<std::size_t>(c)];
        grads.fc.bias[static_cast<std::size_t>(r)] += g;
    }
    Vec g(static_cast<std::size_t>(fc.in_dim), 0.0);
    for (int r = 0; r < fc.out_dim; ++r) {
        const double go = grad_out[static_cast<std::size_t>(r)];
        const double* wrow = fc.weight.data() + static_cast<std::size_t>(r) * fc.in_dim;
        for (int c = 0; c < fc.in_dim; ++c) g[static_cast<std::size_t>(c)] += wrow[c] * go;
    }

    for (std::size_t li = trunk.size(); li-- > 0;) {
        const AffineLayer& layer = trunk[li];
        AffineLayer& glayer = grads.trunk[li];
        const Vec& pre = trace.pre[li];
        const Vec& in = trace.act[li];
        Vec gz(static_cast<std::size_t>(layer.out_dim));
        for (int r = 0; r < layer.out_dim; ++r) {
            gz[static_cast<std::size_t>(r)] =
                g[static_cast<std::size_t>(r)] * gelu_grad(pre[static_cast<std::size_t>(r)]);
        }
        for (int r = 0; r < layer.out_dim; ++r) {
            const double gv = gz[static_cast<std::size_t>(r)];
            double* wrow = glayer.weight.data() + static_cast<std::size_t>(r) * layer.in_dim;
            for (int c = 0; c < layer.in_dim; ++c) wrow[c] += gv * in[static_cast<std::size_t>(c)];
            glayer.bias[static_cast<std::size_t>(r)] += gv;
        }
        Vec gprev(static_cast<std::size_t>(layer.in_dim), 0.0);
        for (int r = 0; r < layer.out_dim; ++r) {
            const double gv = gz[static_cast<std::size_t>(r)];
            const double* wrow = layer.weight.data() + static_cast<std::size_t>(r) * layer.in_dim;
            for (int c = 0; c < layer.in_dim; ++c) {
                gprev[static_cast<std::size_t>(c)] += wrow[c] * gv;
            }
        }
        g = std::move(gprev);
    }
}

ModelGrads EmbedderModel::zero_grads() const {
    ModelGrads grads;
    for (const auto& layer : trunk) grads.trunk.push_back(AffineLayer::zeros(layer.in_dim, layer.out_dim));
    grads.fc = AffineLayer::zeros(fc.in_dim, fc.out_dim);
    return grads;
}

namespace {
void collect_layer_ptrs(AffineLayer& l, std::vector<double*>& out) {
    check_layer(l, "param view");
    for (double& w : l.weight) out.push_back(&w);
    for (double& b : l.bias) out.push_back(&b);
}
void collect_layer_values(const AffineLayer& l, std::vector<double>& out) {
    check_layer(l, "grad view");
    out.insert(out.end(), l.weight.begin(), l.weight.end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
}
} // namespace

std::vector<double*> trunk_param_ptrs(EmbedderModel& model) {
    std::vector<double*> out;
    for (auto& layer : model.trunk) collect_layer_ptrs(layer, out);
    return out;
}

std::vector<double*> fc_param_ptrs(EmbedderModel& model) {
    std::vector<double*> out;
    collect_layer_ptrs(model.fc, out);
    return out;
}

std::vector<double> trunk_grad_values(const ModelGrads& grads) {
    std::vector<double> out;
    for (const auto& layer : grads.trunk) collect_layer_values(layer, out);
    return out;
}

std::vector<double> fc_grad_values(const ModelGrads& grads) {
    std::vector<double> out;
    collect_layer_values(grads.fc, out);
    return out;
}

} // namespace proxyforge
