#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "proxyforge/embedding.hpp"
#include "proxyforge/rng.hpp"

namespace proxyforge {

// y = W x + b with W stored row-major [out_dim x in_dim].
struct AffineLayer {
    int in_dim = 0;
    int out_dim = 0;
    std::vector<double> weight;
    Vec bias;

    static AffineLayer zeros(int in_dim, int out_dim);
    Vec apply(const Vec& x) const;
};

// Exact GELU: x * Phi(x) with the Gaussian CDF, and its derivative.
double gelu(double x);
double gelu_grad(double x);

struct ModelConfig {
    int input_dim = 16;
    std::vector<int> trunk_sizes; // hidden widths; empty = identity trunk
    int embedding_dim = 128;
    std::uint64_t init_seed = 0;
};

// Gradient holder shaped exactly like the model parameters.
struct ModelGrads {
    std::vector<AffineLayer> trunk;
    AffineLayer fc;
};

// Trunk of affine+GELU layers (possibly empty, i.e. identity) followed by a
// final affine projection to the embedding dimension.
struct EmbedderModel {
    ModelConfig cfg;
    std::vector<AffineLayer> trunk;
    AffineLayer fc;

    EmbedderModel() = default;
    // Weights ~ N(0, 1/in_dim), biases zero, drawn from init_seed.
    explicit EmbedderModel(const ModelConfig& config);

    int input_dim() const { return cfg.input_dim; }
    int output_dim() const { return cfg.embedding_dim; }

    Vec forward(const Vec& x) const;

    // Activations recorded by forward_trace for one input, consumed by
    // backward. pre[i] holds trunk layer i's pre-activation, act[i] the
    // input fed into layer i (act[0] = x); act.back() feeds the fc layer.
    struct Trace {
        std::vector<Vec> act;
        std::vector<Vec> pre;
    };
    Vec forward_trace(const Vec& x, Trace& trace) const;

    // Accumulates d(loss)/d(params) into grads given d(loss)/d(output).
    void backward(const Trace& trace, const Vec& grad_out, ModelGrads& grads) const;

    ModelGrads zero_grads() const;
};

// Flat parameter views in a fixed order (per layer: weights row-major, then
// bias), used by the optimizer and the checkpoint writer.
std::vector<double*> trunk_param_ptrs(EmbedderModel& model);
std::vector<double*> fc_param_ptrs(EmbedderModel& model);
std::vector<double> trunk_grad_values(const ModelGrads& grads);
std::vector<double> fc_grad_values(const ModelGrads& grads);

} // namespace proxyforge
