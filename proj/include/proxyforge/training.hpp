#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "proxyforge/formats.hpp"
#include "proxyforge/losses.hpp"
#include "proxyforge/model.hpp"
#include "proxyforge/optimizer.hpp"
#include "proxyforge/sampling.hpp"

namespace proxyforge {

struct SyntheticDatasetConfig {
    int num_classes = 20;
    int samples_per_class = 50;
    int input_dim = 16;
    double noise_scale = 0.05;
    // Cohorts of near-duplicate classes: members share a base prototype
    // perturbed by cohort_offset (0 = identical prototypes).
    int num_confusable_cohorts = 0;
    int cohort_size = 3;
    double cohort_offset = 0.1;
    double text_class_fraction = 0.0; // fraction of plain classes named *_text
    double min_side_lo = 20.0;        // pseudo min-side-length range, pixels
    double min_side_hi = 120.0;
    int background_classes = 0;
    int background_samples_per_class = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SyntheticDataset {
    Dataset records;
    std::vector<std::string> positive_classes;
    std::vector<std::string> background_classes;
    std::vector<std::vector<std::string>> cohorts;
};

// Prototypes are random unit directions; samples add Gaussian noise of
// noise_scale per component. Byte-identical output for a fixed seed.
SyntheticDataset generate_synthetic(const SyntheticDatasetConfig& cfg);

// proxy(c) = mean embedding of class-c samples under the current model; a
// mean with norm < 1e-8 is replaced by a seeded random unit vector. The
// table covers `classes` in the given order.
ProxyTable init_proxies(const EmbedderModel& model, const Dataset& train_set,
                        const std::vector<std::string>& classes, std::uint64_t seed);

enum class LossChoice { proxynca_pp, proxyncahn_pp };
enum class Monitor { val_loss, val_recall };

std::string loss_choice_name(LossChoice c);
LossChoice loss_choice_from_name(const std::string& name);
std::string monitor_name(Monitor m);
Monitor monitor_from_name(const std::string& name);

struct TrainConfig {
    ModelConfig model;
    SamplerConfig sampler;
    OptimizerConfig optimizer;
    LossChoice loss = LossChoice::proxynca_pp;
    Monitor monitor = Monitor::val_loss;
    std::uint64_t seed = 0; // master seed; model init, sampling, and proxy
                            // fallbacks derive independent streams from it
};

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double lr_trunk = 0.0;
    double lr_fc = 0.0;
    double lr_proxy = 0.0;
};

struct TrainResult {
    EmbedderModel model;
    ProxyTable proxies;
    std::vector<EpochRecord> history;
};

// Everything needed to continue a run exactly where it stopped, kept at
// full double precision (the checkpoint payload is 32-bit and cannot
// reproduce the remaining epochs bit-for-bit).
struct TrainState {
    int completed_epochs = 0;
    EmbedderModel model;
    ProxyTable proxies;
    AdamWState opt_trunk, opt_fc, opt_proxy;
    LearningRates rates;
    double sched_best = 0.0;
    bool sched_has_best = false;
    int sched_wait = 0;
    std::string sampler_rng_state;
    std::vector<EpochRecord> history;
};

// Epoch loop: sample episodic batches, forward every item, apply the chosen
// loss, reverse-accumulate into trunk/fc/proxy groups, AdamW per group, and
// report the monitored value to the plateau scheduler once per epoch.
// History rows carry the rates in effect during that epoch. The validation
// loss is the plain per-item loss over positive-class val items (falls back
// to the train loss when the val set has none). Deterministic given cfg.
// Pass `resume` to continue a run; `final_state` receives the end state.
TrainResult train(const Dataset& train_set, const Dataset& val_set, const LabelSpace& labels,
                  const TrainConfig& cfg, const TrainState* resume = nullptr,
                  TrainState* final_state = nullptr);

std::string history_to_jsonl(const std::vector<EpochRecord>& history);
std::vector<EpochRecord> history_from_jsonl(const std::string& text);

// Checkpoint file: one JSON header line (dims, layer sizes, group names,
// proxy classes, seed, config hash, parameter count) followed by the
// parameters as 32-bit IEEE-754 little-endian, in declared order: trunk
// layers (weights row-major, then bias), fc, then proxies in table order.
void save_checkpoint(const std::string& path, const EmbedderModel& model, const ProxyTable& proxies,
                     std::uint64_t seed, const std::string& config_hash_hex);

struct Checkpoint {
    EmbedderModel model;
    ProxyTable proxies;
    std::uint64_t seed = 0;
    std::string config_hash;
};

Checkpoint load_checkpoint(const std::string& path);

std::string train_state_to_json(const TrainState& state);
TrainState train_state_from_json(const std::string& text);

} // namespace proxyforge
