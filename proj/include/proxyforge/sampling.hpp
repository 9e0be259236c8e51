#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "proxyforge/losses.hpp"
#include "proxyforge/mining.hpp"
#include "proxyforge/rng.hpp"

namespace proxyforge {

// class -> sample ids; std::map keeps class iteration order deterministic.
using ClassIndex = std::map<std::string, std::vector<std::string>>;

struct SamplerConfig {
    int k = 4; // seed classes per batch
    int m = 4; // samples per class
    std::uint64_t seed = 0;
    // Background items appended per batch on top of the km..2km window
    // (drawn from the background index when one is supplied).
    int background_per_batch = 0;
};

struct SampledItem {
    std::string sample_id;
    std::string class_id;
    Role role = Role::seed;
};

struct Batch {
    std::vector<SampledItem> items;
    std::vector<std::string> seed_classes;
    std::vector<std::string> hard_negative_classes;
};

// Draws k distinct seed classes and m samples per class (without
// replacement; with replacement when the class holds fewer than m). Then,
// for each seed class l in draw order, shuffles h(l) and adds m samples of
// the first class that is in the index and not already in the batch, with
// role hard_negative. Seed+hard-negative size is always within [km, 2km].
// Hard negatives are never chased transitively for added classes.
Batch sample_batch(const ClassIndex& index, const HardNegativeMap& h, const SamplerConfig& cfg,
                   Rng& rng, const ClassIndex* background_index = nullptr);

// ceil(total samples / (k*m)) independently sampled batches from one RNG
// stream; bit-reproducible for a fixed starting state.
std::vector<Batch> epoch_batches(const ClassIndex& index, const HardNegativeMap& h,
                                 const SamplerConfig& cfg, Rng& rng,
                                 const ClassIndex* background_index = nullptr);

} // namespace proxyforge
