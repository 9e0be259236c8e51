#include "proxyforge/sampling.hpp"

#include <algorithm>
#include <set>

#include "proxyforge/errors.hpp"

namespace proxyforge {

namespace {

// m ids from one class: without replacement when possible, with replacement
// for classes smaller than m.
void draw_class_samples(const std::string& class_id, const std::vector<std::string>& ids, int m,
                        Role role, Rng& rng, std::vector<SampledItem>& out) {
    if (ids.empty()) throw EmptyClassError("sampler: class " + class_id + " has no samples");
    const std::size_t n = ids.size();
    if (n >= static_cast<std::size_t>(m)) {
        for (std::size_t pick : rng.choose(n, static_cast<std::size_t>(m))) {
            out.push_back({ids[pick], class_id, role});
        }
    } else {
        for (int i = 0; i < m; ++i) {
            out.push_back({ids[rng.bounded(n)], class_id, role});
        }
    }
}

} // namespace

Batch sample_batch(const ClassIndex& index, const HardNegativeMap& h, const SamplerConfig& cfg,
                   Rng& rng, const ClassIndex* background_index) {
    if (cfg.k < 1 || cfg.m < 1) throw ValidationError("sampler: k and m must be positive");
    if (index.size() < static_cast<std::size_t>(cfg.k)) {
        throw InsufficientClassesError("sampler: " + std::to_string(index.size()) +
                                       " classes available, need k=" + std::to_string(cfg.k));
    }

    std::vector<const ClassIndex::value_type*> classes;
    classes.reserve(index.size());
    for (const auto& entry : index) classes.push_back(&entry);

    Batch batch;
    std::set<std::string> in_batch;
    for (std::size_t pick : rng.choose(classes.size(), static_cast<std::size_t>(cfg.k))) {
        const auto& [class_id, ids] = *classes[pick];
        batch.seed_classes.push_back(class_id);
        in_batch.insert(class_id);
        draw_class_samples(class_id, ids, cfg.m, Role::seed, rng, batch.items);
    }

    for (const auto& seed_class : batch.seed_classes) {
        std::vector<std::string> candidates = h.negatives_for(seed_class);
        if (candidates.empty()) continue;
        rng.shuffle(candidates);
        for (const auto& cand : candidates) {
            auto it = index.find(cand);
            if (it == index.end() || in_batch.count(cand)) continue;
            batch.hard_negative_classes.push_back(cand);
            in_batch.insert(cand);
            draw_class_samples(cand, it->second, cfg.m, Role::hard_negative, rng, batch.items);
            break;
        }
    }

    if (cfg.background_per_batch > 0 && background_index && !background_index->empty()) {
        std::vector<std::pair<const std::string*, const std::string*>> pool;
        for (const auto& [class_id, ids] : *background_index) {
            for (const auto& id : ids) pool.push_back({&id, &class_id});
        }
        const std::size_t want = static_cast<std::size_t>(cfg.background_per_batch);
        if (pool.size() >= want) {
            for (std::size_t pick : rng.choose(pool.size(), want)) {
                batch.items.push_back({*pool[pick].first, *pool[pick].second, Role::background});
            }
        } else {
            for (std::size_t i = 0; i < want; ++i) {
                const auto& [id, class_id] = pool[rng.bounded(pool.size())];
                batch.items.push_back({*id, *class_id, Role::background});
            }
        }
    }

    return batch;
}

std::vector<Batch> epoch_batches(const ClassIndex& index, const HardNegativeMap& h,
                                 const SamplerConfig& cfg, Rng& rng,
                                 const ClassIndex* background_index) {
    if (cfg.k < 1 || cfg.m < 1) throw ValidationError("sampler: k and m must be positive");
    std::size_t total = 0;
    for (const auto& [class_id, ids] : index) total += ids.size();
    const std::size_t per_batch = static_cast<std::size_t>(cfg.k) * static_cast<std::size_t>(cfg.m);
    const std::size_t count = (total + per_batch - 1) / per_batch;
    std::vector<Batch> batches;
    batches.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        batches.push_back(sample_batch(index, h, cfg, rng, background_index));
    }
    return batches;
}

} // namespace proxyforge
