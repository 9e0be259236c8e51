#include "proxyforge/training.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <optional>
#include <set>

#include "json.hpp"
#include "proxyforge/errors.hpp"
#include "proxyforge/evaluation.hpp"
#include "proxyforge/util.hpp"

namespace proxyforge {

namespace {

// Distinct word suffixes keep cohort member names more than an edit or two
// apart, so the Levenshtein rule never filters within-cohort pairs.
const char* kCohortWords[] = {"alpha", "bravo", "charlie", "delta",
                              "echo",  "foxtrot", "golf",  "hotel"};
constexpr int kMaxCohortSize = 8;

std::string format_name(const char* fmt, int a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, a);
    return buf;
}

Vec random_unit(Rng& rng, int dim) {
    for (;;) {
        Vec v(static_cast<std::size_t>(dim));
        for (double& x : v) x = rng.normal();
        const double n = norm2(v);
        if (n > 1e-12) {
            for (double& x : v) x /= n;
            return v;
        }
    }
}

} // namespace

void SyntheticDatasetConfig::validate() const {
    if (num_classes < 1) throw ValidationError("synthetic: num_classes must be >= 1");
    if (samples_per_class < 1) throw ValidationError("synthetic: samples_per_class must be >= 1");
    if (input_dim < 1) throw ValidationError("synthetic: input_dim must be >= 1");
    if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
        throw ValidationError("synthetic: noise_scale must be nonnegative");
    }
    if (num_confusable_cohorts < 0) throw ValidationError("synthetic: negative cohort count");
    if (num_confusable_cohorts > 0) {
        if (cohort_size < 2 || cohort_size > kMaxCohortSize) {
            throw ValidationError("synthetic: cohort_size must be in [2, " +
                                  std::to_string(kMaxCohortSize) + "]");
        }
        if (num_confusable_cohorts * cohort_size > num_classes) {
            throw ValidationError("synthetic: cohorts need more classes than num_classes");
        }
        if (!(cohort_offset >= 0.0) || !std::isfinite(cohort_offset)) {
            throw ValidationError("synthetic: cohort_offset must be nonnegative");
        }
    }
    if (text_class_fraction < 0.0 || text_class_fraction > 1.0) {
        throw ValidationError("synthetic: text_class_fraction must be in [0, 1]");
    }
    if (!(min_side_lo > 0.0) || min_side_hi < min_side_lo) {
        throw ValidationError("synthetic: min side range must satisfy 0 < lo <= hi");
    }
    if (background_classes < 0 || (background_classes > 0 && background_samples_per_class < 1)) {
        throw ValidationError("synthetic: background classes need >= 1 sample each");
    }
}

SyntheticDataset generate_synthetic(const SyntheticDatasetConfig& cfg) {
    cfg.validate();
    Rng rng(derive_seed(cfg.seed, "synth"));

    SyntheticDataset out;
    std::vector<std::pair<std::string, Vec>> protos; // positive classes, in order

    for (int c = 0; c < cfg.num_confusable_cohorts; ++c) {
        const Vec base = random_unit(rng, cfg.input_dim);
        std::vector<std::string> cohort;
        for (int j = 0; j < cfg.cohort_size; ++j) {
            Vec proto = base;
            const Vec pert = random_unit(rng, cfg.input_dim);
            for (int t = 0; t < cfg.input_dim; ++t) {
                proto[static_cast<std::size_t>(t)] += cfg.cohort_offset * pert[static_cast<std::size_t>(t)];
            }
            proto = l2_normalize(proto);
            std::string name = format_name("c%02d_", c) + kCohortWords[j];
            cohort.push_back(name);
            protos.emplace_back(std::move(name), std::move(proto));
        }
        out.cohorts.push_back(std::move(cohort));
    }

    const int plain = cfg.num_classes - cfg.num_confusable_cohorts * cfg.cohort_size;
    const int text_count = static_cast<int>(std::floor(cfg.text_class_fraction * plain));
    for (int i = 0; i < plain; ++i) {
        std::string name = format_name("class_%03d", i);
        if (i < text_count) name += "_text";
        protos.emplace_back(std::move(name), random_unit(rng, cfg.input_dim));
    }

    std::vector<std::pair<std::string, Vec>> bg_protos;
    for (int b = 0; b < cfg.background_classes; ++b) {
        bg_protos.emplace_back(format_name("bg_%02d", b), random_unit(rng, cfg.input_dim));
    }

    auto emit_samples = [&](const std::string& class_name, const Vec& proto, int count) {
        for (int s = 0; s < count; ++s) {
            VectorRecord r;
            r.id = class_name + format_name("_s%04d", s);
            r.class_name = class_name;
            r.vec = proto;
            for (double& x : r.vec) x += cfg.noise_scale * rng.normal();
            r.min_side_px = rng.uniform(cfg.min_side_lo, cfg.min_side_hi);
            out.records.push_back(std::move(r));
        }
    };

    for (const auto& [name, proto] : protos) {
        out.positive_classes.push_back(name);
        emit_samples(name, proto, cfg.samples_per_class);
    }
    for (const auto& [name, proto] : bg_protos) {
        out.background_classes.push_back(name);
        emit_samples(name, proto, cfg.background_samples_per_class);
    }
    return out;
}

ProxyTable init_proxies(const EmbedderModel& model, const Dataset& train_set,
                        const std::vector<std::string>& classes, std::uint64_t seed) {
    std::map<std::string, std::pair<Vec, std::size_t>> sums;
    for (const auto& c : classes) sums[c] = {Vec(static_cast<std::size_t>(model.output_dim()), 0.0), 0};
    for (const auto& r : train_set) {
        auto it = sums.find(r.class_name);
        if (it == sums.end()) continue;
        const Vec emb = model.forward(r.vec);
        for (std::size_t t = 0; t < emb.size(); ++t) it->second.first[t] += emb[t];
        ++it->second.second;
    }

    ProxyTable table;
    for (const auto& c : classes) {
        auto& [sum, count] = sums[c];
        if (count == 0) throw EmptyClassError("init_proxies: class " + c + " has no samples");
        Vec mean = sum;
        for (double& x : mean) x /= static_cast<double>(count);
        if (norm2(mean) < 1e-8) {
            Rng rng(derive_seed(seed, "proxy-fallback:" + c));
            mean = random_unit(rng, model.output_dim());
        }
        table.add(c, std::move(mean));
    }
    return table;
}

std::string loss_choice_name(LossChoice c) {
    return c == LossChoice::proxynca_pp ? "proxynca_pp" : "proxyncahn_pp";
}

LossChoice loss_choice_from_name(const std::string& name) {
    if (name == "proxynca_pp") return LossChoice::proxynca_pp;
    if (name == "proxyncahn_pp") return LossChoice::proxyncahn_pp;
    throw ValidationError("unknown loss \"" + name + "\" (proxynca_pp | proxyncahn_pp)");
}

std::string monitor_name(Monitor m) { return m == Monitor::val_loss ? "val_loss" : "val_recall"; }

Monitor monitor_from_name(const std::string& name) {
    if (name == "val_loss") return Monitor::val_loss;
    if (name == "val_recall") return Monitor::val_recall;
    throw ValidationError("unknown monitor \"" + name + "\" (val_loss | val_recall)");
}

TrainResult train(const Dataset& train_set, const Dataset& val_set, const LabelSpace& labels,
                  const TrainConfig& cfg, const TrainState* resume, TrainState* final_state) {
    labels.validate();
    if (train_set.empty()) throw EmptySetError("train: empty training set");
    const std::size_t input_dim = static_cast<std::size_t>(cfg.model.input_dim);

    std::map<std::string, const VectorRecord*> by_id;
    ClassIndex pos_index, bg_index;
    for (const auto& r : train_set) {
        if (r.vec.size() != input_dim) {
            throw DimensionMismatchError("train: sample " + r.id + " has dimension " +
                                         std::to_string(r.vec.size()) + ", model expects " +
                                         std::to_string(input_dim));
        }
        if (!by_id.emplace(r.id, &r).second) {
            throw ValidationError("train: duplicate sample id " + r.id);
        }
        if (labels.is_positive(r.class_name)) {
            pos_index[r.class_name].push_back(r.id);
        } else if (labels.is_background(r.class_name)) {
            bg_index[r.class_name].push_back(r.id);
        } else {
            throw UnknownClassError("train: class " + r.class_name + " is not in the label space");
        }
    }
    for (const auto& c : labels.positive_classes) {
        if (!pos_index.count(c)) throw EmptyClassError("train: class " + c + " has no samples");
    }
    {
        std::set<std::string> val_ids;
        for (const auto& r : val_set) {
            if (r.vec.size() != input_dim) {
                throw DimensionMismatchError("train: val sample " + r.id + " has wrong dimension");
            }
            if (!labels.is_positive(r.class_name) && !labels.is_background(r.class_name)) {
                throw UnknownClassError("train: val class " + r.class_name +
                                        " is not in the label space");
            }
            if (!val_ids.insert(r.id).second) {
                throw ValidationError("train: duplicate val sample id " + r.id);
            }
        }
    }

    const bool hard_negatives = cfg.loss == LossChoice::proxyncahn_pp;
    const HardNegativeMap no_map;
    const HardNegativeMap& h = hard_negatives ? labels.hard_negative_map : no_map;
    const double sigma = cfg.optimizer.sigma;

    EmbedderModel model;
    ProxyTable proxies;
    AdamWState st_trunk, st_fc, st_proxy;
    PlateauScheduler sched({cfg.optimizer.trunk.lr, cfg.optimizer.fc.lr, cfg.optimizer.proxy.lr},
                           cfg.optimizer.plateau_patience, cfg.optimizer.plateau_factor);
    Rng sampler_rng(derive_seed(cfg.seed, "sampler"));
    std::vector<EpochRecord> history;
    int start_epoch = 0;

    if (resume) {
        model = resume->model;
        proxies = resume->proxies;
        st_trunk = resume->opt_trunk;
        st_fc = resume->opt_fc;
        st_proxy = resume->opt_proxy;
        sched.restore(resume->rates, resume->sched_best, resume->sched_has_best, resume->sched_wait);
        sampler_rng.set_state(resume->sampler_rng_state);
        history = resume->history;
        start_epoch = resume->completed_epochs;
    } else {
        ModelConfig mc = cfg.model;
        mc.init_seed = derive_seed(cfg.seed, "model");
        model = EmbedderModel(mc);
        proxies = init_proxies(model, train_set, labels.positive_classes,
                               derive_seed(cfg.seed, "proxy"));
    }

    auto val_items = [&]() {
        std::vector<BatchItem> items;
        for (const auto& r : val_set) {
            if (!labels.is_positive(r.class_name)) continue;
            items.push_back({r.id, r.class_name, model.forward(r.vec), Role::seed});
        }
        return items;
    };

    for (int epoch = start_epoch + 1; epoch <= cfg.optimizer.epochs; ++epoch) {
        GroupConfig g_trunk = cfg.optimizer.trunk;
        GroupConfig g_fc = cfg.optimizer.fc;
        GroupConfig g_proxy = cfg.optimizer.proxy;
        g_trunk.lr = sched.rates().trunk;
        g_fc.lr = sched.rates().fc;
        g_proxy.lr = sched.rates().proxy;

        const ClassIndex* bg =
            (hard_negatives && cfg.sampler.background_per_batch > 0 && !bg_index.empty())
                ? &bg_index
                : nullptr;
        const auto batches = epoch_batches(pos_index, h, cfg.sampler, sampler_rng, bg);

        double loss_sum = 0.0;
        for (const auto& batch : batches) {
            std::vector<BatchItem> items;
            std::vector<EmbedderModel::Trace> traces(batch.items.size());
            items.reserve(batch.items.size());
            for (std::size_t i = 0; i < batch.items.size(); ++i) {
                const auto& si = batch.items[i];
                Vec emb = model.forward_trace(by_id.at(si.sample_id)->vec, traces[i]);
                items.push_back({si.sample_id, si.class_id, std::move(emb), si.role});
            }

            const LossResult res = hard_negatives
                                       ? proxyncahn_pp_loss(items, proxies, labels, sigma)
                                       : proxynca_pp_batch(items, proxies, sigma);
            loss_sum += res.loss;

            ModelGrads grads = model.zero_grads();
            for (std::size_t i = 0; i < items.size(); ++i) {
                model.backward(traces[i], res.grad_embeddings[i], grads);
            }

            const auto trunk_ptrs = trunk_param_ptrs(model);
            if (!trunk_ptrs.empty()) {
                adamw_step(trunk_ptrs, trunk_grad_values(grads), st_trunk, g_trunk);
            }
            adamw_step(fc_param_ptrs(model), fc_grad_values(grads), st_fc, g_fc);

            std::vector<double*> proxy_ptrs;
            std::vector<double> proxy_grads;
            for (auto& v : proxies.vectors) {
                for (double& x : v) proxy_ptrs.push_back(&x);
            }
            for (const auto& gv : res.grad_proxies) {
                proxy_grads.insert(proxy_grads.end(), gv.begin(), gv.end());
            }
            adamw_step(proxy_ptrs, proxy_grads, st_proxy, g_proxy);
        }

        const double train_loss = loss_sum / static_cast<double>(batches.size());
        const auto vitems = val_items();
        const double val_loss =
            vitems.empty() ? train_loss : proxynca_pp_batch(vitems, proxies, sigma).loss;

        double monitored = val_loss;
        if (cfg.monitor == Monitor::val_recall && vitems.size() >= 2) {
            std::vector<EvalItem> eitems;
            eitems.reserve(vitems.size());
            for (const auto& b : vitems) {
                EvalItem e;
                e.sample_id = b.sample_id;
                e.class_id = b.class_id;
                e.embedding = b.embedding;
                eitems.push_back(std::move(e));
            }
            monitored = -recall_at_1(eitems, eitems).recall;
        }

        history.push_back({epoch, train_loss, val_loss, g_trunk.lr, g_fc.lr, g_proxy.lr});
        sched.report(monitored);
    }

    if (final_state) {
        final_state->completed_epochs = std::max(start_epoch, cfg.optimizer.epochs);
        final_state->model = model;
        final_state->proxies = proxies;
        final_state->opt_trunk = st_trunk;
        final_state->opt_fc = st_fc;
        final_state->opt_proxy = st_proxy;
        final_state->rates = sched.rates();
        final_state->sched_best = sched.best();
        final_state->sched_has_best = sched.has_best();
        final_state->sched_wait = sched.wait();
        final_state->sampler_rng_state = sampler_rng.state();
        final_state->history = history;
    }

    return {std::move(model), std::move(proxies), std::move(history)};
}

namespace {

nlohmann::json epoch_to_json(const EpochRecord& r) {
    return {{"epoch", r.epoch},     {"train_loss", r.train_loss}, {"val_loss", r.val_loss},
            {"lr_trunk", r.lr_trunk}, {"lr_fc", r.lr_fc},         {"lr_proxy", r.lr_proxy}};
}

EpochRecord epoch_from_json(const nlohmann::json& j) {
    EpochRecord r;
    r.epoch = j.at("epoch").get<int>();
    r.train_loss = j.at("train_loss").get<double>();
    r.val_loss = j.at("val_loss").get<double>();
    r.lr_trunk = j.at("lr_trunk").get<double>();
    r.lr_fc = j.at("lr_fc").get<double>();
    r.lr_proxy = j.at("lr_proxy").get<double>();
    return r;
}

} // namespace

std::string history_to_jsonl(const std::vector<EpochRecord>& history) {
    std::string out;
    for (const auto& r : history) out += epoch_to_json(r).dump() + "\n";
    return out;
}

std::vector<EpochRecord> history_from_jsonl(const std::string& text) {
    std::vector<EpochRecord> history;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        ++line_no;
        const std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty()) continue;
        try {
            history.push_back(epoch_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("history line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return history;
}

namespace {

void append_f32_le(std::string& out, double v) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    out.push_back(static_cast<char>(bits & 0xff));
    out.push_back(static_cast<char>((bits >> 8) & 0xff));
    out.push_back(static_cast<char>((bits >> 16) & 0xff));
    out.push_back(static_cast<char>((bits >> 24) & 0xff));
}

double read_f32_le(const unsigned char* p) {
    const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                               (static_cast<std::uint32_t>(p[1]) << 8) |
                               (static_cast<std::uint32_t>(p[2]) << 16) |
                               (static_cast<std::uint32_t>(p[3]) << 24);
    float f;
    std::memcpy(&f, &bits, 4);
    return static_cast<double>(f);
}

void append_layer_params(std::string& out, const AffineLayer& l) {
    for (double w : l.weight) append_f32_le(out, w);
    for (double b : l.bias) append_f32_le(out, b);
}

std::size_t layer_param_count(const AffineLayer& l) { return l.weight.size() + l.bias.size(); }

} // namespace

void save_checkpoint(const std::string& path, const EmbedderModel& model, const ProxyTable& proxies,
                     std::uint64_t seed, const std::string& config_hash_hex) {
    std::size_t count = layer_param_count(model.fc);
    for (const auto& l : model.trunk) count += layer_param_count(l);
    for (const auto& v : proxies.vectors) count += v.size();

    nlohmann::json header;
    header["format"] = "proxyforge-checkpoint";
    header["version"] = 1;
    header["input_dim"] = model.cfg.input_dim;
    header["trunk_sizes"] = model.cfg.trunk_sizes;
    header["embedding_dim"] = model.cfg.embedding_dim;
    header["groups"] = {"trunk", "fc", "proxy"};
    header["classes"] = proxies.class_ids;
    header["seed"] = seed;
    header["config_hash"] = config_hash_hex;
    header["param_count"] = count;

    std::string out = header.dump() + "\n";
    for (const auto& l : model.trunk) append_layer_params(out, l);
    append_layer_params(out, model.fc);
    for (const auto& v : proxies.vectors) {
        for (double x : v) append_f32_le(out, x);
    }
    write_text_file(path, out);
}

Checkpoint load_checkpoint(const std::string& path) {
    const std::string data = read_text_file(path);
    const std::size_t nl = data.find('\n');
    if (nl == std::string::npos) throw ValidationError("checkpoint " + path + ": missing header");

    nlohmann::json header;
    Checkpoint ck;
    std::size_t count = 0;
    std::vector<std::string> classes;
    try {
        header = nlohmann::json::parse(data.substr(0, nl));
        if (header.at("format").get<std::string>() != "proxyforge-checkpoint") {
            throw ValidationError("checkpoint " + path + ": unrecognized format");
        }
        ck.model.cfg.input_dim = header.at("input_dim").get<int>();
        ck.model.cfg.trunk_sizes = header.at("trunk_sizes").get<std::vector<int>>();
        ck.model.cfg.embedding_dim = header.at("embedding_dim").get<int>();
        ck.seed = header.at("seed").get<std::uint64_t>();
        ck.model.cfg.init_seed = ck.seed;
        ck.config_hash = header.value("config_hash", "");
        count = header.at("param_count").get<std::size_t>();
        classes = header.at("classes").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("checkpoint " + path + ": bad header: " + e.what());
    }

    const std::size_t payload = data.size() - nl - 1;
    if (payload != count * 4) {
        throw ValidationError("checkpoint " + path + ": payload holds " +
                              std::to_string(payload / 4) + " values, header declares " +
                              std::to_string(count));
    }

    int in_dim = ck.model.cfg.input_dim;
    for (int width : ck.model.cfg.trunk_sizes) {
        ck.model.trunk.push_back(AffineLayer::zeros(in_dim, width));
        in_dim = width;
    }
    ck.model.fc = AffineLayer::zeros(in_dim, ck.model.cfg.embedding_dim);

    const auto* p = reinterpret_cast<const unsigned char*>(data.data()) + nl + 1;
    auto take = [&p]() {
        const double v = read_f32_le(p);
        p += 4;
        return v;
    };
    auto fill_layer = [&take](AffineLayer& l) {
        for (double& w : l.weight) w = take();
        for (double& b : l.bias) b = take();
    };
    for (auto& l : ck.model.trunk) fill_layer(l);
    fill_layer(ck.model.fc);
    for (const auto& c : classes) {
        Vec v(static_cast<std::size_t>(ck.model.cfg.embedding_dim));
        for (double& x : v) x = take();
        ck.proxies.add(c, std::move(v));
    }
    return ck;
}

namespace {

nlohmann::json affine_to_json(const AffineLayer& l) {
    return {{"in", l.in_dim}, {"out", l.out_dim}, {"weight", l.weight}, {"bias", l.bias}};
}

AffineLayer affine_from_json(const nlohmann::json& j) {
    AffineLayer l;
    l.in_dim = j.at("in").get<int>();
    l.out_dim = j.at("out").get<int>();
    l.weight = j.at("weight").get<std::vector<double>>();
    l.bias = j.at("bias").get<Vec>();
    return l;
}

nlohmann::json adamw_to_json(const AdamWState& s) {
    return {{"m", s.m}, {"v", s.v}, {"step", s.step}};
}

AdamWState adamw_from_json(const nlohmann::json& j) {
    AdamWState s;
    s.m = j.at("m").get<std::vector<double>>();
    s.v = j.at("v").get<std::vector<double>>();
    s.step = j.at("step").get<long>();
    return s;
}

} // namespace

std::string train_state_to_json(const TrainState& state) {
    nlohmann::json j;
    j["completed_epochs"] = state.completed_epochs;
    j["model"]["config"] = {{"input_dim", state.model.cfg.input_dim},
                            {"trunk_sizes", state.model.cfg.trunk_sizes},
                            {"embedding_dim", state.model.cfg.embedding_dim},
                            {"init_seed", state.model.cfg.init_seed}};
    auto trunk = nlohmann::json::array();
    for (const auto& l : state.model.trunk) trunk.push_back(affine_to_json(l));
    j["model"]["trunk"] = std::move(trunk);
    j["model"]["fc"] = affine_to_json(state.model.fc);
    j["proxies"] = {{"classes", state.proxies.class_ids}, {"vectors", state.proxies.vectors}};
    j["opt"] = {{"trunk", adamw_to_json(state.opt_trunk)},
                {"fc", adamw_to_json(state.opt_fc)},
                {"proxy", adamw_to_json(state.opt_proxy)}};
    j["sched"] = {{"lr_trunk", state.rates.trunk}, {"lr_fc", state.rates.fc},
                  {"lr_proxy", state.rates.proxy}, {"best", state.sched_best},
                  {"has_best", state.sched_has_best}, {"wait", state.sched_wait}};
    j["sampler_rng_state"] = state.sampler_rng_state;
    auto hist = nlohmann::json::array();
    for (const auto& r : state.history) hist.push_back(epoch_to_json(r));
    j["history"] = std::move(hist);
    return j.dump() + "\n";
}

TrainState train_state_from_json(const std::string& text) {
    TrainState state;
    try {
        auto j = nlohmann::json::parse(text);
        state.completed_epochs = j.at("completed_epochs").get<int>();
        const auto& mc = j.at("model").at("config");
        state.model.cfg.input_dim = mc.at("input_dim").get<int>();
        state.model.cfg.trunk_sizes = mc.at("trunk_sizes").get<std::vector<int>>();
        state.model.cfg.embedding_dim = mc.at("embedding_dim").get<int>();
        state.model.cfg.init_seed = mc.at("init_seed").get<std::uint64_t>();
        for (const auto& l : j.at("model").at("trunk")) {
            state.model.trunk.push_back(affine_from_json(l));
        }
        state.model.fc = affine_from_json(j.at("model").at("fc"));
        const auto classes = j.at("proxies").at("classes").get<std::vector<std::string>>();
        const auto vectors = j.at("proxies").at("vectors").get<std::vector<Vec>>();
        if (classes.size() != vectors.size()) {
            throw ValidationError("train state: proxy classes and vectors differ in length");
        }
        for (std::size_t i = 0; i < classes.size(); ++i) state.proxies.add(classes[i], vectors[i]);
        state.opt_trunk = adamw_from_json(j.at("opt").at("trunk"));
        state.opt_fc = adamw_from_json(j.at("opt").at("fc"));
        state.opt_proxy = adamw_from_json(j.at("opt").at("proxy"));
        const auto& sc = j.at("sched");
        state.rates = {sc.at("lr_trunk").get<double>(), sc.at("lr_fc").get<double>(),
                       sc.at("lr_proxy").get<double>()};
        state.sched_best = sc.at("best").get<double>();
        state.sched_has_best = sc.at("has_best").get<bool>();
        state.sched_wait = sc.at("wait").get<int>();
        state.sampler_rng_state = j.at("sampler_rng_state").get<std::string>();
        for (const auto& r : j.at("history")) state.history.push_back(epoch_from_json(r));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("train state JSON: ") + e.what());
    }
    return state;
}

} // namespace proxyforge
