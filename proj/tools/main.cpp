// proxyforge experiment driver: synth | train | eval | mine | clean | split
//
// Every subcommand is deterministic given its config and seeds. Seed
// precedence: --seed flag > config "seed" > PROXYFORGE_SEED env > 0.
// Exit codes: 0 success, 1 validation/config error, 2 runtime error.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"

#include "proxyforge/dataset_tools.hpp"
#include "proxyforge/errors.hpp"
#include "proxyforge/evaluation.hpp"
#include "proxyforge/formats.hpp"
#include "proxyforge/mining.hpp"
#include "proxyforge/training.hpp"
#include "proxyforge/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace proxyforge;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) throw ValidationError(where + ": unknown key \"" + key + "\"");
    }
}

json load_json_file(const std::string& path, const std::string& what) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ValidationError(what + " " + path + ": " + e.what());
    }
}

std::uint64_t env_or_default_seed() {
    if (const char* env = std::getenv("PROXYFORGE_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') {
            throw ValidationError(std::string("PROXYFORGE_SEED is not an integer: ") + env);
        }
        return static_cast<std::uint64_t>(v);
    }
    return 0;
}

std::uint64_t resolve_seed(bool flag_given, std::uint64_t flag_value, const json* config) {
    if (flag_given) return flag_value;
    if (config && config->contains("seed")) return config->at("seed").get<std::uint64_t>();
    return env_or_default_seed();
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

SyntheticDatasetConfig synth_config_from_json(const json& j) {
    check_keys(j,
               {"num_classes", "samples_per_class", "input_dim", "noise_scale",
                "num_confusable_cohorts", "cohort_size", "cohort_offset", "text_class_fraction",
                "min_side_lo", "min_side_hi", "background_classes", "background_samples_per_class",
                "seed"},
               "synthetic config");
    SyntheticDatasetConfig cfg;
    cfg.num_classes = j.value("num_classes", cfg.num_classes);
    cfg.samples_per_class = j.value("samples_per_class", cfg.samples_per_class);
    cfg.input_dim = j.value("input_dim", cfg.input_dim);
    cfg.noise_scale = j.value("noise_scale", cfg.noise_scale);
    cfg.num_confusable_cohorts = j.value("num_confusable_cohorts", cfg.num_confusable_cohorts);
    cfg.cohort_size = j.value("cohort_size", cfg.cohort_size);
    cfg.cohort_offset = j.value("cohort_offset", cfg.cohort_offset);
    cfg.text_class_fraction = j.value("text_class_fraction", cfg.text_class_fraction);
    cfg.min_side_lo = j.value("min_side_lo", cfg.min_side_lo);
    cfg.min_side_hi = j.value("min_side_hi", cfg.min_side_hi);
    cfg.background_classes = j.value("background_classes", cfg.background_classes);
    cfg.background_samples_per_class =
        j.value("background_samples_per_class", cfg.background_samples_per_class);
    cfg.seed = j.value("seed", cfg.seed);
    return cfg;
}

GroupConfig group_from_json(const json& j, GroupConfig defaults, const std::string& where) {
    check_keys(j, {"lr", "weight_decay", "beta1", "beta2", "eps"}, where);
    GroupConfig g = defaults;
    g.lr = j.value("lr", g.lr);
    g.weight_decay = j.value("weight_decay", g.weight_decay);
    g.beta1 = j.value("beta1", g.beta1);
    g.beta2 = j.value("beta2", g.beta2);
    g.eps = j.value("eps", g.eps);
    return g;
}

struct CliTrainConfig {
    TrainConfig train;
    double val_fraction = 0.2;
    std::string map_path;
};

CliTrainConfig train_config_from_json(const json& j) {
    check_keys(j, {"model", "sampler", "optimizer", "loss", "monitor", "val_fraction", "map", "seed"},
               "train config");
    CliTrainConfig cfg;
    if (j.contains("model")) {
        const auto& m = j.at("model");
        check_keys(m, {"input_dim", "trunk_sizes", "embedding_dim"}, "train config model");
        cfg.train.model.input_dim = m.value("input_dim", cfg.train.model.input_dim);
        cfg.train.model.trunk_sizes = m.value("trunk_sizes", cfg.train.model.trunk_sizes);
        cfg.train.model.embedding_dim = m.value("embedding_dim", cfg.train.model.embedding_dim);
    }
    if (j.contains("sampler")) {
        const auto& s = j.at("sampler");
        check_keys(s, {"k", "m", "background_per_batch"}, "train config sampler");
        cfg.train.sampler.k = s.value("k", cfg.train.sampler.k);
        cfg.train.sampler.m = s.value("m", cfg.train.sampler.m);
        cfg.train.sampler.background_per_batch =
            s.value("background_per_batch", cfg.train.sampler.background_per_batch);
    }
    if (j.contains("optimizer")) {
        const auto& o = j.at("optimizer");
        check_keys(o,
                   {"trunk", "fc", "proxy", "epochs", "plateau_patience", "plateau_factor", "sigma"},
                   "train config optimizer");
        auto& opt = cfg.train.optimizer;
        if (o.contains("trunk")) opt.trunk = group_from_json(o.at("trunk"), opt.trunk, "trunk group");
        if (o.contains("fc")) opt.fc = group_from_json(o.at("fc"), opt.fc, "fc group");
        if (o.contains("proxy")) opt.proxy = group_from_json(o.at("proxy"), opt.proxy, "proxy group");
        opt.epochs = o.value("epochs", opt.epochs);
        opt.plateau_patience = o.value("plateau_patience", opt.plateau_patience);
        opt.plateau_factor = o.value("plateau_factor", opt.plateau_factor);
        opt.sigma = o.value("sigma", opt.sigma);
    }
    if (j.contains("loss")) cfg.train.loss = loss_choice_from_name(j.at("loss").get<std::string>());
    if (j.contains("monitor")) {
        cfg.train.monitor = monitor_from_name(j.at("monitor").get<std::string>());
    }
    cfg.val_fraction = j.value("val_fraction", cfg.val_fraction);
    cfg.map_path = j.value("map", cfg.map_path);
    return cfg;
}

// Per-class holdout when no explicit validation file is given.
void holdout_val(const Dataset& all, double fraction, std::uint64_t seed, Dataset& train_out,
                 Dataset& val_out) {
    if (fraction < 0.0 || fraction >= 1.0) {
        throw ValidationError("val_fraction must be in [0, 1)");
    }
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < all.size(); ++i) by_class[all[i].class_name].push_back(i);
    std::vector<bool> in_val(all.size(), false);
    for (const auto& [class_name, indices] : by_class) {
        const auto want = static_cast<std::size_t>(
            std::floor(fraction * static_cast<double>(indices.size())));
        if (want == 0 || want >= indices.size()) continue;
        Rng rng(derive_seed(seed, "val-split:" + class_name));
        for (std::size_t pick : rng.choose(indices.size(), want)) in_val[indices[pick]] = true;
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
        (in_val[i] ? val_out : train_out).push_back(all[i]);
    }
}

// Sibling meta.json (written by synth) that records which classes are
// background; without it, every class trains as a positive.
std::vector<std::string> sidecar_background_classes(const std::string& data_path) {
    const fs::path meta = fs::path(data_path).parent_path() / "meta.json";
    std::error_code ec;
    if (!fs::exists(meta, ec)) return {};
    const json j = load_json_file(meta.string(), "dataset meta");
    if (!j.contains("background_classes")) return {};
    return j.at("background_classes").get<std::vector<std::string>>();
}

int cmd_synth(const std::string& config_path, const std::string& out_dir, bool seed_given,
              std::uint64_t seed_flag) {
    const json config = load_json_file(config_path, "synthetic config");
    SyntheticDatasetConfig cfg = synth_config_from_json(config);
    cfg.seed = resolve_seed(seed_given, seed_flag, &config);
    if (cfg.num_confusable_cohorts > 0 && cfg.cohort_offset == 0.0) {
        std::cerr << "warning: cohort_offset is 0; cohort prototypes are identical\n";
    }

    const SyntheticDataset data = generate_synthetic(cfg);
    ensure_out_dir(out_dir);
    const fs::path out(out_dir);
    save_dataset(data.records, (out / "dataset.jsonl").string());

    json canonical;
    canonical["generator"] = {{"num_classes", cfg.num_classes},
                              {"samples_per_class", cfg.samples_per_class},
                              {"input_dim", cfg.input_dim},
                              {"noise_scale", cfg.noise_scale},
                              {"num_confusable_cohorts", cfg.num_confusable_cohorts},
                              {"cohort_size", cfg.cohort_size},
                              {"cohort_offset", cfg.cohort_offset},
                              {"text_class_fraction", cfg.text_class_fraction},
                              {"min_side_lo", cfg.min_side_lo},
                              {"min_side_hi", cfg.min_side_hi},
                              {"background_classes", cfg.background_classes},
                              {"background_samples_per_class", cfg.background_samples_per_class},
                              {"seed", cfg.seed}};
    json meta = canonical;
    meta["config_hash"] = config_hash(canonical.dump());
    meta["positive_classes"] = data.positive_classes;
    meta["background_classes"] = data.background_classes;
    meta["cohorts"] = data.cohorts;
    write_text_file((out / "meta.json").string(), meta.dump(2) + "\n");

    std::cout << "wrote " << data.records.size() << " samples, "
              << data.positive_classes.size() << " positive classes, "
              << data.background_classes.size() << " background classes to " << out_dir << "\n";
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& data_path,
              const std::string& val_path, const std::string& out_dir, bool resume,
              const std::string& map_flag, const std::string& loss_flag, int epochs_flag,
              bool seed_given, std::uint64_t seed_flag) {
    const json config = load_json_file(config_path, "train config");
    CliTrainConfig cli = train_config_from_json(config);
    cli.train.seed = resolve_seed(seed_given, seed_flag, &config);
    if (!loss_flag.empty()) cli.train.loss = loss_choice_from_name(loss_flag);
    if (epochs_flag > 0) cli.train.optimizer.epochs = epochs_flag;
    if (!map_flag.empty()) cli.map_path = map_flag;

    const Dataset all = load_dataset(data_path);
    if (all.empty()) throw ValidationError("dataset " + data_path + " is empty");

    Dataset train_set, val_set;
    if (!val_path.empty()) {
        train_set = all;
        val_set = load_dataset(val_path);
    } else {
        holdout_val(all, cli.val_fraction, derive_seed(cli.train.seed, "holdout"), train_set,
                    val_set);
    }

    LabelSpace labels;
    {
        const auto bg = sidecar_background_classes(data_path);
        const std::set<std::string> bg_set(bg.begin(), bg.end());
        std::set<std::string> seen;
        for (const auto& r : train_set) seen.insert(r.class_name);
        for (const auto& r : val_set) seen.insert(r.class_name);
        for (const auto& c : seen) {
            (bg_set.count(c) ? labels.background_classes : labels.positive_classes).push_back(c);
        }
    }

    if (cli.train.loss == LossChoice::proxyncahn_pp) {
        if (cli.map_path.empty()) {
            throw ValidationError("loss proxyncahn_pp requires a hard-negative map (--map)");
        }
        HardNegativeMap full = map_from_json(read_text_file(cli.map_path));
        const std::set<std::string> known(labels.positive_classes.begin(),
                                          labels.positive_classes.end());
        HardNegativeMap usable;
        std::size_t dropped = 0;
        for (const auto& [key, negs] : full.entries) {
            if (!known.count(key)) {
                ++dropped;
                continue;
            }
            std::vector<std::string> kept;
            for (const auto& n : negs) {
                if (known.count(n) ||
                    std::count(labels.background_classes.begin(), labels.background_classes.end(),
                               n)) {
                    kept.push_back(n);
                } else {
                    ++dropped;
                }
            }
            if (!kept.empty()) usable.add(key, std::move(kept));
        }
        if (dropped > 0) {
            std::cerr << "warning: dropped " << dropped
                      << " hard-negative map entries naming classes absent from the dataset\n";
        }
        labels.hard_negative_map = std::move(usable);
    }

    if (cli.train.model.input_dim != static_cast<int>(all.front().vec.size())) {
        cli.train.model.input_dim = static_cast<int>(all.front().vec.size());
    }

    ensure_out_dir(out_dir);
    const fs::path out(out_dir);
    const std::string resume_path = (out / "resume.json").string();

    TrainState final_state;
    TrainResult result;
    if (resume) {
        const TrainState prior = train_state_from_json(read_text_file(resume_path));
        result = train(train_set, val_set, labels, cli.train, &prior, &final_state);
    } else {
        result = train(train_set, val_set, labels, cli.train, nullptr, &final_state);
    }

    const std::string hash = config_hash(config.dump());
    save_checkpoint((out / "checkpoint.bin").string(), result.model, result.proxies, cli.train.seed,
                    hash);
    write_text_file((out / "history.jsonl").string(), history_to_jsonl(result.history));
    write_meta_sidecar((out / "history.jsonl").string(), hash);
    write_text_file(resume_path, train_state_to_json(final_state));

    if (!result.history.empty()) {
        const auto& last = result.history.back();
        std::cout << "epoch " << last.epoch << ": train_loss " << last.train_loss << ", val_loss "
                  << last.val_loss << "\n";
    }
    std::cout << "checkpoint written to " << (out / "checkpoint.bin").string() << "\n";
    return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& data_path,
             const std::string& queries_path, const std::string& gallery_path,
             const std::string& out_path, const std::string& embeddings_out, int per_class,
             double small_max_px, bool seed_given, std::uint64_t seed_flag) {
    const Checkpoint ck = load_checkpoint(checkpoint_path);
    const std::uint64_t seed = resolve_seed(seed_given, seed_flag, nullptr);

    auto embed_file = [&ck](const std::string& path) {
        Dataset records = load_dataset(path);
        for (auto& r : records) r.vec = ck.model.forward(r.vec);
        return items_from_records(records);
    };

    std::vector<EvalItem> queries, gallery;
    if (!queries_path.empty() || !gallery_path.empty()) {
        if (queries_path.empty() || gallery_path.empty()) {
            throw ValidationError("--queries and --gallery must be given together");
        }
        queries = embed_file(queries_path);
        gallery = embed_file(gallery_path);
    } else {
        if (data_path.empty()) throw ValidationError("eval needs --data or --queries/--gallery");
        auto items = embed_file(data_path);
        std::tie(queries, gallery) = split_query_gallery(items, per_class, seed);
    }

    json invocation = {{"checkpoint", ck.config_hash},       {"per_class", per_class},
                       {"small_max_px", small_max_px},       {"seed", seed},
                       {"queries", !queries_path.empty()},   {"gallery", !gallery_path.empty()}};
    const EvalReport report = partition_report(queries, gallery, small_max_px, seed);
    write_text_file(out_path, report_to_json(report, config_hash(invocation.dump())));

    if (!embeddings_out.empty()) {
        Dataset embedded;
        for (const auto* set : {&queries, &gallery}) {
            for (const auto& item : *set) {
                embedded.push_back({item.sample_id, item.class_id, item.min_side_px, item.embedding});
            }
        }
        save_dataset(embedded, embeddings_out);
        write_meta_sidecar(embeddings_out, config_hash(invocation.dump()));
    }

    auto show = [](const char* name, const std::optional<double>& v) {
        std::cout << name << ": ";
        if (v) {
            std::cout << *v;
        } else {
            std::cout << "n/a";
        }
        std::cout << "\n";
    };
    show("query_vs_gallery", report.query_vs_gallery);
    show("all_vs_all", report.all_vs_all);
    show("text", report.text);
    show("small", report.small);
    show("large", report.large);
    std::cout << "nmi: " << report.nmi << "\n";
    return 0;
}

int cmd_mine(const std::string& predictions_path, double alpha1, double alpha2, int lev_min,
             const std::string& out_path) {
    std::vector<std::pair<std::string, std::string>> predictions;
    const std::string text = read_text_file(predictions_path);

    auto add_prediction = [&predictions](const json& j) {
        predictions.emplace_back(j.at("true").get<std::string>(), j.at("pred").get<std::string>());
    };
    try {
        const json whole = json::parse(text);
        if (whole.is_object() && whole.contains("predictions")) {
            for (const auto& p : whole.at("predictions")) add_prediction(p);
        } else if (whole.is_array()) {
            for (const auto& p : whole) add_prediction(p);
        } else {
            throw ValidationError("predictions file: expected a report or an array");
        }
    } catch (const json::exception&) {
        // JSON lines fallback: one {"true": ..., "pred": ...} per line.
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t end = text.find('\n', pos);
            if (end == std::string::npos) end = text.size();
            const std::string line = text.substr(pos, end - pos);
            pos = end + 1;
            if (line.empty()) continue;
            try {
                add_prediction(json::parse(line));
            } catch (const json::exception& e) {
                throw ValidationError("predictions " + predictions_path + ": " + e.what());
            }
        }
    }
    if (predictions.empty()) throw ValidationError("no predictions found in " + predictions_path);

    std::set<std::string> class_set;
    for (const auto& [truth, pred] : predictions) {
        class_set.insert(truth);
        class_set.insert(pred);
    }
    const std::vector<std::string> classes(class_set.begin(), class_set.end());
    const ConfusionMatrix confusion = build_confusion_matrix(predictions, classes);
    const HardNegativeMap map = build_hard_negative_map(confusion, alpha1, alpha2, lev_min);

    write_text_file(out_path, map_to_json(map) + "\n");
    const json params = {{"alpha1", alpha1}, {"alpha2", alpha2}, {"lev_min", lev_min}};
    write_meta_sidecar(out_path, config_hash(params.dump()));
    std::cout << "hard-negative map: " << map.entries.size() << " of " << classes.size()
              << " classes have negatives\n";
    return 0;
}

int cmd_clean(const std::vector<std::string>& manifest_paths, const std::string& merge_map_path,
              double min_side, int min_instances, const std::string& out_path,
              const std::string& report_path) {
    Manifest records;
    for (const auto& path : manifest_paths) {
        Manifest part = load_manifest(path);
        records.insert(records.end(), part.begin(), part.end());
    }
    for (const auto& r : records) r.validate();

    const MergeMap merge_map = merge_map_path.empty()
                                   ? default_merge_map()
                                   : merge_map_from_json(read_text_file(merge_map_path));

    const std::size_t input_count = records.size();
    Manifest canonical = canonicalize_classes(records, merge_map);
    Manifest deduped = dedup_within_class(canonical);
    FilterStats stats;
    Manifest cleaned = filter_records(deduped, min_side, min_instances, &stats);

    save_manifest(cleaned, out_path);
    const json params = {{"merge_map", merge_map},
                         {"min_side_px", min_side},
                         {"min_instances", min_instances}};
    write_meta_sidecar(out_path, config_hash(params.dump()));

    json report = {{"input_records", input_count},
                   {"duplicates_removed", canonical.size() - deduped.size()},
                   {"dropped_small_bbox", stats.dropped_small_bbox},
                   {"dropped_small_class_records", stats.dropped_small_class_records},
                   {"classes_dropped", stats.classes_dropped},
                   {"output_records", cleaned.size()},
                   {"config_hash", config_hash(params.dump())}};
    if (!report_path.empty()) write_text_file(report_path, report.dump(2) + "\n");
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_split(const std::string& manifest_path, const std::string& fractions_arg,
              int small_class_min, const std::string& out_path, bool seed_given,
              std::uint64_t seed_flag) {
    SplitFractions fractions;
    if (!fractions_arg.empty()) {
        double a = 0, b = 0, c = 0;
        if (std::sscanf(fractions_arg.c_str(), "%lf,%lf,%lf", &a, &b, &c) != 3) {
            throw ValidationError("--fractions expects train,val,test (e.g. 0.64,0.16,0.20)");
        }
        fractions = {a, b, c};
    }
    const std::uint64_t seed = resolve_seed(seed_given, seed_flag, nullptr);
    const Manifest records = load_manifest(manifest_path);
    const SplitPlan plan = plan_open_set_split(records, fractions, small_class_min, seed);

    write_text_file(out_path, split_plan_to_json(plan));
    const json params = {{"fractions", {fractions.train, fractions.val, fractions.test}},
                         {"small_class_min", small_class_min},
                         {"seed", seed}};
    write_meta_sidecar(out_path, config_hash(params.dump()));

    std::size_t n_train = 0, n_val = 0, n_test = 0;
    for (const auto& [class_name, split] : plan.assignment) {
        if (split == Split::train) {
            ++n_train;
        } else if (split == Split::val) {
            ++n_val;
        } else {
            ++n_test;
        }
    }
    std::cout << "classes: " << n_train << " train, " << n_val << " val, " << n_test << " test\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"proxy-based deep metric learning toolkit"};
    app.require_subcommand(1);
    int rc = 0;

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic feature dataset");
    std::string synth_config, synth_out;
    std::uint64_t synth_seed = 0;
    synth->add_option("--config", synth_config, "synthetic dataset config (JSON)")->required();
    synth->add_option("--out", synth_out, "output directory")->required();
    auto* synth_seed_opt = synth->add_option("--seed", synth_seed, "seed override");
    synth->callback([&] {
        rc = cmd_synth(synth_config, synth_out, synth_seed_opt->count() > 0, synth_seed);
    });

    // train
    auto* train_cmd = app.add_subcommand("train", "train an embedder and proxies");
    std::string train_config, train_data, train_val, train_out, train_map, train_loss;
    int train_epochs = 0;
    bool train_resume = false;
    std::uint64_t train_seed = 0;
    train_cmd->add_option("--config", train_config, "train config (JSON)")->required();
    train_cmd->add_option("--data", train_data, "dataset (JSON lines)")->required();
    train_cmd->add_option("--val", train_val, "validation dataset (JSON lines)");
    train_cmd->add_option("--out", train_out, "output directory")->required();
    train_cmd->add_option("--map", train_map, "hard-negative map (JSON)");
    train_cmd->add_option("--loss", train_loss, "proxynca_pp | proxyncahn_pp");
    train_cmd->add_option("--epochs", train_epochs, "epoch count override");
    train_cmd->add_flag("--resume", train_resume, "continue from <out>/resume.json");
    auto* train_seed_opt = train_cmd->add_option("--seed", train_seed, "seed override");
    train_cmd->callback([&] {
        rc = cmd_train(train_config, train_data, train_val, train_out, train_resume, train_map,
                       train_loss, train_epochs, train_seed_opt->count() > 0, train_seed);
    });

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "retrieval evaluation report");
    std::string eval_ckpt, eval_data, eval_queries, eval_gallery, eval_out, eval_emb;
    int eval_per_class = 10;
    double eval_small = 70.0;
    std::uint64_t eval_seed = 0;
    eval_cmd->add_option("--checkpoint", eval_ckpt, "model checkpoint")->required();
    eval_cmd->add_option("--data", eval_data, "dataset to split into query/gallery");
    eval_cmd->add_option("--queries", eval_queries, "explicit query dataset");
    eval_cmd->add_option("--gallery", eval_gallery, "explicit gallery dataset");
    eval_cmd->add_option("--out", eval_out, "report path (JSON)")->required();
    eval_cmd->add_option("--embeddings-out", eval_emb, "also dump embedded items (JSON lines)");
    eval_cmd->add_option("--per-class", eval_per_class, "query items per class");
    eval_cmd->add_option("--small-max-px", eval_small, "small/large partition boundary");
    auto* eval_seed_opt = eval_cmd->add_option("--seed", eval_seed, "seed override");
    eval_cmd->callback([&] {
        rc = cmd_eval(eval_ckpt, eval_data, eval_queries, eval_gallery, eval_out, eval_emb,
                      eval_per_class, eval_small, eval_seed_opt->count() > 0, eval_seed);
    });

    // mine
    auto* mine_cmd = app.add_subcommand("mine", "build a hard-negative map from predictions");
    std::string mine_pred, mine_out;
    double mine_a1 = 0.05, mine_a2 = 0.35;
    int mine_lev = 2;
    mine_cmd->add_option("--predictions", mine_pred, "eval report or predictions JSON lines")
        ->required();
    mine_cmd->add_option("--alpha1", mine_a1, "lower confusion threshold");
    mine_cmd->add_option("--alpha2", mine_a2, "upper confusion threshold");
    mine_cmd->add_option("--lev-min", mine_lev, "minimum class-name edit distance");
    mine_cmd->add_option("--out", mine_out, "map output path (JSON)")->required();
    mine_cmd->callback([&] { rc = cmd_mine(mine_pred, mine_a1, mine_a2, mine_lev, mine_out); });

    // clean
    auto* clean_cmd = app.add_subcommand("clean", "normalize, merge, dedup, and filter manifests");
    std::vector<std::string> clean_manifests;
    std::string clean_map, clean_out, clean_report;
    double clean_min_side = 10.0;
    int clean_min_instances = 20;
    clean_cmd->add_option("--manifest", clean_manifests, "manifest path (repeatable)")->required();
    clean_cmd->add_option("--merge-map", clean_map, "merge map (JSON; default built-in)");
    clean_cmd->add_option("--min-side", clean_min_side, "minimum bbox side, pixels");
    clean_cmd->add_option("--min-instances", clean_min_instances, "minimum class size");
    clean_cmd->add_option("--out", clean_out, "cleaned manifest path")->required();
    clean_cmd->add_option("--report", clean_report, "also write drop-count report (JSON)");
    clean_cmd->callback([&] {
        rc = cmd_clean(clean_manifests, clean_map, clean_min_side, clean_min_instances, clean_out,
                       clean_report);
    });

    // split
    auto* split_cmd = app.add_subcommand("split", "open-set class split plan");
    std::string split_manifest, split_fractions, split_out;
    int split_min = 20;
    std::uint64_t split_seed = 0;
    split_cmd->add_option("--manifest", split_manifest, "cleaned manifest path")->required();
    split_cmd->add_option("--fractions", split_fractions, "train,val,test (default 0.64,0.16,0.20)");
    split_cmd->add_option("--small-class-min", split_min, "min samples for val/test eligibility");
    split_cmd->add_option("--out", split_out, "split plan output path (JSON)")->required();
    auto* split_seed_opt = split_cmd->add_option("--seed", split_seed, "seed override");
    split_cmd->callback([&] {
        rc = cmd_split(split_manifest, split_fractions, split_min, split_out,
                       split_seed_opt->count() > 0, split_seed);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
