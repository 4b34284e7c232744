#include "dida.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>

#include "dida/ablate.hpp"
#include "dida/bank.hpp"
#include "dida/config.hpp"
#include "dida/io.hpp"
#include "dida/selftrain.hpp"
#include "dida/synthdata.hpp"
#include "dida/version.hpp"

namespace fs = std::filesystem;

struct dida_config_s {
    dida::RunConfig cfg;
};

struct dida_bank_s {
    dida::InstanceBank bank;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// Translates C++ failures into status codes: config problems are exit-code 2
// material, everything else is a runtime failure.
template <typename Fn>
dida_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return DIDA_OK;
    } catch (const dida::ConfigError& e) {
        g_last_error = e.what();
        return DIDA_ERR_CONFIG;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return DIDA_ERR_RUNTIME;
    }
}

dida_status usage_error(const char* message) {
    g_last_error = message;
    return DIDA_ERR_USAGE;
}

// Dataset acquisition shared by train/ablate: load from a generated
// directory or regenerate deterministically from the config.
dida::Dataset acquire_dataset(const dida::RunConfig& cfg, const char* data_dir) {
    if (data_dir && *data_dir) {
        nlohmann::json manifest;
        try {
            manifest = nlohmann::json::parse(
                dida::read_text_file(std::string(data_dir) + "/manifest.json"));
        } catch (const nlohmann::json::parse_error& e) {
            throw dida::ConfigError(std::string("dataset manifest: ") + e.what());
        }
        const nlohmann::json& ds =
            manifest.contains("dataset") ? manifest.at("dataset") : manifest;
        dida::Dataset data = dida::load_dataset(data_dir, ds);
        if (data.class_count != cfg.data.classes || data.height != cfg.data.height ||
            data.width != cfg.data.width) {
            throw dida::ConfigError("dataset dimensions do not match the config");
        }
        return data;
    }
    const dida::Rng rng(cfg.data.seed);
    return dida::gen_dataset(dida::make_source_spec(cfg.data),
                             dida::make_target_spec(cfg.data), cfg.data.n_source,
                             cfg.data.n_target, rng, cfg.data.height, cfg.data.width);
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const dida::RunConfig& cfg,
                    const nlohmann::json* extra = nullptr) {
    nlohmann::json manifest = dida::make_manifest(command, cfg);
    if (extra) {
        for (const auto& [key, value] : extra->items()) manifest[key] = value;
    }
    dida::write_text_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
}

} // namespace

extern "C" {

const char* dida_version(void) { return dida::kVersion; }

const char* dida_last_error(void) { return g_last_error.c_str(); }

void dida_string_free(char* s) { std::free(s); }

dida_status dida_config_load(const char* path, dida_config** out) {
    if (!path || !out) return usage_error("dida_config_load: null argument");
    return guarded([&] {
        auto* handle = new dida_config_s{dida::load_config_file(path)};
        *out = handle;
    });
}

dida_status dida_config_parse_json(const char* json_text, dida_config** out) {
    if (!json_text || !out) return usage_error("dida_config_parse_json: null argument");
    return guarded([&] {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(json_text);
        } catch (const nlohmann::json::parse_error& e) {
            throw dida::ConfigError(std::string("config: invalid JSON: ") + e.what());
        }
        auto* handle = new dida_config_s{dida::parse_config(j)};
        *out = handle;
    });
}

dida_status dida_config_set_seed(dida_config* cfg, uint64_t seed) {
    if (!cfg) return usage_error("dida_config_set_seed: null config");
    cfg->cfg.seed = seed;
    g_last_error.clear();
    return DIDA_OK;
}

dida_status dida_config_to_json(const dida_config* cfg, char** json_out) {
    if (!cfg || !json_out) return usage_error("dida_config_to_json: null argument");
    return guarded([&] { *json_out = dup_string(dida::config_to_json(cfg->cfg).dump(2)); });
}

void dida_config_free(dida_config* cfg) { delete cfg; }

dida_status dida_gen_data(const dida_config* cfg, const char* out_dir) {
    if (!cfg || !out_dir) return usage_error("dida_gen_data: null argument");
    return guarded([&] {
        const dida::RunConfig& rc = cfg->cfg;
        const dida::Rng rng(rc.data.seed);
        const auto source_spec = dida::make_source_spec(rc.data);
        const auto target_spec = dida::make_target_spec(rc.data);
        const dida::Dataset data =
            dida::gen_dataset(source_spec, target_spec, rc.data.n_source, rc.data.n_target,
                              rng, rc.data.height, rc.data.width);
        fs::create_directories(out_dir);
        dida::write_dataset(out_dir, data);
        const nlohmann::json extra = {
            {"dataset", dida::dataset_manifest(data, source_spec, target_spec, rc.data.seed)}};
        write_manifest(out_dir, "gen-data", rc, &extra);
    });
}

dida_status dida_train(const dida_config* cfg, const char* data_dir, const char* out_dir) {
    if (!cfg || !out_dir) return usage_error("dida_train: null argument");
    return guarded([&] {
        const dida::RunConfig& rc = cfg->cfg;
        const dida::Dataset data = acquire_dataset(rc, data_dir);
        const dida::TrainResult result = dida::train(rc, data);
        fs::create_directories(out_dir);
        dida::write_text_file(std::string(out_dir) + "/metrics.csv",
                              dida::metrics_csv(result.rows, data.class_count));
        dida::save_checkpoint_file(result.model, result.bank,
                                   std::string(out_dir) + "/checkpoint.bin");
        dida::save_bank_file(result.bank, std::string(out_dir) + "/bank.bin");
        const nlohmann::json extra = {
            {"data_dir", data_dir && *data_dir ? data_dir : "generated"}};
        write_manifest(out_dir, "train", rc, &extra);
    });
}

dida_status dida_evaluate(const char* checkpoint_path, const char* data_dir,
                          const char* out_dir, char** json_out) {
    if (!checkpoint_path || !data_dir || !json_out) {
        return usage_error("dida_evaluate: null argument");
    }
    return guarded([&] {
        const dida::Checkpoint ckpt = dida::load_checkpoint_file(checkpoint_path);
        nlohmann::json manifest;
        try {
            manifest = nlohmann::json::parse(
                dida::read_text_file(std::string(data_dir) + "/manifest.json"));
        } catch (const nlohmann::json::parse_error& e) {
            throw dida::ConfigError(std::string("dataset manifest: ") + e.what());
        }
        const nlohmann::json& ds =
            manifest.contains("dataset") ? manifest.at("dataset") : manifest;
        const dida::Dataset data = dida::load_dataset(data_dir, ds);
        if (data.class_count != ckpt.model.class_count) {
            throw dida::ConfigError("checkpoint class count does not match the dataset");
        }
        const dida::MiouResult res = dida::evaluate_miou(ckpt.model, data.target);

        nlohmann::json j;
        j["split"] = "target";
        j["miou"] = res.miou;
        nlohmann::json per_class = nlohmann::json::array();
        for (int c = 0; c < data.class_count; ++c) {
            per_class.push_back({{"class", c},
                                 {"present", static_cast<bool>(res.present[c])},
                                 {"iou", res.present[c] ? nlohmann::json(res.per_class[c])
                                                        : nlohmann::json()}});
        }
        j["per_class"] = per_class;
        const std::string text = j.dump(2);
        if (out_dir && *out_dir) {
            fs::create_directories(out_dir);
            dida::write_text_file(std::string(out_dir) + "/eval.json", text + "\n");
            nlohmann::json manifest_out;
            manifest_out["command"] = "eval";
            manifest_out["version"] = dida::kVersion;
            manifest_out["checkpoint"] = checkpoint_path;
            manifest_out["data_dir"] = data_dir;
            dida::write_text_file(std::string(out_dir) + "/manifest.json",
                                  manifest_out.dump(2) + "\n");
        }
        *json_out = dup_string(text);
    });
}

dida_status dida_ablate(const dida_config* cfg, const char* axis, const char* data_dir,
                        const char* out_dir) {
    if (!cfg || !axis || !out_dir) return usage_error("dida_ablate: null argument");
    return guarded([&] {
        const dida::RunConfig& rc = cfg->cfg;
        dida::ablate_variants(rc, axis); // validate the axis before any work
        const dida::Dataset data = acquire_dataset(rc, data_dir);
        dida::run_ablate(rc, axis, data, out_dir);
        nlohmann::json extra = {{"axis", axis},
                                {"data_dir", data_dir && *data_dir ? data_dir : "generated"}};
        write_manifest(out_dir, "ablate", rc, &extra);
    });
}

dida_status dida_regen_demo(const dida_config* cfg, char** json_out) {
    if (!cfg || !json_out) return usage_error("dida_regen_demo: null argument");
    return guarded([&] {
        const dida::RunConfig& rc = cfg->cfg;
        const dida::InteractionStrategy strategy = dida::make_interaction(rc);
        nlohmann::json j;
        j["phi"] = strategy.phi;
        j["z_mode"] = dida::to_string(strategy.z_mode);
        j["q_mode"] = dida::to_string(strategy.q_mode);

        if (rc.regen_demo && rc.regen_demo->mode == "pixel") {
            const auto& demo = *rc.regen_demo;
            const int C = static_cast<int>(demo.z.size());
            const int K = static_cast<int>(demo.q_alpha.size());
            dida::DenseGrid z_map(1, 1, C), q_map(1, 1, K);
            std::copy(demo.z.begin(), demo.z.end(), z_map.data.begin());
            std::copy(demo.q_alpha.begin(), demo.q_alpha.end(), q_map.data.begin());
            const dida::RegenOutput out =
                dida::regenerate(z_map, q_map, demo.bank_labels, strategy);
            j["mode"] = "pixel";
            j["z"] = demo.z;
            j["q_alpha"] = demo.q_alpha;
            j["bank_labels"] = demo.bank_labels;
            j["z_sc"] = dida::scatter(demo.z, demo.bank_labels);
            j["q_ga"] = dida::gather(demo.q_alpha, demo.bank_labels, C);
            j["z_hat"] = out.z_hat.data;
            j["q_hat"] = out.q_hat.data;
            j["scale_fallback_q"] = (out.flags[0] & dida::kRegenScaleFallbackQ) != 0;
            j["scale_fallback_z"] = (out.flags[0] & dida::kRegenScaleFallbackZ) != 0;
        } else {
            // Image mode: synthesize one target scene, run the freshly seeded
            // model and bank over it and dump every per-pixel vector.
            const dida::Rng root(rc.seed);
            dida::Rng rng_model = root.fork(1);
            dida::Rng rng_bank = root.fork(2);
            dida::Rng rng_scene(rc.data.seed);
            const dida::PixelModel model =
                dida::init_model(rc.model.patch, rc.model.raw_dim, rc.model.embed_dim,
                                 rc.data.classes, rng_model);
            const dida::LabeledImage scene = dida::gen_scene(
                dida::make_target_spec(rc.data), rng_scene, rc.data.height, rc.data.width);
            const dida::InstanceBank bank =
                dida::init_bank(rc.bank.size, rc.data.classes, rc.model.embed_dim, rng_bank);
            const dida::ForwardCache fc = dida::forward(model, scene.image);
            const dida::InstancePredictionMap q_alpha =
                dida::instance_predict(fc.embed, bank, rc.instance.temperature);
            const dida::RegenOutput out =
                dida::regenerate(fc.probs, q_alpha.grid, bank.labels, strategy);

            j["mode"] = "image";
            j["height"] = rc.data.height;
            j["width"] = rc.data.width;
            j["classes"] = rc.data.classes;
            j["bank_size"] = rc.bank.size;
            j["bank_labels"] = bank.labels;
            j["z"] = fc.probs.data;
            j["q_alpha"] = q_alpha.grid.data;
            j["z_hat"] = out.z_hat.data;
            j["q_hat"] = out.q_hat.data;
            j["flags"] = out.flags;
        }
        *json_out = dup_string(j.dump(2));
    });
}

dida_status dida_bank_open(const char* path, dida_bank** out) {
    if (!path || !out) return usage_error("dida_bank_open: null argument");
    return guarded([&] { *out = new dida_bank_s{dida::load_bank_file(path)}; });
}

dida_status dida_bank_inspect(const dida_bank* bank, char** json_out) {
    if (!bank || !json_out) return usage_error("dida_bank_inspect: null argument");
    return guarded([&] { *json_out = dup_string(dida::inspect_bank_json(bank->bank)); });
}

void dida_bank_close(dida_bank* bank) { delete bank; }

} // extern "C"
