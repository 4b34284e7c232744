#include "dida/config.hpp"

#include <cmath>
#include <set>

#include "dida/io.hpp"
#include "dida/version.hpp"

namespace dida {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError("config: " + where + " must be an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key)) {
            throw ConfigError("config: unknown key " + where + "." + key);
        }
    }
}

template <typename T>
void get_to(const json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

void parse_data(const json& j, DataConfig& d) {
    check_keys(j, "data",
               {"classes", "height", "width", "n_source", "n_target", "layout", "regions",
                "tail_exponent", "palette_std", "palette", "noise_std_source",
                "noise_std_target", "shift_offset", "shift_gain", "seed"});
    get_to(j, "classes", d.classes);
    get_to(j, "height", d.height);
    get_to(j, "width", d.width);
    get_to(j, "n_source", d.n_source);
    get_to(j, "n_target", d.n_target);
    if (j.contains("layout")) d.layout = layout_from_string(j.at("layout").get<std::string>());
    get_to(j, "regions", d.regions);
    get_to(j, "tail_exponent", d.tail_exponent);
    get_to(j, "palette_std", d.palette_std);
    if (j.contains("palette")) {
        d.palette = j.at("palette").get<std::vector<std::array<double, 3>>>();
    }
    get_to(j, "noise_std_source", d.noise_std_source);
    get_to(j, "noise_std_target", d.noise_std_target);
    get_to(j, "shift_offset", d.shift_offset);
    get_to(j, "shift_gain", d.shift_gain);
    get_to(j, "seed", d.seed);
}

void parse_model(const json& j, ModelConfig& m) {
    check_keys(j, "model", {"patch", "raw_dim", "embed_dim"});
    get_to(j, "patch", m.patch);
    get_to(j, "raw_dim", m.raw_dim);
    get_to(j, "embed_dim", m.embed_dim);
}

void parse_train(const json& j, TrainConfig& t) {
    check_keys(j, "train",
               {"iterations", "learning_rate", "tau", "lambda_ins", "eval_interval",
                "soft_target_loss", "gate_on_original", "instance_loss_sum"});
    get_to(j, "iterations", t.iterations);
    get_to(j, "learning_rate", t.learning_rate);
    get_to(j, "tau", t.tau);
    get_to(j, "lambda_ins", t.lambda_ins);
    get_to(j, "eval_interval", t.eval_interval);
    get_to(j, "soft_target_loss", t.soft_target_loss);
    get_to(j, "gate_on_original", t.gate_on_original);
    get_to(j, "instance_loss_sum", t.instance_loss_sum);
}

void parse_bank(const json& j, BankConfig& b) {
    check_keys(j, "bank",
               {"size", "sampling", "selecting", "interval", "momentum", "slot_mode",
                "kmeans_k", "sigma"});
    get_to(j, "size", b.size);
    if (j.contains("sampling")) b.sampling = sampling_from_string(j.at("sampling").get<std::string>());
    if (j.contains("selecting")) b.selecting = selecting_from_string(j.at("selecting").get<std::string>());
    get_to(j, "interval", b.interval);
    get_to(j, "momentum", b.momentum);
    if (j.contains("slot_mode")) b.slot_mode = slot_mode_from_string(j.at("slot_mode").get<std::string>());
    get_to(j, "kmeans_k", b.kmeans_k);
    get_to(j, "sigma", b.sigma);
}

void parse_instance(const json& j, InstanceConfig& i) {
    check_keys(j, "instance", {"temperature"});
    get_to(j, "temperature", i.temperature);
}

void parse_regen(const json& j, RegenConfig& r) {
    check_keys(j, "regen", {"enabled", "phi", "z_mode", "q_mode"});
    get_to(j, "enabled", r.enabled);
    get_to(j, "phi", r.phi);
    if (j.contains("z_mode")) r.z_mode = regen_mode_from_string(j.at("z_mode").get<std::string>());
    if (j.contains("q_mode")) r.q_mode = regen_mode_from_string(j.at("q_mode").get<std::string>());
}

void parse_ablate(const json& j, AblateSection& a) {
    check_keys(j, "ablate", {"seeds"});
    get_to(j, "seeds", a.seeds);
}

void parse_regen_demo(const json& j, RegenDemoConfig& r) {
    check_keys(j, "regen_demo", {"mode", "z", "q_alpha", "bank_labels"});
    get_to(j, "mode", r.mode);
    get_to(j, "z", r.z);
    get_to(j, "q_alpha", r.q_alpha);
    get_to(j, "bank_labels", r.bank_labels);
}

} // namespace

RunConfig parse_config(const nlohmann::json& input) {
    const nlohmann::json* root = &input;
    // Manifests wrap the resolved config; accept them directly.
    if (input.is_object() && input.contains("command") && input.contains("config")) {
        root = &input.at("config");
    }
    const nlohmann::json& j = *root;
    check_keys(j, "<root>",
               {"preset", "seed", "data", "model", "train", "bank", "instance", "regen",
                "ablate", "regen_demo"});

    RunConfig cfg;
    get_to(j, "preset", cfg.preset);
    if (cfg.preset == "paper") {
        cfg.bank.size = 300;
        cfg.bank.sigma = 2;
    } else if (cfg.preset != "desk") {
        throw ConfigError("config: unknown preset '" + cfg.preset + "'");
    }
    get_to(j, "seed", cfg.seed);
    if (j.contains("data")) parse_data(j.at("data"), cfg.data);
    if (j.contains("model")) parse_model(j.at("model"), cfg.model);
    if (j.contains("train")) parse_train(j.at("train"), cfg.train);
    if (j.contains("bank")) parse_bank(j.at("bank"), cfg.bank);
    if (j.contains("instance")) parse_instance(j.at("instance"), cfg.instance);
    if (j.contains("regen")) parse_regen(j.at("regen"), cfg.regen);
    if (j.contains("ablate")) parse_ablate(j.at("ablate"), cfg.ablate);
    if (j.contains("regen_demo")) {
        RegenDemoConfig rd;
        parse_regen_demo(j.at("regen_demo"), rd);
        cfg.regen_demo = std::move(rd);
    }
    validate_config(cfg);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const IoError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: invalid JSON in " + path + ": " + e.what());
    }
    return parse_config(j);
}

void validate_config(const RunConfig& cfg) {
    const auto& d = cfg.data;
    if (d.classes < 1) throw ConfigError("config: data.classes must be >= 1");
    if (d.height < 8 || d.width < 8) throw ConfigError("config: images must be at least 8x8");
    if (d.n_source < 0 || d.n_target < 0) throw ConfigError("config: split sizes must be >= 0");
    if (d.regions < 1) throw ConfigError("config: data.regions must be >= 1");
    if (d.tail_exponent < 0.0) throw ConfigError("config: data.tail_exponent must be >= 0");
    if (d.palette_std < 0.0) throw ConfigError("config: data.palette_std must be >= 0");
    if (d.noise_std_source < 0.0 || d.noise_std_target < 0.0) {
        throw ConfigError("config: noise levels must be >= 0");
    }
    if (d.palette && static_cast<int>(d.palette->size()) != d.classes) {
        throw ConfigError("config: data.palette must list one color per class");
    }

    const auto& m = cfg.model;
    if (m.patch < 1 || m.patch % 2 == 0) throw ConfigError("config: model.patch must be odd");
    if (m.raw_dim < 1 || m.embed_dim < 1) throw ConfigError("config: model dims must be >= 1");

    const auto& t = cfg.train;
    if (t.iterations < 0) throw ConfigError("config: train.iterations must be >= 0");
    if (!(t.learning_rate > 0.0)) throw ConfigError("config: train.learning_rate must be > 0");
    if (!(t.tau >= 0.0 && t.tau <= 1.0)) throw ConfigError("config: train.tau must be in [0,1]");
    if (t.lambda_ins < 0.0) throw ConfigError("config: train.lambda_ins must be >= 0");
    if (t.eval_interval < 1) throw ConfigError("config: train.eval_interval must be >= 1");

    const auto& b = cfg.bank;
    if (b.size < d.classes) throw ConfigError("config: bank.size must be >= data.classes");
    if (b.interval < 1) throw ConfigError("config: bank.interval must be >= 1");
    if (!(b.momentum >= 0.0 && b.momentum <= 1.0)) {
        throw ConfigError("config: bank.momentum must be in [0,1]");
    }
    if (b.kmeans_k < 1) throw ConfigError("config: bank.kmeans_k must be >= 1");
    if (b.sigma < 0) throw ConfigError("config: bank.sigma must be >= 0");

    if (!(cfg.instance.temperature > 0.0)) {
        throw ConfigError("config: instance.temperature must be > 0");
    }
    if (!(cfg.regen.phi >= 0.0 && cfg.regen.phi <= 1.0)) {
        throw ConfigError("config: regen.phi must be in [0,1]");
    }
    if (cfg.ablate.seeds.empty()) throw ConfigError("config: ablate.seeds must not be empty");

    if (cfg.regen_demo) {
        const auto& r = *cfg.regen_demo;
        if (r.mode != "pixel" && r.mode != "image") {
            throw ConfigError("config: regen_demo.mode must be 'pixel' or 'image'");
        }
        if (r.mode == "pixel") {
            if (r.z.empty() || r.q_alpha.empty() ||
                r.bank_labels.size() != r.q_alpha.size()) {
                throw ConfigError("config: regen_demo pixel mode needs z, q_alpha and "
                                  "bank_labels of matching size");
            }
            for (int l : r.bank_labels) {
                if (l < 0 || static_cast<std::size_t>(l) >= r.z.size()) {
                    throw ConfigError("config: regen_demo.bank_labels out of range");
                }
            }
        }
    }
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["preset"] = cfg.preset;
    j["seed"] = cfg.seed;
    j["data"] = {{"classes", cfg.data.classes},
                 {"height", cfg.data.height},
                 {"width", cfg.data.width},
                 {"n_source", cfg.data.n_source},
                 {"n_target", cfg.data.n_target},
                 {"layout", to_string(cfg.data.layout)},
                 {"regions", cfg.data.regions},
                 {"tail_exponent", cfg.data.tail_exponent},
                 {"palette_std", cfg.data.palette_std},
                 {"noise_std_source", cfg.data.noise_std_source},
                 {"noise_std_target", cfg.data.noise_std_target},
                 {"shift_offset", cfg.data.shift_offset},
                 {"shift_gain", cfg.data.shift_gain},
                 {"seed", cfg.data.seed}};
    if (cfg.data.palette) j["data"]["palette"] = *cfg.data.palette;
    j["model"] = {{"patch", cfg.model.patch},
                  {"raw_dim", cfg.model.raw_dim},
                  {"embed_dim", cfg.model.embed_dim}};
    j["train"] = {{"iterations", cfg.train.iterations},
                  {"learning_rate", cfg.train.learning_rate},
                  {"tau", cfg.train.tau},
                  {"lambda_ins", cfg.train.lambda_ins},
                  {"eval_interval", cfg.train.eval_interval},
                  {"soft_target_loss", cfg.train.soft_target_loss},
                  {"gate_on_original", cfg.train.gate_on_original},
                  {"instance_loss_sum", cfg.train.instance_loss_sum}};
    j["bank"] = {{"size", cfg.bank.size},
                 {"sampling", to_string(cfg.bank.sampling)},
                 {"selecting", to_string(cfg.bank.selecting)},
                 {"interval", cfg.bank.interval},
                 {"momentum", cfg.bank.momentum},
                 {"slot_mode", to_string(cfg.bank.slot_mode)},
                 {"kmeans_k", cfg.bank.kmeans_k},
                 {"sigma", cfg.bank.sigma}};
    j["instance"] = {{"temperature", cfg.instance.temperature}};
    j["regen"] = {{"enabled", cfg.regen.enabled},
                  {"phi", cfg.regen.phi},
                  {"z_mode", to_string(cfg.regen.z_mode)},
                  {"q_mode", to_string(cfg.regen.q_mode)}};
    j["ablate"] = {{"seeds", cfg.ablate.seeds}};
    if (cfg.regen_demo) {
        j["regen_demo"] = {{"mode", cfg.regen_demo->mode},
                           {"z", cfg.regen_demo->z},
                           {"q_alpha", cfg.regen_demo->q_alpha},
                           {"bank_labels", cfg.regen_demo->bank_labels}};
    }
    // The preset has already been folded into explicit values above; keep it
    // only as provenance. Parsing this echo reproduces the same config
    // because explicit keys override preset defaults.
    return j;
}

DomainSpec make_source_spec(const DataConfig& d) {
    DomainSpec spec;
    spec.class_count = d.classes;
    spec.palette_mean = d.palette ? *d.palette : hsv_palette(d.classes);
    spec.palette_std.assign(d.classes, {d.palette_std, d.palette_std, d.palette_std});
    spec.freq_profile = tail_frequencies(d.classes, d.tail_exponent);
    spec.layout = d.layout;
    spec.region_count = d.regions;
    spec.noise_std = d.noise_std_source;
    return spec;
}

DomainSpec make_target_spec(const DataConfig& d) {
    DomainSpec spec = make_source_spec(d);
    spec.noise_std = d.noise_std_target;
    spec.shift_offset = d.shift_offset;
    spec.shift_gain = d.shift_gain;
    return spec;
}

BankUpdatePolicy make_bank_policy(const RunConfig& cfg) {
    BankUpdatePolicy p;
    p.sampling = cfg.bank.sampling;
    p.selecting = cfg.bank.selecting;
    p.interval = cfg.bank.interval;
    p.momentum = cfg.bank.momentum;
    p.slot_mode = cfg.bank.slot_mode;
    p.kmeans_k = cfg.bank.kmeans_k;
    return p;
}

InteractionStrategy make_interaction(const RunConfig& cfg) {
    InteractionStrategy s;
    s.z_mode = cfg.regen.z_mode;
    s.q_mode = cfg.regen.q_mode;
    s.phi = cfg.regen.phi;
    return s;
}

nlohmann::json make_manifest(const std::string& command, const RunConfig& cfg) {
    nlohmann::json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["config"] = config_to_json(cfg);
    return j;
}

} // namespace dida
