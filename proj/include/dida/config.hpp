#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dida/bank.hpp"
#include "dida/regen.hpp"
#include "dida/synthdata.hpp"

#include <json.hpp>

namespace dida {

struct DataConfig {
    int classes = 5;
    int height = 64;
    int width = 64;
    int n_source = 200;
    int n_target = 200;
    SceneLayout layout = SceneLayout::Voronoi;
    int regions = 14;
    double tail_exponent = 1.5;
    double palette_std = 0.03;
    std::optional<std::vector<std::array<double, 3>>> palette; // default: hue wheel
    double noise_std_source = 0.02;
    double noise_std_target = 0.06;
    std::array<double, 3> shift_offset{0.10, -0.08, 0.06}; // target-domain gap
    std::array<double, 3> shift_gain{1.15, 0.90, 1.10};
    std::uint64_t seed = 7;
};

struct ModelConfig {
    int patch = 3;
    int raw_dim = 16;  // D0
    int embed_dim = 10; // D
};

struct TrainConfig {
    int iterations = 2000;
    double learning_rate = 0.3;
    double tau = 0.968;
    double lambda_ins = 1.0;
    int eval_interval = 100;
    bool soft_target_loss = false;  // soft CE against z_hat instead of its argmax
    bool gate_on_original = false;  // gate L_tgt on the raw weak prediction
    bool instance_loss_sum = false; // sum over pixels instead of mean
};

struct BankConfig {
    int size = 50; // K (desk default; the paper preset uses 300)
    Sampling sampling = Sampling::CBS;
    Selecting selecting = Selecting::BPS;
    int interval = 50;       // u
    double momentum = 0.999; // omega
    SlotMode slot_mode = SlotMode::RoundRobin;
    int kmeans_k = 1;
    int sigma = 1; // boundary threshold (the literal algorithm value is 2)
};

struct InstanceConfig {
    double temperature = 0.1; // tp
};

struct RegenConfig {
    bool enabled = true;
    double phi = 0.9;
    RegenMode z_mode = RegenMode::Smoothing;
    RegenMode q_mode = RegenMode::Scaling;
};

struct AblateSection {
    std::vector<std::uint64_t> seeds{1, 2, 3};
};

struct RegenDemoConfig {
    std::string mode = "pixel"; // "pixel" | "image"
    std::vector<double> z;
    std::vector<double> q_alpha;
    std::vector<int> bank_labels;
};

struct RunConfig {
    std::string preset = "desk"; // "desk" | "paper"
    std::uint64_t seed = 42;
    DataConfig data;
    ModelConfig model;
    TrainConfig train;
    BankConfig bank;
    InstanceConfig instance;
    RegenConfig regen;
    AblateSection ablate;
    std::optional<RegenDemoConfig> regen_demo;
};

// Strict parse: unknown keys are errors, values are validated. A manifest
// (an object with "command" and "config" members) is unwrapped so reruns can
// point straight at a previous run's manifest.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);
void validate_config(const RunConfig& cfg);
nlohmann::json config_to_json(const RunConfig& cfg);

DomainSpec make_source_spec(const DataConfig& d);
DomainSpec make_target_spec(const DataConfig& d);
BankUpdatePolicy make_bank_policy(const RunConfig& cfg);
InteractionStrategy make_interaction(const RunConfig& cfg);

// Run manifest written next to every command's outputs.
nlohmann::json make_manifest(const std::string& command, const RunConfig& cfg);

} // namespace dida
