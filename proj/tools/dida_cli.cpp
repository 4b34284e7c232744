// Command-line front door. Links only the public C API.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "dida.h"

namespace {

int status_to_exit(dida_status status) {
    switch (status) {
        case DIDA_OK: return 0;
        case DIDA_ERR_USAGE: return 1;
        case DIDA_ERR_CONFIG: return 2;
        case DIDA_ERR_RUNTIME: return 3;
    }
    return 3;
}

int fail(dida_status status) {
    std::fprintf(stderr, "error: %s\n", dida_last_error());
    return status_to_exit(status);
}

struct ConfigHandle {
    dida_config* cfg = nullptr;
    ~ConfigHandle() { dida_config_free(cfg); }
};

int load_config(const std::string& path, bool seed_set, std::uint64_t seed,
                ConfigHandle& handle) {
    dida_status status = dida_config_load(path.c_str(), &handle.cfg);
    if (status != DIDA_OK) return fail(status);
    if (seed_set) {
        status = dida_config_set_seed(handle.cfg, seed);
        if (status != DIDA_OK) return fail(status);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dida: dual-level pseudo-label self-training on a synthetic "
                 "domain-shift segmentation benchmark"};
    app.require_subcommand(1);
    app.set_version_flag("--version", dida_version());

    std::string config_path, out_dir, data_dir, axis, bank_path, checkpoint_path;
    std::uint64_t seed = 0;
    bool seed_set = false;

    auto* gen = app.add_subcommand("gen-data", "Generate the paired source/target dataset");
    gen->add_option("--config", config_path, "Config JSON (or a previous run's manifest)")
        ->required();
    gen->add_option("--out", out_dir, "Output directory")->required();
    gen->add_option("--seed", seed, "Override the config seed")->each([&](const std::string&) {
        seed_set = true;
    });

    auto* train = app.add_subcommand("train", "Run the self-training loop");
    train->add_option("--config", config_path, "Config JSON (or a previous run's manifest)")
        ->required();
    train->add_option("--out", out_dir, "Output directory")->required();
    train->add_option("--data", data_dir, "Dataset directory from gen-data (default: "
                                          "regenerate from the config)");
    train->add_option("--seed", seed, "Override the config seed")->each([&](const std::string&) {
        seed_set = true;
    });

    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
    eval->add_option("--checkpoint", checkpoint_path, "checkpoint.bin from train")->required();
    eval->add_option("--data", data_dir, "Dataset directory")->required();
    eval->add_option("--out", out_dir, "Optional output directory for eval.json");

    auto* ablate = app.add_subcommand("ablate", "Sweep one ablation axis");
    ablate->add_option("--config", config_path, "Config JSON (or a previous run's manifest)")
        ->required();
    ablate->add_option("--axis,--grid", axis,
                       "K, u, phi, omega, sampling, selecting, interaction or components")
        ->required();
    ablate->add_option("--out", out_dir, "Output directory")->required();
    ablate->add_option("--data", data_dir, "Dataset directory (default: regenerate)");
    ablate->add_option("--seed", seed, "Override the config seed")
        ->each([&](const std::string&) { seed_set = true; });

    auto* inspect = app.add_subcommand("inspect-bank", "Print per-class bank stats as JSON");
    inspect->add_option("--bank", bank_path, "Bank file")->required();

    auto* demo = app.add_subcommand("regen-demo",
                                    "Dump the pseudo-label regeneration chain as JSON");
    demo->add_option("--config", config_path, "Config JSON with an optional regen_demo section")
        ->required();
    demo->add_option("--out", out_dir, "Optional output directory for regen_demo.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1; // usage error
    }

    if (gen->parsed()) {
        ConfigHandle cfg;
        if (int rc = load_config(config_path, seed_set, seed, cfg)) return rc;
        const dida_status status = dida_gen_data(cfg.cfg, out_dir.c_str());
        return status == DIDA_OK ? 0 : fail(status);
    }

    if (train->parsed()) {
        ConfigHandle cfg;
        if (int rc = load_config(config_path, seed_set, seed, cfg)) return rc;
        const dida_status status =
            dida_train(cfg.cfg, data_dir.empty() ? nullptr : data_dir.c_str(), out_dir.c_str());
        return status == DIDA_OK ? 0 : fail(status);
    }

    if (eval->parsed()) {
        char* json = nullptr;
        const dida_status status =
            dida_evaluate(checkpoint_path.c_str(), data_dir.c_str(),
                          out_dir.empty() ? nullptr : out_dir.c_str(), &json);
        if (status != DIDA_OK) return fail(status);
        std::printf("%s\n", json);
        dida_string_free(json);
        return 0;
    }

    if (ablate->parsed()) {
        ConfigHandle cfg;
        if (int rc = load_config(config_path, seed_set, seed, cfg)) return rc;
        const dida_status status =
            dida_ablate(cfg.cfg, axis.c_str(), data_dir.empty() ? nullptr : data_dir.c_str(),
                        out_dir.c_str());
        return status == DIDA_OK ? 0 : fail(status);
    }

    if (inspect->parsed()) {
        dida_bank* bank = nullptr;
        dida_status status = dida_bank_open(bank_path.c_str(), &bank);
        if (status != DIDA_OK) return fail(status);
        char* json = nullptr;
        status = dida_bank_inspect(bank, &json);
        dida_bank_close(bank);
        if (status != DIDA_OK) return fail(status);
        std::printf("%s\n", json);
        dida_string_free(json);
        return 0;
    }

    if (demo->parsed()) {
        ConfigHandle cfg;
        if (int rc = load_config(config_path, seed_set, seed, cfg)) return rc;
        char* json = nullptr;
        dida_status status = dida_regen_demo(cfg.cfg, &json);
        if (status != DIDA_OK) return fail(status);
        std::printf("%s\n", json);
        if (!out_dir.empty()) {
            // Write alongside a manifest so the dump is reproducible.
            char* cfg_json = nullptr;
            status = dida_config_to_json(cfg.cfg, &cfg_json);
            if (status != DIDA_OK) {
                dida_string_free(json);
                return fail(status);
            }
            std::error_code ec;
            std::filesystem::create_directories(out_dir, ec);
            std::ofstream demo_out(out_dir + "/regen_demo.json");
            demo_out << json << "\n";
            std::ofstream manifest_out(out_dir + "/manifest.json");
            manifest_out << "{\n  \"command\": \"regen-demo\",\n  \"version\": \""
                         << dida_version() << "\",\n  \"config\": " << cfg_json << "\n}\n";
            dida_string_free(cfg_json);
            if (!demo_out || !manifest_out) {
                dida_string_free(json);
                std::fprintf(stderr, "error: cannot write %s\n", out_dir.c_str());
                return 3;
            }
        }
        dida_string_free(json);
        return 0;
    }

    return 1;
}
