#include "dida/ablate.hpp"

#include <filesystem>

#include "dida/io.hpp"

namespace fs = std::filesystem;

namespace dida {

namespace {

std::string trim_number(double v) {
    std::string s = format_double(v);
    for (char& c : s) {
        if (c == '.') c = 'p';
    }
    return s;
}

// Table 7 component grid. CBS off means random sampling; BPS off means
// random selecting.
void apply_components(RunConfig& cfg, bool ins, bool cbs, bool bps, bool regen) {
    cfg.train.lambda_ins = ins ? 1.0 : 0.0;
    cfg.bank.sampling = ins ? (cbs ? Sampling::CBS : Sampling::RS) : Sampling::NU;
    cfg.bank.selecting = bps ? Selecting::BPS : Selecting::RS;
    cfg.regen.enabled = regen;
}

} // namespace

std::vector<AblateVariant> ablate_variants(const RunConfig& base, const std::string& axis) {
    std::vector<AblateVariant> variants;
    const auto add = [&](const std::string& name, RunConfig cfg) {
        variants.push_back({name, std::move(cfg)});
    };

    if (axis == "K") {
        for (int k : {10, 25, 50, 100, 200}) {
            RunConfig cfg = base;
            cfg.bank.size = k;
            add("K" + std::to_string(k), std::move(cfg));
        }
    } else if (axis == "u") {
        for (int u : {25, 50, 100, 200, 500}) {
            RunConfig cfg = base;
            cfg.bank.interval = u;
            add("u" + std::to_string(u), std::move(cfg));
        }
    } else if (axis == "phi") {
        for (double phi : {0.0, 0.8, 0.9, 0.95, 1.0}) {
            RunConfig cfg = base;
            cfg.regen.phi = phi;
            add("phi" + trim_number(phi), std::move(cfg));
        }
    } else if (axis == "omega") {
        for (double omega : {0.0, 0.9, 0.99, 0.999, 1.0}) {
            RunConfig cfg = base;
            cfg.bank.momentum = omega;
            add("omega" + trim_number(omega), std::move(cfg));
        }
    } else if (axis == "sampling") {
        for (Sampling s : {Sampling::NU, Sampling::RS, Sampling::ILS, Sampling::CBS}) {
            RunConfig cfg = base;
            cfg.bank.sampling = s;
            add(to_string(s), std::move(cfg));
        }
    } else if (axis == "selecting") {
        for (Selecting s : {Selecting::RS, Selecting::AVG, Selecting::KM, Selecting::BPS}) {
            RunConfig cfg = base;
            cfg.bank.selecting = s;
            add(to_string(s), std::move(cfg));
        }
    } else if (axis == "interaction") {
        for (RegenMode zm : {RegenMode::Smoothing, RegenMode::Scaling}) {
            for (RegenMode qm : {RegenMode::Smoothing, RegenMode::Scaling}) {
                RunConfig cfg = base;
                cfg.regen.enabled = true;
                cfg.regen.z_mode = zm;
                cfg.regen.q_mode = qm;
                add(std::string("z_") + to_string(zm) + "_q_" + to_string(qm), std::move(cfg));
            }
        }
    } else if (axis == "components") {
        RunConfig cfg = base;
        apply_components(cfg, false, false, false, false);
        add("baseline", cfg);
        cfg = base;
        apply_components(cfg, true, false, false, false);
        add("I", cfg);
        cfg = base;
        apply_components(cfg, true, true, false, false);
        add("II", cfg);
        cfg = base;
        apply_components(cfg, true, true, true, false);
        add("III", cfg);
        cfg = base;
        apply_components(cfg, true, false, false, true);
        add("IV", cfg);
        cfg = base;
        apply_components(cfg, true, true, true, true);
        add("V", cfg);
    } else {
        throw ConfigError("ablate: unknown axis '" + axis + "' (expected K, u, phi, omega, "
                          "sampling, selecting, interaction or components)");
    }
    return variants;
}

std::vector<AblateRow> run_ablate(const RunConfig& base, const std::string& axis,
                                  const Dataset& data, const std::string& out_dir) {
    const auto variants = ablate_variants(base, axis);
    fs::create_directories(out_dir);

    std::vector<AblateRow> rows;
    for (const auto& variant : variants) {
        for (std::uint64_t seed : base.ablate.seeds) {
            RunConfig cfg = variant.cfg;
            cfg.seed = seed;
            const std::string run_dir =
                out_dir + "/" + axis + "_" + variant.name + "_s" + std::to_string(seed);
            fs::create_directories(run_dir);

            const TrainResult result = train(cfg, data);
            write_text_file(run_dir + "/metrics.csv",
                            metrics_csv(result.rows, data.class_count));
            write_text_file(run_dir + "/manifest.json",
                            make_manifest("train", cfg).dump(2) + "\n");
            save_checkpoint_file(result.model, result.bank, run_dir + "/checkpoint.bin");

            AblateRow row;
            row.axis = axis;
            row.variant = variant.name;
            row.seed = seed;
            const MetricsRow& last = result.rows.back();
            row.final_miou = last.miou;
            row.final_losses = {last.l_src, last.l_tgt, last.l_ins, last.l_overall};
            row.metrics_path = run_dir + "/metrics.csv";
            rows.push_back(std::move(row));
        }
    }
    write_text_file(out_dir + "/comparison.csv", comparison_csv(rows));
    return rows;
}

std::string comparison_csv(const std::vector<AblateRow>& rows) {
    std::string out =
        "axis,variant,seed,final_miou,final_L_src,final_L_tgt,final_L_ins,final_L_overall,"
        "metrics_csv\n";
    for (const auto& row : rows) {
        out += row.axis + "," + row.variant + "," + std::to_string(row.seed);
        out += "," + format_double(row.final_miou);
        out += "," + format_double(row.final_losses.src);
        out += "," + format_double(row.final_losses.tgt);
        out += "," + format_double(row.final_losses.ins);
        out += "," + format_double(row.final_losses.overall);
        out += "," + row.metrics_path + "\n";
    }
    return out;
}

} // namespace dida
