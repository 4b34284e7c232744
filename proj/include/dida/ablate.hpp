#pragma once

#include <string>
#include <vector>

#include "dida/config.hpp"
#include "dida/selftrain.hpp"
#include "dida/synthdata.hpp"

namespace dida {

struct AblateVariant {
    std::string name;
    RunConfig cfg; // base config with exactly the swept field(s) changed
};

// Variant grids per axis: K, u, phi, omega, sampling, selecting, interaction,
// components. Unknown axis is a config error.
std::vector<AblateVariant> ablate_variants(const RunConfig& base, const std::string& axis);

struct AblateRow {
    std::string axis;
    std::string variant;
    std::uint64_t seed = 0;
    double final_miou = 0.0;
    LossTerms final_losses;
    std::string metrics_path;
};

// Runs every variant for every configured seed against the shared dataset,
// writing one run directory (metrics.csv + manifest.json) per row under
// out_dir and a comparison.csv at the top.
std::vector<AblateRow> run_ablate(const RunConfig& base, const std::string& axis,
                                  const Dataset& data, const std::string& out_dir);

std::string comparison_csv(const std::vector<AblateRow>& rows);

} // namespace dida
