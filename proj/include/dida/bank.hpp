#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dida/numerics.hpp"
#include "dida/rng.hpp"

namespace dida {

enum class Sampling { NU, RS, ILS, CBS };
enum class Selecting { RS, AVG, KM, BPS };
enum class SlotMode { RoundRobin, Broadcast };

const char* to_string(Sampling s);
const char* to_string(Selecting s);
const char* to_string(SlotMode m);
Sampling sampling_from_string(const std::string& s);
Selecting selecting_from_string(const std::string& s);
SlotMode slot_mode_from_string(const std::string& s);

struct BankUpdatePolicy {
    Sampling sampling = Sampling::CBS;
    Selecting selecting = Selecting::BPS;
    int interval = 50;       // u: iterations between bank updates
    double momentum = 0.999; // omega
    SlotMode slot_mode = SlotMode::RoundRobin;
    int kmeans_k = 1;        // clusters for KM / the non-edge half of BPS
};

struct SlotRange {
    int begin = 0;
    int end = 0;
    int count() const { return end - begin; }
};

// K labeled source instance embeddings acting as a non-parametric instance
// classifier. `raw` holds the EMA accumulators (pre-normalization values);
// `features` is the unit-norm view of `raw` that all similarity math uses.
// Labels and the per-class slot layout are fixed at init.
struct InstanceBank {
    int class_count = 0; // C
    int dim = 0;         // D
    std::vector<double> raw;      // K x D
    std::vector<double> features; // K x D, rows unit-norm
    std::vector<int> labels;      // K, values in [0, C)
    std::vector<SlotRange> slots; // C contiguous ranges partitioning [0, K)
    std::vector<int> cursors;     // per-class round-robin position
    std::uint64_t updates_applied = 0;

    int size() const { return static_cast<int>(labels.size()); }
    std::span<const double> feature_row(int k) const {
        return {features.data() + static_cast<std::size_t>(k) * dim,
                static_cast<std::size_t>(dim)};
    }
    std::span<const double> raw_row(int k) const {
        return {raw.data() + static_cast<std::size_t>(k) * dim,
                static_cast<std::size_t>(dim)};
    }
};

// Per-class slot counts for a bank of size K. Every class keeps at least one
// holder; the remaining K-C slots are apportioned by a highest-averages rule
// over the strategy weights (uniform for CBS/NU-free layouts, the configured
// class frequencies for RS/NU, their inverses for ILS). Highest-averages
// keeps counts monotone in the weights, which the layout invariants rely on.
std::vector<int> bank_slot_counts(int K, int C, Sampling sampling,
                                  std::span<const double> class_freq = {});

struct SeedInstance {
    std::vector<double> embedding;
    int label = 0;
};

// Builds the bank with the slot layout implied by `sampling`. Slots are
// filled from seed_pool entries with matching labels (in pool order); any
// slot left over is filled with a random unit vector.
InstanceBank init_bank(int K, int C, int D, Rng& rng,
                       std::span<const SeedInstance> seed_pool = {},
                       Sampling sampling = Sampling::CBS,
                       std::span<const double> class_freq = {});

void validate_bank(const InstanceBank& bank);

// Boundary mask: mask[i,j] = 1 iff the number of distinct classes inside the
// 3x3 window centred at (i,j) exceeds sigma. Windows are truncated at the
// image border rather than padded.
std::vector<std::uint8_t> boundary_mask(std::span<const int> labels, int height,
                                        int width, int sigma);

struct BoundaryArtifacts {
    std::vector<std::uint8_t> mask;                       // M
    std::vector<int> boundary_labels;                     // E = Y * M, -1 where mask = 0
    std::map<int, std::vector<double>> boundary_mean;     // emb_b per class
    std::map<int, std::vector<double>> interior_centroid; // emb_theta per class
    std::map<int, std::vector<double>> selected;          // emb_avg per class
};

// The BPS pipeline pieces for one labeled feature map, exposed separately so
// tests can check emb_b / emb_theta / emb_avg against brute force.
BoundaryArtifacts boundary_artifacts(const DenseGrid& features,
                                     std::span<const int> labels,
                                     std::span<const std::uint8_t> mask,
                                     int kmeans_k, Rng& rng);

// One embedding per class present in the image, chosen per policy.selecting.
// Classes absent from the image are omitted (the skip rule).
std::map<int, std::vector<double>> select_embeddings(const DenseGrid& features,
                                                     std::span<const int> labels,
                                                     std::span<const std::uint8_t> mask,
                                                     Rng& rng,
                                                     const BankUpdatePolicy& policy);

// EMA update: raw <- omega * raw + (1 - omega) * selected[c], feature row
// re-normalized from raw. Round-robin mode touches one slot per class and
// advances that class's cursor; broadcast touches every slot of the class.
// With sampling == NU the first call replaces slot contents outright and all
// later calls are no-ops.
void ema_update(InstanceBank& bank,
                const std::map<int, std::vector<double>>& selected,
                const BankUpdatePolicy& policy);

// Versioned little-endian binary image of the bank. Features are stored as
// 32-bit floats; loading widens back to double, so a bank that has been
// through the format once round-trips bit-exactly.
std::vector<std::uint8_t> save_bank(const InstanceBank& bank);
InstanceBank load_bank(std::span<const std::uint8_t> bytes);
void save_bank_file(const InstanceBank& bank, const std::string& path);
InstanceBank load_bank_file(const std::string& path);

// Per-class slot stats as a JSON string (the inspect-bank CLI output).
std::string inspect_bank_json(const InstanceBank& bank);

} // namespace dida
