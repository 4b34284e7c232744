#include "dida/bank.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>

#include "dida/io.hpp"

#include <json.hpp>

namespace dida {

const char* to_string(Sampling s) {
    switch (s) {
        case Sampling::NU: return "NU";
        case Sampling::RS: return "RS";
        case Sampling::ILS: return "ILS";
        case Sampling::CBS: return "CBS";
    }
    return "?";
}

const char* to_string(Selecting s) {
    switch (s) {
        case Selecting::RS: return "RS";
        case Selecting::AVG: return "AVG";
        case Selecting::KM: return "KM";
        case Selecting::BPS: return "BPS";
    }
    return "?";
}

const char* to_string(SlotMode m) {
    return m == SlotMode::RoundRobin ? "round_robin" : "broadcast";
}

Sampling sampling_from_string(const std::string& s) {
    if (s == "NU") return Sampling::NU;
    if (s == "RS") return Sampling::RS;
    if (s == "ILS") return Sampling::ILS;
    if (s == "CBS") return Sampling::CBS;
    throw ConfigError("unknown sampling strategy: " + s);
}

Selecting selecting_from_string(const std::string& s) {
    if (s == "RS") return Selecting::RS;
    if (s == "AVG") return Selecting::AVG;
    if (s == "KM") return Selecting::KM;
    if (s == "BPS") return Selecting::BPS;
    throw ConfigError("unknown selecting strategy: " + s);
}

SlotMode slot_mode_from_string(const std::string& s) {
    if (s == "round_robin") return SlotMode::RoundRobin;
    if (s == "broadcast") return SlotMode::Broadcast;
    throw ConfigError("unknown slot mode: " + s);
}

std::vector<int> bank_slot_counts(int K, int C, Sampling sampling,
                                  std::span<const double> class_freq) {
    if (C < 1) throw Error("bank_slot_counts: need at least one class");
    if (K < C) throw Error("bank_slot_counts: K < C, every class needs a holder");

    std::vector<double> weights(C, 1.0);
    if (sampling == Sampling::RS || sampling == Sampling::NU || sampling == Sampling::ILS) {
        if (!class_freq.empty()) {
            if (static_cast<int>(class_freq.size()) != C) {
                throw Error("bank_slot_counts: class_freq size mismatch");
            }
            for (int c = 0; c < C; ++c) {
                const double f = std::max(class_freq[c], 1e-12);
                weights[c] = (sampling == Sampling::ILS) ? 1.0 / f : f;
            }
        }
        // With no frequency information RS/NU/ILS degrade to the uniform layout.
    }

    // One guaranteed holder per class, the rest by highest averages.
    std::vector<int> counts(C, 1);
    std::vector<int> extra(C, 0);
    for (int seat = 0; seat < K - C; ++seat) {
        int best = 0;
        double best_avg = weights[0] / (extra[0] + 1);
        for (int c = 1; c < C; ++c) {
            const double avg = weights[c] / (extra[c] + 1);
            if (avg > best_avg) {
                best_avg = avg;
                best = c;
            }
        }
        extra[best]++;
    }
    for (int c = 0; c < C; ++c) counts[c] += extra[c];
    return counts;
}

InstanceBank init_bank(int K, int C, int D, Rng& rng,
                       std::span<const SeedInstance> seed_pool,
                       Sampling sampling,
                       std::span<const double> class_freq) {
    if (C < 1 || D < 1) throw Error("init_bank: C and D must be positive");
    if (K < C) throw Error("init_bank: K < C, every class needs a holder");

    InstanceBank bank;
    bank.class_count = C;
    bank.dim = D;
    bank.labels.resize(K);
    bank.raw.resize(static_cast<std::size_t>(K) * D);
    bank.features.resize(static_cast<std::size_t>(K) * D);
    bank.cursors.assign(C, 0);

    const std::vector<int> counts = bank_slot_counts(K, C, sampling, class_freq);
    bank.slots.resize(C);
    int at = 0;
    for (int c = 0; c < C; ++c) {
        bank.slots[c] = {at, at + counts[c]};
        for (int k = at; k < at + counts[c]; ++k) bank.labels[k] = c;
        at += counts[c];
    }

    // Fill slots from the seed pool (matching labels, pool order), falling
    // back to random unit vectors for anything left uncovered.
    std::vector<int> next_slot(C);
    for (int c = 0; c < C; ++c) next_slot[c] = bank.slots[c].begin;
    for (const auto& seed : seed_pool) {
        if (seed.label < 0 || seed.label >= C) throw Error("init_bank: seed label out of range");
        if (static_cast<int>(seed.embedding.size()) != D) throw Error("init_bank: seed dim mismatch");
        const int c = seed.label;
        if (next_slot[c] >= bank.slots[c].end) continue; // class already full
        const auto unit = l2_normalize(seed.embedding);
        std::copy(unit.begin(), unit.end(),
                  bank.raw.begin() + static_cast<std::size_t>(next_slot[c]) * D);
        next_slot[c]++;
    }
    std::vector<double> v(D);
    for (int c = 0; c < C; ++c) {
        for (int k = next_slot[c]; k < bank.slots[c].end; ++k) {
            double norm = 0.0;
            do {
                for (int d = 0; d < D; ++d) v[d] = rng.gaussian();
                norm = l2_norm(v);
            } while (norm <= 1e-12);
            for (int d = 0; d < D; ++d) {
                bank.raw[static_cast<std::size_t>(k) * D + d] = v[d] / norm;
            }
        }
    }

    bank.features = bank.raw; // raw rows are unit at init
    validate_bank(bank);
    return bank;
}

void validate_bank(const InstanceBank& bank) {
    const int K = bank.size();
    const int C = bank.class_count;
    const int D = bank.dim;
    if (static_cast<int>(bank.slots.size()) != C || static_cast<int>(bank.cursors.size()) != C) {
        throw Error("bank: slot layout size mismatch");
    }
    if (bank.raw.size() != static_cast<std::size_t>(K) * D ||
        bank.features.size() != static_cast<std::size_t>(K) * D) {
        throw Error("bank: feature storage size mismatch");
    }
    int total = 0;
    for (int c = 0; c < C; ++c) {
        const auto& s = bank.slots[c];
        if (s.count() < 1) throw Error("bank: class without a holder");
        if (s.begin != total) throw Error("bank: slots not contiguous");
        total = s.end;
        for (int k = s.begin; k < s.end; ++k) {
            if (bank.labels[k] != c) throw Error("bank: label inconsistent with slot layout");
        }
        if (bank.cursors[c] < 0 || bank.cursors[c] >= s.count()) {
            throw Error("bank: cursor out of range");
        }
    }
    if (total != K) throw Error("bank: slot counts do not sum to K");
    for (int k = 0; k < K; ++k) {
        const double norm = l2_norm(bank.feature_row(k));
        if (std::abs(norm - 1.0) > 1e-9) throw Error("bank: feature row not unit-norm");
    }
}

std::vector<std::uint8_t> boundary_mask(std::span<const int> labels, int height,
                                        int width, int sigma) {
    if (labels.size() != static_cast<std::size_t>(height) * width) {
        throw Error("boundary_mask: label grid size mismatch");
    }
    std::vector<std::uint8_t> mask(labels.size(), 0);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            int distinct = 0;
            int seen[9];
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int yy = y + dy;
                    const int xx = x + dx;
                    if (yy < 0 || yy >= height || xx < 0 || xx >= width) continue;
                    const int cls = labels[static_cast<std::size_t>(yy) * width + xx];
                    bool found = false;
                    for (int s = 0; s < distinct; ++s) {
                        if (seen[s] == cls) {
                            found = true;
                            break;
                        }
                    }
                    if (!found) seen[distinct++] = cls;
                }
            }
            if (distinct > sigma) mask[static_cast<std::size_t>(y) * width + x] = 1;
        }
    }
    return mask;
}

namespace {

std::vector<double> mean_of(const DenseGrid& features, const std::vector<int>& pixel_ids) {
    std::vector<double> m(features.channels, 0.0);
    for (int id : pixel_ids) {
        const double* p = features.data.data() + static_cast<std::size_t>(id) * features.channels;
        for (int d = 0; d < features.channels; ++d) m[d] += p[d];
    }
    const double inv = 1.0 / static_cast<double>(pixel_ids.size());
    for (double& x : m) x *= inv;
    return m;
}

// k-means over the listed pixels; returns the centroid of the largest
// cluster (lowest index on ties). k is clamped to the number of points.
std::vector<double> cluster_centroid(const DenseGrid& features,
                                     const std::vector<int>& pixel_ids, int k, Rng& rng) {
    const int n = static_cast<int>(pixel_ids.size());
    const int dim = features.channels;
    if (k <= 1 || n == 1) return mean_of(features, pixel_ids);
    const int kk = std::min(k, n);
    std::vector<double> pts(static_cast<std::size_t>(n) * dim);
    for (int i = 0; i < n; ++i) {
        const double* p = features.data.data() + static_cast<std::size_t>(pixel_ids[i]) * dim;
        std::copy_n(p, dim, pts.begin() + static_cast<std::size_t>(i) * dim);
    }
    const KmeansResult res = kmeans(pts, n, dim, kk, rng);
    std::vector<int> counts(kk, 0);
    for (int a : res.assignments) counts[a]++;
    int best = 0;
    for (int j = 1; j < kk; ++j) {
        if (counts[j] > counts[best]) best = j;
    }
    const auto c = res.centroid(best);
    return {c.begin(), c.end()};
}

} // namespace

BoundaryArtifacts boundary_artifacts(const DenseGrid& features,
                                     std::span<const int> labels,
                                     std::span<const std::uint8_t> mask,
                                     int kmeans_k, Rng& rng) {
    const std::size_t n = static_cast<std::size_t>(features.pixel_count());
    if (labels.size() != n || mask.size() != n) {
        throw Error("boundary_artifacts: shape mismatch");
    }

    BoundaryArtifacts out;
    out.mask.assign(mask.begin(), mask.end());
    out.boundary_labels.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (mask[i]) out.boundary_labels[i] = labels[i];
    }

    std::map<int, std::vector<int>> edge_pixels, interior_pixels;
    for (std::size_t i = 0; i < n; ++i) {
        (mask[i] ? edge_pixels : interior_pixels)[labels[i]].push_back(static_cast<int>(i));
    }

    std::set<int> classes;
    for (const auto& [c, ids] : edge_pixels) classes.insert(c);
    for (const auto& [c, ids] : interior_pixels) classes.insert(c);

    for (int c : classes) {
        const auto eit = edge_pixels.find(c);
        const auto iit = interior_pixels.find(c);
        if (eit != edge_pixels.end()) {
            out.boundary_mean[c] = mean_of(features, eit->second);
        }
        if (iit != interior_pixels.end()) {
            out.interior_centroid[c] = cluster_centroid(features, iit->second, kmeans_k, rng);
        }
        // emb_avg = (emb_b + emb_theta) / 2; single-sided when the class has
        // only edge or only interior pixels.
        const bool has_b = out.boundary_mean.count(c) > 0;
        const bool has_t = out.interior_centroid.count(c) > 0;
        if (has_b && has_t) {
            std::vector<double> avg(features.channels);
            const auto& b = out.boundary_mean[c];
            const auto& t = out.interior_centroid[c];
            for (int d = 0; d < features.channels; ++d) avg[d] = 0.5 * (b[d] + t[d]);
            out.selected[c] = std::move(avg);
        } else if (has_b) {
            out.selected[c] = out.boundary_mean[c];
        } else {
            out.selected[c] = out.interior_centroid[c];
        }
    }
    return out;
}

std::map<int, std::vector<double>> select_embeddings(const DenseGrid& features,
                                                     std::span<const int> labels,
                                                     std::span<const std::uint8_t> mask,
                                                     Rng& rng,
                                                     const BankUpdatePolicy& policy) {
    const std::size_t n = static_cast<std::size_t>(features.pixel_count());
    if (labels.size() != n || mask.size() != n) {
        throw Error("select_embeddings: shape mismatch");
    }

    if (policy.selecting == Selecting::BPS) {
        return boundary_artifacts(features, labels, mask, policy.kmeans_k, rng).selected;
    }

    std::map<int, std::vector<int>> pixels_by_class;
    for (std::size_t i = 0; i < n; ++i) {
        pixels_by_class[labels[i]].push_back(static_cast<int>(i));
    }

    std::map<int, std::vector<double>> out;
    for (const auto& [c, ids] : pixels_by_class) {
        switch (policy.selecting) {
            case Selecting::AVG:
                out[c] = mean_of(features, ids);
                break;
            case Selecting::KM:
                out[c] = cluster_centroid(features, ids, policy.kmeans_k, rng);
                break;
            case Selecting::RS: {
                const int pick = ids[rng.uniform_int(static_cast<int>(ids.size()))];
                const auto p = features.data.data() + static_cast<std::size_t>(pick) * features.channels;
                out[c] = std::vector<double>(p, p + features.channels);
                break;
            }
            case Selecting::BPS:
                break; // handled above
        }
    }
    return out;
}

void ema_update(InstanceBank& bank,
                const std::map<int, std::vector<double>>& selected,
                const BankUpdatePolicy& policy) {
    if (policy.sampling == Sampling::NU && bank.updates_applied > 0) {
        return; // bank frozen after the first fill
    }
    // The very first NU call fills slots with the selected embeddings
    // outright; afterwards the bank never changes.
    const double omega =
        (policy.sampling == Sampling::NU) ? 0.0 : policy.momentum;

    const int D = bank.dim;
    const auto apply_slot = [&](int k, const std::vector<double>& target) {
        double* raw = bank.raw.data() + static_cast<std::size_t>(k) * D;
        std::vector<double> next(D);
        for (int d = 0; d < D; ++d) next[d] = omega * raw[d] + (1.0 - omega) * target[d];
        double* feat = bank.features.data() + static_cast<std::size_t>(k) * D;
        // A degenerate (near-zero) accumulator would break the unit-norm
        // invariant; skip the slot and keep the previous value.
        if (!try_l2_normalize(next, {feat, static_cast<std::size_t>(D)})) return;
        std::copy(next.begin(), next.end(), raw);
    };

    for (const auto& [c, target] : selected) {
        if (c < 0 || c >= bank.class_count) throw Error("ema_update: class out of range");
        if (static_cast<int>(target.size()) != D) throw Error("ema_update: embedding dim mismatch");
        const SlotRange s = bank.slots[c];
        if (policy.slot_mode == SlotMode::Broadcast) {
            for (int k = s.begin; k < s.end; ++k) apply_slot(k, target);
        } else {
            const int k = s.begin + bank.cursors[c];
            apply_slot(k, target);
            bank.cursors[c] = (bank.cursors[c] + 1) % s.count();
        }
    }
    bank.updates_applied++;
}

namespace {
constexpr char kBankMagic[9] = "DIDABANK";
constexpr std::uint32_t kBankVersion = 1;
} // namespace

std::vector<std::uint8_t> save_bank(const InstanceBank& bank) {
    ByteWriter w;
    w.magic(kBankMagic);
    w.u32(kBankVersion);
    w.u32(static_cast<std::uint32_t>(bank.size()));
    w.u32(static_cast<std::uint32_t>(bank.class_count));
    w.u32(static_cast<std::uint32_t>(bank.dim));
    for (double v : bank.raw) w.f32(static_cast<float>(v));
    for (int l : bank.labels) w.i32(l);
    for (const auto& s : bank.slots) {
        w.i32(s.begin);
        w.i32(s.end);
    }
    for (int c : bank.cursors) w.i32(c);
    w.u64(bank.updates_applied);
    return w.take();
}

InstanceBank load_bank(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    r.magic(kBankMagic, "bank");
    const std::uint32_t version = r.u32();
    if (version != kBankVersion) {
        throw IoError("bank: unsupported version " + std::to_string(version));
    }
    const int K = static_cast<int>(r.u32());
    const int C = static_cast<int>(r.u32());
    const int D = static_cast<int>(r.u32());
    if (K < 1 || C < 1 || D < 1 || K < C) throw IoError("bank: invalid header dimensions");

    InstanceBank bank;
    bank.class_count = C;
    bank.dim = D;
    bank.raw.resize(static_cast<std::size_t>(K) * D);
    bank.features.resize(bank.raw.size());
    bank.labels.resize(K);
    bank.slots.resize(C);
    bank.cursors.resize(C);
    for (auto& v : bank.raw) v = static_cast<double>(r.f32());
    for (auto& l : bank.labels) l = r.i32();
    for (auto& s : bank.slots) {
        s.begin = r.i32();
        s.end = r.i32();
    }
    for (auto& c : bank.cursors) c = r.i32();
    bank.updates_applied = r.u64();
    r.expect_end("bank");

    for (int k = 0; k < K; ++k) {
        if (!try_l2_normalize(bank.raw_row(k),
                              {bank.features.data() + static_cast<std::size_t>(k) * D,
                               static_cast<std::size_t>(D)})) {
            throw IoError("bank: zero-norm feature row");
        }
    }
    validate_bank(bank);
    return bank;
}

void save_bank_file(const InstanceBank& bank, const std::string& path) {
    write_file(path, save_bank(bank));
}

InstanceBank load_bank_file(const std::string& path) {
    return load_bank(read_file(path));
}

std::string inspect_bank_json(const InstanceBank& bank) {
    nlohmann::json j;
    j["size"] = bank.size();
    j["classes"] = bank.class_count;
    j["dim"] = bank.dim;
    j["updates_applied"] = bank.updates_applied;
    nlohmann::json per_class = nlohmann::json::array();
    for (int c = 0; c < bank.class_count; ++c) {
        const SlotRange s = bank.slots[c];
        double mean_norm = 0.0;
        for (int k = s.begin; k < s.end; ++k) mean_norm += l2_norm(bank.feature_row(k));
        mean_norm /= s.count();
        // Mean pairwise cosine inside the class: 1.0 means the holders have
        // collapsed to a single direction.
        double cos_sum = 0.0;
        int pairs = 0;
        for (int a = s.begin; a < s.end; ++a) {
            for (int b = a + 1; b < s.end; ++b) {
                double dot = 0.0;
                for (int d = 0; d < bank.dim; ++d) {
                    dot += bank.features[static_cast<std::size_t>(a) * bank.dim + d] *
                           bank.features[static_cast<std::size_t>(b) * bank.dim + d];
                }
                cos_sum += dot;
                pairs++;
            }
        }
        per_class.push_back({{"class", c},
                             {"slots", s.count()},
                             {"slot_begin", s.begin},
                             {"cursor", bank.cursors[c]},
                             {"mean_feature_norm", mean_norm},
                             {"mean_pairwise_cosine", pairs ? cos_sum / pairs : 1.0}});
    }
    j["per_class"] = per_class;
    return j.dump(2);
}

} // namespace dida
