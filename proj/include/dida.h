/*
 * Public C API for the dida library: dual-level pseudo-label self-training
 * on a synthetic domain-shift segmentation benchmark.
 *
 * All functions return dida_status; on failure dida_last_error() holds a
 * single-line description (thread-local). Handles are opaque and must be
 * released with their matching free/close function. Strings returned through
 * char** out-parameters are heap-allocated and must be released with
 * dida_string_free().
 */
#ifndef DIDA_H
#define DIDA_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dida_status {
    DIDA_OK = 0,
    DIDA_ERR_USAGE = 1,   /* invalid API usage (null handle, bad argument) */
    DIDA_ERR_CONFIG = 2,  /* unreadable, invalid or inconsistent configuration */
    DIDA_ERR_RUNTIME = 3  /* anything that fails after configuration checks */
} dida_status;

const char* dida_version(void);
const char* dida_last_error(void);
void dida_string_free(char* s);

/* ---- configuration ---- */

typedef struct dida_config_s dida_config;

dida_status dida_config_load(const char* path, dida_config** out);
dida_status dida_config_parse_json(const char* json_text, dida_config** out);
dida_status dida_config_set_seed(dida_config* cfg, uint64_t seed);
/* Resolved config as JSON; the string must be freed with dida_string_free. */
dida_status dida_config_to_json(const dida_config* cfg, char** json_out);
void dida_config_free(dida_config* cfg);

/* ---- commands ---- */

/* Generate the paired source/target dataset into out_dir (manifest.json plus
 * one flat binary grid per image/label map). */
dida_status dida_gen_data(const dida_config* cfg, const char* out_dir);

/* Run the self-training loop. data_dir may be NULL, in which case the
 * dataset is regenerated in memory from the config (bit-identical to what
 * dida_gen_data writes). Outputs: metrics.csv, checkpoint.bin,
 * manifest.json. */
dida_status dida_train(const dida_config* cfg, const char* data_dir, const char* out_dir);

/* Evaluate a checkpoint on the target split of data_dir. The result JSON is
 * returned through json_out and, when out_dir is non-NULL, also written to
 * out_dir/eval.json. */
dida_status dida_evaluate(const char* checkpoint_path, const char* data_dir,
                          const char* out_dir, char** json_out);

/* Run one ablation axis: K, u, phi, omega, sampling, selecting, interaction
 * or components. data_dir semantics as in dida_train. Writes per-variant run
 * directories plus comparison.csv. */
dida_status dida_ablate(const dida_config* cfg, const char* axis, const char* data_dir,
                        const char* out_dir);

/* Dump the regeneration chain (z, q_alpha, z_sc, q_ga, z_hat, q_hat) as JSON
 * for one pixel (vectors from the config's regen_demo section) or one
 * synthesized image. */
dida_status dida_regen_demo(const dida_config* cfg, char** json_out);

/* ---- instance bank ---- */

typedef struct dida_bank_s dida_bank;

dida_status dida_bank_open(const char* path, dida_bank** out);
/* Per-class slot statistics as JSON. */
dida_status dida_bank_inspect(const dida_bank* bank, char** json_out);
void dida_bank_close(dida_bank* bank);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DIDA_H */
