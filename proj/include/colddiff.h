/* Copyright 2026 The colddiff Authors
 * License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
 *
 * C interface to the colddiff library. Every function returns a cd_status;
 * on failure cd_last_error() describes the problem (per thread). Strings
 * handed out by the library are released with cd_string_free.
 */
#ifndef COLDDIFF_H_
#define COLDDIFF_H_

#include <stddef.h>
#include <stdint.h>

#if defined(COLDDIFF_BUILDING_LIBRARY)
#define CD_API __attribute__((visibility("default")))
#else
#define CD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match the CLI exit codes. */
typedef enum cd_status {
  CD_OK = 0,
  CD_ERR_USAGE = 1,     /* bad arguments, config or preconditions */
  CD_ERR_DATA = 2,      /* missing, unreadable or inconsistent files/signals */
  CD_ERR_NUMERICAL = 3  /* non-finite values or degenerate numerics */
} cd_status;

typedef struct cd_config cd_config;
typedef struct cd_checkpoint cd_checkpoint;

/* Receives one JSON object per call (no trailing newline). */
typedef void (*cd_progress_fn)(const char* json_line, void* user);

typedef struct cd_run_options {
  cd_progress_fn progress; /* may be NULL */
  void* user;
} cd_run_options;

CD_API const char* cd_version(void);
CD_API const char* cd_last_error(void);
CD_API void cd_string_free(char* s);

/* Run configuration. */
CD_API cd_status cd_config_new(cd_config** out);
CD_API cd_status cd_config_load(const char* path, cd_config** out);
/* Dotted key, e.g. ("train.epochs", "5"). Values are parsed as JSON when
 * possible, otherwise taken as strings. Unknown keys are rejected. */
CD_API cd_status cd_config_set(cd_config* cfg, const char* key, const char* value);
/* Fully resolved configuration as JSON. */
CD_API cd_status cd_config_dump(const cd_config* cfg, char** out_json);
CD_API void cd_config_free(cd_config* cfg);

/* Commands. Optional path arguments may be NULL; options may be NULL. */
CD_API cd_status cd_render(const cd_config* cfg, const char* dry_dir, const char* rir_dir,
                           const char* out_dir, const cd_run_options* options);
CD_API cd_status cd_train(const cd_config* cfg, const char* manifest, const char* out_checkpoint,
                          const cd_run_options* options);
/* Exactly one of checkpoint / oracle_reference must be given. mode
 * ("direct" or "delta") must match the checkpoint when given. */
CD_API cd_status cd_dereverb(const cd_config* cfg, const char* input, const char* checkpoint,
                             const char* oracle_reference, const char* mode,
                             const char* out_dir, const cd_run_options* options);
CD_API cd_status cd_evaluate(const cd_config* cfg, const char* manifest,
                             const char* estimates_dir, const char* out_dir,
                             const cd_run_options* options);

/* Checkpoints and in-memory processing. Audio buffers are interleaved
 * stereo doubles of `frames` frames. */
CD_API cd_status cd_checkpoint_load(const char* path, cd_checkpoint** out);
CD_API cd_status cd_checkpoint_info(const cd_checkpoint* ckpt, char** out_json);
CD_API cd_status cd_checkpoint_dereverb(const cd_checkpoint* ckpt, const double* input,
                                        size_t frames, double sample_rate, double* output);
CD_API void cd_checkpoint_free(cd_checkpoint* ckpt);

/* All metrics of one (estimate, reference, reverberant) triple as a JSON
 * object; metric settings come from cfg (NULL = defaults). */
CD_API cd_status cd_metrics_evaluate(const cd_config* cfg, const double* estimate,
                                     const double* reference, const double* reverberant,
                                     size_t frames, double sample_rate, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* COLDDIFF_H_ */
