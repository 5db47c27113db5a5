/* pfpmerge: BWT construction by prefix-free parsing and merging of the BWTs
 * of dissimilar sub-collections.
 *
 * Every function returns a pfpm_status. On failure a description is available
 * from pfpm_last_error() on the calling thread until its next API call.
 * Output pointers are written only on success. Handles are not thread-safe;
 * distinct handles may be used from different threads. */
#ifndef PFPMERGE_H
#define PFPMERGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PFPM_API __declspec(dllexport)
#else
#define PFPM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pfpm_status {
  PFPM_OK = 0,
  PFPM_ERR_INVALID_ARGUMENT = 1,
  PFPM_ERR_IO = 2,
  PFPM_ERR_FORMAT = 3,
  PFPM_ERR_PARAM_MISMATCH = 4,
  PFPM_ERR_INVARIANT = 5,
  PFPM_ERR_LIMIT = 6,
  PFPM_ERR_INTERNAL = 7
} pfpm_status;

typedef enum pfpm_format {
  PFPM_FORMAT_AUTO = 0, /* by file extension: .fa .fasta .fna .fas are FASTA */
  PFPM_FORMAT_FASTA = 1,
  PFPM_FORMAT_PLAIN = 2
} pfpm_format;

typedef enum pfpm_log_level {
  PFPM_LOG_ERROR = 0,
  PFPM_LOG_WARN = 1,
  PFPM_LOG_INFO = 2,
  PFPM_LOG_DEBUG = 3
} pfpm_log_level;

typedef struct pfpm_params {
  uint32_t w;         /* window length, >= 2 */
  uint64_t p;         /* trigger modulus, >= 1 */
  uint64_t hash_base;
  uint64_t hash_mod;
} pfpm_params;

PFPM_API const char* pfpm_version(void);
PFPM_API const char* pfpm_status_string(pfpm_status status);
PFPM_API const char* pfpm_last_error(void);
PFPM_API void pfpm_set_log_level(pfpm_log_level level);

/* w = 20, p = 100, hash_base = 1000000007, hash_mod = 1999999973. */
PFPM_API void pfpm_params_default(pfpm_params* params);

/* Karp-Rabin hash of a window computed from scratch. */
PFPM_API pfpm_status pfpm_window_hash(const pfpm_params* params, const char* window,
                                      size_t length, uint64_t* hash_out);

/* ---- file stages ---------------------------------------------------------- */

PFPM_API pfpm_status pfpm_normalize_file(const char* in_path, pfpm_format format,
                                         const char* out_path, uint64_t* sequences_out);

PFPM_API pfpm_status pfpm_collect_triggers_file(const char* seq_path, const pfpm_params* params,
                                                const char* out_path, uint64_t* count_out);

/* exclusive_out and total_out, when not NULL, receive `count` entries. */
PFPM_API pfpm_status pfpm_census_files(const char* const* trigger_paths, size_t count,
                                       const char* out_shared, const char* out_exclusive_dir,
                                       uint64_t* shared_out, uint64_t* exclusive_out,
                                       uint64_t* total_out);

/* allowed_path and out_sa may be NULL. */
PFPM_API pfpm_status pfpm_parse_file(const char* seq_path, const pfpm_params* params,
                                     const char* allowed_path, uint32_t dataset_id, int packed,
                                     const char* out_dict, const char* out_parse,
                                     const char* out_sa);

PFPM_API pfpm_status pfpm_build_sa_file(const char* dict_path, const char* out_sa);

typedef struct pfpm_bwt_stats {
  uint64_t length;
  uint64_t easy_chars; /* positions written by the easy fill */
  uint64_t hard_chars;
  uint64_t gaps;
  uint64_t phrases;
  uint64_t parse_length;
  uint64_t d_size;
} pfpm_bwt_stats;

/* Parses and builds in one step. out_dict and out_sa may be NULL; they
 * receive the artifacts a later merge needs. stats may be NULL. */
PFPM_API pfpm_status pfpm_build_bwt_file(const char* seq_path, const pfpm_params* params,
                                         const char* allowed_path, uint32_t dataset_id,
                                         const char* out_bwt, const char* out_dict, int packed,
                                         const char* out_sa, pfpm_bwt_stats* stats);

/* Builds from stored artifacts. sa_path may be NULL. */
PFPM_API pfpm_status pfpm_build_bwt_from_parse(const char* dict_path, const char* parse_path,
                                               const char* sa_path, const char* out_bwt,
                                               pfpm_bwt_stats* stats);

typedef struct pfpm_merge_options {
  uint64_t stride;      /* phrase sample stride, default 50 */
  size_t buffer_bytes;  /* copy buffer, default 1 MiB */
} pfpm_merge_options;

typedef struct pfpm_merge_stats {
  uint64_t output_length;
  uint64_t sad_entries;
  uint64_t valid_entries;
  uint64_t terminal_ties;
  uint64_t table_bytes;
  uint64_t packed_bytes;
  uint64_t buffer_bytes;
  uint64_t cursor_bytes;
} pfpm_merge_stats;

PFPM_API void pfpm_merge_options_default(pfpm_merge_options* options);

/* Arrays hold one entry per dataset in merge order. options and stats may be NULL. */
PFPM_API pfpm_status pfpm_merge_files(const char* const* dict_paths, const char* const* sa_paths,
                                      const char* const* bwt_paths, size_t count,
                                      const char* out_path, const pfpm_merge_options* options,
                                      pfpm_merge_stats* stats);

/* Compares two BWT files. first_diff_out is -1 when they are equal. */
PFPM_API pfpm_status pfpm_verify_files(const char* bwt_path, const char* against_path,
                                       int* equal_out, int64_t* first_diff_out);

/* Reference BWT of the concatenated collections by plain suffix sorting.
 * max_length 0 selects the default cap of 10^6 characters. */
PFPM_API pfpm_status pfpm_oracle_bwt_files(const char* const* seq_paths, size_t count,
                                           uint32_t w, uint64_t max_length,
                                           const char* out_path);

/* Reads the payload of a BWT file into a caller buffer. With buffer == NULL
 * only *length_out is set. */
PFPM_API pfpm_status pfpm_read_bwt(const char* path, char* buffer, size_t capacity,
                                   uint64_t* length_out);

/* ---- collections ---------------------------------------------------------- */

typedef struct pfpm_collection pfpm_collection;

PFPM_API pfpm_status pfpm_collection_from_text(const char* data, size_t length,
                                               pfpm_format format, pfpm_collection** out);
PFPM_API pfpm_status pfpm_collection_load(const char* seq_path, pfpm_collection** out);
PFPM_API pfpm_status pfpm_collection_save(const pfpm_collection* coll, const char* path);
PFPM_API size_t pfpm_collection_size(const pfpm_collection* coll);
/* The returned bytes stay valid until the handle is freed. */
PFPM_API pfpm_status pfpm_collection_sequence(const pfpm_collection* coll, size_t index,
                                              const char** data, size_t* length);
PFPM_API void pfpm_collection_free(pfpm_collection* coll);

/* ---- dictionaries --------------------------------------------------------- */

typedef struct pfpm_dictionary pfpm_dictionary;

PFPM_API pfpm_status pfpm_dictionary_load(const char* path, pfpm_dictionary** out);
PFPM_API size_t pfpm_dictionary_phrase_count(const pfpm_dictionary* dict);
PFPM_API uint64_t pfpm_dictionary_d_size(const pfpm_dictionary* dict);
PFPM_API uint32_t pfpm_dictionary_dataset(const pfpm_dictionary* dict);
PFPM_API void pfpm_dictionary_params(const pfpm_dictionary* dict, pfpm_params* params);
PFPM_API pfpm_status pfpm_dictionary_phrase(const pfpm_dictionary* dict, size_t index,
                                            const char** data, size_t* length, uint64_t* occ);
PFPM_API void pfpm_dictionary_free(pfpm_dictionary* dict);

/* ---- pipeline ------------------------------------------------------------- */

typedef struct pfpm_pipeline pfpm_pipeline;

PFPM_API pfpm_status pfpm_pipeline_create(const char* work_dir, pfpm_pipeline** out);
/* JSON config: inputs, work_dir, w, p, stride, packed, verify, jobs, format. */
PFPM_API pfpm_status pfpm_pipeline_load_config(const char* config_path, pfpm_pipeline** out);
PFPM_API pfpm_status pfpm_pipeline_add_input(pfpm_pipeline* pipe, const char* path);
PFPM_API pfpm_status pfpm_pipeline_set_params(pfpm_pipeline* pipe, const pfpm_params* params);
PFPM_API pfpm_status pfpm_pipeline_set_format(pfpm_pipeline* pipe, pfpm_format format);
PFPM_API pfpm_status pfpm_pipeline_set_stride(pfpm_pipeline* pipe, uint64_t stride);
PFPM_API pfpm_status pfpm_pipeline_set_packed(pfpm_pipeline* pipe, int packed);
PFPM_API pfpm_status pfpm_pipeline_set_verify(pfpm_pipeline* pipe, int verify);
PFPM_API pfpm_status pfpm_pipeline_set_jobs(pfpm_pipeline* pipe, unsigned jobs);
PFPM_API pfpm_status pfpm_pipeline_set_force(pfpm_pipeline* pipe, int force);
PFPM_API pfpm_status pfpm_pipeline_run(pfpm_pipeline* pipe);
/* Manifest JSON of the last run; NULL before a successful run. */
PFPM_API const char* pfpm_pipeline_manifest(const pfpm_pipeline* pipe);
/* One line per stage with timing, skip state and peak memory; NULL before a run. */
PFPM_API const char* pfpm_pipeline_report(const pfpm_pipeline* pipe);
/* 1 verified, 0 mismatch, -1 not verified. */
PFPM_API int pfpm_pipeline_verified(const pfpm_pipeline* pipe);
PFPM_API void pfpm_pipeline_free(pfpm_pipeline* pipe);

#ifdef __cplusplus
}
#endif

#endif /* PFPMERGE_H */
