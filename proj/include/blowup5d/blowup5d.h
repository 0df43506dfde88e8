#ifndef BLOWUP5D_H
#define BLOWUP5D_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(B5_BUILDING_LIBRARY)
#define B5_API __declspec(dllexport)
#else
#define B5_API __declspec(dllimport)
#endif
#else
#define B5_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every entry point. */
typedef enum b5_status {
    B5_OK = 0,
    B5_ERR_INVALID_ARGUMENT = 1, /* null handle, bad pointer, out-of-range scalar */
    B5_ERR_VALIDATION = 2,       /* config rejected by the schema; message names the key path */
    B5_ERR_NUMERICAL = 3,        /* solver, root finder or eigensolver failure */
    B5_ERR_IO = 4,               /* artifact or cache file could not be read or written */
    B5_ERR_INTERNAL = 5
} b5_status;

typedef struct b5_profiles b5_profiles;
typedef struct b5_result b5_result;

typedef void (*b5_progress_fn)(const char* message, void* user);

/* Version string of the library, e.g. "1.0.0". */
B5_API const char* b5_version(void);
/* Version of the accepted config schema. */
B5_API int b5_config_schema_version(void);
/* Static description of a status code. */
B5_API const char* b5_status_string(int status);
/* Message of the last failure on the calling thread; empty when none. */
B5_API const char* b5_last_error(void);

/* Profile set (W, correctors A and B, eigenpair, kappa, e0) on a radial grid.
   options_json may be NULL or a JSON object with keys cells, r_max, core_step, eigen_radius,
   z_radius, cache (file path; loaded when present and matching, written otherwise). */
B5_API int b5_profiles_create(const char* options_json, b5_profiles** out);
B5_API void b5_profiles_destroy(b5_profiles* p);
B5_API int b5_profiles_kappa(const b5_profiles* p, double* out);
B5_API int b5_profiles_e0(const b5_profiles* p, double* out);

/* Profile samples at radius rho >= 0. */
typedef enum b5_profile_field {
    B5_FIELD_W = 0,
    B5_FIELD_LW = 1,
    B5_FIELD_A = 2,
    B5_FIELD_B = 3,
    B5_FIELD_Y = 4,
    B5_FIELD_Z = 5
} b5_profile_field;
B5_API int b5_profiles_sample(const b5_profiles* p, int field, double rho, double* out);

/* Virial weight a(r) with radius R; order 0..5 selects a, a', a'', a''', Laplacian, bi-Laplacian. */
B5_API int b5_virial_weight(double R, double r, int order, double* out);

/* Runs one experiment described by a JSON config (see README for the schema) and writes its
   artifacts into out_dir (created if missing). threads >= 1 bounds concurrent shooting trials.
   progress may be NULL. On success *out receives a result handle. */
B5_API int b5_run(const char* config_json, const char* out_dir, int threads, b5_progress_fn progress, void* user,
                  b5_result** out);
/* Same, reading the config from a file. */
B5_API int b5_run_file(const char* config_path, const char* out_dir, int threads, b5_progress_fn progress,
                       void* user, b5_result** out);

/* Schema check of a config file without running it; the summary holds the resolved config. */
B5_API int b5_validate_file(const char* config_path, b5_result** out);

/* Summary JSON of a finished run; owned by the result handle. */
B5_API const char* b5_result_summary(const b5_result* r);
/* Number of artifact files written and their paths (owned by the handle). */
B5_API size_t b5_result_artifact_count(const b5_result* r);
B5_API const char* b5_result_artifact(const b5_result* r, size_t index);
B5_API void b5_result_destroy(b5_result* r);

#ifdef __cplusplus
}
#endif

#endif
