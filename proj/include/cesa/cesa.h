/*
 * C interface to the CESA / CESA-PERL approximate adder models.
 *
 * Every fallible call returns a cesa_status; on failure a human-readable
 * message is available from cesa_last_error() on the calling thread until
 * the next failing call. Handles are opaque and owned by the caller; release
 * them with the matching *_destroy function. Strings returned through a
 * char** out-parameter are heap-allocated and released with cesa_string_free.
 */
#ifndef CESA_CESA_H
#define CESA_CESA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(CESA_BUILDING_LIBRARY)
#define CESA_API __declspec(dllexport)
#else
#define CESA_API __declspec(dllimport)
#endif
#else
#define CESA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cesa_status {
    CESA_OK = 0,
    CESA_ERR_INVALID_ARGUMENT = 1, /* null pointer, zero count, undersized buffer */
    CESA_ERR_CONFIG = 2,           /* invalid width / block / variant combination */
    CESA_ERR_RANGE = 3,            /* operand or parameter out of range */
    CESA_ERR_IO = 4,
    CESA_ERR_PARSE = 5, /* malformed PGM / CSV / JSON */
    CESA_ERR_INTERNAL = 6
} cesa_status;

typedef enum cesa_variant { CESA_VARIANT_EXACT = 0, CESA_VARIANT_CESA = 1, CESA_VARIANT_CESA_PERL = 2 } cesa_variant;

typedef enum cesa_mode { CESA_MODE_EXHAUSTIVE = 0, CESA_MODE_MONTE_CARLO = 1 } cesa_mode;

typedef enum cesa_format { CESA_FORMAT_JSON = 0, CESA_FORMAT_CSV = 1 } cesa_format;

typedef struct cesa_adder cesa_adder;
typedef struct cesa_image cesa_image;
typedef struct cesa_dataset cesa_dataset;
typedef struct cesa_clustering cesa_clustering;

CESA_API const char* cesa_version(void);
CESA_API const char* cesa_status_name(cesa_status status);
CESA_API const char* cesa_last_error(void);
CESA_API void cesa_string_free(char* s);

/* ------------------------------------------------------------------ adder */

/* block_size 0 is accepted for the exact variant and means one full-width block. */
CESA_API cesa_status cesa_adder_create(unsigned width, unsigned block_size, cesa_variant variant, cesa_adder** out);
/* "width:block:variant", e.g. "32:8:cesa-perl" */
CESA_API cesa_status cesa_adder_parse(const char* spec, cesa_adder** out);
CESA_API void cesa_adder_destroy(cesa_adder* adder);
CESA_API unsigned cesa_adder_width(const cesa_adder* adder);
CESA_API unsigned cesa_adder_block_size(const cesa_adder* adder);
CESA_API cesa_variant cesa_adder_variant(const cesa_adder* adder);
/* Writes the canonical "width:block:variant" form; returns CESA_ERR_INVALID_ARGUMENT if capacity is short. */
CESA_API cesa_status cesa_adder_describe(const cesa_adder* adder, char* buffer, size_t capacity);

CESA_API cesa_status cesa_variant_parse(const char* text, cesa_variant* out);
/* CESA_OK when valid; otherwise CESA_ERR_CONFIG with the reason in cesa_last_error(). */
CESA_API cesa_status cesa_config_validate(unsigned width, unsigned block_size, cesa_variant variant);

typedef struct cesa_sum {
    uint64_t sum;
    int carry_out;
    unsigned boundary_count;
    uint64_t boundary_carries; /* bit i = carry at bit position (i+1)*block_size */
} cesa_sum;

/* Addition with the adder's variant. */
CESA_API cesa_status cesa_add(const cesa_adder* adder, uint64_t a, uint64_t b, cesa_sum* out);
/* Ripple-carry reference with true carries at the adder's block boundaries. */
CESA_API cesa_status cesa_add_exact(const cesa_adder* adder, uint64_t a, uint64_t b, cesa_sum* out);
/* JSON record: config, a, b, approx, exact, error_distance, estimated vs true boundary carries. */
CESA_API cesa_status cesa_add_json(const cesa_adder* adder, uint64_t a, uint64_t b, char** out_json);

/* ---------------------------------------------------------------- metrics */

typedef struct cesa_error_report {
    double er;
    double med;
    double mred;
    uint64_t sample_count;
    uint32_t run_count;
    uint64_t seed;
    cesa_mode mode;
} cesa_error_report;

/* width_cap 0 selects the default cap of 12 bits. */
CESA_API cesa_status cesa_evaluate_exhaustive(const cesa_adder* adder, unsigned width_cap, cesa_error_report* out);
CESA_API cesa_status cesa_evaluate_monte_carlo(const cesa_adder* adder, uint64_t samples, uint32_t runs,
                                               uint64_t seed, cesa_error_report* out);
CESA_API cesa_status cesa_error_report_json(const cesa_adder* adder, const cesa_error_report* report,
                                            char** out_json);

typedef struct cesa_boundary_summary {
    double overall_mismatch;
    double sel_active_fraction;
    uint64_t sample_count;
    unsigned boundary_count; /* inner boundaries */
} cesa_boundary_summary;

/* samples 0 = exhaustive. per_boundary may be NULL; otherwise it must hold boundary_count entries
 * (block_count - 1). */
CESA_API cesa_status cesa_boundary_stats(const cesa_adder* adder, uint64_t samples, uint64_t seed,
                                         double* per_boundary, size_t capacity, cesa_boundary_summary* out);
CESA_API cesa_status cesa_boundary_stats_json(const cesa_adder* adder, uint64_t samples, uint64_t seed,
                                              char** out_json);

/* ------------------------------------------------------------------- cost */

typedef struct cesa_cost {
    unsigned critical_path_levels;
    uint64_t gate_count;
    double delay_reduction_vs_ripple; /* 1 - levels / (2 * width) */
} cesa_cost;

CESA_API cesa_status cesa_cost_estimate(const cesa_adder* adder, cesa_cost* out);
CESA_API cesa_status cesa_cost_json(const cesa_adder* adder, char** out_json);

/* ------------------------------------------------------------------ sweep */

typedef struct cesa_sweep_spec {
    const unsigned* widths;
    size_t width_count;
    const unsigned* block_sizes;
    size_t block_size_count;
    const cesa_variant* variants;
    size_t variant_count;
    cesa_mode mode;
    uint64_t samples;
    uint32_t runs;
    uint64_t seed;
    unsigned exhaustive_cap; /* 0 = default */
} cesa_sweep_spec;

/* out_text receives the report. out_skipped (may be NULL) receives one
 * "width:block:variant: reason" line per skipped combination. */
CESA_API cesa_status cesa_sweep_run(const cesa_sweep_spec* spec, cesa_format format, char** out_text,
                                    char** out_skipped, size_t* row_count);

/* ----------------------------------------------------------------- verify */

/* Exhaustive invariant suite at width <= 12. all_passed is 1 iff every invariant holds. */
CESA_API cesa_status cesa_verify(unsigned width, char** out_text, int* all_passed);

/* ----------------------------------------------------------------- images */

CESA_API cesa_status cesa_image_create(size_t width, size_t height, const uint8_t* pixels, cesa_image** out);
CESA_API cesa_status cesa_image_read_pgm(const char* path, cesa_image** out);
CESA_API cesa_status cesa_image_write_pgm(const cesa_image* image, const char* path);
/* Built-in test picture (radial gradient plus texture). */
CESA_API cesa_status cesa_image_synthetic(size_t width, size_t height, cesa_image** out);
CESA_API cesa_status cesa_image_add_noise(const cesa_image* image, double sigma, uint64_t seed, cesa_image** out);
CESA_API void cesa_image_destroy(cesa_image* image);
CESA_API size_t cesa_image_width(const cesa_image* image);
CESA_API size_t cesa_image_height(const cesa_image* image);
CESA_API const uint8_t* cesa_image_pixels(const cesa_image* image);

typedef struct cesa_quality {
    double psnr; /* meaningful only when psnr_infinite == 0 */
    int psnr_infinite;
    double ssim;
} cesa_quality;

CESA_API cesa_status cesa_image_quality(const cesa_image* reference, const cesa_image* test, cesa_quality* out);

/* 5x5 Gaussian smoothing of `noisy`, once with exact addition and once with
 * the adder. Any of exact_out, approx_out, report_json may be NULL. */
CESA_API cesa_status cesa_smooth(const cesa_image* noisy, const cesa_adder* adder, double kernel_sigma,
                                 unsigned scale_bits, uint64_t seed, cesa_image** exact_out, cesa_image** approx_out,
                                 cesa_quality* quality, char** report_json);

/* ------------------------------------------------------------- clustering */

CESA_API cesa_status cesa_dataset_read_csv(const char* path, cesa_dataset** out);
/* 150 points, 4 dimensions, 3 clusters. */
CESA_API cesa_status cesa_dataset_synthetic(uint64_t seed, cesa_dataset** out);
CESA_API void cesa_dataset_destroy(cesa_dataset* dataset);
CESA_API size_t cesa_dataset_size(const cesa_dataset* dataset);
CESA_API size_t cesa_dataset_dims(const cesa_dataset* dataset);

CESA_API cesa_status cesa_kmeans(const cesa_dataset* dataset, unsigned clusters, const cesa_adder* adder,
                                 unsigned max_iter, uint64_t seed, cesa_clustering** out);
CESA_API void cesa_clustering_destroy(cesa_clustering* result);
CESA_API double cesa_clustering_agreement(const cesa_clustering* result);
CESA_API double cesa_clustering_centroid_distance(const cesa_clustering* result);
CESA_API unsigned cesa_clustering_iterations(const cesa_clustering* result);
/* Copies up to capacity labels; returns the total number of points. */
CESA_API size_t cesa_clustering_assignments(const cesa_clustering* result, uint32_t* buffer, size_t capacity);
CESA_API cesa_status cesa_clustering_json(const cesa_clustering* result, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* CESA_CESA_H */
