/* qsr -- patch-wise binary sparse-coding super-resolution.
 *
 * C API for the shared library. All functions return qsr_status; every
 * object is an opaque handle released with its matching _free function.
 * Handles are not thread-safe individually, but independent handles may be
 * used from different threads. qsr_last_error() returns a message for the
 * most recent failure on the calling thread.
 */
#ifndef QSR_H
#define QSR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QSR_API __declspec(dllexport)
#else
#define QSR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qsr_status {
    QSR_OK = 0,
    QSR_ERROR_IO = 1,
    QSR_ERROR_FORMAT = 2,
    QSR_ERROR_CORRUPT = 3,
    QSR_ERROR_DIMENSION = 4,
    QSR_ERROR_ARGUMENT = 5,
    QSR_ERROR_BAD_MAGIC = 6,
    QSR_ERROR_TRUNCATED = 7,
    QSR_ERROR_VERSION = 8,
    QSR_ERROR_NOT_RECORDED = 9,
    QSR_ERROR_DATA = 10,
    QSR_ERROR_INTERNAL = 11
} qsr_status;

QSR_API const char* qsr_version(void);
QSR_API const char* qsr_status_name(qsr_status status);
/* message of the last error raised on this thread; empty string if none */
QSR_API const char* qsr_last_error(void);

/* SHA-256 of a file, written as 64 hex chars + NUL into out_hex65 */
QSR_API qsr_status qsr_hash_file(const char* path, char* out_hex65);

/* ---- images ------------------------------------------------------- */

typedef struct qsr_image qsr_image;

QSR_API qsr_status qsr_image_load(const char* path, qsr_image** out);
QSR_API qsr_status qsr_image_save(const qsr_image* img, const char* path);
/* data is planar, row-major, length width*height*channels, values in [0,1] */
QSR_API qsr_status qsr_image_create(int32_t width, int32_t height, int32_t channels,
                                    const double* data, qsr_image** out);
QSR_API int32_t qsr_image_width(const qsr_image* img);
QSR_API int32_t qsr_image_height(const qsr_image* img);
QSR_API int32_t qsr_image_channels(const qsr_image* img);
QSR_API qsr_status qsr_image_read(const qsr_image* img, double* buffer, size_t buffer_len);
/* kernel: 0 bicubic (a = -0.5), 1 box */
QSR_API qsr_status qsr_image_resample(const qsr_image* img, int32_t out_w, int32_t out_h,
                                      int32_t kernel, qsr_image** out);
QSR_API qsr_status qsr_image_crop(const qsr_image* img, int32_t row0, int32_t col0,
                                  int32_t width, int32_t height, qsr_image** out);
QSR_API qsr_status qsr_psnr_y(const qsr_image* pred, const qsr_image* gt, double* out_db);
QSR_API void qsr_image_free(qsr_image* img);

/* ---- dictionaries -------------------------------------------------- */

typedef struct qsr_dict qsr_dict;

typedef struct qsr_train_config {
    int32_t n_atoms;        /* default 128 */
    int32_t n_patches;      /* default 30000 */
    double variance_floor;  /* default 1e-4 */
    int32_t iterations;     /* epochs, default 20 */
    double sparsity_lambda; /* default 5e-4 */
    uint64_t seed;
    int32_t scale;         /* default 3 */
    int32_t patch_size_hr; /* default 9 */
    int32_t patch_size_lr; /* default 3 */
    int32_t mean_removed;  /* default 1 */
    int32_t threads;       /* default: logical cores */
} qsr_train_config;

QSR_API void qsr_train_config_init(qsr_train_config* cfg);
QSR_API qsr_status qsr_dict_train(const char* const* image_paths, size_t n_paths,
                                  const qsr_train_config* cfg, qsr_dict** out);
QSR_API qsr_status qsr_dict_load(const char* path, qsr_dict** out);
QSR_API qsr_status qsr_dict_save(const qsr_dict* dict, const char* path);
QSR_API int32_t qsr_dict_n_atoms(const qsr_dict* dict);
QSR_API int32_t qsr_dict_scale(const qsr_dict* dict);
QSR_API int32_t qsr_dict_patch_size_hr(const qsr_dict* dict);
QSR_API int32_t qsr_dict_patch_size_lr(const qsr_dict* dict);
QSR_API int32_t qsr_dict_mean_removed(const qsr_dict* dict);
QSR_API void qsr_dict_free(qsr_dict* dict);

/* ---- samplers ------------------------------------------------------ */

typedef struct qsr_sampler qsr_sampler;

typedef struct qsr_anneal_config {
    int32_t sweeps;     /* default 128 */
    int32_t reads;      /* default 100 */
    double beta_start;  /* default 0.1 */
    double beta_end;    /* default 10 */
    int32_t geometric;  /* 1 geometric, 0 linear interpolation */
    uint64_t seed;
} qsr_anneal_config;

typedef struct qsr_tabu_config {
    int32_t restarts;  /* default 8 */
    int32_t tenure;    /* 0: ceil(n/4) */
    int32_t max_iters; /* 0: 50*n */
    uint64_t seed;
} qsr_tabu_config;

QSR_API void qsr_anneal_config_init(qsr_anneal_config* cfg);
QSR_API void qsr_tabu_config_init(qsr_tabu_config* cfg);
QSR_API qsr_status qsr_sampler_create_anneal(const qsr_anneal_config* cfg, qsr_sampler** out);
QSR_API qsr_status qsr_sampler_create_tabu(const qsr_tabu_config* cfg, qsr_sampler** out);
QSR_API qsr_status qsr_sampler_create_brute_force(qsr_sampler** out);
QSR_API qsr_status qsr_sampler_create_replay(const char* path, qsr_sampler** out);
/* every sample set served afterwards is appended to the replay file */
QSR_API qsr_status qsr_sampler_record_to(qsr_sampler* sampler, const char* path);
QSR_API void qsr_sampler_free(qsr_sampler* sampler);

/* ---- super-resolution ---------------------------------------------- */

typedef enum qsr_method {
    QSR_METHOD_LASSO = 0,
    QSR_METHOD_CLASSICAL_ANNEAL = 1,
    QSR_METHOD_ENSEMBLE_ANNEAL = 2
} qsr_method;

typedef struct qsr_sr_config {
    int32_t scale;            /* default 3 */
    double lambda_lasso;      /* default 1e-5 */
    double lambda_anneal;     /* default 0.1 */
    double mu;                /* default 0.05 */
    double beta;              /* fixed beta when beta_adaptive == 0 */
    int32_t beta_adaptive;    /* default 1: beta = 1/std of read energies */
    int32_t n_reads;          /* default 100 */
    int32_t backproject_iters;/* default 100 */
    uint64_t seed;
    int32_t threads;          /* default: logical cores */
    int32_t sub_size;         /* default 32 */
    int32_t batch_size;       /* default 512 */
    int32_t tabu_restarts;    /* warm-start restarts, default 8 */
} qsr_sr_config;

typedef struct qsr_timings {
    double cpu_opt;
    double create_qubo;
    double sampler_prep;
    double sampler_opt;
    double misc;
} qsr_timings;

typedef struct qsr_sr_result qsr_sr_result;

QSR_API void qsr_sr_config_init(qsr_sr_config* cfg);
/* sampler may be NULL for QSR_METHOD_LASSO */
QSR_API qsr_status qsr_sr_run(qsr_method method, const qsr_image* lr, const qsr_dict* dict,
                              const qsr_sr_config* cfg, qsr_sampler* sampler,
                              qsr_sr_result** out);
/* borrowed views; valid until the result is freed */
QSR_API const qsr_image* qsr_sr_result_image(const qsr_sr_result* result);
QSR_API const qsr_image* qsr_sr_result_entropy_map(const qsr_sr_result* result); /* or NULL */
QSR_API qsr_status qsr_sr_result_timings(const qsr_sr_result* result, qsr_timings* out);
QSR_API qsr_status qsr_sr_result_write_entropy_csv(const qsr_sr_result* result,
                                                   const char* path);
/* entropy map normalized by its maximum, written as an image file */
QSR_API qsr_status qsr_sr_result_write_entropy_image(const qsr_sr_result* result,
                                                     const char* path);
QSR_API void qsr_sr_result_free(qsr_sr_result* result);

/* ---- synthetic sparse-coding sweeps -------------------------------- */

typedef enum qsr_synth_solver {
    QSR_SYNTH_LASSO = 0,
    QSR_SYNTH_CLASSICAL_ANNEAL = 1,
    QSR_SYNTH_ENSEMBLE_ANNEAL = 2
} qsr_synth_solver;

typedef struct qsr_synth_config {
    int32_t n_datasets; /* default 20 */
    uint64_t seed;
    double mu;         /* default 0.05 */
    int32_t reads;     /* default 50 */
    int32_t sweeps;    /* default 192 */
    int32_t threads;   /* default: logical cores */
} qsr_synth_config;

typedef struct qsr_sweep_point {
    double knob;
    double mean_train_err;
    double std_train_err;
    double mean_val_err;
    double std_val_err;
    double mean_l0;
    double std_l0;
} qsr_sweep_point;

typedef struct qsr_sweep qsr_sweep;

QSR_API void qsr_synth_config_init(qsr_synth_config* cfg);
/* grid == NULL selects the solver's default grid */
QSR_API qsr_status qsr_synth_sweep(qsr_synth_solver solver, const double* grid, size_t n_grid,
                                   const qsr_synth_config* cfg, qsr_sweep** out);
QSR_API size_t qsr_sweep_size(const qsr_sweep* sweep);
QSR_API qsr_status qsr_sweep_point_at(const qsr_sweep* sweep, size_t i, qsr_sweep_point* out);
QSR_API qsr_status qsr_sweep_write_csv(const qsr_sweep* const* sweeps, size_t n_sweeps,
                                       const char* path);
QSR_API qsr_status qsr_sweep_write_svg(const qsr_sweep* const* sweeps, size_t n_sweeps,
                                       const char* path);
QSR_API void qsr_sweep_free(qsr_sweep* sweep);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* QSR_H */
