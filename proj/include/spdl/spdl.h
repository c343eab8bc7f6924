#ifndef SPDL_SPDL_H
#define SPDL_SPDL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef SPDL_BUILDING_LIBRARY
#    define SPDL_API __declspec(dllexport)
#  else
#    define SPDL_API __declspec(dllimport)
#  endif
#else
#  define SPDL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spdl_status {
  SPDL_OK = 0,
  SPDL_E_ARGUMENT = 1,
  SPDL_E_FORMAT = 2,
  SPDL_E_LENGTH = 3,
  SPDL_E_UNSUPPORTED = 4,
  SPDL_E_RANGE = 5,
  SPDL_E_DEGENERATE = 6,
  SPDL_E_DIVERGENCE = 7,
  SPDL_E_STAGNATION = 8,
  SPDL_E_CONFIG = 9,
  SPDL_E_IO = 10,
  SPDL_E_INTERNAL = 11
} spdl_status;

/* Message for the most recent failure on the calling thread; "" if none. */
SPDL_API const char* spdl_last_error(void);
SPDL_API const char* spdl_status_string(spdl_status status);
SPDL_API const char* spdl_version(void);

/* ---- images (grayscale, row-major doubles in [0,255]) ---- */

typedef struct spdl_image spdl_image;

SPDL_API spdl_status spdl_image_create(size_t height, size_t width, const double* data, spdl_image** out);
/* P2/P3/P5/P6; colour input is converted to grey. */
SPDL_API spdl_status spdl_image_read(const char* path, spdl_image** out);
SPDL_API spdl_status spdl_image_decode(const uint8_t* bytes, size_t len, spdl_image** out);
/* Binary P5, samples rounded to integers. */
SPDL_API spdl_status spdl_image_write(const spdl_image* img, const char* path);
SPDL_API spdl_status spdl_image_resize(const spdl_image* img, size_t height, size_t width, spdl_image** out);
SPDL_API size_t spdl_image_height(const spdl_image* img);
SPDL_API size_t spdl_image_width(const spdl_image* img);
SPDL_API const double* spdl_image_data(const spdl_image* img);
SPDL_API void spdl_image_free(spdl_image* img);

/* AbEr, ReEr, InEr over equally sized images. ReEr fails with SPDL_E_DEGENERATE on an all-zero original. */
SPDL_API spdl_status spdl_image_errors(const spdl_image* org, const spdl_image* rec, double* ab_er, double* re_er,
                                       double* in_er);

/* ---- dictionaries (m x n, column-major, atoms in the unit ball) ---- */

typedef struct spdl_dict spdl_dict;

SPDL_API spdl_status spdl_dict_create(size_t m, size_t n, const double* colmajor, spdl_dict** out);
SPDL_API spdl_status spdl_dict_init_dct(size_t m, size_t n, spdl_dict** out);
SPDL_API spdl_status spdl_dict_load(const char* path, spdl_dict** out);
SPDL_API spdl_status spdl_dict_save(const spdl_dict* dict, const char* path);
SPDL_API spdl_status spdl_dict_render(const spdl_dict* dict, size_t tile_cols, spdl_image** out);
SPDL_API size_t spdl_dict_rows(const spdl_dict* dict);
SPDL_API size_t spdl_dict_cols(const spdl_dict* dict);
SPDL_API const double* spdl_dict_data(const spdl_dict* dict);
SPDL_API void spdl_dict_free(spdl_dict* dict);

/* ---- sparse coding ---- */

typedef enum spdl_method {
  SPDL_ISTA = 0,
  SPDL_FISTA = 1,
  SPDL_FPC_BB = 2,
  SPDL_TWIST = 3,
  SPDL_SPARSA = 4,
  SPDL_GSCG = 5,
  SPDL_ISGA = 6
} spdl_method;

SPDL_API const char* spdl_method_name(spdl_method method);
/* Case-insensitive, '-' and '_' ignored ("fpc-bb", "FPC_BB", "fpcbb"). */
SPDL_API spdl_status spdl_method_from_name(const char* name, spdl_method* out);

typedef struct spdl_solver_options {
  spdl_method method;
  double eps_rel;
  uint64_t max_iter;
  double data_residual_tol; /* 0 disables the residual stop */
  double bb_min, bb_max;
  double fpc_eta, fpc_mu0_factor;
  double twist_alpha, twist_beta, twist_c;
  int sparsa_window;
  double sparsa_sigma, sparsa_contraction;
  double gscg_sigma, gscg_gamma;
  double isga_c1, isga_c2;
} spdl_solver_options;

/* Coding defaults used while learning. */
SPDL_API void spdl_solver_defaults(spdl_method method, spdl_solver_options* out);

typedef struct spdl_solve_info {
  uint64_t iterations;
  double objective;
  double fixed_point_residual;
  int converged;
  double cpu_time;
} spdl_solve_info;

/* x_out has spdl_dict_cols(dict) entries; info may be NULL. */
SPDL_API spdl_status spdl_solve(const spdl_dict* dict, const double* patch, double mu,
                                const spdl_solver_options* opts, double* x_out, spdl_solve_info* info);

/* ---- patch grid ---- */

typedef struct spdl_grid {
  size_t patch;
  size_t stride;
  size_t rows, cols; /* anchors per axis */
  size_t count;
  size_t crop_h, crop_w;
} spdl_grid;

SPDL_API spdl_status spdl_grid_plan(size_t height, size_t width, size_t patch, double overlap, spdl_grid* out);

/* ---- online learning ---- */

typedef enum spdl_order { SPDL_ORDERED = 0, SPDL_RANDOM = 1 } spdl_order;

typedef struct spdl_learn_options {
  double mu;
  spdl_solver_options solver;
  spdl_order order;
  uint64_t seed;
  int update_sweeps;
  uint64_t snapshot_every; /* 0: one snapshot per image */
  size_t patch;
  double overlap;
} spdl_learn_options;

SPDL_API void spdl_learn_defaults(spdl_learn_options* out);

/* Called for D0 and every later snapshot; the dictionary is only valid during the call.
   Returning anything other than SPDL_OK stops learning with that status. */
typedef spdl_status (*spdl_snapshot_fn)(size_t stage, const spdl_dict* dict, void* user);

typedef struct spdl_learn_report {
  uint64_t coded;
  uint64_t skipped;
  size_t snapshots;
} spdl_learn_report;

/* patches_per_image (optional) receives `count` entries. */
SPDL_API spdl_status spdl_learn_online(const spdl_image* const* images, size_t count, const spdl_dict* d0,
                                       const spdl_learn_options* opts, spdl_snapshot_fn on_snapshot, void* user,
                                       size_t* patches_per_image, spdl_learn_report* report);

/* ---- reconstruction and metrics ---- */

typedef struct spdl_reconstruct_options {
  double mu;
  spdl_solver_options solver;
  size_t patch;
  double overlap;
} spdl_reconstruct_options;

/* Reconstruction stopping defaults for the given method. */
SPDL_API void spdl_reconstruct_defaults(spdl_method method, spdl_reconstruct_options* out);

typedef struct spdl_metrics {
  double re_er, ab_er, in_er;
  double cpu_patch_mean; /* seconds per patch solve */
  double cpu_image;      /* seconds for the coding pass, assembly excluded */
  uint64_t patches;
  uint64_t max_iter_stops;
} spdl_metrics;

/* rec_out (optional) receives the crop-region reconstruction. */
SPDL_API spdl_status spdl_reconstruct(const spdl_image* img, const spdl_dict* dict,
                                      const spdl_reconstruct_options* opts, spdl_image** rec_out,
                                      spdl_metrics* metrics);

typedef struct spdl_metrics_table spdl_metrics_table;

SPDL_API spdl_status spdl_metrics_table_create(spdl_metrics_table** out);
SPDL_API spdl_status spdl_metrics_table_add(spdl_metrics_table* table, const char* solver, const char* dict_stage,
                                            const char* image_id, const char* split, const spdl_metrics* m);
SPDL_API size_t spdl_metrics_table_size(const spdl_metrics_table* table);
SPDL_API size_t spdl_metrics_table_groups(const spdl_metrics_table* table);
/* Per-record rows, or per (solver, stage) means when aggregated != 0. */
SPDL_API spdl_status spdl_metrics_table_write_csv(const spdl_metrics_table* table, int aggregated,
                                                  const char* path);
SPDL_API void spdl_metrics_table_free(spdl_metrics_table* table);

/* ---- bundled synthetic corpus ---- */

SPDL_API size_t spdl_corpus_size(void);
/* name_buf receives a NUL-terminated file stem such as "0_grating". */
SPDL_API spdl_status spdl_corpus_image(uint64_t seed, size_t side, size_t index, spdl_image** out, char* name_buf,
                                       size_t name_len);

#ifdef __cplusplus
}
#endif

#endif
