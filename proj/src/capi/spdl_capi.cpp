#include "spdl/spdl.h"

#include <cstring>
#include <fstream>
#include <iterator>
#include <new>
#include <string>
#include <vector>

#include "core/corpus.hpp"
#include "core/error.hpp"
#include "core/evaluate.hpp"
#include "core/learn.hpp"

struct spdl_image {
  spdl::GrayImage img;
};

struct spdl_dict {
  spdl::Dictionary dict;
};

struct spdl_metrics_table {
  std::vector<spdl::MetricsRecord> records;
};

namespace {

thread_local std::string g_last_error;

// Carries a non-OK status returned by a user callback through the core.
struct CallbackAbort {
  spdl_status status;
};

spdl_status status_of(spdl::ErrorKind k) {
  using spdl::ErrorKind;
  switch (k) {
    case ErrorKind::Argument: return SPDL_E_ARGUMENT;
    case ErrorKind::Format: return SPDL_E_FORMAT;
    case ErrorKind::Length: return SPDL_E_LENGTH;
    case ErrorKind::Unsupported: return SPDL_E_UNSUPPORTED;
    case ErrorKind::Range: return SPDL_E_RANGE;
    case ErrorKind::Degenerate: return SPDL_E_DEGENERATE;
    case ErrorKind::Divergence: return SPDL_E_DIVERGENCE;
    case ErrorKind::Stagnation: return SPDL_E_STAGNATION;
    case ErrorKind::Config: return SPDL_E_CONFIG;
    case ErrorKind::Io: return SPDL_E_IO;
  }
  return SPDL_E_INTERNAL;
}

template <class F>
spdl_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return SPDL_OK;
  } catch (const spdl::Error& e) {
    g_last_error = std::string(spdl::to_string(e.kind())) + ": " + e.what();
    return status_of(e.kind());
  } catch (const CallbackAbort& a) {
    g_last_error = "snapshot callback returned an error";
    return a.status == SPDL_OK ? SPDL_E_INTERNAL : a.status;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SPDL_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SPDL_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) spdl::fail(spdl::ErrorKind::Argument, std::string(what) + " is null");
}

std::vector<std::uint8_t> read_file(const char* path) {
  need(path, "path");
  std::ifstream in(path, std::ios::binary);
  if (!in) spdl::fail(spdl::ErrorKind::Io, std::string("cannot open ") + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const char* path, const std::vector<std::uint8_t>& bytes) {
  need(path, "path");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) spdl::fail(spdl::ErrorKind::Io, std::string("cannot create ") + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) spdl::fail(spdl::ErrorKind::Io, std::string("write failed: ") + path);
}

spdl::Method to_method(spdl_method m) {
  if (m < SPDL_ISTA || m > SPDL_ISGA) spdl::fail(spdl::ErrorKind::Config, "unknown solver method");
  return static_cast<spdl::Method>(m);
}

void export_solver(const spdl::SolverConfig& c, spdl_solver_options* o) {
  o->method = static_cast<spdl_method>(c.method);
  o->eps_rel = c.eps_rel;
  o->max_iter = c.max_iter;
  o->data_residual_tol = c.data_residual_tol;
  const auto& p = c.params;
  o->bb_min = p.bb_min;
  o->bb_max = p.bb_max;
  o->fpc_eta = p.fpc_eta;
  o->fpc_mu0_factor = p.fpc_mu0_factor;
  o->twist_alpha = p.twist_alpha;
  o->twist_beta = p.twist_beta;
  o->twist_c = p.twist_c;
  o->sparsa_window = p.sparsa_window;
  o->sparsa_sigma = p.sparsa_sigma;
  o->sparsa_contraction = p.sparsa_contraction;
  o->gscg_sigma = p.gscg_sigma;
  o->gscg_gamma = p.gscg_gamma;
  o->isga_c1 = p.isga_c1;
  o->isga_c2 = p.isga_c2;
}

spdl::SolverConfig import_solver(const spdl_solver_options& o) {
  spdl::SolverConfig c;
  c.method = to_method(o.method);
  c.eps_rel = o.eps_rel;
  c.max_iter = o.max_iter;
  c.data_residual_tol = o.data_residual_tol;
  auto& p = c.params;
  p.bb_min = o.bb_min;
  p.bb_max = o.bb_max;
  p.fpc_eta = o.fpc_eta;
  p.fpc_mu0_factor = o.fpc_mu0_factor;
  p.twist_alpha = o.twist_alpha;
  p.twist_beta = o.twist_beta;
  p.twist_c = o.twist_c;
  p.sparsa_window = o.sparsa_window;
  p.sparsa_sigma = o.sparsa_sigma;
  p.sparsa_contraction = o.sparsa_contraction;
  p.gscg_sigma = o.gscg_sigma;
  p.gscg_gamma = o.gscg_gamma;
  p.isga_c1 = o.isga_c1;
  p.isga_c2 = o.isga_c2;
  return c;
}

template <class T, class... Args>
T* make_handle(Args&&... args) {
  return new T{std::forward<Args>(args)...};
}

}  // namespace

extern "C" {

const char* spdl_last_error(void) { return g_last_error.c_str(); }

const char* spdl_status_string(spdl_status s) {
  switch (s) {
    case SPDL_OK: return "ok";
    case SPDL_E_ARGUMENT: return "argument error";
    case SPDL_E_FORMAT: return "format error";
    case SPDL_E_LENGTH: return "length error";
    case SPDL_E_UNSUPPORTED: return "unsupported error";
    case SPDL_E_RANGE: return "range error";
    case SPDL_E_DEGENERATE: return "degenerate error";
    case SPDL_E_DIVERGENCE: return "divergence error";
    case SPDL_E_STAGNATION: return "stagnation error";
    case SPDL_E_CONFIG: return "config error";
    case SPDL_E_IO: return "io error";
    case SPDL_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* spdl_version(void) { return "1.0.0"; }

spdl_status spdl_image_create(size_t height, size_t width, const double* data, spdl_image** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    spdl::require(height > 0 && width > 0, spdl::ErrorKind::Argument, "image dimensions must be positive");
    spdl::GrayImage img(height, width);
    if (data != nullptr) img.data.assign(data, data + height * width);
    *out = make_handle<spdl_image>(std::move(img));
  });
}

spdl_status spdl_image_decode(const uint8_t* bytes, size_t len, spdl_image** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    if (len > 0) need(bytes, "bytes");
    const auto any = spdl::read_pnm({bytes, len});
    *out = make_handle<spdl_image>(spdl::to_grayscale(any));
  });
}

spdl_status spdl_image_read(const char* path, spdl_image** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    const auto bytes = read_file(path);
    try {
      *out = make_handle<spdl_image>(spdl::to_grayscale(spdl::read_pnm(bytes)));
    } catch (const spdl::Error& e) {
      spdl::fail(e.kind(), std::string(path) + ": " + e.what());
    }
  });
}

spdl_status spdl_image_write(const spdl_image* img, const char* path) {
  return guarded([&] {
    need(img, "image");
    write_file(path, spdl::write_pnm(img->img));
  });
}

spdl_status spdl_image_resize(const spdl_image* img, size_t height, size_t width, spdl_image** out) {
  return guarded([&] {
    need(img, "image");
    need(out, "out");
    *out = nullptr;
    *out = make_handle<spdl_image>(spdl::resize_bilinear(img->img, height, width));
  });
}

size_t spdl_image_height(const spdl_image* img) { return img ? img->img.height : 0; }
size_t spdl_image_width(const spdl_image* img) { return img ? img->img.width : 0; }
const double* spdl_image_data(const spdl_image* img) { return img ? img->img.data.data() : nullptr; }
void spdl_image_free(spdl_image* img) { delete img; }

spdl_status spdl_image_errors(const spdl_image* org, const spdl_image* rec, double* ab_er, double* re_er,
                              double* in_er) {
  return guarded([&] {
    need(org, "original");
    need(rec, "reconstruction");
    if (ab_er) *ab_er = spdl::abs_error(org->img, rec->img);
    if (in_er) *in_er = spdl::inf_error(org->img, rec->img);
    if (re_er) *re_er = spdl::rel_error(org->img, rec->img);
  });
}

spdl_status spdl_dict_create(size_t m, size_t n, const double* colmajor, spdl_dict** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    need(colmajor, "data");
    spdl::Matrix a = Eigen::Map<const spdl::Matrix>(colmajor, static_cast<Eigen::Index>(m),
                                                   static_cast<Eigen::Index>(n));
    *out = make_handle<spdl_dict>(spdl::Dictionary(std::move(a)));
  });
}

spdl_status spdl_dict_init_dct(size_t m, size_t n, spdl_dict** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    *out = make_handle<spdl_dict>(spdl::init_dct_dictionary(m, n));
  });
}

spdl_status spdl_dict_load(const char* path, spdl_dict** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    const auto bytes = read_file(path);
    try {
      *out = make_handle<spdl_dict>(spdl::load_dictionary(bytes));
    } catch (const spdl::Error& e) {
      spdl::fail(e.kind(), std::string(path) + ": " + e.what());
    }
  });
}

spdl_status spdl_dict_save(const spdl_dict* dict, const char* path) {
  return guarded([&] {
    need(dict, "dictionary");
    write_file(path, spdl::save_dictionary(dict->dict));
  });
}

spdl_status spdl_dict_render(const spdl_dict* dict, size_t tile_cols, spdl_image** out) {
  return guarded([&] {
    need(dict, "dictionary");
    need(out, "out");
    *out = nullptr;
    *out = make_handle<spdl_image>(spdl::render_dictionary_mosaic(dict->dict, tile_cols));
  });
}

size_t spdl_dict_rows(const spdl_dict* dict) { return dict ? dict->dict.m() : 0; }
size_t spdl_dict_cols(const spdl_dict* dict) { return dict ? dict->dict.n() : 0; }
const double* spdl_dict_data(const spdl_dict* dict) { return dict ? dict->dict.atoms().data() : nullptr; }
void spdl_dict_free(spdl_dict* dict) { delete dict; }

const char* spdl_method_name(spdl_method method) {
  if (method < SPDL_ISTA || method > SPDL_ISGA) return "";
  return spdl::method_name(static_cast<spdl::Method>(method)).data();
}

spdl_status spdl_method_from_name(const char* name, spdl_method* out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    const auto m = spdl::method_from_name(name);
    if (!m) spdl::fail(spdl::ErrorKind::Config, std::string("unknown solver '") + name + "'");
    *out = static_cast<spdl_method>(*m);
  });
}

void spdl_solver_defaults(spdl_method method, spdl_solver_options* out) {
  if (out == nullptr) return;
  const auto m = (method < SPDL_ISTA || method > SPDL_ISGA) ? spdl::Method::Fista : static_cast<spdl::Method>(method);
  export_solver(spdl::default_solver_config(m), out);
}

spdl_status spdl_solve(const spdl_dict* dict, const double* patch, double mu, const spdl_solver_options* opts,
                       double* x_out, spdl_solve_info* info) {
  return guarded([&] {
    need(dict, "dictionary");
    need(patch, "patch");
    need(opts, "options");
    need(x_out, "x_out");
    const auto& d = dict->dict;
    const spdl::Vector p = Eigen::Map<const spdl::Vector>(patch, static_cast<Eigen::Index>(d.m()));
    const spdl::BpdnProblem prob(d.atoms(), p, mu);
    const spdl::SparseCode code = spdl::solve(prob, import_solver(*opts));
    Eigen::Map<spdl::Vector>(x_out, static_cast<Eigen::Index>(d.n())) = code.x;
    if (info) {
      info->iterations = code.iterations;
      info->objective = code.objective;
      info->fixed_point_residual = code.fixed_point_residual;
      info->converged = code.converged ? 1 : 0;
      info->cpu_time = code.cpu_time;
    }
  });
}

spdl_status spdl_grid_plan(size_t height, size_t width, size_t patch, double overlap, spdl_grid* out) {
  return guarded([&] {
    need(out, "out");
    const auto plan = spdl::plan_grid(height, width, patch, overlap);
    out->patch = plan.patch_h;
    out->stride = plan.stride_h;
    out->rows = plan.anchors_y;
    out->cols = plan.anchors_x;
    out->count = plan.count();
    out->crop_h = plan.crop_h;
    out->crop_w = plan.crop_w;
  });
}

void spdl_learn_defaults(spdl_learn_options* out) {
  if (out == nullptr) return;
  const spdl::LearnConfig c;
  out->mu = c.mu;
  export_solver(c.solver, &out->solver);
  out->order = c.order == spdl::DrawOrder::Ordered ? SPDL_ORDERED : SPDL_RANDOM;
  out->seed = c.seed;
  out->update_sweeps = c.update_sweeps;
  out->snapshot_every = c.snapshot_every;
  out->patch = c.patch;
  out->overlap = c.overlap;
}

spdl_status spdl_learn_online(const spdl_image* const* images, size_t count, const spdl_dict* d0,
                              const spdl_learn_options* opts, spdl_snapshot_fn on_snapshot, void* user,
                              size_t* patches_per_image, spdl_learn_report* report) {
  return guarded([&] {
    need(d0, "initial dictionary");
    need(opts, "options");
    if (count > 0) need(images, "images");
    spdl::LearnConfig cfg;
    cfg.mu = opts->mu;
    cfg.solver = import_solver(opts->solver);
    if (opts->order != SPDL_ORDERED && opts->order != SPDL_RANDOM) spdl::fail(spdl::ErrorKind::Config, "bad order");
    cfg.order = opts->order == SPDL_ORDERED ? spdl::DrawOrder::Ordered : spdl::DrawOrder::SeededRandom;
    cfg.seed = opts->seed;
    cfg.update_sweeps = opts->update_sweeps;
    cfg.snapshot_every = opts->snapshot_every;
    cfg.patch = opts->patch;
    cfg.overlap = opts->overlap;

    std::vector<spdl::GrayImage> imgs;
    imgs.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      need(images[i], "image");
      imgs.push_back(images[i]->img);
    }

    spdl::SnapshotFn fn;
    if (on_snapshot) {
      fn = [&](std::size_t stage, const spdl::Dictionary& d) {
        const spdl_dict view{d};
        const spdl_status s = on_snapshot(stage, &view, user);
        if (s != SPDL_OK) throw CallbackAbort{s};
      };
    }
    const auto result = spdl::learn_online(imgs, cfg, d0->dict, fn);
    if (patches_per_image) {
      for (size_t i = 0; i < count; ++i) patches_per_image[i] = result.patches_per_image[i];
    }
    if (report) {
      report->coded = result.coded;
      report->skipped = result.skipped;
      report->snapshots = result.snapshots.size();
    }
  });
}

void spdl_reconstruct_defaults(spdl_method method, spdl_reconstruct_options* out) {
  if (out == nullptr) return;
  const auto m = (method < SPDL_ISTA || method > SPDL_ISGA) ? spdl::Method::Fista : static_cast<spdl::Method>(method);
  const auto c = spdl::default_reconstruct_config(m);
  out->mu = c.mu;
  export_solver(c.solver, &out->solver);
  const spdl::LearnConfig lc;
  out->patch = lc.patch;
  out->overlap = lc.overlap;
}

spdl_status spdl_reconstruct(const spdl_image* img, const spdl_dict* dict, const spdl_reconstruct_options* opts,
                             spdl_image** rec_out, spdl_metrics* metrics) {
  return guarded([&] {
    need(img, "image");
    need(dict, "dictionary");
    need(opts, "options");
    if (rec_out) *rec_out = nullptr;
    const auto plan = spdl::plan_grid(img->img.height, img->img.width, opts->patch, opts->overlap);
    if (plan.patch_dim() != dict->dict.m()) {
      spdl::fail(spdl::ErrorKind::Config, "dictionary rows " + std::to_string(dict->dict.m()) +
                                              " do not match patch area " + std::to_string(plan.patch_dim()));
    }
    spdl::ReconstructConfig cfg;
    cfg.mu = opts->mu;
    cfg.solver = import_solver(opts->solver);
    auto rec = spdl::reconstruct_image(img->img, dict->dict, cfg, plan);
    if (metrics) {
      const auto r = spdl::make_record(img->img, rec, "", "", "", "");
      metrics->re_er = r.re_er;
      metrics->ab_er = r.ab_er;
      metrics->in_er = r.in_er;
      metrics->cpu_patch_mean = r.cpu_patch_mean;
      metrics->cpu_image = r.cpu_image;
      metrics->patches = rec.patches;
      metrics->max_iter_stops = rec.max_iter_stops;
    }
    if (rec_out) *rec_out = make_handle<spdl_image>(std::move(rec.image));
  });
}

spdl_status spdl_metrics_table_create(spdl_metrics_table** out) {
  return guarded([&] {
    need(out, "out");
    *out = new spdl_metrics_table;
  });
}

spdl_status spdl_metrics_table_add(spdl_metrics_table* table, const char* solver, const char* dict_stage,
                                   const char* image_id, const char* split, const spdl_metrics* m) {
  return guarded([&] {
    need(table, "table");
    need(solver, "solver");
    need(dict_stage, "dict_stage");
    need(image_id, "image_id");
    need(split, "split");
    need(m, "metrics");
    spdl::MetricsRecord r;
    r.solver = solver;
    r.dict_stage = dict_stage;
    r.image_id = image_id;
    r.split = split;
    r.re_er = m->re_er;
    r.ab_er = m->ab_er;
    r.in_er = m->in_er;
    r.cpu_patch_mean = m->cpu_patch_mean;
    r.cpu_image = m->cpu_image;
    table->records.push_back(std::move(r));
  });
}

size_t spdl_metrics_table_size(const spdl_metrics_table* table) { return table ? table->records.size() : 0; }

size_t spdl_metrics_table_groups(const spdl_metrics_table* table) {
  return table ? spdl::aggregate(table->records).size() : 0;
}

spdl_status spdl_metrics_table_write_csv(const spdl_metrics_table* table, int aggregated, const char* path) {
  return guarded([&] {
    need(table, "table");
    std::string text;
    if (aggregated) {
      text = spdl::aggregate_csv_header() + "\n";
      for (const auto& row : spdl::aggregate(table->records)) text += spdl::aggregate_csv_row(row) + "\n";
    } else {
      text = spdl::metrics_csv_header() + "\n";
      for (const auto& r : table->records) text += spdl::metrics_csv_row(r) + "\n";
    }
    write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
  });
}

void spdl_metrics_table_free(spdl_metrics_table* table) { delete table; }

size_t spdl_corpus_size(void) { return 6; }

spdl_status spdl_corpus_image(uint64_t seed, size_t side, size_t index, spdl_image** out, char* name_buf,
                              size_t name_len) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    auto corpus = spdl::synthetic_corpus(seed, side);
    spdl::require(index < corpus.size(), spdl::ErrorKind::Argument, "corpus index out of range");
    auto& item = corpus[index];
    if (name_buf && name_len > 0) {
      const size_t k = std::min(name_len - 1, item.name.size());
      std::memcpy(name_buf, item.name.data(), k);
      name_buf[k] = '\0';
    }
    *out = make_handle<spdl_image>(std::move(item.image));
  });
}

}  // extern "C"
