#include "core/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>

#include "core/error.hpp"

namespace spdl {

namespace {

double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

void check_same_shape(const GrayImage& a, const GrayImage& b) {
  if (a.height != b.height || a.width != b.width) fail(ErrorKind::Argument, "error measure: image sizes differ");
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

ReconstructConfig default_reconstruct_config(Method m) {
  ReconstructConfig cfg;
  cfg.solver = default_solver_config(m);
  const double eps = (m == Method::Gscg || m == Method::Isga) ? 1e-10 : 1e-5;
  cfg.solver.eps_rel = eps;
  cfg.solver.data_residual_tol = eps;
  cfg.solver.max_iter = 5000000;
  return cfg;
}

Reconstruction reconstruct_image(const GrayImage& img, const Dictionary& dict, const ReconstructConfig& cfg,
                                 const GridPlan& plan) {
  if (dict.m() != plan.patch_dim()) fail(ErrorKind::Argument, "reconstruct: dictionary rows != patch area");
  Reconstruction out;
  const double t0 = thread_cpu_seconds();
  const PatchMatrix patches = extract_patches(img, plan);
  const double lip = estimate_lipschitz(dict.atoms());
  PatchMatrix coded(patches.rows(), patches.cols());
  for (Eigen::Index c = 0; c < patches.cols(); ++c) {
    const BpdnProblem prob(dict.atoms(), patches.col(c), cfg.mu, lip);
    const SparseCode code = solve(prob, cfg.solver);
    out.cpu_solve_total += code.cpu_time;
    if (code.stop == StopReason::MaxIter) ++out.max_iter_stops;
    coded.col(c).noalias() = dict.atoms() * code.x;
  }
  const double t1 = thread_cpu_seconds();
  out.image = assemble_image(coded, plan);
  const double t2 = thread_cpu_seconds();

  out.patches = static_cast<std::uint64_t>(patches.cols());
  out.cpu_image = t1 - t0;
  out.cpu_assembly = t2 - t1;
  out.cpu_patch_mean = out.patches > 0 ? out.cpu_solve_total / static_cast<double>(out.patches) : 0.0;
  return out;
}

double abs_error(const GrayImage& org, const GrayImage& rec) {
  check_same_shape(org, rec);
  double sum = 0.0;
  for (std::size_t i = 0; i < org.data.size(); ++i) {
    const double d = org.data[i] - rec.data[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double rel_error(const GrayImage& org, const GrayImage& rec) {
  check_same_shape(org, rec);
  double norm2 = 0.0;
  for (double v : org.data) norm2 += v * v;
  if (norm2 == 0.0) fail(ErrorKind::Degenerate, "relative error undefined for an all-zero original");
  return abs_error(org, rec) / std::sqrt(norm2);
}

double inf_error(const GrayImage& org, const GrayImage& rec) {
  check_same_shape(org, rec);
  double worst = 0.0;
  for (std::size_t i = 0; i < org.data.size(); ++i) worst = std::max(worst, std::abs(org.data[i] - rec.data[i]));
  return worst;
}

MetricsRecord make_record(const GrayImage& original, const Reconstruction& rec, std::string solver,
                          std::string dict_stage, std::string image_id, std::string split) {
  GridPlan crop;
  crop.crop_h = rec.image.height;
  crop.crop_w = rec.image.width;
  GrayImage org(rec.image.height, rec.image.width);
  require(original.height >= org.height && original.width >= org.width, ErrorKind::Argument,
          "make_record: reconstruction larger than original");
  for (std::size_t y = 0; y < org.height; ++y) {
    for (std::size_t x = 0; x < org.width; ++x) org.at(y, x) = original.at(y, x);
  }

  MetricsRecord r;
  r.solver = std::move(solver);
  r.dict_stage = std::move(dict_stage);
  r.image_id = std::move(image_id);
  r.split = std::move(split);
  r.ab_er = abs_error(org, rec.image);
  r.in_er = inf_error(org, rec.image);
  // An all-zero original has no relative scale; report 0 when the reconstruction is exact.
  double norm2 = 0.0;
  for (double v : org.data) norm2 += v * v;
  r.re_er = norm2 > 0.0 ? r.ab_er / std::sqrt(norm2) : 0.0;
  r.cpu_patch_mean = rec.cpu_patch_mean;
  r.cpu_image = rec.cpu_image;
  return r;
}

std::vector<AggregateRow> aggregate(const std::vector<MetricsRecord>& records) {
  std::vector<AggregateRow> rows;
  for (const auto& r : records) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const AggregateRow& a) {
      return a.solver == r.solver && a.dict_stage == r.dict_stage;
    });
    if (it == rows.end()) {
      rows.push_back(AggregateRow{r.solver, r.dict_stage});
      it = rows.end() - 1;
    }
    ++it->images;
    it->re_er += r.re_er;
    it->ab_er += r.ab_er;
    it->in_er += r.in_er;
    it->cpu_patch_mean += r.cpu_patch_mean;
    it->cpu_image += r.cpu_image;
  }
  for (auto& a : rows) {
    const auto k = static_cast<double>(a.images);
    a.re_er /= k;
    a.ab_er /= k;
    a.in_er /= k;
    a.cpu_patch_mean /= k;
    a.cpu_image /= k;
  }
  return rows;
}

std::string metrics_csv_header() {
  return "solver,dict_stage,image_id,split,ReEr,AbEr,InEr,cpu_patch_mean,cpu_image";
}

std::string metrics_csv_row(const MetricsRecord& r) {
  return r.solver + "," + r.dict_stage + "," + r.image_id + "," + r.split + "," + fmt("%.6g", r.re_er) + "," +
         fmt("%.6g", r.ab_er) + "," + fmt("%.6g", r.in_er) + "," + fmt("%.6f", r.cpu_patch_mean) + "," +
         fmt("%.6f", r.cpu_image);
}

std::string aggregate_csv_header() {
  return "solver,dict_stage,images,ReEr,AbEr,InEr,cpu_patch_mean,cpu_image";
}

std::string aggregate_csv_row(const AggregateRow& r) {
  return r.solver + "," + r.dict_stage + "," + std::to_string(r.images) + "," + fmt("%.6g", r.re_er) + "," +
         fmt("%.6g", r.ab_er) + "," + fmt("%.6g", r.in_er) + "," + fmt("%.6f", r.cpu_patch_mean) + "," +
         fmt("%.6f", r.cpu_image);
}

}  // namespace spdl
