#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/bpdn.hpp"
#include "core/dictionary.hpp"
#include "core/image.hpp"
#include "core/patchgrid.hpp"

namespace spdl {

struct ReconstructConfig {
  double mu = 1.0 / 256.0;
  SolverConfig solver;
};

// Per-patch stopping for reconstruction: eps 1e-10 for GSCG/ISGA, 1e-5 otherwise, used both for the
// iterate-change rule and the relative data residual; 5,000,000 iteration cap.
ReconstructConfig default_reconstruct_config(Method m);

struct Reconstruction {
  GrayImage image;  // crop region of the plan
  std::uint64_t patches = 0;
  std::uint64_t max_iter_stops = 0;
  double cpu_solve_total = 0.0;  // sum of per-patch solve CPU seconds
  double cpu_patch_mean = 0.0;
  double cpu_image = 0.0;     // extraction + coding + patch synthesis, assembly excluded
  double cpu_assembly = 0.0;
};

Reconstruction reconstruct_image(const GrayImage& img, const Dictionary& dict, const ReconstructConfig& cfg,
                                 const GridPlan& plan);

// Frobenius norm of the difference.
double abs_error(const GrayImage& org, const GrayImage& rec);
// abs_error / |org|_F
double rel_error(const GrayImage& org, const GrayImage& rec);
// max |org - rec|
double inf_error(const GrayImage& org, const GrayImage& rec);

struct MetricsRecord {
  std::string solver;
  std::string dict_stage;
  std::string image_id;
  std::string split;  // "test" | "train"
  double re_er = 0.0;
  double ab_er = 0.0;
  double in_er = 0.0;
  double cpu_patch_mean = 0.0;
  double cpu_image = 0.0;
};

// Errors against the original cropped to the reconstruction domain.
MetricsRecord make_record(const GrayImage& original, const Reconstruction& rec, std::string solver,
                          std::string dict_stage, std::string image_id, std::string split);

struct AggregateRow {
  std::string solver;
  std::string dict_stage;
  std::size_t images = 0;
  double re_er = 0.0;
  double ab_er = 0.0;
  double in_er = 0.0;
  double cpu_patch_mean = 0.0;
  double cpu_image = 0.0;
};

// Means per (solver, dict_stage), in order of first appearance.
std::vector<AggregateRow> aggregate(const std::vector<MetricsRecord>& records);

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& r);
std::string aggregate_csv_header();
std::string aggregate_csv_row(const AggregateRow& r);

}  // namespace spdl
