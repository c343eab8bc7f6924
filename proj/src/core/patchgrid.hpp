#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "core/image.hpp"

namespace spdl {

// Overlapping patch layout. Anchors tile the crop region [0,crop_h) x [0,crop_w)
// exactly and are enumerated row-major.
struct GridPlan {
  std::size_t patch_h = 0;
  std::size_t patch_w = 0;
  std::size_t stride_h = 0;
  std::size_t stride_w = 0;
  std::size_t anchors_y = 0;
  std::size_t anchors_x = 0;
  std::size_t crop_h = 0;
  std::size_t crop_w = 0;

  std::size_t patch_dim() const { return patch_h * patch_w; }
  std::size_t count() const { return anchors_y * anchors_x; }
  bool operator==(const GridPlan&) const = default;
};

// Columns are row-major flattened patches, in anchor order.
using PatchMatrix = Eigen::MatrixXd;

struct CoverageMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint32_t> counts;

  std::uint32_t at(std::size_t y, std::size_t x) const { return counts[y * width + x]; }
};

GridPlan plan_grid(std::size_t img_h, std::size_t img_w, std::size_t patch, double overlap_fraction);

PatchMatrix extract_patches(const GrayImage& img, const GridPlan& plan);

// Coverage-weighted average of overlapping patches over the crop region.
GrayImage assemble_image(const PatchMatrix& patches, const GridPlan& plan);

CoverageMap coverage_map(const GridPlan& plan);

// Top-left crop of `img` to the plan's working region.
GrayImage crop_to_plan(const GrayImage& img, const GridPlan& plan);

}  // namespace spdl
