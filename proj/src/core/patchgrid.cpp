#include "core/patchgrid.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace spdl {

namespace {

void check_image_matches(const GrayImage& img, const GridPlan& plan) {
  const bool fits_h = img.height >= plan.crop_h && img.height - plan.crop_h < plan.stride_h;
  const bool fits_w = img.width >= plan.crop_w && img.width - plan.crop_w < plan.stride_w;
  if (!fits_h || !fits_w) fail(ErrorKind::Argument, "patch plan does not match image dimensions");
}

}  // namespace

GridPlan plan_grid(std::size_t img_h, std::size_t img_w, std::size_t patch, double overlap_fraction) {
  require(patch >= 1, ErrorKind::Argument, "plan_grid: patch must be >= 1");
  require(overlap_fraction >= 0.0 && overlap_fraction < 1.0, ErrorKind::Argument,
          "plan_grid: overlap fraction must lie in [0,1)");
  require(patch <= img_h && patch <= img_w, ErrorKind::Argument, "plan_grid: patch larger than image");

  const double raw_stride = static_cast<double>(patch) * (1.0 - overlap_fraction);
  const double rounded = std::round(raw_stride);
  if (std::abs(raw_stride - rounded) > 1e-9 || rounded < 1.0) {
    fail(ErrorKind::Argument, "plan_grid: patch*(1-overlap) must be a positive integer");
  }
  const auto stride = static_cast<std::size_t>(rounded);

  GridPlan plan;
  plan.patch_h = plan.patch_w = patch;
  plan.stride_h = plan.stride_w = stride;
  plan.anchors_y = (img_h - patch) / stride + 1;
  plan.anchors_x = (img_w - patch) / stride + 1;
  plan.crop_h = (plan.anchors_y - 1) * stride + patch;
  plan.crop_w = (plan.anchors_x - 1) * stride + patch;
  return plan;
}

PatchMatrix extract_patches(const GrayImage& img, const GridPlan& plan) {
  check_image_matches(img, plan);
  PatchMatrix patches(plan.patch_dim(), plan.count());
  Eigen::Index col = 0;
  for (std::size_t ay = 0; ay < plan.anchors_y; ++ay) {
    for (std::size_t ax = 0; ax < plan.anchors_x; ++ax, ++col) {
      const std::size_t y0 = ay * plan.stride_h;
      const std::size_t x0 = ax * plan.stride_w;
      Eigen::Index row = 0;
      for (std::size_t dy = 0; dy < plan.patch_h; ++dy) {
        for (std::size_t dx = 0; dx < plan.patch_w; ++dx, ++row) {
          patches(row, col) = img.at(y0 + dy, x0 + dx);
        }
      }
    }
  }
  return patches;
}

CoverageMap coverage_map(const GridPlan& plan) {
  CoverageMap map{plan.crop_h, plan.crop_w, std::vector<std::uint32_t>(plan.crop_h * plan.crop_w, 0)};
  for (std::size_t ay = 0; ay < plan.anchors_y; ++ay) {
    for (std::size_t ax = 0; ax < plan.anchors_x; ++ax) {
      for (std::size_t dy = 0; dy < plan.patch_h; ++dy) {
        const std::size_t row = (ay * plan.stride_h + dy) * plan.crop_w + ax * plan.stride_w;
        for (std::size_t dx = 0; dx < plan.patch_w; ++dx) ++map.counts[row + dx];
      }
    }
  }
  return map;
}

GrayImage assemble_image(const PatchMatrix& patches, const GridPlan& plan) {
  if (static_cast<std::size_t>(patches.cols()) != plan.count() ||
      static_cast<std::size_t>(patches.rows()) != plan.patch_dim()) {
    fail(ErrorKind::Argument, "assemble_image: patch matrix does not match plan");
  }
  GrayImage sum(plan.crop_h, plan.crop_w);
  Eigen::Index col = 0;
  for (std::size_t ay = 0; ay < plan.anchors_y; ++ay) {
    for (std::size_t ax = 0; ax < plan.anchors_x; ++ax, ++col) {
      Eigen::Index row = 0;
      for (std::size_t dy = 0; dy < plan.patch_h; ++dy) {
        for (std::size_t dx = 0; dx < plan.patch_w; ++dx, ++row) {
          sum.at(ay * plan.stride_h + dy, ax * plan.stride_w + dx) += patches(row, col);
        }
      }
    }
  }
  const CoverageMap cover = coverage_map(plan);
  for (std::size_t i = 0; i < sum.data.size(); ++i) {
    sum.data[i] = std::clamp(sum.data[i] / static_cast<double>(cover.counts[i]), 0.0, 255.0);
  }
  return sum;
}

GrayImage crop_to_plan(const GrayImage& img, const GridPlan& plan) {
  check_image_matches(img, plan);
  GrayImage out(plan.crop_h, plan.crop_w);
  for (std::size_t y = 0; y < plan.crop_h; ++y) {
    for (std::size_t x = 0; x < plan.crop_w; ++x) out.at(y, x) = img.at(y, x);
  }
  return out;
}

}  // namespace spdl
