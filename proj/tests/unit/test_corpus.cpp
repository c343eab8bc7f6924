#include <doctest.h>

#include <cmath>

#include "core/corpus.hpp"

using namespace spdl;

TEST_CASE("synthetic corpus") {
  const auto a = synthetic_corpus(2024, 48);
  const auto b = synthetic_corpus(2024, 48);
  const auto c = synthetic_corpus(7, 48);
  REQUIRE(a.size() == 6);
  const char* names[] = {"0_grating", "1_rings", "2_checker", "3_cloud", "4_blobs", "5_grain"};
  bool any_diff = false;
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(a[i].name == names[i]);
    CHECK(a[i].image == b[i].image);
    CHECK(a[i].image.height == 48);
    CHECK(a[i].image.width == 48);
    double lo = 255, hi = 0;
    for (double v : a[i].image.data) {
      CHECK(v == std::round(v));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(lo == 16.0);
    CHECK(hi == 239.0);
    any_diff = any_diff || !(a[i].image == c[i].image);
  }
  CHECK(any_diff);
}
