#include "core/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "core/error.hpp"

namespace spdl {

namespace {

// Uniform in [0,1) from raw engine bits, so output does not depend on the library's distributions.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double operator()(double lo, double hi) { return lo + (hi - lo) * (*this)(); }

 private:
  std::mt19937_64 rng_;
};

constexpr double kPi = std::numbers::pi;

GrayImage quantize(const std::vector<double>& v, std::size_t n) {
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double span = std::max(*hi_it - lo, 1e-12);
  GrayImage out(n, n);
  for (std::size_t i = 0; i < v.size(); ++i) out.data[i] = std::round(16.0 + 223.0 * (v[i] - lo) / span);
  return out;
}

template <class F>
std::vector<double> field(std::size_t n, F f) {
  std::vector<double> v(n * n);
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) v[y * n + x] = f(static_cast<double>(y) / n, static_cast<double>(x) / n);
  }
  return v;
}

void box_blur(std::vector<double>& v, std::size_t n, int r) {
  std::vector<double> tmp(v.size());
  auto pass = [&](bool horizontal) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t x = 0; x < n; ++x) {
        double s = 0.0;
        for (int d = -r; d <= r; ++d) {
          // periodic boundary
          const std::size_t yy = horizontal ? y : (y + n + d) % n;
          const std::size_t xx = horizontal ? (x + n + d) % n : x;
          s += v[yy * n + xx];
        }
        tmp[y * n + x] = s / (2 * r + 1);
      }
    }
    v.swap(tmp);
  };
  pass(true);
  pass(false);
}

}  // namespace

std::vector<CorpusImage> synthetic_corpus(std::uint64_t seed, std::size_t n) {
  require(n >= 8, ErrorKind::Argument, "corpus: size must be >= 8");
  Uniform u(seed);
  std::vector<CorpusImage> out;

  {  // oriented grating over a linear ramp
    const double th = u(0.0, kPi), f = u(5.0, 9.0), g = u(0.5, 1.5);
    out.push_back({"grating", quantize(field(n, [&](double y, double x) {
                     return std::sin(2 * kPi * f * (x * std::cos(th) + y * std::sin(th))) + g * (x + 0.5 * y);
                   }), n)});
  }
  {  // concentric rings around an off-centre point
    const double cy = u(0.3, 0.7), cx = u(0.3, 0.7), f = u(6.0, 10.0);
    out.push_back({"rings", quantize(field(n, [&](double y, double x) {
                     const double r = std::hypot(y - cy, x - cx);
                     return std::cos(2 * kPi * f * r) * std::exp(-1.5 * r);
                   }), n)});
  }
  {  // soft checkerboard with a vertical ramp
    const double cells = std::floor(u(4.0, 7.0)), sharp = u(4.0, 8.0);
    out.push_back({"checker", quantize(field(n, [&](double y, double x) {
                     const double s = std::tanh(sharp * std::sin(kPi * cells * x)) *
                                      std::tanh(sharp * std::sin(kPi * cells * y));
                     return s + 0.8 * y;
                   }), n)});
  }
  {  // smoothed noise
    std::vector<double> v(n * n);
    for (auto& e : v) e = u();
    box_blur(v, n, 2);
    box_blur(v, n, 2);
    out.push_back({"cloud", quantize(v, n)});
  }
  {  // gaussian blobs
    struct Blob { double y, x, s, a; };
    std::vector<Blob> blobs(12);
    for (auto& b : blobs) b = {u(), u(), u(0.04, 0.14), u(-1.0, 1.0)};
    out.push_back({"blobs", quantize(field(n, [&](double y, double x) {
                     double s = 0.0;
                     for (const auto& b : blobs) {
                       const double d2 = (y - b.y) * (y - b.y) + (x - b.x) * (x - b.x);
                       s += b.a * std::exp(-d2 / (2 * b.s * b.s));
                     }
                     return s;
                   }), n)});
  }
  {  // wood grain: stripes bent by smoothed noise
    std::vector<double> warp(n * n);
    for (auto& e : warp) e = u();
    box_blur(warp, n, 4);
    box_blur(warp, n, 4);
    const double f = u(8.0, 12.0);
    std::vector<double> v(n * n);
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t x = 0; x < n; ++x) {
        const double t = static_cast<double>(x) / n + 6.0 * (warp[y * n + x] - 0.5);
        v[y * n + x] = std::sin(2 * kPi * f * t);
      }
    }
    out.push_back({"grain", quantize(v, n)});
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].name = std::to_string(i) + "_" + out[i].name;
  return out;
}

}  // namespace spdl
