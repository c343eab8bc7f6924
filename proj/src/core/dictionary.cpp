#include "core/dictionary.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>

#include "core/error.hpp"

namespace spdl {

namespace {

constexpr char kMagic[4] = {'S', 'D', 'I', 'C'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 16;

std::size_t exact_sqrt(std::size_t v) {
  auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(v))));
  return r * r == v ? r : 0;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
  return v;
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

double get_f64(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[at + i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

Dictionary::Dictionary(Matrix atoms) : atoms_(std::move(atoms)) {
  require(atoms_.rows() >= 1 && atoms_.cols() >= 1, ErrorKind::Argument, "dictionary: empty matrix");
  for (Eigen::Index j = 0; j < atoms_.cols(); ++j) {
    const double norm = atoms_.col(j).norm();
    if (!(norm <= 1.0 + kNormSlack)) fail(ErrorKind::Argument, "dictionary: atom norm exceeds 1");
  }
}

Dictionary init_dct_dictionary(std::size_t m, std::size_t n) {
  const std::size_t side = exact_sqrt(m);
  const std::size_t k = exact_sqrt(n);
  if (side == 0 || k == 0 || k < side) {
    fail(ErrorKind::Argument, "dct dictionary: need m = s^2, n = k^2 with k >= s");
  }
  // Rows are sample positions, columns are frequencies.
  Matrix basis(side, k);
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t f = 0; f < k; ++f) {
      basis(i, f) = std::cos(std::numbers::pi * (2.0 * i + 1.0) * f / (2.0 * k));
    }
  }
  Matrix atoms(m, n);
  for (std::size_t fy = 0; fy < k; ++fy) {
    for (std::size_t fx = 0; fx < k; ++fx) {
      const std::size_t col = fy * k + fx;
      for (std::size_t y = 0; y < side; ++y) {
        for (std::size_t x = 0; x < side; ++x) atoms(y * side + x, col) = basis(y, fy) * basis(x, fx);
      }
      atoms.col(col).normalize();
    }
  }
  return Dictionary(std::move(atoms));
}

std::vector<std::uint8_t> save_dictionary(const Dictionary& dict) {
  if (dict.m() > UINT32_MAX || dict.n() > UINT32_MAX) fail(ErrorKind::Format, "sdic: dimension overflow");
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  out.reserve(kHeaderBytes + 8 * dict.m() * dict.n());
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(dict.m()));
  put_u32(out, static_cast<std::uint32_t>(dict.n()));
  const Matrix& a = dict.atoms();
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) put_f64(out, a(i, j));
  }
  return out;
}

Dictionary load_dictionary(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) fail(ErrorKind::Length, "sdic: truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) fail(ErrorKind::Format, "sdic: bad magic");
  if (get_u32(bytes, 4) != kVersion) fail(ErrorKind::Format, "sdic: unsupported version");
  const std::uint64_t m = get_u32(bytes, 8);
  const std::uint64_t n = get_u32(bytes, 12);
  if (m == 0 || n == 0) fail(ErrorKind::Format, "sdic: zero dimension");
  // m*n*8 fits in 64 bits for 32-bit m, n; reject anything the payload cannot hold.
  const std::uint64_t payload = m * n * 8;
  if (payload / 8 / n != m) fail(ErrorKind::Format, "sdic: dimension overflow");
  if (bytes.size() - kHeaderBytes != payload) fail(ErrorKind::Length, "sdic: payload length mismatch");

  Matrix atoms(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  std::size_t at = kHeaderBytes;
  for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
    for (Eigen::Index i = 0; i < atoms.rows(); ++i, at += 8) atoms(i, j) = get_f64(bytes, at);
  }
  if (!atoms.allFinite()) fail(ErrorKind::Format, "sdic: non-finite entry");
  try {
    return Dictionary(std::move(atoms));
  } catch (const Error& e) {
    fail(ErrorKind::Format, std::string("sdic: ") + e.what());
  }
}

GrayImage render_dictionary_mosaic(const Dictionary& dict, std::size_t tile_cols) {
  const std::size_t side = exact_sqrt(dict.m());
  require(side > 0, ErrorKind::Argument, "mosaic: patch dimension is not a perfect square");
  require(tile_cols >= 1, ErrorKind::Argument, "mosaic: tile_cols must be >= 1");
  const std::size_t cols = std::min(tile_cols, dict.n());
  const std::size_t rows = (dict.n() + cols - 1) / cols;
  const std::size_t pitch = side + 1;

  GrayImage out(rows * pitch + 1, cols * pitch + 1, 0.0);
  const Matrix& a = dict.atoms();
  for (std::size_t j = 0; j < dict.n(); ++j) {
    const auto atom = a.col(static_cast<Eigen::Index>(j));
    const double lo = atom.minCoeff();
    const double range = atom.maxCoeff() - lo;
    const bool flat = !(range > 1e-12 * atom.cwiseAbs().maxCoeff());
    const std::size_t oy = 1 + (j / cols) * pitch;
    const std::size_t ox = 1 + (j % cols) * pitch;
    for (std::size_t y = 0; y < side; ++y) {
      for (std::size_t x = 0; x < side; ++x) {
        const double v = atom(static_cast<Eigen::Index>(y * side + x));
        out.at(oy + y, ox + x) = flat ? 127.5 : std::clamp(255.0 * (v - lo) / range, 0.0, 255.0);
      }
    }
  }
  return out;
}

}  // namespace spdl
