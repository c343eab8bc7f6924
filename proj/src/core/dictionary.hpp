#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "core/bpdn.hpp"
#include "core/image.hpp"

namespace spdl {

// m x n matrix whose columns (atoms) lie in the unit ball.
class Dictionary {
 public:
  static constexpr double kNormSlack = 1e-12;

  Dictionary() = default;
  explicit Dictionary(Matrix atoms);

  std::size_t m() const { return static_cast<std::size_t>(atoms_.rows()); }
  std::size_t n() const { return static_cast<std::size_t>(atoms_.cols()); }
  const Matrix& atoms() const { return atoms_; }

  // Column-norm projection is the caller's job; this only exposes storage for in-place updates.
  Matrix& mutable_atoms() { return atoms_; }

  bool operator==(const Dictionary& other) const { return atoms_ == other.atoms_; }

 private:
  Matrix atoms_;
};

// Overcomplete separable DCT: first sqrt(m) samples of a length-sqrt(n) DCT-II basis,
// Kronecker product, unit-norm columns. Atom 0 is the constant atom.
Dictionary init_dct_dictionary(std::size_t m, std::size_t n);

// "SDIC", u32 version=1, u32 m, u32 n, then m*n little-endian doubles, column-major.
std::vector<std::uint8_t> save_dictionary(const Dictionary& dict);
Dictionary load_dictionary(std::span<const std::uint8_t> bytes);

// Atoms as sqrt(m) x sqrt(m) tiles, each rescaled to [0,255], 1-pixel separators and border.
GrayImage render_dictionary_mosaic(const Dictionary& dict, std::size_t tile_cols);

}  // namespace spdl
