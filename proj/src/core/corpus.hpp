#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/image.hpp"

namespace spdl {

struct CorpusImage {
  std::string name;
  GrayImage image;  // integer grey values in [0, 255]
};

// Six synthetic texture/gradient images, fully determined by (seed, size).
std::vector<CorpusImage> synthetic_corpus(std::uint64_t seed, std::size_t size = 112);

}  // namespace spdl
