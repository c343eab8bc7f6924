#include "core/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "core/error.hpp"

namespace spdl {

namespace {

void check_range(std::span<const double> values) {
  for (double v : values) {
    if (!(v >= 0.0 && v <= 255.0)) fail(ErrorKind::Range, "intensity outside [0,255]");
  }
}

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::uint64_t read_uint(const char* field) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      fail(ErrorKind::Format, std::string("pnm: expected integer for ") + field);
    }
    std::uint64_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1ull << 40)) fail(ErrorKind::Format, std::string("pnm: value too large for ") + field);
      ++pos_;
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from a binary payload.
  void consume_single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      fail(ErrorKind::Format, "pnm: missing whitespace after header");
    }
    ++pos_;
  }

  bool at_end() {
    skip_space_and_comments();
    return pos_ >= bytes_.size();
  }

  std::size_t pos() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::string header(char kind, std::size_t w, std::size_t h) {
  return std::string("P") + kind + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
}

std::vector<std::uint8_t> encode(char magic_binary, char magic_ascii, std::size_t w, std::size_t h,
                                 std::size_t channels, std::span<const double> values, bool ascii) {
  check_range(values);
  const std::string head = header(ascii ? magic_ascii : magic_binary, w, h);
  std::vector<std::uint8_t> out(head.begin(), head.end());
  if (!ascii) {
    out.reserve(out.size() + values.size());
    for (double v : values) out.push_back(static_cast<std::uint8_t>(std::lround(v)));
    return out;
  }
  const std::size_t row_len = w * channels;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::string s = std::to_string(std::lround(values[i]));
    out.insert(out.end(), s.begin(), s.end());
    out.push_back((i + 1) % row_len == 0 ? '\n' : ' ');
  }
  return out;
}

}  // namespace

GrayImage::GrayImage(std::size_t h, std::size_t w, std::vector<double> values)
    : height(h), width(w), data(std::move(values)) {
  require(data.size() == h * w, ErrorKind::Argument, "gray image: data length != height*width");
}

RgbImage::RgbImage(std::size_t h, std::size_t w, std::vector<double> values)
    : height(h), width(w), data(std::move(values)) {
  require(data.size() == 3 * h * w, ErrorKind::Argument, "rgb image: data length != 3*height*width");
}

AnyImage read_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') fail(ErrorKind::Format, "pnm: bad magic");
  const char kind = static_cast<char>(bytes[1]);
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6') fail(ErrorKind::Format, "pnm: bad magic");
  const bool ascii = kind == '2' || kind == '3';
  const std::size_t channels = (kind == '3' || kind == '6') ? 3 : 1;

  HeaderReader reader(bytes.subspan(2));
  const auto width = reader.read_uint("width");
  const auto height = reader.read_uint("height");
  const auto maxval = reader.read_uint("maxval");
  if (width == 0 || height == 0) fail(ErrorKind::Format, "pnm: zero dimension");
  if (maxval == 0) fail(ErrorKind::Format, "pnm: zero maxval");
  if (maxval > 255) fail(ErrorKind::Unsupported, "pnm: maxval > 255 is not supported");

  const std::size_t count = width * height * channels;
  const double scale = 255.0 / static_cast<double>(maxval);
  std::vector<double> values(count);
  if (ascii) {
    for (std::size_t i = 0; i < count; ++i) {
      if (reader.at_end()) fail(ErrorKind::Length, "pnm: truncated ascii payload");
      const auto v = reader.read_uint("sample");
      if (v > maxval) fail(ErrorKind::Format, "pnm: sample exceeds maxval");
      values[i] = static_cast<double>(v) * scale;
    }
  } else {
    reader.consume_single_space();
    const std::size_t offset = 2 + reader.pos();
    if (bytes.size() - offset < count) fail(ErrorKind::Length, "pnm: truncated binary payload");
    for (std::size_t i = 0; i < count; ++i) {
      const auto v = bytes[offset + i];
      if (v > maxval) fail(ErrorKind::Format, "pnm: sample exceeds maxval");
      values[i] = static_cast<double>(v) * scale;
    }
  }
  if (channels == 1) return GrayImage(height, width, std::move(values));
  return RgbImage(height, width, std::move(values));
}

std::vector<std::uint8_t> write_pnm(const GrayImage& img, bool ascii) {
  return encode('5', '2', img.width, img.height, 1, img.data, ascii);
}

std::vector<std::uint8_t> write_pnm(const RgbImage& img, bool ascii) {
  return encode('6', '3', img.width, img.height, 3, img.data, ascii);
}

GrayImage to_grayscale(const RgbImage& img) {
  GrayImage out(img.height, img.width);
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    const double* px = &img.data[3 * i];
    const double g = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
    // Keep the convex-combination bound exact under rounding.
    out.data[i] = std::clamp(g, std::min({px[0], px[1], px[2]}), std::max({px[0], px[1], px[2]}));
  }
  return out;
}

GrayImage to_grayscale(const AnyImage& img) {
  if (const auto* gray = std::get_if<GrayImage>(&img)) return *gray;
  return to_grayscale(std::get<RgbImage>(img));
}

GrayImage resize_bilinear(const GrayImage& img, std::size_t new_h, std::size_t new_w) {
  require(new_h >= 1 && new_w >= 1, ErrorKind::Argument, "resize: zero target dimension");
  require(img.height >= 1 && img.width >= 1, ErrorKind::Argument, "resize: empty source image");
  if (new_h == img.height && new_w == img.width) return img;

  const double sy = static_cast<double>(img.height) / static_cast<double>(new_h);
  const double sx = static_cast<double>(img.width) / static_cast<double>(new_w);
  const double max_y = static_cast<double>(img.height - 1);
  const double max_x = static_cast<double>(img.width - 1);

  GrayImage out(new_h, new_w);
  for (std::size_t y = 0; y < new_h; ++y) {
    const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0, max_y);
    const auto y0 = static_cast<std::size_t>(fy);
    const std::size_t y1 = std::min(y0 + 1, img.height - 1);
    const double wy = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < new_w; ++x) {
      const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0, max_x);
      const auto x0 = static_cast<std::size_t>(fx);
      const std::size_t x1 = std::min(x0 + 1, img.width - 1);
      const double wx = fx - static_cast<double>(x0);
      const double top = std::lerp(img.at(y0, x0), img.at(y0, x1), wx);
      const double bottom = std::lerp(img.at(y1, x0), img.at(y1, x1), wx);
      out.at(y, x) = std::clamp(std::lerp(top, bottom, wy), 0.0, 255.0);
    }
  }
  return out;
}

}  // namespace spdl
