#include "core/error.hpp"

namespace spdl {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Argument: return "argument error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Length: return "length error";
    case ErrorKind::Unsupported: return "unsupported error";
    case ErrorKind::Range: return "range error";
    case ErrorKind::Degenerate: return "degenerate error";
    case ErrorKind::Divergence: return "divergence error";
    case ErrorKind::Stagnation: return "stagnation error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Io: return "io error";
  }
  return "unknown error";
}

}  // namespace spdl
