#include "lrd/error.hpp"

namespace lrd {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::parameter: return "parameter";
    case ErrorCode::constraint: return "constraint";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::parse: return "parse";
    case ErrorCode::quality: return "quality";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace lrd
