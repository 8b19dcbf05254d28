#ifndef LRD_ERROR_HPP
#define LRD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace lrd {

/// Failure categories. Each maps onto one C API status and one CLI exit code.
enum class ErrorCode {
  parameter,   // argument outside its mathematical domain
  constraint,  // structurally infeasible request (segment too short, band too narrow)
  degenerate,  // data leave a quantity undefined (zero variance, log of zero)
  numerical,   // factorization or transform failure
  parse,       // malformed input file
  quality,     // input parsed but unusable (too many artifacts)
  io           // filesystem failure
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace lrd

#endif  // LRD_ERROR_HPP
