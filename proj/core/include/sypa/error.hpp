#pragma once

#include <stdexcept>
#include <string>

namespace sypa {

// Runtime failure with a stable machine-readable code. The CLI serializes
// these as JSON on stderr; tests match on code().
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace sypa
