#pragma once

#include <string>
#include <utility>

#include "sypa/error.hpp"

namespace sypa::test {

// Runs f and reports the machine-readable code of the Error it throws,
// "<none>" if it returns, "<other>" on any other exception type.
template <class F>
std::string error_code_of(F&& f) {
  try {
    std::forward<F>(f)();
  } catch (const sypa::Error& e) {
    return e.code();
  } catch (...) {
    return "<other>";
  }
  return "<none>";
}

}  // namespace sypa::test

#define CHECK_ERROR_CODE(expr, expected) \
  CHECK(sypa::test::error_code_of([&] { (void)(expr); }) == (expected))
#define REQUIRE_ERROR_CODE(expr, expected) \
  REQUIRE(sypa::test::error_code_of([&] { (void)(expr); }) == (expected))
