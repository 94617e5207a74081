#pragma once

#include <optional>

#include "andic/errors.hpp"

// Kind of the andic::Error thrown by f, or nullopt when f returns normally.
template <class F>
std::optional<andic::ErrorKind> thrown_kind(F&& f) {
  try {
    f();
  } catch (const andic::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}
