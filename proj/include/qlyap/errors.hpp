#pragma once

#include <stdexcept>
#include <string>

namespace qlyap {

// Invalid or inconsistent user-supplied configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical precondition failed (non-normal operator, size cap, solver failure).
class NumericsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

inline void require_numerics(bool cond, const std::string& msg) {
  if (!cond) throw NumericsError(msg);
}

}  // namespace qlyap
