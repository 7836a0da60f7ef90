// SPDX-License-Identifier: Apache-2.0

#ifndef MOLT_COMMON_HPP_
#define MOLT_COMMON_HPP_

#include <cstdio>
#include <stdexcept>
#include <string>

namespace molt {

// Error classes map onto CLI exit codes: config = 2, data = 3, training = 4.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class TrainError : public std::runtime_error {
 public:
  explicit TrainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Deterministic float formatting for all file output.
inline std::string fmt_double(double v, int precision = 17) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

}  // namespace molt

#endif  // MOLT_COMMON_HPP_
