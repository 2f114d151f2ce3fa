// Copyright 2026 The spinsteer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace spinsteer {

/// Thrown when an intermediate quantity degenerates (zero denominator,
/// non-finite state, failed factorization).
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown by config parsing; carries the offending line and key.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& what, int line, std::string key)
        : std::runtime_error("config error (line " + std::to_string(line) + ", key '" + key +
                             "'): " + what),
          line_(line),
          key_(std::move(key)) {}
    int line() const { return line_; }
    const std::string& key() const { return key_; }

  private:
    int line_;
    std::string key_;
};

/// Thrown on file-system failures (unwritable output path and the like).
class IoError : public std::runtime_error {
  public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s, exact

inline void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) {
        throw std::domain_error(std::string(name) + " must be finite");
    }
}

}  // namespace spinsteer
