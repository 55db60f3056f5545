// Copyright 2026 The Condatlas Authors.
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

#ifndef CA_ERROR_HPP
#define CA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ca {

enum class ErrorCode {
  Size,        // empty or mismatched container sizes
  Shape,       // tensor/layer shape mismatch
  Parameter,   // argument outside its documented domain
  Capacity,    // input exceeds a solver's hard bound
  Geometry,    // degenerate or invalid geometry
  Numeric,     // non-finite values where finite ones are required
  Parse,       // malformed file content
  Io,          // filesystem failure
  State,       // operation invoked before its prerequisites exist
  BadMagic,    // checkpoint: wrong magic bytes
  BadVersion,  // checkpoint: unsupported format version
  BadCrc,      // checkpoint: payload checksum mismatch
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace ca

#endif  // CA_ERROR_HPP
