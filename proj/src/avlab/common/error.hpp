// Copyright 2026 The avlab Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace avlab {

// Error kinds named after the failure they describe. Each maps onto one of
// the coarse categories below, which the CLI turns into an exit code.
enum class ErrorKind {
  // usage
  Usage,
  UnknownFlag,
  // data / config
  Config,
  Io,
  Format,
  Checksum,
  CacheCorruption,
  ZeroPowerSignal,
  ZeroPowerNoise,
  WrongClipCount,
  EmptyCategory,
  InsufficientSpeakers,
  TooShort,
  KindMismatch,
  TooFewPoints,
  DimMismatch,
  ShapeMismatch,
  OOVCharacter,
  EmptyReference,
  MissingNoiseType,
  IncompleteGrid,
  NonpositiveBaseline,
  HashMismatch,
  // numerical
  NaNLoss,
  Numerical,
};

enum class ErrorCategory { Usage = 1, Data = 2, Numerical = 3 };

const char* error_kind_name(ErrorKind kind);
ErrorCategory error_category(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  ErrorCategory category() const { return error_category(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace avlab
