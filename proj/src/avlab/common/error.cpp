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

#include "avlab/common/error.hpp"

namespace avlab {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return "Usage";
    case ErrorKind::UnknownFlag: return "UnknownFlag";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Format: return "Format";
    case ErrorKind::Checksum: return "Checksum";
    case ErrorKind::CacheCorruption: return "CacheCorruption";
    case ErrorKind::ZeroPowerSignal: return "ZeroPowerSignal";
    case ErrorKind::ZeroPowerNoise: return "ZeroPowerNoise";
    case ErrorKind::WrongClipCount: return "WrongClipCount";
    case ErrorKind::EmptyCategory: return "EmptyCategory";
    case ErrorKind::InsufficientSpeakers: return "InsufficientSpeakers";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::KindMismatch: return "KindMismatch";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::OOVCharacter: return "OOVCharacter";
    case ErrorKind::EmptyReference: return "EmptyReference";
    case ErrorKind::MissingNoiseType: return "MissingNoiseType";
    case ErrorKind::IncompleteGrid: return "IncompleteGrid";
    case ErrorKind::NonpositiveBaseline: return "NonpositiveBaseline";
    case ErrorKind::HashMismatch: return "HashMismatch";
    case ErrorKind::NaNLoss: return "NaNLoss";
    case ErrorKind::Numerical: return "Numerical";
  }
  return "Unknown";
}

ErrorCategory error_category(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage:
    case ErrorKind::UnknownFlag:
      return ErrorCategory::Usage;
    case ErrorKind::NaNLoss:
    case ErrorKind::Numerical:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Data;
  }
}

}  // namespace avlab
