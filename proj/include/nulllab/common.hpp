// Copyright 2026 The nulllab Authors
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

#ifndef NULLLAB_COMMON_HPP
#define NULLLAB_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nulllab {

using Complex = std::complex<double>;

/// Tolerance for identities that involve only a handful of floating point operations.
inline constexpr double kExactTolerance = 1e-12;
/// Tolerance for results of accumulated matrix arithmetic.
inline constexpr double kMatrixTolerance = 1e-9;
/// Smallest eigenvalue accepted when checking positive semidefiniteness.
inline constexpr double kPsdTolerance = 1e-8;

enum class ErrorKind {
    ZeroVector,
    SpaceMismatch,
    NotNormalized,
    NotAProductSpace,
    WrongDimension,
    NotUnitary,
    NotHermitian,
    InvalidArgument,
    NullImpossible,
    InvalidConfig,
    EmptyInput,
    InternalInvariant,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ZeroVector: return "ZeroVector";
        case ErrorKind::SpaceMismatch: return "SpaceMismatch";
        case ErrorKind::NotNormalized: return "NotNormalized";
        case ErrorKind::NotAProductSpace: return "NotAProductSpace";
        case ErrorKind::WrongDimension: return "WrongDimension";
        case ErrorKind::NotUnitary: return "NotUnitary";
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::NullImpossible: return "NullImpossible";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::InternalInvariant: return "InternalInvariant";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

   private:
    ErrorKind kind_;
};

}  // namespace nulllab

#endif  // NULLLAB_COMMON_HPP
