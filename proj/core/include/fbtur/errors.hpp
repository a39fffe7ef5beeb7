// Copyright 2026 The fbtur Authors
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

namespace fbtur {

// Base class for every error raised by the library. Each failure mode named in
// the public contracts has its own subclass so callers can catch selectively.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FBTUR_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

FBTUR_DEFINE_ERROR(NonHermitianInput);
FBTUR_DEFINE_ERROR(NegativeEigenvalue);
FBTUR_DEFINE_ERROR(ConvergenceFailure);
FBTUR_DEFINE_ERROR(NonFiniteInput);
FBTUR_DEFINE_ERROR(DimensionMismatch);
FBTUR_DEFINE_ERROR(InvalidParameter);
FBTUR_DEFINE_ERROR(InvalidModel);
FBTUR_DEFINE_ERROR(StepUnderflow);
FBTUR_DEFINE_ERROR(PositivityLoss);
FBTUR_DEFINE_ERROR(DegenerateStationarySpace);
FBTUR_DEFINE_ERROR(StepTooCoarse);
FBTUR_DEFINE_ERROR(FormatError);

#undef FBTUR_DEFINE_ERROR

}  // namespace fbtur
