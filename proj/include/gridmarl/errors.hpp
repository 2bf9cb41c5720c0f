// Copyright 2026 The gridmarl Authors.
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

namespace gridmarl {

// Error categories mirror the status codes exported by the C API.
enum class ErrorCode {
  invalid_argument = 1,
  dimension,
  numeric,
  state,
  insufficient_data,
  parse,
  io,
  training,
  not_found,
  config,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define GRIDMARL_DEFINE_ERROR(Name, Code)                                   \
  class Name : public Error {                                               \
   public:                                                                  \
    explicit Name(const std::string& what) : Error(ErrorCode::Code, what) {} \
  };

GRIDMARL_DEFINE_ERROR(InvalidArgument, invalid_argument)
GRIDMARL_DEFINE_ERROR(DimensionError, dimension)
GRIDMARL_DEFINE_ERROR(NumericError, numeric)
GRIDMARL_DEFINE_ERROR(StateError, state)
GRIDMARL_DEFINE_ERROR(InsufficientData, insufficient_data)
GRIDMARL_DEFINE_ERROR(ParseError, parse)
GRIDMARL_DEFINE_ERROR(IoError, io)
GRIDMARL_DEFINE_ERROR(TrainingError, training)
GRIDMARL_DEFINE_ERROR(NotFound, not_found)
GRIDMARL_DEFINE_ERROR(ConfigError, config)

#undef GRIDMARL_DEFINE_ERROR

}  // namespace gridmarl
