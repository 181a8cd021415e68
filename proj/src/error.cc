// Copyright 2026 The mgope Authors.
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

#include "mgope/error.h"

namespace mgope {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonStochasticRow: return "NonStochasticRow";
    case ErrorCode::kNegativeProbability: return "NegativeProbability";
    case ErrorCode::kRewardBoundViolated: return "RewardBoundViolated";
    case ErrorCode::kHorizonMismatch: return "HorizonMismatch";
    case ErrorCode::kPlayerMismatch: return "PlayerMismatch";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kDanglingStateReference: return "DanglingStateReference";
    case ErrorCode::kInvalidCell: return "InvalidCell";
    case ErrorCode::kAlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::kTooManyFolds: return "TooManyFolds";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kFingerprintMismatch: return "FingerprintMismatch";
    case ErrorCode::kZeroBehaviorDensity: return "ZeroBehaviorDensity";
    case ErrorCode::kWeightShapeMismatch: return "WeightShapeMismatch";
    case ErrorCode::kMissingNuisance: return "MissingNuisance";
    case ErrorCode::kFoldMismatch: return "FoldMismatch";
    case ErrorCode::kOverlapViolated: return "OverlapViolated";
    case ErrorCode::kObjectiveFailure: return "ObjectiveFailure";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace mgope
