// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "limor/error.hpp"

namespace limor
{

const char *to_string(ErrorCode code)
{
  switch (code)
  {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::UnstableMatrix: return "UnstableMatrix";
    case ErrorCode::SpectraOverlap: return "SpectraOverlap";
    case ErrorCode::BranchCutProximity: return "BranchCutProximity";
    case ErrorCode::RepeatedPoles: return "RepeatedPoles";
    case ErrorCode::SingularShift: return "SingularShift";
    case ErrorCode::NegativeTrace: return "NegativeTrace";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::NotConjugateClosed: return "NotConjugateClosed";
    case ErrorCode::BreakdownNearZero: return "BreakdownNearZero";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::IllConditionedNormalEquations: return "IllConditionedNormalEquations";
    case ErrorCode::SingularReducedGramian: return "SingularReducedGramian";
    case ErrorCode::RankCollapse: return "RankCollapse";
    case ErrorCode::RankDeficientF: return "RankDeficientF";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code)
{
  switch (code)
  {
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidArgument:
    case ErrorCode::NonFinite:
    case ErrorCode::UnstableMatrix:
    case ErrorCode::NotConjugateClosed:
    case ErrorCode::ParseError:
    case ErrorCode::MissingFile:
    case ErrorCode::IoError:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string &what)
  : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
{
}

ParseError::ParseError(const std::string &file, int line, int column, const std::string &what)
  : Error(ErrorCode::ParseError,
          file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
    file_(file), line_(line), column_(column)
{
}

}  // namespace limor
