// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace limor
{

enum class ErrorCode
{
  DimensionMismatch,
  InvalidArgument,
  NonFinite,
  UnstableMatrix,
  SpectraOverlap,
  BranchCutProximity,
  RepeatedPoles,
  SingularShift,
  NegativeTrace,
  ResolutionTooCoarse,
  NotConjugateClosed,
  BreakdownNearZero,
  RankDeficient,
  IllConditionedNormalEquations,
  SingularReducedGramian,
  RankCollapse,
  RankDeficientF,
  NumericalFailure,
  ParseError,
  MissingFile,
  IoError,
};

const char *to_string(ErrorCode code);

// True for the codes the CLI maps to exit status 2 (bad input rather than bad numerics).
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string &what);

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

// Parse failures carry the offending location; line and column are 1-based, 0 if unknown.
class ParseError : public Error
{
public:
  ParseError(const std::string &file, int line, int column, const std::string &what);

  const std::string &file() const noexcept { return file_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

private:
  std::string file_;
  int line_;
  int column_;
};

}  // namespace limor
