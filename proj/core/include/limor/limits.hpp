// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <variant>

namespace limor
{

// Frequency band [w1, w2] in rad/s, 0 <= w1 < w2. w1 == 0 is the low-pass case.
struct FrequencyBand
{
  double w1 = 0.0;
  double w2 = 0.0;
};

// Time window [t1, t2], 0 <= t1 < t2. t1 == 0 is the [0, tau] case.
struct TimeWindow
{
  double t1 = 0.0;
  double t2 = 0.0;
};

class LimitSpec
{
public:
  // Throws InvalidArgument on non-finite or inverted bounds.
  static LimitSpec frequency(double w1, double w2);
  static LimitSpec time(double t1, double t2);

  // "freq:<w1>:<w2>" or "time:<t1>:<t2>".
  static LimitSpec parse(const std::string &text);

  bool is_frequency() const { return std::holds_alternative<FrequencyBand>(value_); }
  bool is_time() const { return std::holds_alternative<TimeWindow>(value_); }

  const FrequencyBand &band() const;
  const TimeWindow &window() const;

  std::string to_string() const;

private:
  explicit LimitSpec(std::variant<FrequencyBand, TimeWindow> v) : value_(v) {}

  std::variant<FrequencyBand, TimeWindow> value_;
};

}  // namespace limor
