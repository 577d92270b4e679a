// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "limor/limits.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "limor/error.hpp"

namespace limor
{

namespace
{

void check_interval(double a, double b, const char *what)
{
  if (!std::isfinite(a) || !std::isfinite(b))
  {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " bounds must be finite");
  }
  if (a < 0.0 || !(a < b))
  {
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + " bounds must satisfy 0 <= lower < upper");
  }
}

}  // namespace

LimitSpec LimitSpec::frequency(double w1, double w2)
{
  check_interval(w1, w2, "frequency band");
  return LimitSpec(FrequencyBand{w1, w2});
}

LimitSpec LimitSpec::time(double t1, double t2)
{
  check_interval(t1, t2, "time window");
  return LimitSpec(TimeWindow{t1, t2});
}

LimitSpec LimitSpec::parse(const std::string &text)
{
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':'))
  {
    parts.push_back(item);
  }
  if (parts.size() != 3 || (parts[0] != "freq" && parts[0] != "time"))
  {
    throw Error(ErrorCode::InvalidArgument,
                "limit must look like freq:<w1>:<w2> or time:<t1>:<t2>, got '" + text + "'");
  }
  double a = 0.0, b = 0.0;
  try
  {
    std::size_t used = 0;
    a = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
    b = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
  }
  catch (const std::logic_error &)
  {
    throw Error(ErrorCode::InvalidArgument, "cannot parse limit bounds in '" + text + "'");
  }
  return parts[0] == "freq" ? frequency(a, b) : time(a, b);
}

const FrequencyBand &LimitSpec::band() const
{
  if (!is_frequency()) throw Error(ErrorCode::InvalidArgument, "limit is not a frequency band");
  return std::get<FrequencyBand>(value_);
}

const TimeWindow &LimitSpec::window() const
{
  if (!is_time()) throw Error(ErrorCode::InvalidArgument, "limit is not a time window");
  return std::get<TimeWindow>(value_);
}

std::string LimitSpec::to_string() const
{
  std::ostringstream os;
  os.precision(17);
  if (is_frequency())
    os << "freq:" << band().w1 << ":" << band().w2;
  else
    os << "time:" << window().t1 << ":" << window().t2;
  return os.str();
}

}  // namespace limor
