#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>

namespace scorecf {

// Exact time arithmetic in quarter-note units. The timing edge rules test
// equalities, so onsets and durations must never pass through floating point.
using Rational = boost::rational<std::int64_t>;

// Parses "p/q" or a plain integer string ("3", "-1/2"). Throws ParseError on
// malformed text or a zero denominator.
Rational parseRational(const std::string& text);

// "p/q", or just "p" when the denominator is 1.
std::string formatRational(const Rational& value);

// floor(value / unit); unit must be positive.
std::int64_t floorDiv(const Rational& value, const Rational& unit);

double toDouble(const Rational& value);

}  // namespace scorecf
