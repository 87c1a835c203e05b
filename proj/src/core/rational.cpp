#include "core/rational.h"

#include <charconv>

#include "core/errors.h"

namespace scorecf {

namespace {

std::int64_t parseInt(std::string_view text, const std::string& whole) {
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("invalid rational literal: '" + whole + "'");
  }
  return out;
}

}  // namespace

Rational parseRational(const std::string& text) {
  if (text.empty()) throw ParseError("empty rational literal");
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    return Rational(parseInt(text, text));
  }
  const std::int64_t num = parseInt(std::string_view(text).substr(0, slash), text);
  const std::int64_t den = parseInt(std::string_view(text).substr(slash + 1), text);
  if (den == 0) throw ParseError("zero denominator in rational literal: '" + text + "'");
  return Rational(num, den);
}

std::string formatRational(const Rational& value) {
  if (value.denominator() == 1) return std::to_string(value.numerator());
  return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
}

std::int64_t floorDiv(const Rational& value, const Rational& unit) {
  const Rational q = value / unit;
  std::int64_t d = q.numerator() / q.denominator();
  if (q.numerator() % q.denominator() != 0 && q < 0) --d;
  return d;
}

double toDouble(const Rational& value) {
  return static_cast<double>(value.numerator()) / static_cast<double>(value.denominator());
}

}  // namespace scorecf
