#include "fairround/rational.hpp"

#include "fairround/errors.hpp"

#include <cctype>
#include <cmath>

namespace fairround {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

BigInt parse_integer(std::string_view s) { return BigInt(std::string(s)); }

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational result;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      fail(ErrorKind::Schema, "malformed rational '" + std::string(text) + "'");
    }
    BigInt d = parse_integer(den);
    if (d == 0) fail(ErrorKind::Schema, "zero denominator in '" + std::string(text) + "'");
    result = Rational(parse_integer(num), d);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto whole = s.substr(0, dot);
    auto frac = s.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) || !all_digits(frac)) {
      fail(ErrorKind::Schema, "malformed decimal '" + std::string(text) + "'");
    }
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
    BigInt w = whole.empty() ? BigInt(0) : parse_integer(whole);
    result = Rational(w * scale + parse_integer(frac), scale);
  } else {
    if (!all_digits(s)) fail(ErrorKind::Schema, "malformed number '" + std::string(text) + "'");
    result = Rational(parse_integer(s));
  }
  return negative ? Rational(-result) : result;
}

std::string to_string(const Rational& value) {
  if (denominator(value) == 1) return numerator(value).str();
  return numerator(value).str() + "/" + denominator(value).str();
}

BigInt floor(const Rational& value) {
  BigInt q = numerator(value) / denominator(value);  // truncates toward zero
  if (value < 0 && Rational(q) != value) q -= 1;
  return q;
}

BigInt ceil(const Rational& value) {
  BigInt q = numerator(value) / denominator(value);
  if (value > 0 && Rational(q) != value) q += 1;
  return q;
}

bool is_integer(const Rational& value) { return denominator(value) == 1; }

double to_double(const Rational& value) { return value.convert_to<double>(); }

Rational snap_to_rational(double value, std::int64_t max_denominator) {
  if (!std::isfinite(value)) fail(ErrorKind::InvariantFailure, "cannot snap a non-finite value");
  if (max_denominator < 1) max_denominator = 1;
  const bool negative = value < 0;
  // Work on the exact binary value of the double so the expansion is exact.
  Rational target(std::fabs(value));
  BigInt p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  Rational rest = target;
  for (int step = 0; step < 128; ++step) {
    BigInt a = floor(rest);
    BigInt p2 = a * p1 + p0;
    BigInt q2 = a * q1 + q0;
    if (q2 > max_denominator) {
      // Largest semiconvergent still inside the denominator cap.
      BigInt k = (BigInt(max_denominator) - q0) / q1;
      BigInt ps = k * p1 + p0;
      BigInt qs = k * q1 + q0;
      Rational conv(p1, q1);
      Rational semi = qs > 0 ? Rational(ps, qs) : conv;
      using boost::multiprecision::abs;
      Rational best = abs(semi - target) < abs(conv - target) ? semi : conv;
      return negative ? Rational(-best) : best;
    }
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    Rational frac = rest - Rational(a);
    if (frac == 0) break;
    rest = 1 / frac;
  }
  Rational best(p1, q1);
  return negative ? Rational(-best) : best;
}

}  // namespace fairround
