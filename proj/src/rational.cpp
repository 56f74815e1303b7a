#include "mistake_lab/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

#include "mistake_lab/errors.hpp"

namespace mistake_lab {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool negative = false;
  std::string_view body = s;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  Rational out;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      throw ParseError("not a rational: '" + std::string(text) + "'");
    }
    BigInt d{std::string(den)};
    if (d == 0) throw ParseError("zero denominator: '" + std::string(text) + "'");
    out = Rational(BigInt(std::string(num)), d);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto whole = body.substr(0, dot);
    auto frac = body.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
        (whole.empty() && frac.empty())) {
      throw ParseError("not a decimal: '" + std::string(text) + "'");
    }
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    BigInt digits(std::string(whole.empty() ? "0" : whole) + std::string(frac));
    out = Rational(digits, scale);
  } else {
    if (!all_digits(body)) throw ParseError("not a number: '" + std::string(text) + "'");
    out = Rational(BigInt(std::string(body)));
  }
  out.canonicalize();
  if (negative) out = -out;
  return out;
}

std::string to_string(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_str();
}

std::string to_decimal(const Rational& value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", to_double(value));
  return buf;
}

std::string render(const Rational& value) { return to_string(value) + " (" + to_decimal(value) + ")"; }

double to_double(const Rational& value) { return mpq_get_d(value.get_mpq_t()); }

Rational from_double(double value) {
  if (!std::isfinite(value)) throw PreconditionError("non-finite value has no rational form");
  Rational out;
  mpq_set_d(out.get_mpq_t(), value);
  return out;
}

Rational ratio(long num, long den) {
  if (den == 0) throw PreconditionError("ratio: zero denominator");
  Rational out{BigInt(num), BigInt(den)};
  out.canonicalize();
  return out;
}

Rational pow2_inverse(unsigned e) {
  Rational out(1);
  mpq_div_2exp(out.get_mpq_t(), out.get_mpq_t(), e);
  return out;
}

}  // namespace mistake_lab
