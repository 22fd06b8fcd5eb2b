#include "lagskel/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace lagskel {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

[[noreturn]] void bad(std::string_view text) {
  throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view original = text;
  text = trim(text);
  if (text.empty()) bad(original);

  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  Rational result;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) bad(original);
    mpz_class n(std::string(num), 10), d(std::string(den), 10);
    if (d == 0) bad(original);
    result = Rational(n, d);
    result.canonicalize();
  } else {
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
      auto exp_text = text.substr(e + 1);
      bool exp_negative = false;
      if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
        exp_negative = exp_text.front() == '-';
        exp_text.remove_prefix(1);
      }
      if (!all_digits(exp_text) || exp_text.size() > 6) bad(original);
      exponent = std::stol(std::string(exp_text));
      if (exp_negative) exponent = -exponent;
      text = text.substr(0, e);
    }
    std::string_view int_part = text, frac_part;
    if (auto dot_pos = text.find('.'); dot_pos != std::string_view::npos) {
      int_part = text.substr(0, dot_pos);
      frac_part = text.substr(dot_pos + 1);
    }
    if (int_part.empty() && frac_part.empty()) bad(original);
    if (!int_part.empty() && !all_digits(int_part)) bad(original);
    if (!frac_part.empty() && !all_digits(frac_part)) bad(original);
    std::string digits = std::string(int_part) + std::string(frac_part);
    mpz_class mantissa(digits.empty() ? std::string("0") : digits, 10);
    exponent -= static_cast<long>(frac_part.size());
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    result = exponent < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale);
    result.canonicalize();
  }
  if (negative) result = -result;
  return result;
}

std::string to_string(const Rational& value) { return value.get_str(); }

std::string to_fraction_string(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::string to_string(std::span<const Rational> values, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += values[i].get_str();
  }
  return out;
}

Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  Rational sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

Rational make_rational(long num, long den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

RationalVector parse_rational_list(std::string_view text) {
  RationalVector out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_rational(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace lagskel
