#include "signum/rational.hpp"

#include <cctype>

namespace signum {

std::optional<Rational> parse_rational(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::size_t slash = text.find('/');
  std::size_t dot = text.find('.');
  if (slash != std::string::npos && dot != std::string::npos) return std::nullopt;

  auto is_int = [](const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  };

  if (slash != std::string::npos) {
    std::string num = text.substr(0, slash);
    std::string den = text.substr(slash + 1);
    if (!is_int(num) || !is_int(den)) return std::nullopt;
    mpz_class d(den);
    if (d == 0) return std::nullopt;
    Rational q(mpz_class(num), d);
    q.canonicalize();
    return q;
  }
  if (dot != std::string::npos) {
    std::string head = text.substr(0, dot);
    std::string frac = text.substr(dot + 1);
    if (frac.empty() || !is_int(frac) || frac[0] == '+' || frac[0] == '-') return std::nullopt;
    bool neg = !head.empty() && head[0] == '-';
    if (!head.empty() && (head[0] == '+' || head[0] == '-')) head = head.substr(1);
    if (!head.empty() && !is_int(head)) return std::nullopt;
    mpz_class whole = head.empty() ? mpz_class(0) : mpz_class(head);
    mpz_class den(1);
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    mpz_class num = whole * den + mpz_class(frac);
    if (neg) num = -num;
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  if (!is_int(text)) return std::nullopt;
  return Rational(mpz_class(text));
}

std::string rational_to_string(const Rational& q) { return q.get_str(); }

Rational pow2(long e) {
  Rational r(1);
  mpz_class p(1);
  p <<= static_cast<unsigned long>(e < 0 ? -e : e);
  if (e >= 0) return Rational(p);
  Rational q(1, p);
  q.canonicalize();
  return q;
}

}  // namespace signum
