#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

namespace signum {

/// Exact rational arithmetic for the "exact" mode. Backed by GMP; values are
/// always kept in lowest terms, so string round-trips are canonical.
using Rational = mpq_class;

/// Parses an exact rational from "p", "p/q", or a finite decimal ("-0.125").
/// Returns nullopt for anything else (scientific notation, NaN, ...).
std::optional<Rational> parse_rational(const std::string& text);

/// Canonical text form, "p" or "p/q" in lowest terms.
std::string rational_to_string(const Rational& q);

/// 2^e as an exact rational (e may be negative).
Rational pow2(long e);

inline double to_double(const Rational& q) { return q.get_d(); }

inline Rational rational_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

/// base^e with exact integer exponentiation; e may be negative when base != 0.
Rational rational_pow(const Rational& base, long e);

}  // namespace signum
