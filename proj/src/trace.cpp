#include "signum/trace.hpp"

namespace signum {

PartialSumTrace partial_sums(const SequenceSpec& spec, std::span<const Sign> signs,
                             std::optional<Vec> target) {
  PartialSumTrace trace(spec.dim(), spec.start_index(), std::move(target));
  trace.reserve(signs.size());
  Vec acc(static_cast<std::size_t>(spec.dim()), 0.0);
  for (std::size_t i = 0; i < signs.size(); ++i) {
    Vec t = spec.term(spec.start_index() + static_cast<long>(i));
    add_scaled(acc, t, static_cast<double>(signs[i]));
    trace.append(acc);
  }
  return trace;
}

std::vector<Rational> partial_sums_exact(const SequenceSpec& spec, std::span<const Sign> signs) {
  std::size_t d = static_cast<std::size_t>(spec.dim());
  std::vector<Rational> out;
  out.reserve(signs.size() * d);
  std::vector<Rational> acc(d, Rational(0));
  for (std::size_t i = 0; i < signs.size(); ++i) {
    std::vector<Rational> t = spec.term_exact(spec.start_index() + static_cast<long>(i));
    for (std::size_t c = 0; c < d; ++c) {
      if (signs[i] > 0)
        acc[c] += t[c];
      else
        acc[c] -= t[c];
      out.push_back(acc[c]);
    }
  }
  return out;
}

}  // namespace signum
