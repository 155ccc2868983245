#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "signum/blocks.hpp"
#include "signum/errors.hpp"
#include "signum/rational.hpp"
#include "signum/rng.hpp"
#include "signum/sequence.hpp"
#include "signum/sign.hpp"
#include "signum/trace.hpp"
#include "signum/vec.hpp"

using namespace signum;

TEST_CASE("rational parsing accepts integers, fractions and finite decimals") {
  CHECK(parse_rational("3/5") == Rational(3, 5));
  CHECK(parse_rational("-2") == Rational(-2));
  CHECK(parse_rational("-0.125") == Rational(-1, 8));
  CHECK(parse_rational("0.6") == Rational(3, 5));
  // No internal trimming and no floats: callers strip whitespace themselves.
  CHECK_FALSE(parse_rational(" 7/2 ").has_value());
  CHECK_FALSE(parse_rational("1e5").has_value());
  CHECK_FALSE(parse_rational("abc").has_value());
  CHECK_FALSE(parse_rational("1/0").has_value());
  CHECK_FALSE(parse_rational("").has_value());
}

TEST_CASE("rational printing round-trips through parsing") {
  for (const Rational& r : {Rational(0), Rational(-7, 3), Rational(1, 1 << 20), Rational(59049)}) {
    CHECK(parse_rational(rational_to_string(r)) == r);
  }
}

TEST_CASE("pow2 and rational_pow agree with repeated multiplication") {
  CHECK(pow2(0) == Rational(1));
  CHECK(pow2(-3) == Rational(1, 8));
  CHECK(pow2(5) == Rational(32));
  CHECK(rational_pow(Rational(1, 3), 4) == Rational(1, 81));
  CHECK(rational_pow(Rational(-2, 3), 3) == Rational(-8, 27));
  CHECK(rational_pow(Rational(5, 7), 0) == Rational(1));
}

TEST_CASE("sign words pack so numeric order matches lexicographic order") {
  // +1 packs as bit 0, so all-plus is the numerically smallest word.
  SignWord w = parse_sign_word("+-+");
  std::uint64_t packed = pack_sign_word(w);
  CHECK(packed == 0b010);
  SignWord back = unpack_sign_word(packed, 3);
  CHECK(back == w);
  CHECK(pack_sign_word(parse_sign_word("+++")) < pack_sign_word(parse_sign_word("++-")));
  CHECK(pack_sign_word(parse_sign_word("++-")) < pack_sign_word(parse_sign_word("-++")));
  CHECK(sign_word_to_string(w) == "+-+");
  CHECK(parse_sign_word("+1,-1,+1") == w);
}

TEST_CASE("sign distance satisfies the strong triangle inequality exhaustively") {
  // All triples of length-8 words would be 2^24 cases; sampling every word
  // against shifted copies covers the same disagreement structure. Use full
  // enumeration at length 5 (32^3 = 32768 triples) plus the diameter law.
  const int len = 5;
  std::vector<SignWord> words;
  for (std::uint64_t p = 0; p < (1u << len); ++p) words.push_back(unpack_sign_word(p, len));
  for (const SignWord& x : words)
    for (const SignWord& y : words)
      for (const SignWord& z : words) {
        double dxy = ultrametric_distance(x, y).value;
        double dxz = ultrametric_distance(x, z).value;
        double dzy = ultrametric_distance(z, y).value;
        CHECK(dxy <= std::max(dxz, dzy));
      }
}

TEST_CASE("words sharing a length-n prefix sit within the cylinder diameter") {
  // Diameter of a cylinder on n symbols is 2^-(n+1), attained by extensions
  // that disagree immediately after the shared prefix.
  Rng rng(99, 0);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + static_cast<int>(rng.next_below(10));
    int extra = static_cast<int>(rng.next_below(6));
    SignWord prefix = unpack_sign_word(rng.next_below(1u << n), n);
    SignWord x = prefix, y = prefix;
    for (int i = 0; i < extra; ++i) {
      x.push_back(rng.next_below(2) ? Sign{1} : Sign{-1});
      y.push_back(rng.next_below(2) ? Sign{1} : Sign{-1});
    }
    UltraDist d = ultrametric_distance(x, y);
    CHECK(d.value <= std::ldexp(1.0, -(n + 1)));
  }
  // Immediate disagreement after the prefix attains the diameter exactly.
  SignWord a = parse_sign_word("++-+");
  SignWord b = parse_sign_word("++--");
  CHECK(ultrametric_distance(a, b).value == std::ldexp(1.0, -4));
  CHECK_FALSE(ultrametric_distance(a, b).is_bound);
  // Agreement over the full common length only bounds the distance.
  SignWord c = parse_sign_word("++");
  CHECK(ultrametric_distance(a, c).value == std::ldexp(1.0, -3));
  CHECK(ultrametric_distance(a, c).is_bound);
  CHECK(ultrametric_distance(a, a, true).value == 0.0);
}

TEST_CASE("triadic geometric partial sum with one leading plus is exact") {
  // a_n = 3^-n from n = 1, signs (+, -, -, ..., -) through n = 10:
  // S_10 = 1/3 - sum_{n=2..10} 3^-n = 1/6 + 3^-10/2 = 9842/59049.
  SequenceSpec spec = SequenceSpec::geometric(1, {1.0}, Rational(1, 3));
  Rational s(0);
  for (long n = 1; n <= 10; ++n) {
    Rational t = spec.term_exact(n)[0];
    s += (n == 1) ? t : -t;
  }
  CHECK(s == Rational(9842, 59049));
  CHECK(to_double(s) == doctest::Approx(0.16667513421057087).epsilon(1e-15));
}

TEST_CASE("power decay terms follow coeff * n^-alpha per coordinate") {
  SequenceSpec spec = SequenceSpec::power_decay(1, {1.0, 1.0}, {1.0, 2.0});
  Vec t3 = spec.term(3);
  CHECK(t3[0] == doctest::Approx(1.0 / 3).epsilon(1e-16));
  CHECK(t3[1] == doctest::Approx(1.0 / 9).epsilon(1e-16));
  CHECK(spec.term_exact(3)[0] == Rational(1, 3));
  CHECK(spec.term_exact(3)[1] == Rational(1, 9));
  CHECK(spec.certified_non_l1());      // first coordinate diverges
  CHECK_FALSE(spec.certified_l1());
  CHECK(spec.is_null());
  CHECK_THROWS_AS(SequenceSpec::power_decay(0, {1.0}, {1.0}), PreconditionError);
  CHECK_THROWS_AS(spec.term(0), PreconditionError);
}

TEST_CASE("alternating wrapper flips the sign of the inner term at odd n") {
  SequenceSpec inner = SequenceSpec::power_decay(1, {1.0}, {1.0});
  SequenceSpec spec = SequenceSpec::alternating(inner);
  CHECK(spec.term(1)[0] == doctest::Approx(-1.0));
  CHECK(spec.term(2)[0] == doctest::Approx(0.5));
  CHECK(spec.term_exact(3)[0] == Rational(-1, 3));
  CHECK(spec.certified_non_l1());
}

TEST_CASE("interleaved subs are evaluated at the global index, round-robin") {
  SequenceSpec s0 = SequenceSpec::power_decay(1, {1.0, 0.0}, {1.0, 1.0});
  SequenceSpec s1 = SequenceSpec::power_decay(1, {0.0, 1.0}, {1.0, 1.0});
  SequenceSpec spec = SequenceSpec::interleaved(1, {s0, s1});
  CHECK(spec.term(1) == Vec{1.0, 0.0});
  CHECK(spec.term(2) == Vec{0.0, 0.5});
  CHECK(spec.term(3) == Vec{1.0 / 3, 0.0});
  CHECK(spec.term(4) == Vec{0.0, 0.25});
  CHECK(spec.certified_non_l1());
  CHECK(spec.dim() == 2);
}

TEST_CASE("explicit lists extend with zeros and can declare divergence") {
  SequenceSpec spec = SequenceSpec::explicit_list(1, 0, {{1.0}, {-0.5}});
  CHECK(spec.term(0)[0] == 1.0);
  CHECK(spec.term(1)[0] == -0.5);
  CHECK(spec.term(2)[0] == 0.0);  // implicit zero past the list
  CHECK(spec.term(100)[0] == 0.0);
  CHECK(spec.certified_l1());
  CHECK(spec.tail_bound_exact(1)[0] == Rational(0));
  SequenceSpec div = SequenceSpec::explicit_list(1, 0, {{1.0}}, true);
  CHECK(div.certified_non_l1());
  CHECK_FALSE(div.certified_l1());
}

TEST_CASE("desk-growth two-coordinate blocks switch scale at the computed boundaries") {
  // Block k covers (n_{k-1}, n_k] with n_k = n_{k-1} + 2^(g(k)+1), g(k) = k^2.
  // n_1 = 4, n_2 = 36; inside block k the term is ((-1)^n 2^-g(k), (-1)^n 2^-k).
  SequenceSpec spec = SequenceSpec::liouville(1, LiouvilleGrowth::Desk);
  CHECK(spec.term(1) == Vec{-0.5, -0.5});
  CHECK(spec.term(4) == Vec{0.5, 0.5});
  CHECK(spec.term(5) == Vec{-1.0 / 16, -0.25});
  CHECK(spec.term(36) == Vec{1.0 / 16, 0.25});
  CHECK(spec.term(37) == Vec{-1.0 / 512, -0.125});
  CHECK(spec.is_null());
  CHECK(spec.certified_non_l1());  // second coordinate contributes 2^-k per term over 2^(k^2+1) terms
  CHECK_FALSE(spec.certified_l1());
}

TEST_CASE("seeded log-decay terms are unit directions scaled by 1/log(n+2)") {
  SequenceSpec spec = SequenceSpec::log_decay(0, 7);
  CHECK(spec.dim() == 2);
  for (long n : {0L, 1L, 17L, 4096L}) {
    Vec t = spec.term(n);
    double r = 1.0 / std::log(static_cast<double>(n) + 2.0);
    CHECK(norm2(t) == doctest::Approx(r).epsilon(1e-14));
    CHECK(spec.envelope(n) == r);
  }
  // Same seed, fresh instance: identical terms (counter generator).
  SequenceSpec again = SequenceSpec::log_decay(0, 7);
  CHECK(again.term(123) == spec.term(123));
  // Different seed: different angle almost surely.
  SequenceSpec other = SequenceSpec::log_decay(0, 8);
  CHECK(other.term(123) != spec.term(123));
  CHECK(spec.is_null());
  CHECK_FALSE(spec.certified_non_l1());
  CHECK_FALSE(spec.certified_l1());
  CHECK_FALSE(spec.exact_capable());
  CHECK_THROWS_AS(spec.term_exact(0), PreconditionError);
  CHECK_THROWS_AS(SequenceSpec(1, 0, LogDecayFamily{7}), PreconditionError);
}

TEST_CASE("envelopes are nonincreasing and dominate every later term norm") {
  std::vector<SequenceSpec> specs;
  specs.push_back(SequenceSpec::power_decay(1, {1.0}, {1.0}));
  specs.push_back(SequenceSpec::geometric(0, {2.0}, Rational(1, 2)));
  specs.push_back(SequenceSpec::liouville(1, LiouvilleGrowth::Desk));
  specs.push_back(SequenceSpec::log_decay(0, 3));
  specs.push_back(SequenceSpec::interleaved(
      1, {SequenceSpec::power_decay(1, {1.0, 0.0}, {1.0, 1.0}),
          SequenceSpec::power_decay(1, {0.0, 1.0}, {2.0, 2.0})}));
  for (const SequenceSpec& spec : specs) {
    for (long n = spec.start_index(); n < spec.start_index() + 120; ++n) {
      CHECK(spec.envelope(n) >= spec.envelope(n + 1));
      for (long m = n; m < n + 40; ++m) {
        CHECK(norm2(spec.term(m)) <= spec.envelope(n) * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("exact geometric tail bound equals the closed form") {
  SequenceSpec spec = SequenceSpec::geometric(1, {1.0}, Rational(1, 3));
  // sum_{n>N} 3^-n = 3^-N / 2.
  for (long N : {1L, 5L, 12L}) {
    CHECK(spec.tail_bound_exact(N)[0] == rational_pow(Rational(1, 3), N) / 2);
  }
  CHECK(spec.certified_l1());
  SequenceSpec quad = SequenceSpec::power_decay(1, {1.0}, {2.0});
  CHECK(quad.certified_l1());
  // Integral bound: sum_{n>N} n^-2 < 1/N; it must still dominate the true tail.
  CHECK(quad.tail_bound_exact(10)[0] == Rational(1, 10));
  double true_tail = 0.0;
  for (long n = 2000; n > 10; --n) true_tail += 1.0 / (static_cast<double>(n) * n);
  CHECK(true_tail < to_double(quad.tail_bound_exact(10)[0]));
}

TEST_CASE("first_index_below finds the envelope crossing or reports the cap") {
  SequenceSpec spec = SequenceSpec::power_decay(1, {1.0}, {1.0});
  CHECK(spec.first_index_below(1e-3, 1000000) == 1000);
  CHECK(spec.first_index_below(2.0, 1000000) == 1);
  CHECK(spec.first_index_below(1e-12, 1000) == -1);  // cap too small
}

TEST_CASE("incremental float partial sums track the exact ones to 2^-40 relative") {
  SequenceSpec spec = SequenceSpec::geometric(0, {1.0, -1.0}, Rational(3, 7));
  Rng rng(4242, 0);
  Vec sum{0.0, 0.0};
  std::vector<Rational> exact{Rational(0), Rational(0)};
  for (long n = 0; n < 200; ++n) {
    double eps = rng.next_below(2) ? 1.0 : -1.0;
    Vec t = spec.term(n);
    add_scaled(sum, t, eps);
    std::vector<Rational> te = spec.term_exact(n);
    for (int c = 0; c < 2; ++c) exact[static_cast<std::size_t>(c)] += Rational(eps) * te[static_cast<std::size_t>(c)];
    for (int c = 0; c < 2; ++c) {
      double e = to_double(exact[static_cast<std::size_t>(c)]);
      double scale = std::max(1.0, std::fabs(e));
      CHECK(std::fabs(sum[static_cast<std::size_t>(c)] - e) <= scale * std::ldexp(1.0, -40));
    }
  }
}

TEST_CASE("trace stores indexed sums, distances and running norms consistently") {
  PartialSumTrace tr(2, 5, Vec{1.0, 1.0});
  tr.append(Vec{0.0, 1.0});
  tr.append(Vec{2.0, 1.0});
  CHECK(tr.size() == 2);
  CHECK(tr.index_at(0) == 5);
  CHECK(tr.index_at(1) == 6);
  CHECK(tr.dist_at(0) == doctest::Approx(1.0));
  CHECK(tr.dist_at(1) == doctest::Approx(1.0));
  CHECK(tr.running_max_at(0) == doctest::Approx(1.0));
  CHECK(tr.running_max_at(1) == doctest::Approx(std::sqrt(5.0)));
  CHECK(tr.max_norm() == doctest::Approx(std::sqrt(5.0)));
  CHECK_THROWS_AS(PartialSumTrace(2, 0, Vec{1.0}), PreconditionError);
}

TEST_CASE("block scheme maps indices to blocks and flags the largest term") {
  BlockScheme scheme(1, 3);
  CHECK(scheme.block_begin(0) == 1);
  CHECK(scheme.block_end(0) == 4);
  CHECK(scheme.block_of(4) == 1);
  SequenceSpec spec = SequenceSpec::power_decay(1, {1.0}, {1.0});
  CHECK(scheme.max_term_index(spec, 0) == 1);  // 1/n decreasing: first index wins
  CHECK(scheme.max_term_index(spec, 2) == 7);
  CHECK_THROWS_AS(BlockScheme(0, 0), PreconditionError);
}

TEST_CASE("counter rng is reproducible, stream-separated and uniform-ranged") {
  Rng a(1, 0), b(1, 0), c(2, 0), d(1, 1);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() == b.next_u64());
  Rng a2(1, 0);
  CHECK(a2.next_u64() != c.next_u64());
  CHECK(Rng(1, 0).next_u64() != d.next_u64());
  Rng u(77, 0);
  for (int i = 0; i < 1000; ++i) {
    double x = u.next_double();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(u.next_below(10) < 10);
  }
}
