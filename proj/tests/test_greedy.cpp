#include <doctest.h>

#include <cmath>
#include <vector>

#include "signum/blocks.hpp"
#include "signum/errors.hpp"
#include "signum/greedy.hpp"
#include "signum/sequence.hpp"
#include "signum/sign.hpp"

using namespace signum;

namespace {
SequenceSpec harmonic() { return SequenceSpec::power_decay(1, {1.0}, {1.0}); }
}  // namespace

TEST_CASE("greedy rule takes +1 exactly when the running sum is at or below the target") {
  // 1/n toward 0: S runs 1, 1/2, 1/6, -1/12, 7/60 -> signs + - - - +.
  GreedyRun run = greedy_signs(harmonic(), 0.0, 5);
  CHECK(sign_word_to_string(run.signs) == "+---+");
  CHECK(run.trace.sum_at(4)[0] == doctest::Approx(7.0 / 60).epsilon(1e-14));
  CHECK(run.trace.size() == 5);
  CHECK(run.trace.index_at(0) == 1);
}

TEST_CASE("greedy deviation bound holds at every step and is attained at the boundary") {
  // Target 0 with first term 1: the first deviation equals the bound exactly,
  // which is why the bound is recorded non-strictly.
  GreedyRun run = greedy_signs(harmonic(), 0.0, 2000);
  CHECK(run.bound == doctest::Approx(1.0));
  CHECK(run.max_abs_dev == doctest::Approx(1.0));
  CHECK(run.max_abs_dev <= run.bound);
  for (double target : {3.14159, -5.0, 0.25}) {
    GreedyRun r = greedy_signs(harmonic(), target, 5000);
    CHECK(r.bound == doctest::Approx(std::fabs(target) + 1.0));
    CHECK(r.max_abs_dev <= r.bound);
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      CHECK(std::fabs(r.trace.sum_at(i)[0] - target) <= r.bound);
    }
  }
}

TEST_CASE("after the first crossing the greedy deviation contracts to the term scale") {
  GreedyRun run = greedy_signs(harmonic(), 3.14159, 100000);
  REQUIRE(run.first_crossing > 0);
  double tail_scale = 1.0 / static_cast<double>(run.first_crossing);
  for (std::size_t i = 0; i < run.trace.size(); ++i) {
    if (run.trace.index_at(i) < run.first_crossing) continue;
    CHECK(std::fabs(run.trace.sum_at(i)[0] - 3.14159) <= tail_scale + 1e-12);
  }
}

TEST_CASE("first stable position marks where the trace enters its final delta tube") {
  GreedyRun run = greedy_signs(harmonic(), 3.141592653589793, 100000);
  long pos = first_stable_position(run.trace, 1e-3);
  REQUIRE(pos >= 0);
  CHECK(run.trace.index_at(static_cast<std::size_t>(pos)) <= 10000);
  for (std::size_t i = static_cast<std::size_t>(pos); i < run.trace.size(); ++i) {
    CHECK(std::fabs(run.trace.sum_at(i)[0] - 3.141592653589793) < 1e-3);
  }
  if (pos > 0) {
    CHECK(std::fabs(run.trace.sum_at(static_cast<std::size_t>(pos - 1))[0] -
                    3.141592653589793) >= 1e-3);
  }
  // A tube nothing reaches: no stable position.
  CHECK(first_stable_position(run.trace, 0.0) == -1);
}

TEST_CASE("greedy needs a certified divergent 1-D sequence") {
  CHECK_THROWS_AS(greedy_signs(SequenceSpec::geometric(1, {1.0}, Rational(1, 2)), 0.0, 10),
                  PreconditionError);
  SequenceSpec two_d = SequenceSpec::power_decay(1, {1.0, 1.0}, {1.0, 1.0});
  CHECK_THROWS_AS(greedy_signs(two_d, 0.0, 10), PreconditionError);
  CHECK_THROWS_AS(greedy_signs(harmonic(), 0.0, 0), PreconditionError);
}

TEST_CASE("block membership checks steering and magnitude per completed block") {
  // 1/n, L = 0, k = 3. s_0 = 0 makes the steering product 0 for any first
  // block, so the first block is decided by the magnitude condition alone:
  // |s_1| >= |a_1| = 1.
  LambdaParams params{0.0, 3};
  SequenceSpec spec = harmonic();

  LambdaReport vac = lambda_membership(spec, params, SignWord{});
  CHECK(vac.member);  // no completed blocks: vacuously true

  LambdaReport r1 = lambda_membership(spec, params, parse_sign_word("-++"));
  CHECK_FALSE(r1.member);  // s_1 = -1/6, too small in magnitude
  CHECK(r1.first_violation_block == 0);
  CHECK(r1.violated_condition == 2);

  LambdaReport r2 = lambda_membership(spec, params, parse_sign_word("+--"));
  CHECK_FALSE(r2.member);  // s_1 = 1/6, same defect on the plus side
  CHECK(r2.violated_condition == 2);

  LambdaReport r3 = lambda_membership(spec, params, parse_sign_word("++-"));
  CHECK(r3.member);  // s_1 = 7/6: magnitude 7/6 >= 1, steering 0 * 7/6 <= 0

  // Second block of ++- ++-: s_1 = 7/6, s_2 = 7/6 + 1/4 + 1/5 - 1/6; the
  // increment is positive while s_1 - L > 0, so steering fails.
  LambdaReport r4 = lambda_membership(spec, params, parse_sign_word("++-++-"));
  CHECK_FALSE(r4.member);
  CHECK(r4.first_violation_block == 1);
  CHECK(r4.violated_condition == 1);

  CHECK_THROWS_AS(lambda_membership(spec, params, parse_sign_word("++")), PreconditionError);
}

TEST_CASE("level-1 block census at width 3 finds exactly the four big-step words") {
  // Enumerating all 8 sign patterns of (1, 1/2, 1/3): only +++, ++-, --+,
  // --- move the sum by at least 1.
  LambdaCount c = lambda_count(harmonic(), LambdaParams{0.0, 3}, 1);
  REQUIRE(c.survivors.size() == 1);
  CHECK(c.survivors[0] == 4);
  CHECK(c.min_branching[0] == 4);
  REQUIRE(c.deepest_words.size() == 4);
  CHECK(c.deepest_words[0] == pack_sign_word(parse_sign_word("+++")));
  CHECK(c.deepest_words[1] == pack_sign_word(parse_sign_word("++-")));
  CHECK(c.deepest_words[2] == pack_sign_word(parse_sign_word("--+")));
  CHECK(c.deepest_words[3] == pack_sign_word(parse_sign_word("---")));
}

TEST_CASE("every survivor branches at least 2^(k-2) ways into the next level") {
  for (int k : {2, 3, 4}) {
    int levels = 12 / k;
    LambdaCount c = lambda_count(harmonic(), LambdaParams{0.0, k}, levels);
    long floor = k >= 2 ? (1L << (k - 2)) : 1;
    for (int lv = 0; lv < levels; ++lv) {
      CHECK(c.min_branching[static_cast<std::size_t>(lv)] >= floor);
      long lower = 1;
      for (int i = 0; i <= lv; ++i) lower *= floor;
      CHECK(c.survivors[static_cast<std::size_t>(lv)] >= lower);
    }
    // Survivors at each level are genuine members.
    for (std::uint64_t w : c.deepest_words) {
      SignWord word = unpack_sign_word(w, k * levels);
      CHECK(lambda_membership(harmonic(), LambdaParams{0.0, k}, word).member);
    }
  }
}

TEST_CASE("block census stays within its enumeration budget") {
  CHECK_THROWS_AS(lambda_count(harmonic(), LambdaParams{0.0, 5}, 5), BudgetError);
  CHECK_THROWS_AS(lambda_count(harmonic(), LambdaParams{0.0, 1}, 1), PreconditionError);
}

TEST_CASE("exact block increments enumerate all 2^k signings of one block") {
  BlockIncrements bi = block_increments_exact(harmonic(), BlockScheme(1, 2), 0);
  REQUIRE(bi.inc.size() == 4);
  CHECK(bi.inc[0] == Rational(3, 2));   // ++ on (1, 1/2)
  CHECK(bi.inc[1] == Rational(1, 2));   // +-
  CHECK(bi.inc[2] == Rational(-1, 2));  // -+
  CHECK(bi.inc[3] == Rational(-3, 2));  // --
  CHECK(bi.max_abs_term == Rational(1));
}

TEST_CASE("block survival is decided exactly on the boundary") {
  // s_prev exactly at L: steering product is 0, which passes (<= 0); an
  // increment exactly at the magnitude floor passes too (>=).
  CHECK(lambda_block_survives(Rational(0), Rational(1), Rational(0), Rational(1)));
  CHECK_FALSE(lambda_block_survives(Rational(0), Rational(1, 2), Rational(0), Rational(1)));
  // Moving away from L with s_prev above it: steering fails.
  CHECK_FALSE(lambda_block_survives(Rational(1), Rational(2), Rational(0), Rational(1)));
  // Moving toward L from above: fine.
  CHECK(lambda_block_survives(Rational(1), Rational(-1), Rational(0), Rational(2)));
}
