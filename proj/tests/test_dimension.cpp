#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "signum/dimension.hpp"
#include "signum/errors.hpp"
#include "signum/greedy.hpp"
#include "signum/sequence.hpp"
#include "signum/sign.hpp"

using namespace signum;

TEST_CASE("width-k blocks fall into exactly 2^(k-1) classes under global flip") {
  for (int k = 2; k <= 12; ++k) {
    std::set<std::uint64_t> ids;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << k); ++bits) {
      SignWord block = unpack_sign_word(bits, k);
      ids.insert(theta_class_of(block));
    }
    CHECK(ids.size() == (std::uint64_t{1} << (k - 1)));
    CHECK(theta_class_count(k) == 1 << (k - 1));
    // Ids are exactly 0 .. 2^(k-1)-1.
    CHECK(*ids.begin() == 0);
    CHECK(*ids.rbegin() == (std::uint64_t{1} << (k - 1)) - 1);
  }
}

TEST_CASE("globally flipped blocks land in the same class, others do not collide") {
  for (int k = 2; k <= 8; ++k) {
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << k); ++bits) {
      SignWord block = unpack_sign_word(bits, k);
      SignWord flipped = block;
      for (Sign& s : flipped) s = static_cast<Sign>(-s);
      CHECK(theta_class_of(block) == theta_class_of(flipped));
    }
  }
  CHECK(theta_class_of(parse_sign_word("+-+")) == theta_class_of(parse_sign_word("-+-")));
  CHECK(theta_class_of(parse_sign_word("+-+")) != theta_class_of(parse_sign_word("++-")));
}

TEST_CASE("class representatives start with +1 and round-trip their id") {
  for (int k = 2; k <= 10; ++k) {
    for (std::uint64_t id = 0; id < (std::uint64_t{1} << (k - 1)); ++id) {
      SignWord rep = theta_representative(id, k);
      REQUIRE(rep.size() == static_cast<std::size_t>(k));
      CHECK(rep[0] == 1);
      CHECK(theta_class_of(rep) == id);
    }
  }
}

TEST_CASE("projection keeps complete blocks only and contracts distances") {
  SignWord w = parse_sign_word("+-+-+");
  std::vector<std::uint64_t> proj = theta_project(w, 2);
  CHECK(proj.size() == 2);  // the trailing odd symbol is dropped

  // Blockwise projection is 1-Lipschitz: checked on every pair of words of
  // length 3k. Disagreements inside block b at symbol position i satisfy
  // 2^-(k*b') <= 2^-(i) exactly because b' <= ceil(i/k).
  for (int k = 2; k <= 4; ++k) {
    const int len = 3 * k;
    std::vector<std::vector<std::uint64_t>> projections;
    projections.reserve(std::size_t{1} << len);
    std::vector<SignWord> words;
    words.reserve(std::size_t{1} << len);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << len); ++bits) {
      words.push_back(unpack_sign_word(bits, len));
      projections.push_back(theta_project(words.back(), k));
    }
    for (std::size_t a = 0; a < words.size(); ++a) {
      for (std::size_t b = a; b < words.size(); ++b) {
        double rho = ultrametric_distance(words[a], words[b]).value;
        double theta = theta_distance(projections[a], projections[b], k).value;
        CHECK(theta <= rho);
      }
    }
  }
}

TEST_CASE("class-stream distance follows the width-scaled ultrametric") {
  std::vector<std::uint64_t> a{0, 1, 2};
  std::vector<std::uint64_t> b{0, 2, 2};
  UltraDist d = theta_distance(a, b, 2);
  CHECK(d.value == std::ldexp(1.0, -4));  // first disagreement at class 2
  CHECK_FALSE(d.is_bound);
  std::vector<std::uint64_t> c{0, 1};
  UltraDist e = theta_distance(a, c, 2);
  CHECK(e.value == std::ldexp(1.0, -6));  // agreement on the common prefix
  CHECK(e.is_bound);
}

TEST_CASE("uniform coin measure is consistent and certifies dimension 1 sharply") {
  CylinderMeasure mu = uniform_measure(12);
  REQUIRE(mu.depth() == 12);
  CHECK(mu.levels[0].atoms.size() == 2);
  CHECK(mu.levels[11].atoms.size() == 4096);
  for (int lv = 0; lv < 12; ++lv) CHECK(mu.level_mass(lv) == Rational(1));
  CHECK_FALSE(mu.first_mass_inconsistency().has_value());

  for (int depth : {1, 4, 12}) {
    DimensionCertificate cert = mdp_certify(mu, Rational(1), Rational(2), depth);
    CHECK(cert.certified);
    CHECK(cert.exact_comparison);
    CHECK(cert.first_violation_level == -1);
    // mass 2^-n over diameter 2^-(n+1): the ratio is exactly 2 at every level.
    for (double r : cert.max_ratio) CHECK(r == 2.0);
  }
  // The constant is sharp: anything below 2 already fails at level 1.
  DimensionCertificate tight = mdp_certify(mu, Rational(1), Rational(199, 100), 12);
  CHECK_FALSE(tight.certified);
  CHECK(tight.first_violation_level == 1);
  // s = 3/2 overclaims: the root is excluded, so level 1 is the first check
  // and it already fails (mass 1/2 vs c * 2^-3 = 1/4 * 2).
  DimensionCertificate over = mdp_certify(mu, Rational(3, 2), Rational(2), 1);
  CHECK_FALSE(over.certified);
  CHECK(over.first_violation_level == 1);
  // Any smaller positive exponent stays certified with the same constant.
  CHECK(mdp_certify(mu, Rational(1, 2), Rational(2), 12).certified);
  CHECK(mdp_certify(mu, Rational(1, 64), Rational(2), 12).certified);
}

TEST_CASE("exact certificate comparisons are used exactly for small denominators") {
  CylinderMeasure mu = uniform_measure(6);
  CHECK(mdp_certify(mu, Rational(1, 2), Rational(2), 6).exact_comparison);
  CHECK(mdp_certify(mu, Rational(63, 64), Rational(2), 6).exact_comparison);
  // Denominator beyond the exact window falls back to long-double checks.
  DimensionCertificate fb = mdp_certify(mu, Rational(64, 127), Rational(2), 6);
  CHECK_FALSE(fb.exact_comparison);
  CHECK(fb.certified);  // still comfortably inside the bound
}

TEST_CASE("uniform class measure certifies (k-1)/k with the exact ratio constant") {
  for (int k : {2, 3, 5}) {
    int depth = 12 / (k - 1) < 4 ? 12 / (k - 1) : 4;
    CylinderMeasure mu = uniform_theta_measure(k, depth);
    CHECK(mu.space == CylinderSpace::Theta);
    for (int lv = 0; lv < depth; ++lv) CHECK(mu.level_mass(lv) == Rational(1));
    Rational s(k - 1, k);
    Rational c_exact = pow2(k - 1);
    DimensionCertificate cert = mdp_certify(mu, s, c_exact, depth);
    CHECK(cert.certified);
    CHECK(cert.exact_comparison);
    // mass 2^-(j(k-1)) against diam^s = 2^-((k-1)(j+1)): ratio 2^(k-1) sharp.
    for (double r : cert.max_ratio) CHECK(r == doctest::Approx(std::ldexp(1.0, k - 1)));
    DimensionCertificate below = mdp_certify(mu, s, c_exact - Rational(1, 1000), depth);
    CHECK_FALSE(below.certified);
    CHECK(below.first_violation_level == 1);
  }
}

TEST_CASE("subdivision measure splits mass evenly over the kept block extensions") {
  SequenceSpec spec = SequenceSpec::power_decay(1, {1.0}, {1.0});
  CylinderMeasure mu = build_lambda_measure(spec, LambdaParams{0.0, 3}, 4);
  REQUIRE(mu.depth() == 4);
  CHECK(mu.space == CylinderSpace::Omega);
  CHECK(mu.k == 3);
  for (int lv = 0; lv < 4; ++lv) {
    const CylinderLevel& level = mu.levels[static_cast<std::size_t>(lv)];
    // Each node keeps exactly 2^(k-2) = 2 children with equal mass split.
    CHECK(level.atoms.size() == (std::size_t{1} << (lv + 1)));
    CHECK(level.word_symbols == 3 * (lv + 1));
    for (const CylinderAtom& a : level.atoms) {
      CHECK(a.mass == pow2(-(lv + 1)));
      // Every stored cylinder is a genuine member of the block set.
      SignWord w = unpack_sign_word(a.word, level.word_symbols);
      CHECK(lambda_membership(spec, LambdaParams{0.0, 3}, w).member);
    }
    CHECK(mu.level_mass(lv) == Rational(1));
  }
  CHECK_FALSE(mu.first_mass_inconsistency().has_value());

  // Width 2 keeps a single child per node: one full-mass chain.
  CylinderMeasure chain = build_lambda_measure(spec, LambdaParams{0.0, 2}, 5);
  for (int lv = 0; lv < 5; ++lv) {
    CHECK(chain.levels[static_cast<std::size_t>(lv)].atoms.size() == 1);
    CHECK(chain.levels[static_cast<std::size_t>(lv)].atoms[0].mass == Rational(1));
  }
}

TEST_CASE("subdivision measure certifies the claimed exponent at width 5") {
  SequenceSpec spec = SequenceSpec::power_decay(1, {1.0}, {1.0});
  CylinderMeasure mu = build_lambda_measure(spec, LambdaParams{0.0, 5}, 3);
  DimensionCertificate cert = mdp_certify(mu, Rational(3, 5), Rational(32), 3);
  CHECK(cert.certified);
  CHECK(cert.exact_comparison);
}

TEST_CASE("mass inconsistencies are located at the offending parent") {
  CylinderMeasure mu = uniform_measure(3);
  mu.levels[2].atoms[0].mass = Rational(1, 4);  // child no longer sums to its parent
  auto bad = mu.first_mass_inconsistency();
  REQUIRE(bad.has_value());
  CHECK(bad->first == 1);   // stored index of the parent level
  CHECK(bad->second == 0);  // parent word of the tampered atom

  CylinderMeasure root = uniform_measure(2);
  for (CylinderAtom& a : root.levels[0].atoms) a.mass = Rational(1, 3);
  auto r = root.first_mass_inconsistency();
  REQUIRE(r.has_value());
  CHECK(r->first == 0);
  CHECK(r->second == 0);
}

TEST_CASE("measure builders enforce their enumeration budgets") {
  CHECK_THROWS_AS(uniform_measure(23), BudgetError);
  CHECK_THROWS_AS(uniform_theta_measure(9, 3), BudgetError);
  CHECK_THROWS_AS(uniform_theta_measure(1, 3), PreconditionError);
  CHECK_THROWS_AS(mdp_certify(uniform_measure(3), Rational(1), Rational(2), 9),
                  PreconditionError);
  CHECK_THROWS_AS(mdp_certify(uniform_measure(3), Rational(-1), Rational(2), 3),
                  PreconditionError);
  CHECK_THROWS_AS(mdp_certify(uniform_measure(3), Rational(1), Rational(0), 3),
                  PreconditionError);
}
