#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "signum/blocks.hpp"
#include "signum/rational.hpp"
#include "signum/sequence.hpp"
#include "signum/sign.hpp"
#include "signum/trace.hpp"

namespace signum {

/// Result of the one-dimensional greedy rule eps_n = +1 iff S_{n-1} <= x.
struct GreedyRun {
  SignWord signs;
  PartialSumTrace trace;
  double bound;           // |x| + sup_n |a_n|; every |x - S_k| stays <= bound
  double max_abs_dev;     // max over steps of |x - S_k|
  long first_crossing;    // first index where S_k - x changes sign or hits 0; -1 if never
};

/// Greedy signs toward a target for a certified non-summable 1-D null
/// sequence. The deviation bound |x - S_k| <= |x| + sup|a_n| is attained
/// with equality in boundary cases (x = 0 with a maximal first term), so it
/// is recorded non-strictly.
GreedyRun greedy_signs(const SequenceSpec& spec, double target, long depth);

/// Smallest trace position p such that dist(S_k, target) < delta for every
/// k from p to the end; -1 when even the final entry misses delta.
long first_stable_position(const PartialSumTrace& trace, double delta);

/// Block set for the prescribed-sum construction: s_j = S_{jk}, conditions
/// (s_j - L)(s_{j+1} - s_j) <= 0 and |s_{j+1} - s_j| >= |a_{m(j)}| per block.
/// The source proof displays ">= 0" in one restatement of the first
/// condition; the definition's "<= 0" is what makes blocks steer toward L,
/// so that is what is implemented.
struct LambdaParams {
  double target;  // L
  int k;          // block width >= 2
};

struct LambdaReport {
  bool member;
  long first_violation_block;  // -1 when member
  int violated_condition;     // 0 none, 1 steering, 2 magnitude
};

/// Checks both conditions on every completed block of a length-jk word.
LambdaReport lambda_membership(const SequenceSpec& spec, const LambdaParams& params,
                               std::span<const Sign> signs);

struct LambdaCount {
  int k;
  int levels;
  std::vector<long> survivors;      // survivors[i] = words in Lambda_{i+1}, i = 0..levels-1
  std::vector<long> min_branching;  // min over level-i parents of surviving extensions
  /// Surviving words at the deepest level, packed: bit (len-1-t) of an entry
  /// is 0 for +1 at position t, 1 for -1 (numeric order = lex order with
  /// +1 < -1). Parents are prefixes (higher bits).
  std::vector<std::uint64_t> deepest_words;
};

/// Exhaustive per-level enumeration of Lambda words. Budget: levels*k <= 24.
/// Uses exact rational partial sums whenever the spec supports them, so
/// boundary cases (block sums landing exactly on L) are decided correctly.
LambdaCount lambda_count(const SequenceSpec& spec, const LambdaParams& params, int levels);

/// Exposed for the measure construction: the 2^k signed block increments of
/// block j (pattern bit (k-1-t) = sign of term begin+t) and |a_{m(j)}|.
struct BlockIncrements {
  std::vector<Rational> inc;  // size 2^k
  Rational max_abs_term;      // |a_{m(j)}|
};
BlockIncrements block_increments_exact(const SequenceSpec& spec, const BlockScheme& scheme, long j);

/// Exact block survival test shared by lambda_count and the measure builder.
bool lambda_block_survives(const Rational& s_prev, const Rational& s_next, const Rational& L,
                           const Rational& max_abs_term);

}  // namespace signum
