#pragma once

#include <cmath>

#include "signum/errors.hpp"
#include "signum/sequence.hpp"

namespace signum {

/// Width-k partition of the index set into I_j = {start + jk, ...,
/// start + jk + k - 1} for j = 0, 1, ...
struct BlockScheme {
  long start;
  int k;

  BlockScheme(long start_index, int width) : start(start_index), k(width) {
    if (width < 1) throw PreconditionError("block width must be >= 1");
  }

  long block_begin(long j) const { return start + j * k; }
  long block_end(long j) const { return start + (j + 1) * k; }  // exclusive
  long block_of(long n) const { return (n - start) / k; }

  /// Index m(j) in I_j maximizing |a_n| (1-D) / ||a_n||; ties go to the
  /// smallest index so certificates are reproducible.
  long max_term_index(const SequenceSpec& spec, long j) const {
    long best = block_begin(j);
    double best_norm = -1.0;
    for (long n = block_begin(j); n < block_end(j); ++n) {
      double v = norm2(spec.term(n));
      if (v > best_norm) {
        best_norm = v;
        best = n;
      }
    }
    return best;
  }
};

}  // namespace signum
