#pragma once

#include <string>
#include <utility>
#include <vector>

#include "signum/rational.hpp"
#include "signum/sequence.hpp"

namespace signum {

struct RationalInterval {
  Rational lo;
  Rational hi;
};

/// Certified cover of the set of achievable signed sums: every achievable
/// value lies within tail_radius of one of the 2^depth finite sums, so the
/// union of the merged closed intervals covers the whole set, and the open
/// gaps between them are certified to contain no achievable value at all.
/// Touching intervals merge, so a single interval means the cover is
/// connected at this resolution.
struct AchievementCover {
  int depth;
  Rational tail_radius;
  long distinct_sums;
  Rational min_sum;
  Rational max_sum;
  std::vector<RationalInterval> intervals;
  std::vector<RationalInterval> gaps;
  std::string classification;  // "interval" or "gapped"
  bool exact;                  // exact arithmetic end to end
};

/// Enumerates all 2^depth sign patterns of a certified absolutely summable
/// 1-D sequence. Budget: depth <= 22.
AchievementCover explore(const SequenceSpec& spec, int depth);

/// Two-dimensional variant: achievable sums bucketed on a grid whose cell
/// edge is the tail radius. Floating point; reports occupancy, not gaps.
struct GridCover {
  int depth;
  double cell;
  long occupied;
  double min_x, max_x, min_y, max_y;
  std::vector<std::pair<long, long>> cells;  // sorted
};

GridCover explore_grid(const SequenceSpec& spec, int depth);

/// Greedy witnesses for a batch of 1-D targets on a non-summable sequence.
struct DensityProbe {
  double target;
  bool witnessed;    // partial sums settle within delta by the horizon
  long settled_at;   // first trace position after the last delta violation
  double final_dev;
};

std::vector<DensityProbe> probe_density(const SequenceSpec& spec,
                                        const std::vector<double>& targets, double delta,
                                        long horizon);

}  // namespace signum
