#pragma once

#include <vector>

#include "signum/levy.hpp"
#include "signum/sequence.hpp"
#include "signum/sign.hpp"
#include "signum/trace.hpp"
#include "signum/vec.hpp"

namespace signum {

struct StageRecord {
  int stage;               // m, 1-based
  long begin;              // first index of the stage window
  long end;                // exclusive; stage closed at q_m = end
  double tolerance;        // per-direction greedy tolerance 2^-(m+1)
  Vec stage_targets;       // direction coordinates of the residual entering the stage
  double residual_norm;    // ||target - S||_2 at the stage boundary
  double claimed_bound;    // C_1/2 for stage 1, (d + K0)/2^m after
  double max_within_norm;  // max ||S_l - target||_2 over the stage window
  double within_bound;     // d/2^(m-2) + C_(m-1)/2^(m-1); NaN for stage 1
  bool closed;             // false when the horizon ran out mid-stage
};

struct TargetPlan {
  Vec target;
  std::vector<Vec> directions;
  double gram_det;
  Vec beta0;                         // direction coordinates of target minus head sum
  double k0;                         // balancer telescoping constant 2 * C_emp
  std::vector<double> omega_mass;    // K_i per direction, within the horizon
  double c_first;                    // sum_i (1 + K_i) + K0
  double c_first_coarse;             // 2 * c_first; the stagewise estimate before tightening
  double c_later;                    // d + K0
  long head_end;                     // indices before this are the all-plus head
  bool complete;                     // all requested stages closed within the horizon
  std::vector<StageRecord> stages;
  std::vector<std::vector<long>> carriers;  // per direction, ascending, within the signed window
  long filler_count;
};

struct HitResult {
  SignWord signs;  // covers [start, q_M); q_M = stages.back().end
  TargetPlan plan;
  PartialSumTrace trace;
  std::vector<ProvenanceSpan> provenance;
};

/// Stagewise construction steering the partial sums to the target along the
/// declared accumulation directions: each direction's subsequence is signed
/// greedily toward its share of the residual, everything else is balanced,
/// and stage m closes once term norms drop below 2^-m, every direction sits
/// within 2^-(m+1) of its stage target, and the within-horizon transverse
/// mass past the boundary is below 2^-m. Residuals then shrink like
/// C_m / 2^m with the logged constants.
HitResult hit_target(const SequenceSpec& spec, const Vec& target, int stages, long horizon);

struct BlockTriple {
  long block;                     // 0-based
  std::vector<long> carrier;      // carrier index per direction, -1 when absent
  std::vector<long> filler;       // tops carriers up to exactly d indices
  std::vector<long> free_indices; // exactly k - d indices
};

struct TriplePartition {
  int k;
  int levels;
  long window_end;  // partition covers [start, window_end)
  std::vector<BlockTriple> blocks;
  std::vector<long> class_counts;  // distinct free-coordinate class words per level
  std::vector<long> class_floor;   // claimed floor 2^(level*(k-d-1))
  SignWord demo_signs;             // one assembled signing of the window
  std::vector<ProvenanceSpan> provenance;
  double demo_residual;            // ||target - S_window||_2 for the demo signs
};

/// Splits each width-k block into carrier / filler / free indices (exactly d
/// carrier-or-filler slots per block, k-d free), then counts the distinct
/// free-coordinate block classes per level by exhaustive enumeration.
/// Budget: levels*(k-d) <= 24.
TriplePartition partition_for_dimension(const SequenceSpec& spec, const Vec& target, int k,
                                        int levels);

}  // namespace signum
