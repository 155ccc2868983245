#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "signum/sequence.hpp"
#include "signum/sign.hpp"
#include "signum/trace.hpp"
#include "signum/vec.hpp"

namespace signum {

/// Finite-horizon evidence for candidate accumulation directions: the mass
/// sum ||a_n|| over terms whose direction a_n/||a_n|| falls within each probe
/// radius, sampled at horizons N, 2N and 4N. The growth flag is a heuristic
/// screen (additive margin per horizon doubling); the checkable object is the
/// block decomposition below.
struct DirectionalMassReport {
  long horizon;
  std::vector<Vec> probes;
  std::vector<double> radii;
  // mass[p][r] = accumulated mass for probe p, radius r at N, 2N, 4N
  std::vector<std::vector<std::array<double, 3>>> mass;
  std::vector<bool> candidate;  // growth at the smallest radius
  bool all_zero;
};

DirectionalMassReport directional_mass(const SequenceSpec& spec, long horizon,
                                       std::vector<Vec> probes, std::vector<double> radii);

/// Deterministic probe sets: the two signs for d = 1, equally spaced unit
/// vectors for d = 2, seeded gaussian directions for d >= 3.
std::vector<Vec> probe_directions(int dim, int count, std::uint64_t seed);

struct LevyBlock {
  int index;                  // m, 1-based
  double gamma;               // direction tolerance 2^-m
  long begin;                 // first member index
  long end;                   // last member index
  std::vector<long> members;  // ascending term indices
  double sigma;               // sum of alpha over members; in [1, 2] when complete
};

/// a_n = alpha_n u + omega_n over a union of blocks, each block collecting
/// terms aligned with u within 2^-m until its alpha mass reaches 1. Terms
/// with ||a_n|| > 1 or ||a_n|| = 0 never enter blocks, which caps sigma at 2.
struct LevyDecomposition {
  Vec direction;
  long horizon;
  std::vector<LevyBlock> blocks;
  std::optional<LevyBlock> incomplete;  // members collected after the last full block
  std::vector<long> indices;            // all members, ascending
  std::vector<double> alpha;            // <a_n, direction> per member, always > 0
  std::vector<Vec> omega;               // a_n - alpha_n * direction per member
  double omega_mass;                    // sum ||omega_n|| over members
};

LevyDecomposition levy_decompose(const SequenceSpec& spec, const Vec& direction, long horizon);

/// Variant for stage constructions: scanning starts at `first`, and indices
/// marked in `excluded` (offset by the spec start index) never enter blocks.
LevyDecomposition levy_decompose_from(const SequenceSpec& spec, const Vec& direction, long first,
                                      long horizon, const std::vector<char>* excluded);

/// Divergence probe per direction: sum |<a_n, u>| up to the horizon and up
/// to half of it. A near-zero minimum pinpoints a candidate summable
/// direction; it is evidence, never a proof.
struct LsReport {
  long horizon;
  std::vector<Vec> probes;
  std::vector<double> mass;
  std::vector<double> half_mass;
  std::size_t argmin;
  double min_mass;
};

LsReport ls_estimate(const SequenceSpec& spec, long horizon, int probe_count, std::uint64_t seed);

/// How the head of the word is signed before subset selection takes over.
/// AllPlus keeps every head sign +1 (the minimal construction); GreedyPrefix
/// steers the head toward the target first, which reaches far more targets
/// at finite horizons. Head policy only changes the head; subset selection
/// and tail balancing are identical.
enum class PrefixPolicy { AllPlus, GreedyPrefix };

struct ApproxTargetResult {
  SignWord signs;
  PartialSumTrace trace;
  PrefixPolicy policy;
  long split_index;          // first index handled by subset selection
  std::vector<long> subset;  // indices kept at +1 to close the residual
  double achieved;           // ||target - S_end||_2
  double tolerance;
  bool pairing_shortcut;
};

/// Signs the first `horizon` terms so the final partial sum lands within
/// delta of the target. Throws BudgetError("density not witnessed at
/// horizon ...") when the finite horizon cannot close the gap; that outcome
/// is evidence about the horizon, not about the sequence.
ApproxTargetResult approximate_target(const SequenceSpec& spec, const Vec& target, double delta,
                                      long horizon,
                                      PrefixPolicy policy = PrefixPolicy::GreedyPrefix);

}  // namespace signum
