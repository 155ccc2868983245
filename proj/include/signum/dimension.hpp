#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "signum/greedy.hpp"
#include "signum/rational.hpp"
#include "signum/sequence.hpp"
#include "signum/sign.hpp"

namespace signum {

/// Which ultrametric the cylinder diameters refer to.
///  - Omega: sign streams, rho = 2^-(first disagreement, 1-based); a cylinder
///    on len symbols has diameter exactly 2^-(len+1).
///  - Theta: streams of width-k block classes, rho = 2^-(k * first
///    disagreement); a cylinder on len classes has diameter 2^-(k*(len+1)).
enum class CylinderSpace { Omega, Theta };

struct CylinderAtom {
  std::uint64_t word;  // packed symbols, most significant symbol first
  Rational mass;
};

struct CylinderLevel {
  int word_symbols;  // symbols per atom word at this level
  std::vector<CylinderAtom> atoms;
};

/// A measure given by its values on a nested family of cylinders. Level 0
/// (the whole space, mass 1) is implicit; levels[i] holds the atoms after
/// i+1 subdivisions.
struct CylinderMeasure {
  CylinderSpace space;
  int k;             // block width (Omega subdivision step / Theta class width); 1 for plain uniform
  std::string rule;  // "uniform", "theta-uniform", "block-subdivision"
  std::vector<CylinderLevel> levels;

  int depth() const { return static_cast<int>(levels.size()); }

  /// diam(atom at levels[i]) = 2^-diam_exponent(i).
  long diam_exponent(int level_index) const {
    const int len = levels[static_cast<std::size_t>(level_index)].word_symbols;
    if (space == CylinderSpace::Omega) return static_cast<long>(len) + 1;
    return static_cast<long>(k) * (static_cast<long>(len) + 1);
  }

  /// Sum of atom masses per level; exactly 1 at every level for a measure.
  Rational level_mass(int level_index) const;

  /// Checks that child masses sum to their parent's mass at every level.
  /// Returns (parent level, packed parent word) of the first inconsistency;
  /// level 0 with word 0 means the root. Empty when consistent.
  std::optional<std::pair<int, std::uint64_t>> first_mass_inconsistency() const;
};

/// Uniform coin-flipping measure: level i holds all 2^i sign words of
/// length i with mass 2^-i. depth <= 22 (atom count is 2^depth).
CylinderMeasure uniform_measure(int depth);

/// Uniform measure on width-k block classes: level j holds all 2^(j*(k-1))
/// class words with mass 2^(-j*(k-1)). Budget: j*(k-1) <= 22.
CylinderMeasure uniform_theta_measure(int k, int depth);

/// Subdivision measure supported on the steering block set: every node keeps
/// its lexicographically first 2^(k-2) surviving extensions with equal mass
/// split. A node with fewer surviving extensions aborts the construction,
/// naming the node; that situation disproves the branching lower bound for
/// the given sequence, it is not a runtime defect.
CylinderMeasure build_lambda_measure(const SequenceSpec& spec, const LambdaParams& params,
                                     int levels);

/// ---- width-k block classes (global sign flip identified) ----

inline int theta_class_count(int k) { return 1 << (k - 1); }

/// Canonical class id of one width-k block: flip the block so its first sign
/// is +1, then pack the remaining k-1 signs. Ids in [0, 2^(k-1)).
std::uint64_t theta_class_of(std::span<const Sign> block);

/// The canonical representative (first sign +1) of a class id.
SignWord theta_representative(std::uint64_t class_id, int k);

/// Blockwise projection of a sign word; only complete blocks are projected.
std::vector<std::uint64_t> theta_project(std::span<const Sign> word, int k);

/// Distance of two projected words under rho = 2^-(k * first disagreement).
/// Words agreeing on their full common length give the upper bound
/// 2^-(k*(len+1)), flagged via is_bound.
UltraDist theta_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                         int k);

/// ---- mass-distribution certificates ----

/// Verdict of checking mass(atom) <= c * diam(atom)^s on every stored atom
/// of levels 1..depth. A passing check certifies the dimension lower bound
/// s for the support of the measure; the comparison is exact rational
/// arithmetic whenever s has a small denominator.
struct DimensionCertificate {
  Rational s;
  Rational c;
  int depth;                  // levels checked
  bool exact_comparison;
  std::string convention;     // diameter convention the check used
  std::vector<double> max_ratio;  // per level: max mass / diam^s (display)
  bool certified;
  int first_violation_level;  // 1-based, -1 when certified
};

DimensionCertificate mdp_certify(const CylinderMeasure& mu, const Rational& s, const Rational& c,
                                 int depth);

}  // namespace signum
