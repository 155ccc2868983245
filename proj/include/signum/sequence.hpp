#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "signum/rational.hpp"
#include "signum/vec.hpp"

namespace signum {

class SequenceSpec;
using SpecPtr = std::shared_ptr<const SequenceSpec>;

/// Term list with implicit zeros beyond the end. declared_divergent lets the
/// author certify non-summability (a property no finite list can witness);
/// operations that need divergence trust this flag instead of probing terms.
struct ExplicitFamily {
  std::vector<Vec> terms;
  bool declared_divergent = false;
};

/// a_n = (c_1 n^-alpha_1, ..., c_d n^-alpha_d). Requires start index >= 1.
struct PowerDecayFamily {
  Vec coeff;
  Vec alpha;
};

/// a_n = (c_1, ..., c_d) * ratio^n. The ratio is exact so that powers keep
/// their arithmetic structure (a triadic ratio stays triadic at any depth).
struct GeometricFamily {
  Vec coeff;
  Rational ratio = Rational(1, 2);
};

/// a_n = (-1)^n * inner(n).
struct AlternatingFamily {
  SpecPtr inner;
};

/// a_n = subs[(n - start) mod r](n): round-robin over sub-specs, each
/// evaluated at the global index. With two 1/n subs this produces the
/// "first coordinate on odd n, second on even n" interleaving.
struct InterleavedFamily {
  std::vector<SpecPtr> subs;
};

/// a_n = (cos t_n, sin t_n) / log(n+2) with seeded pseudorandom angles t_n:
/// unit directions spinning unpredictably while the magnitude decays too
/// slowly to be summable. Angles come from a counter generator, so terms are
/// random-access and reproducible. Requires start index >= 0.
struct LogDecayFamily {
  std::uint64_t angle_seed = 0;
};

enum class LiouvilleGrowth { Tower, Desk };

/// Two-coordinate blocks: for n in (n_{k-1}, n_k], where n_k = n_{k-1} +
/// 2^(g(k)+1), a_n = ((-1)^n 2^-g(k), (-1)^n 2^-k). Tower growth g(k) =
/// 10^(k^2) makes the second block boundary astronomically large; the desk
/// preset g(k) = k^2 keeps every block reachable.
struct LiouvilleFamily {
  LiouvilleGrowth growth = LiouvilleGrowth::Desk;
};

using FamilyVariant = std::variant<ExplicitFamily, PowerDecayFamily, GeometricFamily,
                                   AlternatingFamily, InterleavedFamily, LogDecayFamily,
                                   LiouvilleFamily>;

/// A finitely described sequence in R^d, evaluable at any index. All fields
/// are immutable after construction; instances are safe to share across
/// threads.
class SequenceSpec {
 public:
  SequenceSpec(int dim, long start_index, FamilyVariant family);

  static SequenceSpec explicit_list(int dim, long start, std::vector<Vec> terms,
                                    bool declared_divergent = false);
  static SequenceSpec power_decay(long start, Vec coeff, Vec alpha);
  static SequenceSpec geometric(long start, Vec coeff, Rational ratio);
  static SequenceSpec alternating(SequenceSpec inner);
  static SequenceSpec interleaved(long start, std::vector<SequenceSpec> subs);
  static SequenceSpec log_decay(long start, std::uint64_t angle_seed);
  static SequenceSpec liouville(long start, LiouvilleGrowth growth);

  int dim() const { return dim_; }
  long start_index() const { return start_; }
  const FamilyVariant& family() const { return family_; }
  std::string family_name() const;

  /// a_n. Throws PreconditionError when n < start_index.
  Vec term(long n) const;

  /// a_n with every coordinate as an exact rational. Valid only when
  /// exact_capable(); power-decay needs integer exponents for this.
  std::vector<Rational> term_exact(long n) const;
  bool exact_capable() const;

  /// True when the family parameters force ||a_n|| -> 0.
  bool is_null() const;

  /// True when the family certifies sum ||a_n|| = infinity (per-coordinate
  /// divergence for the 1-D operations). A certificate of shape, not a
  /// numeric test: divergence is undecidable from finitely many terms.
  bool certified_non_l1() const;

  /// True when the family provides a closed-form tail bound (so the series
  /// is absolutely summable by construction).
  bool certified_l1() const;

  /// Per-coordinate exact upper bound on sum_{n > N} |a_n[i]|. Requires
  /// certified_l1() and an exactly representable bound.
  std::vector<Rational> tail_bound_exact(long N) const;

  /// Per-coordinate float upper bound on the absolute tail beyond N.
  Vec tail_bound(long N) const;

  /// Monotone nonincreasing envelope with envelope(n) >= sup_{m>=n} ||a_m||.
  /// Requires is_null(); block boundaries are computed from this, never from
  /// term scans.
  double envelope(long n) const;

  /// Smallest n >= start_index with envelope(n) <= threshold, or -1 if the
  /// envelope stays above the threshold up to the given cap.
  long first_index_below(double threshold, long cap) const;

  /// sup_n ||a_n|| = envelope(start_index).
  double max_term_norm() const { return envelope(start_); }

  /// Declared Levy directions (unit vectors), in declaration order. Carried
  /// as metadata from the spec file; the target-hitting construction
  /// validates them by decomposition before use.
  const std::vector<Vec>& levy_directions() const { return levy_directions_; }
  void set_levy_directions(std::vector<Vec> dirs);

 private:
  int dim_;
  long start_;
  FamilyVariant family_;
  std::vector<Vec> levy_directions_;
  std::vector<double> suffix_max_;  // explicit family: suffix max of term norms
};

/// Liouville block boundary n_k with int64 saturation; n_0 = 0. Saturation
/// means "beyond any representable index", which is exactly how the tower
/// growth behaves for k >= 2.
long liouville_boundary(int k, LiouvilleGrowth growth);

/// Growth exponent g(k).
long liouville_exponent(int k, LiouvilleGrowth growth);

}  // namespace signum
