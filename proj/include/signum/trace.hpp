#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "signum/errors.hpp"
#include "signum/sequence.hpp"
#include "signum/sign.hpp"
#include "signum/vec.hpp"

namespace signum {

/// Indexed partial sums S_N = sum_{n<=N} eps_n a_n, stored flat (row-major)
/// so million-entry traces stay cache friendly. Entry i holds the sum through
/// term start_index + i.
class PartialSumTrace {
 public:
  PartialSumTrace(int dim, long start_index, std::optional<Vec> target)
      : dim_(dim), start_(start_index), target_(std::move(target)) {
    if (target_ && static_cast<int>(target_->size()) != dim_)
      throw PreconditionError("target dimension mismatch");
  }

  int dim() const { return dim_; }
  long start_index() const { return start_; }
  const std::optional<Vec>& target() const { return target_; }
  std::size_t size() const { return sums_.size() / static_cast<std::size_t>(dim_); }

  long index_at(std::size_t i) const { return start_ + static_cast<long>(i); }
  std::span<const double> sum_at(std::size_t i) const {
    return {sums_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  double dist_at(std::size_t i) const { return dist_[i]; }
  double running_max_at(std::size_t i) const { return running_max_[i]; }
  double max_norm() const { return running_max_.empty() ? 0.0 : running_max_.back(); }

  void append(std::span<const double> sum) {
    double nrm = norm2(sum);
    running_max_.push_back(running_max_.empty() ? nrm : std::max(running_max_.back(), nrm));
    if (target_) dist_.push_back(dist2(sum, *target_));
    sums_.insert(sums_.end(), sum.begin(), sum.end());
  }

  void reserve(std::size_t n) {
    sums_.reserve(n * static_cast<std::size_t>(dim_));
    running_max_.reserve(n);
    if (target_) dist_.reserve(n);
  }

  /// Header N,S_1..S_d,dist_to_target; the last column is blank when no
  /// target was set.
  void write_csv(std::ostream& out) const {
    out << "N";
    for (int c = 1; c <= dim_; ++c) out << ",S_" << c;
    out << ",dist_to_target\n";
    char buf[64];
    for (std::size_t i = 0; i < size(); ++i) {
      out << index_at(i);
      std::span<const double> s = sum_at(i);
      for (double x : s) {
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        out << ',' << buf;
      }
      out << ',';
      if (target_) {
        std::snprintf(buf, sizeof(buf), "%.17g", dist_[i]);
        out << buf;
      }
      out << '\n';
    }
  }

 private:
  int dim_;
  long start_;
  std::optional<Vec> target_;
  std::vector<double> sums_;
  std::vector<double> dist_;
  std::vector<double> running_max_;
};

/// Float partial-sum engine: trace of S_N for N = start .. start+len(signs)-1.
PartialSumTrace partial_sums(const SequenceSpec& spec, std::span<const Sign> signs,
                             std::optional<Vec> target = std::nullopt);

/// Exact engine; returns the flat row-major sums as rationals. Requires
/// spec.exact_capable().
std::vector<Rational> partial_sums_exact(const SequenceSpec& spec, std::span<const Sign> signs);

}  // namespace signum
