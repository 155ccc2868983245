#include "signum/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "signum/errors.hpp"
#include "signum/rng.hpp"

namespace signum {

namespace {

constexpr long kLongMax = std::numeric_limits<long>::max();
constexpr double kPi = 3.14159265358979323846;

// Exact-mode terms carry numerators/denominators that grow linearly with the
// index (geometric powers, liouville exponents). Indices past this are not
// desk scale and would allocate gigabytes.
constexpr long kExactDepthGuard = 1L << 24;

bool integral(double x) { return std::isfinite(x) && x == std::floor(x) && std::fabs(x) < 1e9; }

}  // namespace

Rational rational_pow(const Rational& base, long e) {
  if (e < 0) {
    if (base == 0) throw PreconditionError("zero base with negative exponent");
    Rational inv(base.get_den(), base.get_num());
    inv.canonicalize();
    return rational_pow(inv, -e);
  }
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), static_cast<unsigned long>(e));
  mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), static_cast<unsigned long>(e));
  Rational r(num, den);
  r.canonicalize();
  return r;
}

long liouville_exponent(int k, LiouvilleGrowth growth) {
  if (growth == LiouvilleGrowth::Desk) return static_cast<long>(k) * k;
  long e = 1;
  long steps = static_cast<long>(k) * k;  // 10^(k^2)
  for (long i = 0; i < steps; ++i) {
    if (e > kLongMax / 10) return kLongMax;
    e *= 10;
  }
  return e;
}

long liouville_boundary(int k, LiouvilleGrowth growth) {
  long n = 0;
  for (int i = 1; i <= k; ++i) {
    long e = liouville_exponent(i, growth);
    if (e >= 62) return kLongMax;
    long step = 1L << (e + 1);
    if (n > kLongMax - step) return kLongMax;
    n += step;
  }
  return n;
}

namespace {

// Block index k >= 1 with n in (n_{k-1}, n_k].
int liouville_block(long n, LiouvilleGrowth growth) {
  for (int k = 1;; ++k) {
    if (n <= liouville_boundary(k, growth)) return k;
  }
}

}  // namespace

SequenceSpec::SequenceSpec(int dim, long start_index, FamilyVariant family)
    : dim_(dim), start_(start_index), family_(std::move(family)) {
  if (dim_ < 1) throw PreconditionError("dimension must be >= 1");
  if (start_ != 0 && start_ != 1) throw PreconditionError("start_index must be 0 or 1");
  if (auto* e = std::get_if<ExplicitFamily>(&family_)) {
    for (const Vec& t : e->terms)
      if (static_cast<int>(t.size()) != dim_)
        throw PreconditionError("explicit term dimension mismatch");
    suffix_max_.assign(e->terms.size(), 0.0);
    double m = 0.0;
    for (std::size_t i = e->terms.size(); i-- > 0;) {
      m = std::max(m, norm2(e->terms[i]));
      suffix_max_[i] = m;
    }
  } else if (auto* p = std::get_if<PowerDecayFamily>(&family_)) {
    if (static_cast<int>(p->coeff.size()) != dim_ || static_cast<int>(p->alpha.size()) != dim_)
      throw PreconditionError("power-decay parameter dimension mismatch");
    if (start_ < 1) throw PreconditionError("power-decay requires start_index >= 1");
  } else if (auto* g = std::get_if<GeometricFamily>(&family_)) {
    if (static_cast<int>(g->coeff.size()) != dim_)
      throw PreconditionError("geometric parameter dimension mismatch");
  } else if (auto* a = std::get_if<AlternatingFamily>(&family_)) {
    if (!a->inner) throw PreconditionError("alternating wrapper needs an inner spec");
    if (a->inner->dim() != dim_) throw PreconditionError("alternating inner dimension mismatch");
    if (a->inner->start_index() > start_)
      throw PreconditionError("inner spec starts after the wrapper");
  } else if (auto* iv = std::get_if<InterleavedFamily>(&family_)) {
    if (iv->subs.empty()) throw PreconditionError("interleaved family needs at least one sub-spec");
    for (const SpecPtr& s : iv->subs) {
      if (!s) throw PreconditionError("interleaved sub-spec missing");
      if (s->dim() != dim_) throw PreconditionError("interleaved sub-spec dimension mismatch");
      if (s->start_index() > start_)
        throw PreconditionError("interleaved sub-spec starts after the parent");
    }
  } else if (std::get_if<LogDecayFamily>(&family_)) {
    if (dim_ != 2) throw PreconditionError("log-decay family is two-dimensional");
  } else if (std::get_if<LiouvilleFamily>(&family_)) {
    if (dim_ != 2) throw PreconditionError("liouville example is two-dimensional");
    if (start_ != 1) throw PreconditionError("liouville example starts at index 1");
  }
}

SequenceSpec SequenceSpec::explicit_list(int dim, long start, std::vector<Vec> terms,
                                         bool declared_divergent) {
  return SequenceSpec(dim, start, ExplicitFamily{std::move(terms), declared_divergent});
}
SequenceSpec SequenceSpec::power_decay(long start, Vec coeff, Vec alpha) {
  int d = static_cast<int>(coeff.size());
  return SequenceSpec(d, start, PowerDecayFamily{std::move(coeff), std::move(alpha)});
}
SequenceSpec SequenceSpec::geometric(long start, Vec coeff, Rational ratio) {
  int d = static_cast<int>(coeff.size());
  return SequenceSpec(d, start, GeometricFamily{std::move(coeff), std::move(ratio)});
}
SequenceSpec SequenceSpec::log_decay(long start, std::uint64_t angle_seed) {
  return SequenceSpec(2, start, LogDecayFamily{angle_seed});
}
SequenceSpec SequenceSpec::alternating(SequenceSpec inner) {
  int d = inner.dim();
  long s = inner.start_index();
  return SequenceSpec(d, s, AlternatingFamily{std::make_shared<const SequenceSpec>(std::move(inner))});
}
SequenceSpec SequenceSpec::interleaved(long start, std::vector<SequenceSpec> subs) {
  if (subs.empty()) throw PreconditionError("interleaved family needs at least one sub-spec");
  int d = subs[0].dim();
  std::vector<SpecPtr> ptrs;
  ptrs.reserve(subs.size());
  for (SequenceSpec& s : subs) ptrs.push_back(std::make_shared<const SequenceSpec>(std::move(s)));
  return SequenceSpec(d, start, InterleavedFamily{std::move(ptrs)});
}
SequenceSpec SequenceSpec::liouville(long start, LiouvilleGrowth growth) {
  return SequenceSpec(2, start, LiouvilleFamily{growth});
}

std::string SequenceSpec::family_name() const {
  struct Visitor {
    std::string operator()(const ExplicitFamily&) const { return "explicit"; }
    std::string operator()(const PowerDecayFamily&) const { return "power-decay"; }
    std::string operator()(const GeometricFamily&) const { return "geometric"; }
    std::string operator()(const AlternatingFamily&) const { return "alternating"; }
    std::string operator()(const InterleavedFamily&) const { return "interleaved"; }
    std::string operator()(const LogDecayFamily&) const { return "log-decay"; }
    std::string operator()(const LiouvilleFamily&) const { return "liouville"; }
  };
  return std::visit(Visitor{}, family_);
}

Vec SequenceSpec::term(long n) const {
  if (n < start_) throw PreconditionError("term index " + std::to_string(n) + " below start_index");
  struct Visitor {
    const SequenceSpec& self;
    long n;
    Vec operator()(const ExplicitFamily& f) const {
      long i = n - self.start_;
      if (i >= static_cast<long>(f.terms.size())) return Vec(self.dim_, 0.0);
      return f.terms[static_cast<std::size_t>(i)];
    }
    Vec operator()(const PowerDecayFamily& f) const {
      Vec v(self.dim_);
      for (int i = 0; i < self.dim_; ++i)
        v[i] = f.coeff[i] * std::pow(static_cast<double>(n), -f.alpha[i]);
      return v;
    }
    Vec operator()(const GeometricFamily& f) const {
      double r = std::pow(to_double(f.ratio), static_cast<double>(n));
      Vec v(self.dim_);
      for (int i = 0; i < self.dim_; ++i) v[i] = f.coeff[i] * r;
      return v;
    }
    Vec operator()(const AlternatingFamily& f) const {
      Vec v = f.inner->term(n);
      if (n % 2 != 0)
        for (double& x : v) x = -x;
      return v;
    }
    Vec operator()(const InterleavedFamily& f) const {
      std::size_t r = f.subs.size();
      std::size_t idx = static_cast<std::size_t>((n - self.start_) % static_cast<long>(r));
      return f.subs[idx]->term(n);
    }
    Vec operator()(const LogDecayFamily& f) const {
      Rng rng(f.angle_seed, static_cast<std::uint64_t>(n));
      double theta = 2.0 * kPi * rng.next_double();
      double r = 1.0 / std::log(static_cast<double>(n) + 2.0);
      return {r * std::cos(theta), r * std::sin(theta)};
    }
    Vec operator()(const LiouvilleFamily& f) const {
      int k = liouville_block(n, f.growth);
      long g = liouville_exponent(k, f.growth);
      double sign = (n % 2 != 0) ? -1.0 : 1.0;
      double x = g > 1100 ? 0.0 : std::ldexp(1.0, static_cast<int>(-g));
      double y = std::ldexp(1.0, -k);
      return Vec{sign * x, sign * y};
    }
  };
  return std::visit(Visitor{*this, n}, family_);
}

std::vector<Rational> SequenceSpec::term_exact(long n) const {
  if (n < start_) throw PreconditionError("term index " + std::to_string(n) + " below start_index");
  if (!exact_capable()) throw PreconditionError("spec has no exact term representation");
  struct Visitor {
    const SequenceSpec& self;
    long n;
    std::vector<Rational> operator()(const ExplicitFamily& f) const {
      long i = n - self.start_;
      std::vector<Rational> v(static_cast<std::size_t>(self.dim_), Rational(0));
      if (i < static_cast<long>(f.terms.size()))
        for (int c = 0; c < self.dim_; ++c) v[static_cast<std::size_t>(c)] = Rational(f.terms[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]);
      return v;
    }
    std::vector<Rational> operator()(const PowerDecayFamily& f) const {
      std::vector<Rational> v;
      v.reserve(static_cast<std::size_t>(self.dim_));
      for (int i = 0; i < self.dim_; ++i) {
        long a = static_cast<long>(f.alpha[static_cast<std::size_t>(i)]);
        v.push_back(Rational(f.coeff[static_cast<std::size_t>(i)]) * rational_pow(Rational(n), -a));
      }
      return v;
    }
    std::vector<Rational> operator()(const GeometricFamily& f) const {
      if (n > kExactDepthGuard) throw BudgetError("exact geometric term too deep");
      Rational r = rational_pow(f.ratio, n);
      std::vector<Rational> v;
      v.reserve(static_cast<std::size_t>(self.dim_));
      for (int i = 0; i < self.dim_; ++i) v.push_back(Rational(f.coeff[static_cast<std::size_t>(i)]) * r);
      return v;
    }
    std::vector<Rational> operator()(const AlternatingFamily& f) const {
      std::vector<Rational> v = f.inner->term_exact(n);
      if (n % 2 != 0)
        for (Rational& q : v) q = -q;
      return v;
    }
    std::vector<Rational> operator()(const InterleavedFamily& f) const {
      std::size_t r = f.subs.size();
      std::size_t idx = static_cast<std::size_t>((n - self.start_) % static_cast<long>(r));
      return f.subs[idx]->term_exact(n);
    }
    std::vector<Rational> operator()(const LogDecayFamily&) const {
      throw PreconditionError("log-decay terms are transcendental");
    }
    std::vector<Rational> operator()(const LiouvilleFamily& f) const {
      int k = liouville_block(n, f.growth);
      long g = liouville_exponent(k, f.growth);
      if (g > kExactDepthGuard) throw BudgetError("exact liouville term exponent too large");
      Rational x = pow2(-g);
      Rational y = pow2(-static_cast<long>(k));
      if (n % 2 != 0) {
        x = -x;
        y = -y;
      }
      return {x, y};
    }
  };
  return std::visit(Visitor{*this, n}, family_);
}

bool SequenceSpec::exact_capable() const {
  struct Visitor {
    bool operator()(const ExplicitFamily&) const { return true; }
    bool operator()(const PowerDecayFamily& f) const {
      return std::all_of(f.alpha.begin(), f.alpha.end(), integral);
    }
    bool operator()(const GeometricFamily&) const { return true; }
    bool operator()(const AlternatingFamily& f) const { return f.inner->exact_capable(); }
    bool operator()(const InterleavedFamily& f) const {
      return std::all_of(f.subs.begin(), f.subs.end(),
                         [](const SpecPtr& s) { return s->exact_capable(); });
    }
    bool operator()(const LogDecayFamily&) const { return false; }
    bool operator()(const LiouvilleFamily&) const { return true; }
  };
  return std::visit(Visitor{}, family_);
}

bool SequenceSpec::is_null() const {
  struct Visitor {
    bool operator()(const ExplicitFamily&) const { return true; }
    bool operator()(const PowerDecayFamily& f) const {
      for (std::size_t i = 0; i < f.alpha.size(); ++i)
        if (f.coeff[i] != 0.0 && f.alpha[i] <= 0.0) return false;
      return true;
    }
    bool operator()(const GeometricFamily& f) const {
      return rational_abs(f.ratio) < 1 || norm2(f.coeff) == 0.0;
    }
    bool operator()(const AlternatingFamily& f) const { return f.inner->is_null(); }
    bool operator()(const InterleavedFamily& f) const {
      return std::all_of(f.subs.begin(), f.subs.end(),
                         [](const SpecPtr& s) { return s->is_null(); });
    }
    bool operator()(const LogDecayFamily&) const { return true; }
    bool operator()(const LiouvilleFamily&) const { return true; }
  };
  return std::visit(Visitor{}, family_);
}

bool SequenceSpec::certified_non_l1() const {
  struct Visitor {
    bool operator()(const ExplicitFamily& f) const { return f.declared_divergent; }
    bool operator()(const PowerDecayFamily& f) const {
      for (std::size_t i = 0; i < f.alpha.size(); ++i)
        if (f.coeff[i] != 0.0 && f.alpha[i] <= 1.0) return true;
      return false;
    }
    bool operator()(const GeometricFamily&) const { return false; }
    bool operator()(const AlternatingFamily& f) const { return f.inner->certified_non_l1(); }
    bool operator()(const InterleavedFamily& f) const {
      // Each sub owns every r-th index; its global-index terms dominate the
      // same family at index rn, so one divergent sub already diverges.
      return std::any_of(f.subs.begin(), f.subs.end(),
                         [](const SpecPtr& s) { return s->certified_non_l1(); });
    }
    // sum ||a_n|| = sum 1/log(n+2) diverges, but the 1-D operations need
    // per-coordinate divergence, which the spinning directions do not give.
    bool operator()(const LogDecayFamily&) const { return false; }
    bool operator()(const LiouvilleFamily&) const { return true; }
  };
  return std::visit(Visitor{}, family_);
}

bool SequenceSpec::certified_l1() const {
  struct Visitor {
    bool operator()(const ExplicitFamily& f) const { return !f.declared_divergent; }
    bool operator()(const PowerDecayFamily& f) const {
      for (std::size_t i = 0; i < f.alpha.size(); ++i)
        if (f.coeff[i] != 0.0 && f.alpha[i] <= 1.0) return false;
      return true;
    }
    bool operator()(const GeometricFamily& f) const {
      return rational_abs(f.ratio) < 1 || norm2(f.coeff) == 0.0;
    }
    bool operator()(const AlternatingFamily& f) const { return f.inner->certified_l1(); }
    bool operator()(const InterleavedFamily& f) const {
      return std::all_of(f.subs.begin(), f.subs.end(),
                         [](const SpecPtr& s) { return s->certified_l1(); });
    }
    bool operator()(const LogDecayFamily&) const { return false; }
    bool operator()(const LiouvilleFamily&) const { return false; }
  };
  return std::visit(Visitor{}, family_);
}

std::vector<Rational> SequenceSpec::tail_bound_exact(long N) const {
  if (!certified_l1()) throw PreconditionError("no tail bound: spec is not certified summable");
  if (N < start_) throw PreconditionError("tail bound index below start_index");
  struct Visitor {
    const SequenceSpec& self;
    long N;
    std::vector<Rational> operator()(const ExplicitFamily& f) const {
      std::vector<Rational> v(static_cast<std::size_t>(self.dim_), Rational(0));
      long first = N + 1 - self.start_;
      if (first < 0) first = 0;
      for (std::size_t i = static_cast<std::size_t>(first); i < f.terms.size(); ++i)
        for (int c = 0; c < self.dim_; ++c)
          v[static_cast<std::size_t>(c)] += rational_abs(Rational(f.terms[i][static_cast<std::size_t>(c)]));
      return v;
    }
    std::vector<Rational> operator()(const PowerDecayFamily& f) const {
      // sum_{n>N} n^-a < integral_N^inf x^-a dx = N^(1-a)/(a-1), integer a >= 2.
      std::vector<Rational> v;
      v.reserve(static_cast<std::size_t>(self.dim_));
      for (int i = 0; i < self.dim_; ++i) {
        double c = f.coeff[static_cast<std::size_t>(i)];
        if (c == 0.0) {
          v.push_back(Rational(0));
          continue;
        }
        double a = f.alpha[static_cast<std::size_t>(i)];
        if (!integral(a) || a < 2.0)
          throw PreconditionError("power-decay tail bound needs an integer exponent >= 2");
        long ai = static_cast<long>(a);
        Rational bound = rational_abs(Rational(c)) / (Rational(ai - 1) * rational_pow(Rational(N), ai - 1));
        v.push_back(bound);
      }
      return v;
    }
    std::vector<Rational> operator()(const GeometricFamily& f) const {
      if (N > kExactDepthGuard) throw BudgetError("exact geometric tail too deep");
      Rational r = rational_abs(f.ratio);
      Rational tail = rational_pow(r, N + 1) / (Rational(1) - r);
      std::vector<Rational> v;
      v.reserve(static_cast<std::size_t>(self.dim_));
      for (int i = 0; i < self.dim_; ++i)
        v.push_back(rational_abs(Rational(f.coeff[static_cast<std::size_t>(i)])) * tail);
      return v;
    }
    std::vector<Rational> operator()(const AlternatingFamily& f) const {
      return f.inner->tail_bound_exact(N);
    }
    std::vector<Rational> operator()(const InterleavedFamily& f) const {
      // Each sub contributes a subset of the indices n > N, so summing the
      // subs' full tails over-counts and stays an upper bound.
      std::vector<Rational> v(static_cast<std::size_t>(self.dim_), Rational(0));
      for (const SpecPtr& s : f.subs) {
        std::vector<Rational> t = s->tail_bound_exact(std::max(N, s->start_index()));
        for (int c = 0; c < self.dim_; ++c) v[static_cast<std::size_t>(c)] += t[static_cast<std::size_t>(c)];
      }
      return v;
    }
    std::vector<Rational> operator()(const LogDecayFamily&) const {
      throw PreconditionError("log-decay family is not summable");
    }
    std::vector<Rational> operator()(const LiouvilleFamily&) const {
      throw PreconditionError("liouville example is not summable");
    }
  };
  return std::visit(Visitor{*this, N}, family_);
}

Vec SequenceSpec::tail_bound(long N) const {
  if (!certified_l1()) throw PreconditionError("no tail bound: spec is not certified summable");
  if (N < start_) throw PreconditionError("tail bound index below start_index");
  struct Visitor {
    const SequenceSpec& self;
    long N;
    Vec operator()(const ExplicitFamily& f) const {
      Vec v(static_cast<std::size_t>(self.dim_), 0.0);
      long first = N + 1 - self.start_;
      if (first < 0) first = 0;
      for (std::size_t i = static_cast<std::size_t>(first); i < f.terms.size(); ++i)
        for (int c = 0; c < self.dim_; ++c) v[static_cast<std::size_t>(c)] += std::fabs(f.terms[i][static_cast<std::size_t>(c)]);
      return v;
    }
    Vec operator()(const PowerDecayFamily& f) const {
      Vec v(static_cast<std::size_t>(self.dim_), 0.0);
      for (int i = 0; i < self.dim_; ++i) {
        double c = f.coeff[static_cast<std::size_t>(i)];
        if (c == 0.0) continue;
        double a = f.alpha[static_cast<std::size_t>(i)];
        v[static_cast<std::size_t>(i)] = std::fabs(c) * std::pow(static_cast<double>(N), 1.0 - a) / (a - 1.0);
      }
      return v;
    }
    Vec operator()(const GeometricFamily& f) const {
      double r = std::fabs(to_double(f.ratio));
      double tail = r >= 1.0 ? 0.0 : std::pow(r, static_cast<double>(N + 1)) / (1.0 - r);
      Vec v(static_cast<std::size_t>(self.dim_), 0.0);
      for (int i = 0; i < self.dim_; ++i) v[static_cast<std::size_t>(i)] = std::fabs(f.coeff[static_cast<std::size_t>(i)]) * tail;
      return v;
    }
    Vec operator()(const AlternatingFamily& f) const { return f.inner->tail_bound(N); }
    Vec operator()(const InterleavedFamily& f) const {
      Vec v(static_cast<std::size_t>(self.dim_), 0.0);
      for (const SpecPtr& s : f.subs) {
        Vec t = s->tail_bound(std::max(N, s->start_index()));
        for (int c = 0; c < self.dim_; ++c) v[static_cast<std::size_t>(c)] += t[static_cast<std::size_t>(c)];
      }
      return v;
    }
    Vec operator()(const LogDecayFamily&) const {
      throw PreconditionError("log-decay family is not summable");
    }
    Vec operator()(const LiouvilleFamily&) const {
      throw PreconditionError("liouville example is not summable");
    }
  };
  return std::visit(Visitor{*this, N}, family_);
}

double SequenceSpec::envelope(long n) const {
  if (n < start_) throw PreconditionError("envelope index below start_index");
  if (!is_null()) throw PreconditionError("envelope requires a null spec");
  struct Visitor {
    const SequenceSpec& self;
    long n;
    double operator()(const ExplicitFamily&) const {
      long i = n - self.start_;
      if (i >= static_cast<long>(self.suffix_max_.size())) return 0.0;
      return self.suffix_max_[static_cast<std::size_t>(i)];
    }
    double operator()(const PowerDecayFamily&) const { return norm2(self.term(n)); }
    double operator()(const GeometricFamily& f) const {
      return norm2(f.coeff) * std::pow(std::fabs(to_double(f.ratio)), static_cast<double>(n));
    }
    double operator()(const AlternatingFamily& f) const { return f.inner->envelope(n); }
    double operator()(const InterleavedFamily& f) const {
      double m = 0.0;
      for (const SpecPtr& s : f.subs) m = std::max(m, s->envelope(n));
      return m;
    }
    double operator()(const LogDecayFamily&) const {
      return 1.0 / std::log(static_cast<double>(n) + 2.0);
    }
    double operator()(const LiouvilleFamily&) const { return norm2(self.term(n)); }
  };
  return std::visit(Visitor{*this, n}, family_);
}

long SequenceSpec::first_index_below(double threshold, long cap) const {
  if (cap < start_) return -1;
  if (envelope(start_) <= threshold) return start_;
  if (envelope(cap) > threshold) return -1;
  long lo = start_, hi = cap;  // envelope(lo) > threshold >= envelope(hi)
  while (hi - lo > 1) {
    long mid = lo + (hi - lo) / 2;
    if (envelope(mid) <= threshold)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

void SequenceSpec::set_levy_directions(std::vector<Vec> dirs) {
  for (Vec& u : dirs) {
    if (static_cast<int>(u.size()) != dim_)
      throw PreconditionError("levy direction dimension mismatch");
    double nrm = norm2(u);
    if (std::fabs(nrm - 1.0) > 1e-9)
      throw PreconditionError("levy directions must be unit vectors");
  }
  levy_directions_ = std::move(dirs);
}

}  // namespace signum
