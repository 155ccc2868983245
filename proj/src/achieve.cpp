#include "signum/achieve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>

#include "signum/errors.hpp"
#include "signum/greedy.hpp"
#include "signum/parallel.hpp"
#include "signum/trace.hpp"
#include "signum/vec.hpp"

namespace signum {

namespace {

constexpr int kDepthCap = 22;  // 2^22 stored sums is the memory ceiling

using Int128 = __int128;

mpz_class mpz_from_int128(Int128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1
                            : static_cast<unsigned __int128>(v);
  mpz_class z(static_cast<unsigned long>(u >> 64));
  z <<= 64;
  z += static_cast<unsigned long>(u & 0xffffffffffffffffull);
  return neg ? mpz_class(-z) : z;
}

bool fits_int128(const mpz_class& z) {
  return mpz_sizeinbase(z.get_mpz_t(), 2) <= 126;
}

Int128 int128_from_mpz(const mpz_class& z) {
  mpz_class a = abs(z);
  mpz_class hi = a >> 64;
  mpz_class lo = a - (hi << 64);
  unsigned __int128 u = (static_cast<unsigned __int128>(hi.get_ui()) << 64) |
                        static_cast<unsigned __int128>(lo.get_ui());
  Int128 v = static_cast<Int128>(u);
  return z < 0 ? -v : v;
}

void check_depth(int depth) {
  if (depth < 1) throw PreconditionError("depth must be at least 1");
  if (depth > kDepthCap) {
    throw BudgetError("exploration budget is depth <= " + std::to_string(kDepthCap));
  }
}

/// All 2^n signed sums of the given scaled integer terms, Gray-code order,
/// split across workers on the leading bits.
std::vector<Int128> enumerate_sums_int(const std::vector<Int128>& terms) {
  const int n = static_cast<int>(terms.size());
  const int prefix_bits = std::min(10, n);
  const int suffix_bits = n - prefix_bits;
  const std::size_t chunks = std::size_t{1} << prefix_bits;
  const std::size_t per_chunk = std::size_t{1} << suffix_bits;

  std::vector<Int128> sums(chunks * per_chunk);
  parallel_chunks(chunks, [&](std::size_t cb, std::size_t ce) {
    for (std::size_t c = cb; c < ce; ++c) {
      Int128 base = 0;
      for (int b = 0; b < prefix_bits; ++b) {
        const bool minus = (c >> (prefix_bits - 1 - b)) & 1u;
        base += minus ? -terms[static_cast<std::size_t>(b)] : terms[static_cast<std::size_t>(b)];
      }
      Int128 cur = base;
      for (int b = prefix_bits; b < n; ++b) cur += terms[static_cast<std::size_t>(b)];
      Int128* out = sums.data() + c * per_chunk;
      out[0] = cur;
      // Gray code over the suffix: one sign flip per step
      std::uint64_t gray_prev = 0;
      for (std::size_t i = 1; i < per_chunk; ++i) {
        const std::uint64_t gray = i ^ (i >> 1);
        const std::uint64_t flipped = gray ^ gray_prev;
        int bit = 0;
        std::uint64_t f = flipped;
        while (f > 1) {
          f >>= 1;
          ++bit;
        }
        const std::size_t t = static_cast<std::size_t>(prefix_bits + bit);
        const bool now_minus = (gray >> bit) & 1u;
        cur += now_minus ? -2 * terms[t] : 2 * terms[t];
        out[i] = cur;
        gray_prev = gray;
      }
    }
  });
  return sums;
}

}  // namespace

AchievementCover explore(const SequenceSpec& spec, int depth) {
  if (spec.dim() != 1) throw PreconditionError("explore requires a one-dimensional sequence");
  check_depth(depth);
  if (!spec.certified_l1()) {
    throw PreconditionError(
        "explore requires a certified absolutely summable sequence; without a tail "
        "certificate the cover radius is undefined");
  }

  const long start = spec.start_index();
  AchievementCover cover;
  cover.depth = depth;
  cover.exact = spec.exact_capable();

  if (!cover.exact) {
    // floating fallback keeps the same shape with double sums and an inflated
    // tail radius; classification is then best effort, not a certificate
    std::vector<double> terms(static_cast<std::size_t>(depth));
    for (int i = 0; i < depth; ++i) terms[static_cast<std::size_t>(i)] = spec.term(start + i)[0];
    std::vector<double> sums{0.0};
    sums.reserve(std::size_t{1} << depth);
    for (int i = 0; i < depth; ++i) {
      const double t = terms[static_cast<std::size_t>(i)];
      const std::size_t sz = sums.size();
      sums.resize(sz * 2);
      for (std::size_t j = 0; j < sz; ++j) {
        sums[sz + j] = sums[j] - t;
        sums[j] += t;
      }
    }
    std::sort(sums.begin(), sums.end());
    sums.erase(std::unique(sums.begin(), sums.end()), sums.end());
    const double r = spec.tail_bound(start + depth - 1)[0] * (1.0 + 1e-12);
    const Rational rr(r);
    cover.tail_radius = rr;
    cover.distinct_sums = static_cast<long>(sums.size());
    cover.min_sum = Rational(sums.front());
    cover.max_sum = Rational(sums.back());
    double lo = sums.front() - r, hi = sums.front() + r;
    for (std::size_t i = 1; i < sums.size(); ++i) {
      if (sums[i] - r <= hi) {
        hi = sums[i] + r;
      } else {
        cover.intervals.push_back({Rational(lo), Rational(hi)});
        cover.gaps.push_back({Rational(hi), Rational(sums[i] - r)});
        lo = sums[i] - r;
        hi = sums[i] + r;
      }
    }
    cover.intervals.push_back({Rational(lo), Rational(hi)});
    cover.classification = cover.intervals.size() == 1 ? "interval" : "gapped";
    return cover;
  }

  // exact path: scale all terms to a common denominator
  std::vector<Rational> terms(static_cast<std::size_t>(depth));
  mpz_class den = 1;
  for (int i = 0; i < depth; ++i) {
    terms[static_cast<std::size_t>(i)] = spec.term_exact(start + i)[0];
    mpz_class d = terms[static_cast<std::size_t>(i)].get_den();
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
  }
  std::vector<mpz_class> scaled(static_cast<std::size_t>(depth));
  mpz_class reach = 0;
  for (int i = 0; i < depth; ++i) {
    const Rational& t = terms[static_cast<std::size_t>(i)];
    scaled[static_cast<std::size_t>(i)] = t.get_num() * (den / t.get_den());
    reach += abs(scaled[static_cast<std::size_t>(i)]);
  }
  if (!fits_int128(reach)) {
    throw BudgetError("scaled term magnitudes exceed the 128-bit enumeration range");
  }
  std::vector<Int128> iterms(static_cast<std::size_t>(depth));
  for (int i = 0; i < depth; ++i) {
    iterms[static_cast<std::size_t>(i)] = int128_from_mpz(scaled[static_cast<std::size_t>(i)]);
  }

  std::vector<Int128> sums = enumerate_sums_int(iterms);
  std::sort(sums.begin(), sums.end());
  sums.erase(std::unique(sums.begin(), sums.end()), sums.end());

  const Rational r = spec.tail_bound_exact(start + depth - 1)[0];
  cover.tail_radius = r;
  cover.distinct_sums = static_cast<long>(sums.size());

  const Rational den_q(den);
  auto value_of = [&](Int128 s) {
    Rational v(mpz_from_int128(s));
    v /= den_q;
    return v;
  };
  cover.min_sum = value_of(sums.front());
  cover.max_sum = value_of(sums.back());

  // merge threshold: integer gap <= 2 * r * den (touching endpoints merge)
  const Rational merge_q = 2 * r * den_q;
  mpz_class merge_floor_z;
  mpz_fdiv_q(merge_floor_z.get_mpz_t(), merge_q.get_num().get_mpz_t(),
             merge_q.get_den().get_mpz_t());
  if (!fits_int128(merge_floor_z)) {
    // the tail dwarfs all spacings; everything merges into one interval
    cover.intervals.push_back({cover.min_sum - r, cover.max_sum + r});
    cover.classification = "interval";
    return cover;
  }
  const Int128 merge_floor = int128_from_mpz(merge_floor_z);

  Int128 run_lo = sums.front();
  Int128 run_hi = sums.front();
  for (std::size_t i = 1; i < sums.size(); ++i) {
    if (sums[i] - run_hi <= merge_floor) {
      run_hi = sums[i];
    } else {
      cover.intervals.push_back({value_of(run_lo) - r, value_of(run_hi) + r});
      cover.gaps.push_back({value_of(run_hi) + r, value_of(sums[i]) - r});
      run_lo = sums[i];
      run_hi = sums[i];
    }
  }
  cover.intervals.push_back({value_of(run_lo) - r, value_of(run_hi) + r});
  cover.classification = cover.intervals.size() == 1 ? "interval" : "gapped";
  return cover;
}

GridCover explore_grid(const SequenceSpec& spec, int depth) {
  if (spec.dim() != 2) throw PreconditionError("explore_grid requires a two-dimensional sequence");
  check_depth(depth);
  if (!spec.certified_l1()) {
    throw PreconditionError("explore_grid requires a certified absolutely summable sequence");
  }

  const long start = spec.start_index();
  const Vec tail = spec.tail_bound(start + depth - 1);
  const double cell = std::max(norm2(tail), 1e-300);

  std::vector<double> xs{0.0};
  std::vector<double> ys{0.0};
  for (int i = 0; i < depth; ++i) {
    const Vec a = spec.term(start + i);
    const std::size_t sz = xs.size();
    xs.resize(sz * 2);
    ys.resize(sz * 2);
    for (std::size_t j = 0; j < sz; ++j) {
      xs[sz + j] = xs[j] - a[0];
      ys[sz + j] = ys[j] - a[1];
      xs[j] += a[0];
      ys[j] += a[1];
    }
  }

  GridCover grid;
  grid.depth = depth;
  grid.cell = cell;
  grid.min_x = grid.max_x = xs[0];
  grid.min_y = grid.max_y = ys[0];
  std::set<std::pair<long, long>> occupied;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    grid.min_x = std::min(grid.min_x, xs[j]);
    grid.max_x = std::max(grid.max_x, xs[j]);
    grid.min_y = std::min(grid.min_y, ys[j]);
    grid.max_y = std::max(grid.max_y, ys[j]);
    occupied.insert({static_cast<long>(std::floor(xs[j] / cell)),
                     static_cast<long>(std::floor(ys[j] / cell))});
  }
  grid.occupied = static_cast<long>(occupied.size());
  grid.cells.assign(occupied.begin(), occupied.end());
  return grid;
}

std::vector<DensityProbe> probe_density(const SequenceSpec& spec,
                                        const std::vector<double>& targets, double delta,
                                        long horizon) {
  if (!(delta > 0.0)) throw PreconditionError("delta must be positive");
  std::vector<DensityProbe> probes;
  probes.reserve(targets.size());
  for (double x : targets) {
    GreedyRun run = greedy_signs(spec, x, horizon);
    DensityProbe p;
    p.target = x;
    p.settled_at = first_stable_position(run.trace, delta);
    p.witnessed = p.settled_at >= 0;
    p.final_dev = run.trace.dist_at(static_cast<long>(run.trace.size()) - 1);
    probes.push_back(p);
  }
  return probes;
}

}  // namespace signum
