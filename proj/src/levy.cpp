#include "signum/levy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "signum/balance.hpp"
#include "signum/errors.hpp"
#include "signum/rng.hpp"

namespace signum {

namespace {

// Additive mass growth per horizon doubling that flags a probe as a
// candidate accumulation direction. Interleaved 1/n families grow by
// ln(2)/d per doubling, so the margin sits well below ln(2)/4.
constexpr double kGrowthMargin = 0.1;

void check_unit(const Vec& u, int dim, const char* what) {
  if (static_cast<int>(u.size()) != dim) {
    throw PreconditionError(std::string(what) + " has dimension " + std::to_string(u.size()) +
                            ", the sequence has dimension " + std::to_string(dim));
  }
  const double n = norm2(u);
  if (std::abs(n - 1.0) > 1e-9) {
    throw PreconditionError(std::string(what) + " must be a unit vector (|norm-1| <= 1e-9)");
  }
}

}  // namespace

std::vector<Vec> probe_directions(int dim, int count, std::uint64_t seed) {
  if (dim < 1) throw PreconditionError("dimension must be positive");
  if (count < 1) throw PreconditionError("probe count must be positive");
  std::vector<Vec> probes;
  if (dim == 1) {
    probes.push_back(Vec{1.0});
    if (count > 1) probes.push_back(Vec{-1.0});
    return probes;
  }
  if (dim == 2) {
    probes.reserve(static_cast<std::size_t>(count));
    for (int p = 0; p < count; ++p) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(p) / count;
      probes.push_back(Vec{std::cos(phi), std::sin(phi)});
    }
    return probes;
  }
  Rng rng(seed, 7);
  probes.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(probes.size()) < count) {
    Vec v(static_cast<std::size_t>(dim));
    for (double& x : v) x = rng.next_gaussian();
    const double n = norm2(v);
    if (n < 1e-6) continue;
    for (double& x : v) x /= n;
    probes.push_back(std::move(v));
  }
  return probes;
}

DirectionalMassReport directional_mass(const SequenceSpec& spec, long horizon,
                                       std::vector<Vec> probes, std::vector<double> radii) {
  if (horizon < 1) throw PreconditionError("horizon must be positive");
  if (probes.empty()) throw PreconditionError("at least one probe direction is required");
  if (radii.empty()) throw PreconditionError("at least one radius is required");
  for (const Vec& p : probes) check_unit(p, spec.dim(), "probe");
  for (double r : radii) {
    if (!(r > 0.0) || r > 2.0) {
      throw PreconditionError("radii must lie in (0, 2]");
    }
  }

  DirectionalMassReport report;
  report.horizon = horizon;
  report.probes = std::move(probes);
  report.radii = std::move(radii);
  const std::size_t np = report.probes.size();
  const std::size_t nr = report.radii.size();
  report.mass.assign(np, std::vector<std::array<double, 3>>(nr, {0.0, 0.0, 0.0}));
  report.all_zero = true;

  const long start = spec.start_index();
  Vec unit(static_cast<std::size_t>(spec.dim()));
  for (long i = 0; i < 4 * horizon; ++i) {
    const Vec a = spec.term(start + i);
    const double na = norm2(a);
    if (na == 0.0) continue;
    report.all_zero = false;
    for (std::size_t c = 0; c < unit.size(); ++c) unit[c] = a[c] / na;
    const int bucket = i < horizon ? 0 : (i < 2 * horizon ? 1 : 2);
    for (std::size_t p = 0; p < np; ++p) {
      const double d = dist2(unit, report.probes[p]);
      for (std::size_t r = 0; r < nr; ++r) {
        if (d < report.radii[r]) {
          report.mass[p][r][static_cast<std::size_t>(bucket)] += na;
        }
      }
    }
  }
  // prefix-accumulate the buckets into masses at N, 2N, 4N
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t r = 0; r < nr; ++r) {
      report.mass[p][r][1] += report.mass[p][r][0];
      report.mass[p][r][2] += report.mass[p][r][1];
    }
  }

  std::size_t smallest = 0;
  for (std::size_t r = 1; r < nr; ++r) {
    if (report.radii[r] < report.radii[smallest]) smallest = r;
  }
  report.candidate.assign(np, false);
  for (std::size_t p = 0; p < np; ++p) {
    const auto& m = report.mass[p][smallest];
    report.candidate[p] = (m[1] - m[0] >= kGrowthMargin) && (m[2] - m[1] >= kGrowthMargin);
  }
  return report;
}

LevyDecomposition levy_decompose_from(const SequenceSpec& spec, const Vec& direction, long first,
                                      long horizon, const std::vector<char>* excluded) {
  check_unit(direction, spec.dim(), "direction");
  if (horizon < 1) throw PreconditionError("horizon must be positive");
  const long start = spec.start_index();
  const long last = start + horizon - 1;
  if (first < start) first = start;

  LevyDecomposition out;
  out.direction = direction;
  out.horizon = horizon;
  out.omega_mass = 0.0;

  int m = 1;
  double gamma = 0.5;
  LevyBlock block{1, gamma, -1, -1, {}, 0.0};
  Vec unit(static_cast<std::size_t>(spec.dim()));

  for (long n = first; n <= last; ++n) {
    if (excluded && (*excluded)[static_cast<std::size_t>(n - start)]) continue;
    const Vec a = spec.term(n);
    const double na = norm2(a);
    if (na == 0.0 || na > 1.0) continue;
    for (std::size_t c = 0; c < unit.size(); ++c) unit[c] = a[c] / na;
    if (!(dist2(unit, direction) < gamma)) continue;

    const double alpha = dot(a, direction);
    Vec omega(a.size());
    for (std::size_t c = 0; c < a.size(); ++c) omega[c] = a[c] - alpha * direction[c];

    if (block.begin < 0) block.begin = n;
    block.end = n;
    block.members.push_back(n);
    block.sigma += alpha;
    out.indices.push_back(n);
    out.alpha.push_back(alpha);
    out.omega_mass += norm2(omega);
    out.omega.push_back(std::move(omega));

    if (block.sigma >= 1.0) {
      out.blocks.push_back(std::move(block));
      ++m;
      gamma = std::ldexp(1.0, -m);
      block = LevyBlock{m, gamma, -1, -1, {}, 0.0};
    }
  }

  if (!block.members.empty()) {
    out.incomplete = std::move(block);
  }
  if (out.blocks.empty()) {
    throw BudgetError("insufficient directional mass at horizon " + std::to_string(horizon) +
                      ": no block reached sigma >= 1 (not a disproof)");
  }
  return out;
}

LevyDecomposition levy_decompose(const SequenceSpec& spec, const Vec& direction, long horizon) {
  return levy_decompose_from(spec, direction, spec.start_index(), horizon, nullptr);
}

LsReport ls_estimate(const SequenceSpec& spec, long horizon, int probe_count, std::uint64_t seed) {
  if (horizon < 2) throw PreconditionError("horizon must be at least 2");
  if (probe_count < 1) throw PreconditionError("probe count must be positive");

  LsReport report;
  report.horizon = horizon;
  report.probes = probe_directions(spec.dim(), probe_count, seed);
  const std::size_t np = report.probes.size();
  report.mass.assign(np, 0.0);
  report.half_mass.assign(np, 0.0);

  const long start = spec.start_index();
  const long half = horizon / 2;
  for (long i = 0; i < horizon; ++i) {
    const Vec a = spec.term(start + i);
    for (std::size_t p = 0; p < np; ++p) {
      const double contrib = std::abs(dot(a, report.probes[p]));
      report.mass[p] += contrib;
      if (i < half) report.half_mass[p] += contrib;
    }
  }
  report.argmin = 0;
  for (std::size_t p = 1; p < np; ++p) {
    if (report.mass[p] < report.mass[report.argmin]) report.argmin = p;
  }
  report.min_mass = report.mass[report.argmin];
  return report;
}

namespace {

struct SubsetState {
  Vec residual;
  std::vector<char> taken;  // per candidate offset
};

// One in-order pass: take any candidate that strictly shrinks the residual.
bool improvement_pass(const SequenceSpec& spec, long split, long last, SubsetState& st) {
  bool changed = false;
  const double shrink = 1.0 - 1e-15;
  for (long n = split; n <= last; ++n) {
    const std::size_t off = static_cast<std::size_t>(n - split);
    if (st.taken[off]) continue;
    const Vec a = spec.term(n);
    Vec next = st.residual;
    for (std::size_t c = 0; c < next.size(); ++c) next[c] -= a[c];
    if (norm2(next) < norm2(st.residual) * shrink) {
      st.residual = std::move(next);
      st.taken[off] = 1;
      changed = true;
    }
  }
  return changed;
}

// Exhaustive pairing over the last few unused candidates: split them in two
// halves, enumerate one half into a quantized grid, scan the other half.
void closing_search(const SequenceSpec& spec, long split, long last, double cell,
                    SubsetState& st) {
  std::vector<long> unused;
  for (long n = last; n >= split && unused.size() < 30; --n) {
    if (!st.taken[static_cast<std::size_t>(n - split)]) unused.push_back(n);
  }
  if (unused.empty()) return;
  std::reverse(unused.begin(), unused.end());
  const std::size_t ha = unused.size() / 2;
  const std::size_t hb = unused.size() - ha;
  const std::size_t dim = st.residual.size();

  auto subset_sum = [&](const std::vector<long>& pool, std::size_t bits, std::size_t count) {
    Vec s(dim, 0.0);
    for (std::size_t t = 0; t < count; ++t) {
      if ((bits >> t) & 1u) {
        const Vec a = spec.term(pool[t]);
        for (std::size_t c = 0; c < dim; ++c) s[c] += a[c];
      }
    }
    return s;
  };

  std::vector<long> pool_a(unused.begin(), unused.begin() + static_cast<long>(ha));
  std::vector<long> pool_b(unused.begin() + static_cast<long>(ha), unused.end());

  auto key_of = [&](const Vec& v) {
    std::uint64_t key = 1469598103934665603ull;
    for (std::size_t c = 0; c < dim; ++c) {
      const auto q = static_cast<std::int64_t>(std::floor(v[c] / cell));
      key ^= static_cast<std::uint64_t>(q) + 0x9e3779b97f4a7c15ull + (key << 6) + (key >> 2);
    }
    return key;
  };

  // grid of half-A sums; exact best pair found by probing neighbor cells
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> grid;
  const std::size_t na = std::size_t{1} << ha;
  std::vector<Vec> sums_a(na);
  for (std::size_t bits = 0; bits < na; ++bits) {
    sums_a[bits] = subset_sum(pool_a, bits, ha);
    grid[key_of(sums_a[bits])].push_back(static_cast<std::uint32_t>(bits));
  }

  double best = norm2(st.residual);
  std::size_t best_a = 0, best_b = 0;
  bool improved = false;
  const std::size_t nb = std::size_t{1} << hb;
  std::vector<std::int64_t> cells(dim);
  for (std::size_t bits = 0; bits < nb; ++bits) {
    const Vec sb = subset_sum(pool_b, bits, hb);
    Vec want(dim);
    for (std::size_t c = 0; c < dim; ++c) want[c] = st.residual[c] - sb[c];
    // probe the cell of `want` and neighbors
    for (std::size_t c = 0; c < dim; ++c) {
      cells[c] = static_cast<std::int64_t>(std::floor(want[c] / cell));
    }
    const std::size_t neighbors = std::size_t{1} << (2 * dim);
    for (std::size_t nb_mask = 0; nb_mask < neighbors; ++nb_mask) {
      Vec probe(dim);
      bool valid = true;
      for (std::size_t c = 0; c < dim; ++c) {
        const int delta = static_cast<int>((nb_mask >> (2 * c)) & 3u) - 1;
        if (delta == 2) {
          valid = false;
          break;
        }
        probe[c] = (static_cast<double>(cells[c]) + delta + 0.5) * cell;
      }
      if (!valid) continue;
      auto it = grid.find(key_of(probe));
      if (it == grid.end()) continue;
      for (std::uint32_t abits : it->second) {
        Vec total(dim);
        for (std::size_t c = 0; c < dim; ++c) {
          total[c] = st.residual[c] - sb[c] - sums_a[abits][c];
        }
        const double score = norm2(total);
        if (score < best) {
          best = score;
          best_a = abits;
          best_b = bits;
          improved = true;
        }
      }
    }
  }

  if (improved) {
    for (std::size_t t = 0; t < ha; ++t) {
      if ((best_a >> t) & 1u) st.taken[static_cast<std::size_t>(pool_a[t] - split)] = 1;
    }
    for (std::size_t t = 0; t < hb; ++t) {
      if ((best_b >> t) & 1u) st.taken[static_cast<std::size_t>(pool_b[t] - split)] = 1;
    }
  }
}

}  // namespace

ApproxTargetResult approximate_target(const SequenceSpec& spec, const Vec& target, double delta,
                                      long horizon, PrefixPolicy policy) {
  if (static_cast<int>(target.size()) != spec.dim()) {
    throw PreconditionError("target dimension does not match the sequence");
  }
  if (!(delta > 0.0)) throw PreconditionError("delta must be positive");
  if (horizon < 1) throw PreconditionError("horizon must be positive");
  if (!spec.is_null()) throw PreconditionError("approximate_target requires a null sequence");

  const long start = spec.start_index();
  const long last = start + horizon - 1;
  const int dim = spec.dim();
  const double K = 2.0 * kBalancerCEmp;

  auto build_result = [&](const SignWord& signs, long split, std::vector<long> subset,
                          bool shortcut) {
    PartialSumTrace trace = partial_sums(spec, signs, target);
    ApproxTargetResult res{signs,
                           std::move(trace),
                           policy,
                           split,
                           std::move(subset),
                           0.0,
                           delta,
                           shortcut};
    res.achieved = res.trace.dist_at(static_cast<long>(res.trace.size()) - 1);
    return res;
  };

  // exact cancellation shortcut for a zero target on pairable terms
  bool zero_target = true;
  for (double x : target) zero_target &= (x == 0.0);
  if (zero_target) {
    const long pairs = horizon / 2;
    if (pairs >= 1) {
      std::vector<Vec> head;
      head.reserve(static_cast<std::size_t>(2 * pairs));
      for (long n = start; n < start + 2 * pairs; ++n) head.push_back(spec.term(n));
      if (auto paired = balance_pairing(head)) {
        SignWord signs = std::move(paired->signs);
        for (long n = start + 2 * pairs; n <= last; ++n) signs.push_back(1);
        ApproxTargetResult res = build_result(signs, start, {}, true);
        if (res.achieved < delta) return res;
      }
    }
  }

  // head: decay threshold leaves the tail balancer a delta/2 budget in l2
  const double threshold = delta / (2.0 * K * std::sqrt(static_cast<double>(dim)));
  long split = spec.first_index_below(threshold, last);
  if (split < 0) {
    throw BudgetError("density not witnessed at horizon " + std::to_string(horizon) +
                      ": terms never decay below " + std::to_string(threshold));
  }

  SignWord signs(static_cast<std::size_t>(horizon), 0);
  Vec head_sum(static_cast<std::size_t>(dim), 0.0);
  for (long n = start; n < split; ++n) {
    const Vec a = spec.term(n);
    Sign s = 1;
    if (policy == PrefixPolicy::GreedyPrefix) {
      Vec drift(head_sum);
      for (std::size_t c = 0; c < drift.size(); ++c) drift[c] -= target[c];
      s = dot(drift, a) > 0.0 ? Sign(-1) : Sign(1);
    }
    signs[static_cast<std::size_t>(n - start)] = s;
    add_scaled(head_sum, a, static_cast<double>(s));
  }

  SubsetState st;
  st.residual.assign(static_cast<std::size_t>(dim), 0.0);
  for (int c = 0; c < dim; ++c) st.residual[static_cast<std::size_t>(c)] = target[static_cast<std::size_t>(c)] - head_sum[static_cast<std::size_t>(c)];
  st.taken.assign(static_cast<std::size_t>(last - split + 1), 0);

  for (int pass = 0; pass < 32; ++pass) {
    if (norm2(st.residual) <= 0.25 * delta) break;
    if (!improvement_pass(spec, split, last, st)) break;
  }
  if (norm2(st.residual) >= 0.5 * delta) {
    closing_search(spec, split, last, std::max(delta / (4.0 * std::sqrt(static_cast<double>(dim))), 1e-300), st);
    // recompute the residual exactly after the closing search
    Vec r(target);
    for (std::size_t c = 0; c < r.size(); ++c) r[c] -= head_sum[c];
    for (long n = split; n <= last; ++n) {
      if (st.taken[static_cast<std::size_t>(n - split)]) {
        const Vec a = spec.term(n);
        for (std::size_t c = 0; c < r.size(); ++c) r[c] -= a[c];
      }
    }
    st.residual = std::move(r);
  }
  if (norm2(st.residual) >= 0.5 * delta) {
    throw BudgetError("density not witnessed at horizon " + std::to_string(horizon) +
                      ": residual " + std::to_string(norm2(st.residual)) + " exceeds delta/2");
  }

  // tail balancing of everything the subset did not take
  std::vector<long> subset;
  std::vector<Vec> leftover_terms;
  std::vector<long> leftover_indices;
  for (long n = split; n <= last; ++n) {
    if (st.taken[static_cast<std::size_t>(n - split)]) {
      subset.push_back(n);
      signs[static_cast<std::size_t>(n - start)] = 1;
    } else {
      leftover_indices.push_back(n);
      leftover_terms.push_back(spec.term(n));
    }
  }
  if (!leftover_terms.empty()) {
    BalanceResult balanced = balance_greedy(leftover_terms);
    for (std::size_t i = 0; i < leftover_indices.size(); ++i) {
      signs[static_cast<std::size_t>(leftover_indices[i] - start)] = balanced.signs[i];
    }
  }

  ApproxTargetResult res = build_result(signs, split, std::move(subset), false);
  if (!(res.achieved < delta)) {
    throw BudgetError("density not witnessed at horizon " + std::to_string(horizon) +
                      ": achieved " + std::to_string(res.achieved) + " >= delta");
  }
  return res;
}

}  // namespace signum
