#include "signum/target.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>

#include "signum/balance.hpp"
#include "signum/blocks.hpp"
#include "signum/dimension.hpp"
#include "signum/errors.hpp"

namespace signum {

namespace {

// d x d solve, Gaussian elimination with partial pivoting. columns[c] is the
// c-th basis vector; solves sum_c x_c * columns[c] = rhs.
Vec solve_linear(const std::vector<Vec>& columns, const Vec& rhs) {
  const std::size_t d = rhs.size();
  std::vector<Vec> a(d, Vec(d + 1, 0.0));
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) a[r][c] = columns[c][r];
    a[r][d] = rhs[r];
  }
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-12) {
      throw PreconditionError("direction system is numerically singular (pivot below 1e-12)");
    }
    std::swap(a[piv], a[col]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= d; ++c) a[r][c] -= f * a[col][c];
    }
  }
  Vec x(d);
  for (std::size_t r = 0; r < d; ++r) x[r] = a[r][d] / a[r][r];
  return x;
}

double gram_determinant(const std::vector<Vec>& dirs) {
  const std::size_t d = dirs.size();
  std::vector<Vec> g(d, Vec(d, 0.0));
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) g[r][c] = dot(dirs[r], dirs[c]);
  }
  double det = 1.0;
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::abs(g[r][col]) > std::abs(g[piv][col])) piv = r;
    }
    if (g[piv][col] == 0.0) return 0.0;
    if (piv != col) {
      std::swap(g[piv], g[col]);
      det = -det;
    }
    det *= g[col][col];
    for (std::size_t r = col + 1; r < d; ++r) {
      const double f = g[r][col] / g[col][col];
      for (std::size_t c = col; c < d; ++c) g[r][c] -= f * g[col][c];
    }
  }
  return det;
}

std::vector<ProvenanceSpan> rle_spans(const std::vector<std::uint8_t>& src) {
  std::vector<ProvenanceSpan> spans;
  std::size_t i = 0;
  while (i < src.size()) {
    std::size_t j = i + 1;
    while (j < src.size() && src[j] == src[i]) ++j;
    spans.push_back({i, j, static_cast<SignSource>(src[i])});
    i = j;
  }
  return spans;
}

void check_directions(const SequenceSpec& spec, const char* op) {
  if (static_cast<int>(spec.levy_directions().size()) != spec.dim()) {
    throw PreconditionError(std::string(op) +
                            " needs exactly d declared accumulation directions "
                            "(levy_direction.<i> in the sequence description)");
  }
}

}  // namespace

HitResult hit_target(const SequenceSpec& spec, const Vec& target, int stages, long horizon) {
  const int d = spec.dim();
  if (static_cast<int>(target.size()) != d) {
    throw PreconditionError("target dimension does not match the sequence");
  }
  if (stages < 1) throw PreconditionError("at least one stage is required");
  if (horizon < 1) throw PreconditionError("horizon must be positive");
  if (!spec.is_null()) throw PreconditionError("stage construction requires a null sequence");
  check_directions(spec, "hit_target");
  const std::vector<Vec>& dirs = spec.levy_directions();

  TargetPlan plan;
  plan.target = target;
  plan.directions = dirs;
  plan.filler_count = 0;
  plan.gram_det = gram_determinant(dirs);
  if (std::abs(plan.gram_det) <= 1e-9) {
    throw PreconditionError("accumulation directions are dependent (|Gram det| <= 1e-9)");
  }

  const long start = spec.start_index();
  const long last = start + horizon - 1;

  long head_end = spec.first_index_below(std::nextafter(1.0, 0.0), last);
  if (head_end < 0) {
    throw BudgetError("term norms never fall below 1 within the horizon");
  }
  plan.head_end = head_end;

  std::vector<char> excluded(static_cast<std::size_t>(horizon), 0);
  std::vector<LevyDecomposition> decomp;
  decomp.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    LevyDecomposition dec = levy_decompose_from(spec, dirs[static_cast<std::size_t>(i)], head_end,
                                                horizon, &excluded);
    for (long n : dec.indices) excluded[static_cast<std::size_t>(n - start)] = 1;
    plan.omega_mass.push_back(dec.omega_mass);
    plan.carriers.push_back(dec.indices);
    decomp.push_back(std::move(dec));
  }
  plan.k0 = 2.0 * kBalancerCEmp;
  plan.c_first = plan.k0;
  for (int i = 0; i < d; ++i) plan.c_first += 1.0 + plan.omega_mass[static_cast<std::size_t>(i)];
  plan.c_first_coarse = 2.0 * plan.c_first;
  plan.c_later = static_cast<double>(d) + plan.k0;

  std::vector<std::int8_t> owner(static_cast<std::size_t>(horizon), -1);
  std::vector<double> alpha_at(static_cast<std::size_t>(horizon), 0.0);
  std::vector<std::vector<double>> osuffix(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const LevyDecomposition& dec = decomp[static_cast<std::size_t>(i)];
    const std::size_t cnt = dec.indices.size();
    for (std::size_t t = 0; t < cnt; ++t) {
      owner[static_cast<std::size_t>(dec.indices[t] - start)] = static_cast<std::int8_t>(i);
      alpha_at[static_cast<std::size_t>(dec.indices[t] - start)] = dec.alpha[t];
    }
    std::vector<double>& suf = osuffix[static_cast<std::size_t>(i)];
    suf.assign(cnt + 1, 0.0);
    for (std::size_t t = cnt; t-- > 0;) {
      suf[t] = suf[t + 1] + norm2(dec.omega[t]);
    }
  }
  auto omega_tail = [&](int i, long q) {
    const std::vector<long>& idx = decomp[static_cast<std::size_t>(i)].indices;
    const auto it = std::lower_bound(idx.begin(), idx.end(), q);
    return osuffix[static_cast<std::size_t>(i)][static_cast<std::size_t>(it - idx.begin())];
  };

  SignWord signs(static_cast<std::size_t>(horizon), 0);
  std::vector<std::uint8_t> src(static_cast<std::size_t>(horizon),
                                static_cast<std::uint8_t>(SignSource::Unset));
  PartialSumTrace trace(d, start, target);
  Vec sum(static_cast<std::size_t>(d), 0.0);

  for (long n = start; n < head_end; ++n) {
    signs[static_cast<std::size_t>(n - start)] = 1;
    src[static_cast<std::size_t>(n - start)] = static_cast<std::uint8_t>(SignSource::Prefix);
    add_scaled(sum, spec.term(n), 1.0);
    trace.append(std::span<const double>(sum.data(), sum.size()));
  }

  Vec z(static_cast<std::size_t>(d));
  for (int c = 0; c < d; ++c) {
    z[static_cast<std::size_t>(c)] = target[static_cast<std::size_t>(c)] - sum[static_cast<std::size_t>(c)];
  }
  plan.beta0 = solve_linear(dirs, z);

  std::vector<double> T(static_cast<std::size_t>(d), 0.0);
  std::vector<double> goal(static_cast<std::size_t>(d), 0.0);
  Vec f_acc(static_cast<std::size_t>(d), 0.0);

  long n = head_end;
  bool complete = true;
  for (int m = 1; m <= stages; ++m) {
    const Vec beta = solve_linear(dirs, z);
    for (int i = 0; i < d; ++i) {
      goal[static_cast<std::size_t>(i)] = T[static_cast<std::size_t>(i)] + beta[static_cast<std::size_t>(i)];
    }
    const double tol = std::ldexp(1.0, -(m + 1));
    const double cap = std::ldexp(1.0, -m);
    std::fill(f_acc.begin(), f_acc.end(), 0.0);

    StageRecord rec;
    rec.stage = m;
    rec.begin = n;
    rec.tolerance = tol;
    rec.stage_targets = beta;
    rec.max_within_norm = 0.0;
    rec.closed = false;
    rec.claimed_bound = (m == 1) ? plan.c_first / 2.0 : plan.c_later * std::ldexp(1.0, -m);
    if (m == 1) {
      rec.within_bound = std::numeric_limits<double>::quiet_NaN();
    } else {
      const double c_prev = (m == 2) ? plan.c_first : plan.c_later;
      rec.within_bound =
          static_cast<double>(d) * std::ldexp(1.0, -(m - 2)) + c_prev * std::ldexp(1.0, -(m - 1));
    }

    auto stage_done = [&](long q) {
      if (!(spec.envelope(q) < cap)) return false;
      for (int i = 0; i < d; ++i) {
        if (std::abs(T[static_cast<std::size_t>(i)] - goal[static_cast<std::size_t>(i)]) > tol) {
          return false;
        }
      }
      for (int i = 0; i < d; ++i) {
        if (!(omega_tail(i, q) < cap)) return false;
      }
      return true;
    };

    while (n <= last && !stage_done(n)) {
      const Vec a = spec.term(n);
      Sign s;
      const int own = owner[static_cast<std::size_t>(n - start)];
      if (own >= 0) {
        const double alpha = alpha_at[static_cast<std::size_t>(n - start)];
        s = (T[static_cast<std::size_t>(own)] <= goal[static_cast<std::size_t>(own)]) ? Sign(1)
                                                                                      : Sign(-1);
        T[static_cast<std::size_t>(own)] += static_cast<double>(s) * alpha;
        src[static_cast<std::size_t>(n - start)] = static_cast<std::uint8_t>(SignSource::Carrier);
      } else {
        s = dot(f_acc, a) > 0.0 ? Sign(-1) : Sign(1);
        add_scaled(f_acc, a, static_cast<double>(s));
        src[static_cast<std::size_t>(n - start)] = static_cast<std::uint8_t>(SignSource::Filler);
        ++plan.filler_count;
      }
      signs[static_cast<std::size_t>(n - start)] = s;
      add_scaled(sum, a, static_cast<double>(s));
      trace.append(std::span<const double>(sum.data(), sum.size()));
      rec.max_within_norm =
          std::max(rec.max_within_norm, trace.dist_at(static_cast<long>(trace.size()) - 1));
      ++n;
    }
    rec.end = n;
    for (int c = 0; c < d; ++c) {
      z[static_cast<std::size_t>(c)] =
          target[static_cast<std::size_t>(c)] - sum[static_cast<std::size_t>(c)];
    }
    rec.residual_norm = norm2(z);
    rec.closed = stage_done(n);
    plan.stages.push_back(rec);
    if (!rec.closed) {
      complete = false;
      break;
    }
  }
  plan.complete = complete;

  const long q_end = plan.stages.empty() ? head_end : plan.stages.back().end;
  signs.resize(static_cast<std::size_t>(q_end - start));
  src.resize(static_cast<std::size_t>(q_end - start));

  // Carriers past the constructed window were scanned but never signed; the
  // reported lists cover exactly the indices this construction used.
  for (std::vector<long>& carrier : plan.carriers) {
    while (!carrier.empty() && carrier.back() >= q_end) carrier.pop_back();
  }

  HitResult res{std::move(signs), std::move(plan), std::move(trace), rle_spans(src)};
  return res;
}

TriplePartition partition_for_dimension(const SequenceSpec& spec, const Vec& target, int k,
                                        int levels) {
  const int d = spec.dim();
  if (static_cast<int>(target.size()) != d) {
    throw PreconditionError("target dimension does not match the sequence");
  }
  if (k < d + 2) {
    throw PreconditionError("block width k must be at least d + 2");
  }
  if (levels < 1) throw PreconditionError("at least one level is required");
  if (static_cast<long>(levels) * (k - d) > 24) {
    throw BudgetError("partition budget is levels*(k-d) <= 24");
  }
  if (!spec.is_null()) throw PreconditionError("partition requires a null sequence");
  check_directions(spec, "partition_for_dimension");
  const std::vector<Vec>& dirs = spec.levy_directions();

  const long start = spec.start_index();
  const long window = static_cast<long>(k) * levels;
  const long window_end = start + window;

  // disjoint decompositions inside the window, thinned to one per block
  std::vector<char> excluded(static_cast<std::size_t>(window), 0);
  std::vector<std::vector<long>> carrier_of_dir(static_cast<std::size_t>(d));
  std::vector<std::vector<double>> alpha_of_dir(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    LevyDecomposition dec =
        levy_decompose_from(spec, dirs[static_cast<std::size_t>(i)], start, window, &excluded);
    long prev_block = -1;
    for (std::size_t t = 0; t < dec.indices.size(); ++t) {
      const long n = dec.indices[t];
      const long b = (n - start) / k;
      if (b == prev_block) continue;  // keep only the first member per block
      prev_block = b;
      carrier_of_dir[static_cast<std::size_t>(i)].push_back(n);
      alpha_of_dir[static_cast<std::size_t>(i)].push_back(dec.alpha[t]);
      excluded[static_cast<std::size_t>(n - start)] = 1;
    }
  }

  TriplePartition part;
  part.k = k;
  part.levels = levels;
  part.window_end = window_end;

  std::vector<std::int8_t> role(static_cast<std::size_t>(window), 0);  // 0 free, 1 carrier, 2 filler
  for (int i = 0; i < d; ++i) {
    for (long n : carrier_of_dir[static_cast<std::size_t>(i)]) {
      role[static_cast<std::size_t>(n - start)] = 1;
    }
  }

  for (int b = 0; b < levels; ++b) {
    BlockTriple bt;
    bt.block = b;
    bt.carrier.assign(static_cast<std::size_t>(d), -1);
    const long bbegin = start + static_cast<long>(b) * k;
    const long bend = bbegin + k;
    int present = 0;
    for (int i = 0; i < d; ++i) {
      for (long n : carrier_of_dir[static_cast<std::size_t>(i)]) {
        if (n >= bbegin && n < bend) {
          bt.carrier[static_cast<std::size_t>(i)] = n;
          ++present;
          break;
        }
      }
    }
    for (long n = bbegin; n < bend && present + static_cast<int>(bt.filler.size()) < d; ++n) {
      if (role[static_cast<std::size_t>(n - start)] == 0) {
        role[static_cast<std::size_t>(n - start)] = 2;
        bt.filler.push_back(n);
      }
    }
    for (long n = bbegin; n < bend; ++n) {
      if (role[static_cast<std::size_t>(n - start)] == 0) bt.free_indices.push_back(n);
    }
    if (static_cast<int>(bt.free_indices.size()) != k - d) {
      throw PreconditionError("block " + std::to_string(b) + " has " +
                              std::to_string(bt.free_indices.size()) +
                              " free indices, expected " + std::to_string(k - d));
    }
    part.blocks.push_back(std::move(bt));
  }

  // class counting: per block, enumerate all free sign words exhaustively
  // and collect the distinct flip classes; levels multiply independent blocks
  const int fw = k - d;
  long running = 1;
  for (int b = 0; b < levels; ++b) {
    std::set<std::uint64_t> classes;
    const std::uint64_t words = std::uint64_t{1} << fw;
    for (std::uint64_t w = 0; w < words; ++w) {
      const SignWord sw = unpack_sign_word(w, fw);
      classes.insert(theta_class_of(std::span<const Sign>(sw.data(), sw.size())));
    }
    running *= static_cast<long>(classes.size());
    part.class_counts.push_back(running);
    part.class_floor.push_back(1L << (static_cast<long>(b + 1) * (fw - 1)));
  }

  // demo signing: free +1, filler balanced, carriers steered toward the
  // target share that free + filler leave over
  SignWord signs(static_cast<std::size_t>(window), 0);
  std::vector<std::uint8_t> src(static_cast<std::size_t>(window),
                                static_cast<std::uint8_t>(SignSource::Unset));
  Vec fixed_sum(static_cast<std::size_t>(d), 0.0);

  std::vector<long> filler_all;
  std::vector<Vec> filler_terms;
  for (long n = start; n < window_end; ++n) {
    const std::size_t off = static_cast<std::size_t>(n - start);
    if (role[off] == 0) {
      signs[off] = 1;
      src[off] = static_cast<std::uint8_t>(SignSource::Free);
      add_scaled(fixed_sum, spec.term(n), 1.0);
    } else if (role[off] == 2) {
      filler_all.push_back(n);
      filler_terms.push_back(spec.term(n));
    }
  }
  if (!filler_terms.empty()) {
    const BalanceResult br = balance_greedy(filler_terms);
    for (std::size_t t = 0; t < filler_all.size(); ++t) {
      const std::size_t off = static_cast<std::size_t>(filler_all[t] - start);
      signs[off] = br.signs[t];
      src[off] = static_cast<std::uint8_t>(SignSource::Filler);
      add_scaled(fixed_sum, filler_terms[t], static_cast<double>(br.signs[t]));
    }
  }

  Vec residual(static_cast<std::size_t>(d));
  for (int c = 0; c < d; ++c) {
    residual[static_cast<std::size_t>(c)] =
        target[static_cast<std::size_t>(c)] - fixed_sum[static_cast<std::size_t>(c)];
  }
  const Vec beta = solve_linear(dirs, residual);
  Vec carrier_sum(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < d; ++i) {
    double t_acc = 0.0;
    for (std::size_t t = 0; t < carrier_of_dir[static_cast<std::size_t>(i)].size(); ++t) {
      const long n = carrier_of_dir[static_cast<std::size_t>(i)][t];
      const std::size_t off = static_cast<std::size_t>(n - start);
      const Sign s = (t_acc <= beta[static_cast<std::size_t>(i)]) ? Sign(1) : Sign(-1);
      t_acc += static_cast<double>(s) * alpha_of_dir[static_cast<std::size_t>(i)][t];
      signs[off] = s;
      src[off] = static_cast<std::uint8_t>(SignSource::Carrier);
      add_scaled(carrier_sum, spec.term(n), static_cast<double>(s));
    }
  }

  Vec total(static_cast<std::size_t>(d));
  for (int c = 0; c < d; ++c) {
    total[static_cast<std::size_t>(c)] =
        fixed_sum[static_cast<std::size_t>(c)] + carrier_sum[static_cast<std::size_t>(c)];
  }
  part.demo_residual = dist2(target, total);
  part.demo_signs = std::move(signs);
  part.provenance = rle_spans(src);
  return part;
}

}  // namespace signum
