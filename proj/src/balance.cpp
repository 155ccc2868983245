#include "signum/balance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "signum/errors.hpp"
#include "signum/rng.hpp"

namespace signum {

std::vector<Vec> corpus_instance(std::uint64_t index) {
  Rng rng(kCorpusSeed, index);
  std::vector<Vec> xs;
  xs.reserve(14);
  for (int i = 0; i < 14; ++i) {
    double theta = 6.283185307179586476925286766559 * rng.next_double();
    xs.push_back(Vec{std::cos(theta), std::sin(theta)});
  }
  return xs;
}

double max_prefix_norm_inf(std::span<const Vec> xs, std::span<const Sign> signs) {
  if (xs.size() != signs.size()) throw PreconditionError("sign count does not match vector count");
  std::size_t d = xs.empty() ? 0 : xs[0].size();
  Vec acc(d, 0.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    add_scaled(acc, xs[i], static_cast<double>(signs[i]));
    worst = std::max(worst, norminf(acc));
  }
  return worst;
}

namespace {

void check_input(std::span<const Vec> xs) {
  if (xs.empty()) throw PreconditionError("balancing needs at least one vector");
  std::size_t d = xs[0].size();
  for (const Vec& x : xs)
    if (x.size() != d) throw PreconditionError("balancing input has mixed dimensions");
}

struct ExhaustiveState {
  std::span<const Vec> xs;
  std::size_t d;
  SignWord current;
  SignWord best_word;
  double best = std::numeric_limits<double>::infinity();
  Vec acc;

  // Depth-first in lex order (+1 before -1). Pruning on "partial max >=
  // best" can never discard the lex-smallest optimum: a later word tying the
  // incumbent reaches the incumbent value at some prefix and is cut there.
  void walk(std::size_t depth, double partial_max) {
    if (partial_max >= best) return;
    if (depth == xs.size()) {
      best = partial_max;
      best_word = current;
      return;
    }
    for (Sign s : {Sign(1), Sign(-1)}) {
      add_scaled(acc, xs[depth], static_cast<double>(s));
      current[depth] = s;
      walk(depth + 1, std::max(partial_max, norminf(acc)));
      add_scaled(acc, xs[depth], -static_cast<double>(s));
    }
  }
};

}  // namespace

BalanceResult balance_exhaustive(std::span<const Vec> xs) {
  check_input(xs);
  if (xs.size() > 24) throw BudgetError("exhaustive balancing is capped at 24 vectors");
  ExhaustiveState st{xs,
                     xs[0].size(),
                     SignWord(xs.size(), 0),
                     {},
                     std::numeric_limits<double>::infinity(),
                     Vec(xs[0].size(), 0.0)};
  st.walk(0, 0.0);
  return BalanceResult{std::move(st.best_word), st.best, BalanceStrategy::Exhaustive};
}

BalanceResult balance_greedy(std::span<const Vec> xs) {
  check_input(xs);
  std::size_t d = xs[0].size();
  Vec acc(d, 0.0);
  SignWord signs;
  signs.reserve(xs.size());
  double worst = 0.0;
  for (const Vec& x : xs) {
    // Minimizing the Euclidean prefix norm reduces to the sign of <S, x>.
    Sign s = dot(acc, x) > 0.0 ? Sign(-1) : Sign(1);
    add_scaled(acc, x, static_cast<double>(s));
    signs.push_back(s);
    worst = std::max(worst, norminf(acc));
  }
  return BalanceResult{std::move(signs), worst, BalanceStrategy::Greedy};
}

std::optional<BalanceResult> balance_pairing(std::span<const Vec> xs) {
  check_input(xs);
  if (xs.size() % 2 != 0) return std::nullopt;
  double worst = 0.0;
  SignWord signs;
  signs.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); i += 2) {
    if (xs[i] != xs[i + 1]) return std::nullopt;
    worst = std::max(worst, norminf(xs[i]));
    signs.push_back(1);
    signs.push_back(-1);
  }
  return BalanceResult{std::move(signs), worst, BalanceStrategy::Pairing};
}

BlockConvergeResult block_sign_converge(const SequenceSpec& spec, long depth) {
  if (depth < 0) throw PreconditionError("depth must be nonnegative");
  if (!spec.is_null()) throw PreconditionError("block signing requires a certified null sequence");

  long start = spec.start_index();
  long end = start + depth;  // exclusive
  double M = spec.max_term_norm();

  BlockSigningPlan plan;
  plan.M = M;
  plan.K = 2.0 * kBalancerCEmp;
  plan.sup_prefix_inf = 0.0;
  plan.max_term_inf = 0.0;

  SignWord signs;
  signs.reserve(static_cast<std::size_t>(depth));

  Vec total(static_cast<std::size_t>(spec.dim()), 0.0);
  PartialSumTrace trace(spec.dim(), start, std::nullopt);
  trace.reserve(static_cast<std::size_t>(depth));

  long q = start;
  int m = 0;
  while (q < end) {
    // Advance m past levels whose blocks would be empty; a zero envelope
    // (explicit lists' tails) would satisfy every level, so it gets one
    // final block instead.
    long next;
    if (M == 0.0 || spec.envelope(q) == 0.0) {
      next = end;
    } else {
      while (true) {
        long cand = spec.first_index_below(M * std::ldexp(1.0, -(m + 1)), end - 1);
        if (cand == -1) {
          next = end;
          break;
        }
        if (cand > q) {
          next = std::min(cand, end);
          break;
        }
        ++m;  // this level's block is empty
      }
    }

    std::vector<Vec> block_terms;
    block_terms.reserve(static_cast<std::size_t>(next - q));
    for (long n = q; n < next; ++n) block_terms.push_back(spec.term(n));

    BalanceResult br = balance_greedy(block_terms);

    for (std::size_t i = 0; i < block_terms.size(); ++i) {
      add_scaled(total, block_terms[i], static_cast<double>(br.signs[i]));
      trace.append(total);
      plan.sup_prefix_inf = std::max(plan.sup_prefix_inf, norminf(total));
      plan.max_term_inf = std::max(plan.max_term_inf, norminf(block_terms[i]));
      signs.push_back(br.signs[i]);
    }

    plan.blocks.push_back(SigningBlock{q, next, m, M * std::ldexp(1.0, -m), br.max_prefix_norm});
    q = next;
    ++m;
  }

  return BlockConvergeResult{std::move(signs), std::move(plan), std::move(trace)};
}

}  // namespace signum
