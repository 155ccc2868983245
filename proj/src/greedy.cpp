#include "signum/greedy.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "signum/errors.hpp"
#include "signum/parallel.hpp"

namespace signum {

namespace {

void require_scalar(const SequenceSpec& spec, const char* op) {
  if (spec.dim() != 1) {
    throw PreconditionError(std::string(op) + " requires a one-dimensional sequence");
  }
  if (!spec.is_null()) {
    throw PreconditionError(std::string(op) + " requires a null sequence");
  }
}

}  // namespace

GreedyRun greedy_signs(const SequenceSpec& spec, double target, long depth) {
  require_scalar(spec, "greedy_signs");
  if (!spec.certified_non_l1()) {
    throw PreconditionError(
        "greedy_signs requires a sequence certified non-summable; "
        "a summable tail cannot bridge arbitrary gaps to the target");
  }
  if (depth <= 0) {
    throw PreconditionError("greedy_signs requires a positive depth");
  }

  GreedyRun run{SignWord{},
                PartialSumTrace(1, spec.start_index(), Vec{target}),
                std::abs(target) + spec.envelope(spec.start_index()),
                0.0,
                -1};
  run.signs.reserve(static_cast<std::size_t>(depth));
  run.trace.reserve(depth);

  const bool climbing = (0.0 <= target);
  double sum = 0.0;
  for (long i = 0; i < depth; ++i) {
    const long n = spec.start_index() + i;
    const double a = spec.term(n)[0];
    const Sign s = (sum <= target) ? Sign(1) : Sign(-1);
    sum += static_cast<double>(s) * a;
    run.signs.push_back(s);
    run.trace.append(std::span<const double>(&sum, 1));
    const double dev = std::abs(target - sum);
    if (dev > run.max_abs_dev) run.max_abs_dev = dev;
    if (run.first_crossing < 0 && (climbing ? sum >= target : sum <= target)) {
      run.first_crossing = n;
    }
  }
  return run;
}

long first_stable_position(const PartialSumTrace& trace, double delta) {
  const long n = static_cast<long>(trace.size());
  if (n == 0) return -1;
  long last_bad = -1;
  for (long p = n - 1; p >= 0; --p) {
    if (!(trace.dist_at(p) < delta)) {
      last_bad = p;
      break;
    }
  }
  if (last_bad == n - 1) return -1;
  return last_bad + 1;
}

bool lambda_block_survives(const Rational& s_prev, const Rational& s_next, const Rational& L,
                           const Rational& max_abs_term) {
  const Rational delta = s_next - s_prev;
  if ((s_prev - L) * delta > 0) return false;
  return rational_abs(delta) >= max_abs_term;
}

namespace {

bool lambda_block_survives_f(double s_prev, double s_next, double L, double max_abs_term) {
  const double delta = s_next - s_prev;
  if ((s_prev - L) * delta > 0.0) return false;
  return std::abs(delta) >= max_abs_term;
}

void check_lambda_params(const SequenceSpec& spec, const LambdaParams& params) {
  require_scalar(spec, "lambda operations");
  if (params.k < 2) {
    throw PreconditionError("block width k must be at least 2");
  }
}

}  // namespace

BlockIncrements block_increments_exact(const SequenceSpec& spec, const BlockScheme& scheme,
                                       long j) {
  const int k = scheme.k;
  const long begin = scheme.block_begin(j);
  std::vector<Rational> terms;
  terms.reserve(static_cast<std::size_t>(k));
  BlockIncrements out;
  out.max_abs_term = 0;
  for (int t = 0; t < k; ++t) {
    std::vector<Rational> v = spec.term_exact(begin + t);
    terms.push_back(v[0]);
    Rational a = rational_abs(v[0]);
    if (a > out.max_abs_term) out.max_abs_term = a;
  }
  const std::size_t count = std::size_t{1} << k;
  out.inc.resize(count);
  Rational all_plus = 0;
  for (const Rational& t : terms) all_plus += t;
  out.inc[0] = all_plus;
  for (std::size_t p = 1; p < count; ++p) {
    const std::size_t low = p & (~p + 1);
    const int bit = std::countr_zero(low);
    const int t = k - 1 - bit;
    out.inc[p] = out.inc[p ^ low] - 2 * terms[static_cast<std::size_t>(t)];
  }
  return out;
}

namespace {

struct BlockIncrementsF {
  std::vector<double> inc;
  double max_abs_term;
};

BlockIncrementsF block_increments_float(const SequenceSpec& spec, const BlockScheme& scheme,
                                        long j) {
  const int k = scheme.k;
  const long begin = scheme.block_begin(j);
  std::vector<double> terms(static_cast<std::size_t>(k));
  BlockIncrementsF out;
  out.max_abs_term = 0.0;
  for (int t = 0; t < k; ++t) {
    terms[static_cast<std::size_t>(t)] = spec.term(begin + t)[0];
    out.max_abs_term = std::max(out.max_abs_term, std::abs(terms[static_cast<std::size_t>(t)]));
  }
  const std::size_t count = std::size_t{1} << k;
  out.inc.resize(count);
  double all_plus = 0.0;
  for (double t : terms) all_plus += t;
  out.inc[0] = all_plus;
  for (std::size_t p = 1; p < count; ++p) {
    const std::size_t low = p & (~p + 1);
    const int bit = std::countr_zero(low);
    const int t = k - 1 - bit;
    out.inc[p] = out.inc[p ^ low] - 2.0 * terms[static_cast<std::size_t>(t)];
  }
  return out;
}

}  // namespace

LambdaReport lambda_membership(const SequenceSpec& spec, const LambdaParams& params,
                               std::span<const Sign> signs) {
  check_lambda_params(spec, params);
  if (signs.size() % static_cast<std::size_t>(params.k) != 0) {
    throw PreconditionError("sign word length must be a multiple of the block width");
  }
  // The empty word has no completed blocks, so membership holds vacuously.
  const BlockScheme scheme{spec.start_index(), params.k};
  const long blocks = static_cast<long>(signs.size()) / params.k;

  LambdaReport report{true, -1, 0};
  if (spec.exact_capable()) {
    const Rational L(params.target);
    Rational s_prev = 0;
    for (long j = 0; j < blocks; ++j) {
      Rational s_next = s_prev;
      Rational max_abs = 0;
      for (int t = 0; t < params.k; ++t) {
        const long n = scheme.block_begin(j) + t;
        const Rational a = spec.term_exact(n)[0];
        s_next += static_cast<int>(signs[static_cast<std::size_t>(j * params.k + t)]) * a;
        Rational aa = rational_abs(a);
        if (aa > max_abs) max_abs = aa;
      }
      const Rational delta = s_next - s_prev;
      if ((s_prev - L) * delta > 0) {
        return {false, j, 1};
      }
      if (rational_abs(delta) < max_abs) {
        return {false, j, 2};
      }
      s_prev = std::move(s_next);
    }
    return report;
  }

  double s_prev = 0.0;
  for (long j = 0; j < blocks; ++j) {
    double s_next = s_prev;
    double max_abs = 0.0;
    for (int t = 0; t < params.k; ++t) {
      const long n = scheme.block_begin(j) + t;
      const double a = spec.term(n)[0];
      s_next += static_cast<double>(signs[static_cast<std::size_t>(j * params.k + t)]) * a;
      max_abs = std::max(max_abs, std::abs(a));
    }
    const double delta = s_next - s_prev;
    if ((s_prev - params.target) * delta > 0.0) {
      return {false, j, 1};
    }
    if (std::abs(delta) < max_abs) {
      return {false, j, 2};
    }
    s_prev = s_next;
  }
  return report;
}

namespace {

template <typename Num, typename Table>
struct LevelState {
  struct Node {
    std::uint64_t word;
    Num s;
  };
  std::vector<Node> nodes;
};

template <typename Num, typename Table, typename Survives>
void expand_level(const Table& table, const Num& L, int k,
                  std::vector<typename LevelState<Num, Table>::Node>& parents,
                  std::vector<typename LevelState<Num, Table>::Node>& children,
                  long& min_branching, const Survives& survives) {
  using Node = typename LevelState<Num, Table>::Node;
  const std::size_t patterns = std::size_t{1} << k;
  const std::size_t n = parents.size();

  // Chunk boundaries are fixed up front so each worker writes its own
  // output slot and the merged child order stays deterministic.
  std::vector<std::vector<Node>> chunk_children;
  std::vector<long> chunk_min;
  const unsigned workers = thread_count();
  const std::size_t chunk = (n + workers - 1) / std::max<std::size_t>(1, workers);
  std::vector<std::pair<std::size_t, std::size_t>> bounds;
  for (std::size_t b = 0; b < n; b += std::max<std::size_t>(1, chunk)) {
    bounds.emplace_back(b, std::min(n, b + std::max<std::size_t>(1, chunk)));
  }
  chunk_children.resize(bounds.size());
  chunk_min.assign(bounds.size(), static_cast<long>(patterns) + 1);

  parallel_chunks(bounds.size(), [&](std::size_t cb, std::size_t ce) {
    for (std::size_t c = cb; c < ce; ++c) {
      auto& local = chunk_children[c];
      long local_min = static_cast<long>(patterns) + 1;
      for (std::size_t i = bounds[c].first; i < bounds[c].second; ++i) {
        const Node& parent = parents[i];
        long surviving = 0;
        for (std::size_t p = 0; p < patterns; ++p) {
          Num s_next = parent.s + table.inc[p];
          if (survives(parent.s, s_next, L, table.max_abs_term)) {
            ++surviving;
            local.push_back(Node{(parent.word << k) | p, std::move(s_next)});
          }
        }
        local_min = std::min(local_min, surviving);
      }
      chunk_min[c] = local_min;
    }
  });

  children.clear();
  min_branching = static_cast<long>(patterns) + 1;
  for (std::size_t c = 0; c < bounds.size(); ++c) {
    min_branching = std::min(min_branching, chunk_min[c]);
    children.insert(children.end(), std::make_move_iterator(chunk_children[c].begin()),
                    std::make_move_iterator(chunk_children[c].end()));
  }
  if (bounds.empty()) min_branching = 0;
}

}  // namespace

LambdaCount lambda_count(const SequenceSpec& spec, const LambdaParams& params, int levels) {
  check_lambda_params(spec, params);
  if (levels < 1) {
    throw PreconditionError("lambda_count requires at least one level");
  }
  if (static_cast<long>(levels) * params.k > 24) {
    throw BudgetError("lambda_count budget is levels*k <= 24");
  }

  const BlockScheme scheme{spec.start_index(), params.k};
  LambdaCount out;
  out.k = params.k;
  out.levels = levels;

  if (spec.exact_capable()) {
    using State = LevelState<Rational, BlockIncrements>;
    std::vector<State::Node> current{State::Node{0, Rational(0)}};
    const Rational L(params.target);
    for (int j = 0; j < levels; ++j) {
      const BlockIncrements table = block_increments_exact(spec, scheme, j);
      std::vector<State::Node> next;
      long min_b = 0;
      expand_level<Rational, BlockIncrements>(
          table, L, params.k, current, next, min_b,
          [](const Rational& a, const Rational& b, const Rational& l, const Rational& m) {
            return lambda_block_survives(a, b, l, m);
          });
      out.survivors.push_back(static_cast<long>(next.size()));
      out.min_branching.push_back(current.empty() ? 0 : min_b);
      current = std::move(next);
      if (current.empty()) {
        while (static_cast<int>(out.survivors.size()) < levels) {
          out.survivors.push_back(0);
          out.min_branching.push_back(0);
        }
        break;
      }
    }
    out.deepest_words.reserve(current.size());
    for (const auto& node : current) out.deepest_words.push_back(node.word);
    return out;
  }

  using State = LevelState<double, BlockIncrementsF>;
  std::vector<State::Node> current{State::Node{0, 0.0}};
  for (int j = 0; j < levels; ++j) {
    const BlockIncrementsF table = block_increments_float(spec, scheme, j);
    std::vector<State::Node> next;
    long min_b = 0;
    expand_level<double, BlockIncrementsF>(
        table, params.target, params.k, current, next, min_b,
        [](double a, double b, double l, double m) { return lambda_block_survives_f(a, b, l, m); });
    out.survivors.push_back(static_cast<long>(next.size()));
    out.min_branching.push_back(current.empty() ? 0 : min_b);
    current = std::move(next);
    if (current.empty()) {
      while (static_cast<int>(out.survivors.size()) < levels) {
        out.survivors.push_back(0);
        out.min_branching.push_back(0);
      }
      break;
    }
  }
  out.deepest_words.reserve(current.size());
  for (const auto& node : current) out.deepest_words.push_back(node.word);
  return out;
}

}  // namespace signum
