#include "signum/dimension.hpp"

#include <algorithm>
#include <cmath>

#include "signum/errors.hpp"

namespace signum {

namespace {

constexpr int kUniformDepthCap = 20;  // 2^20 stored atoms is the memory ceiling

int bits_per_symbol(const CylinderMeasure& mu) {
  return mu.space == CylinderSpace::Omega ? 1 : mu.k - 1;
}

}  // namespace

Rational CylinderMeasure::level_mass(int level_index) const {
  Rational total = 0;
  for (const CylinderAtom& a : levels[static_cast<std::size_t>(level_index)].atoms) {
    total += a.mass;
  }
  return total;
}

std::optional<std::pair<int, std::uint64_t>> CylinderMeasure::first_mass_inconsistency() const {
  if (levels.empty()) return std::nullopt;
  if (level_mass(0) != 1) return std::make_pair(0, std::uint64_t{0});
  const int bps = bits_per_symbol(*this);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const CylinderLevel& parents = levels[i - 1];
    const CylinderLevel& children = levels[i];
    const int shift = (children.word_symbols - parents.word_symbols) * bps;
    // children are stored in increasing word order, so each parent's
    // children form a contiguous run
    std::size_t c = 0;
    for (const CylinderAtom& parent : parents.atoms) {
      Rational sum = 0;
      while (c < children.atoms.size() && (children.atoms[c].word >> shift) == parent.word) {
        sum += children.atoms[c].mass;
        ++c;
      }
      if (sum != parent.mass) {
        return std::make_pair(static_cast<int>(i - 1), parent.word);
      }
    }
    if (c != children.atoms.size()) {
      // a child whose prefix is not a stored parent
      return std::make_pair(static_cast<int>(i - 1), children.atoms[c].word >> shift);
    }
  }
  return std::nullopt;
}

CylinderMeasure uniform_measure(int depth) {
  if (depth < 1) throw PreconditionError("measure depth must be at least 1");
  if (depth > kUniformDepthCap) {
    throw BudgetError("uniform measure depth cap is " + std::to_string(kUniformDepthCap));
  }
  CylinderMeasure mu{CylinderSpace::Omega, 1, "uniform", {}};
  mu.levels.reserve(static_cast<std::size_t>(depth));
  for (int i = 1; i <= depth; ++i) {
    CylinderLevel level;
    level.word_symbols = i;
    const std::uint64_t count = std::uint64_t{1} << i;
    const Rational mass = pow2(-i);
    level.atoms.reserve(count);
    for (std::uint64_t w = 0; w < count; ++w) {
      level.atoms.push_back(CylinderAtom{w, mass});
    }
    mu.levels.push_back(std::move(level));
  }
  return mu;
}

CylinderMeasure uniform_theta_measure(int k, int depth) {
  if (k < 2) throw PreconditionError("block width k must be at least 2");
  if (depth < 1) throw PreconditionError("measure depth must be at least 1");
  const long bits = static_cast<long>(depth) * (k - 1);
  if (bits > kUniformDepthCap) {
    throw BudgetError("class measure budget is depth*(k-1) <= " +
                      std::to_string(kUniformDepthCap));
  }
  CylinderMeasure mu{CylinderSpace::Theta, k, "theta-uniform", {}};
  mu.levels.reserve(static_cast<std::size_t>(depth));
  for (int j = 1; j <= depth; ++j) {
    CylinderLevel level;
    level.word_symbols = j;
    const std::uint64_t count = std::uint64_t{1} << (static_cast<long>(j) * (k - 1));
    const Rational mass = pow2(-static_cast<long>(j) * (k - 1));
    level.atoms.reserve(count);
    for (std::uint64_t w = 0; w < count; ++w) {
      level.atoms.push_back(CylinderAtom{w, mass});
    }
    mu.levels.push_back(std::move(level));
  }
  return mu;
}

CylinderMeasure build_lambda_measure(const SequenceSpec& spec, const LambdaParams& params,
                                     int levels) {
  if (params.k < 2) throw PreconditionError("block width k must be at least 2");
  if (levels < 1) throw PreconditionError("measure depth must be at least 1");
  if (static_cast<long>(levels) * params.k > 24) {
    throw BudgetError("subdivision measure budget is levels*k <= 24");
  }
  if (spec.dim() != 1) throw PreconditionError("block subdivision requires a 1-D sequence");

  const int k = params.k;
  const std::size_t keep = std::size_t{1} << (k - 2);
  const std::size_t patterns = std::size_t{1} << k;
  const BlockScheme scheme{spec.start_index(), k};
  const bool exact = spec.exact_capable();

  CylinderMeasure mu{CylinderSpace::Omega, k, "block-subdivision", {}};

  struct NodeR {
    std::uint64_t word;
    Rational s;
  };
  struct NodeF {
    std::uint64_t word;
    double s;
  };
  std::vector<NodeR> frontier_r{NodeR{0, Rational(0)}};
  std::vector<NodeF> frontier_f{NodeF{0, 0.0}};

  for (int j = 0; j < levels; ++j) {
    CylinderLevel level;
    level.word_symbols = (j + 1) * k;
    const Rational mass = pow2(-static_cast<long>(j + 1) * (k - 2));

    auto deficit = [&](std::uint64_t word, std::size_t found) {
      throw PreconditionError(
          "branching deficit at node '" + sign_word_to_string(unpack_sign_word(word, j * k)) +
          "': " + std::to_string(found) + " surviving extensions, the construction needs " +
          std::to_string(keep));
    };

    if (exact) {
      const BlockIncrements table = block_increments_exact(spec, scheme, j);
      const Rational L(params.target);
      std::vector<NodeR> next;
      next.reserve(frontier_r.size() * keep);
      for (const NodeR& node : frontier_r) {
        std::size_t total = 0;
        for (std::size_t p = 0; p < patterns; ++p) {
          Rational s_next = node.s + table.inc[p];
          if (lambda_block_survives(node.s, s_next, L, table.max_abs_term)) {
            ++total;
            if (total <= keep) {
              next.push_back(NodeR{(node.word << k) | p, std::move(s_next)});
            }
          }
        }
        if (total < keep) deficit(node.word, total);
      }
      frontier_r = std::move(next);
      level.atoms.reserve(frontier_r.size());
      for (const NodeR& node : frontier_r) level.atoms.push_back(CylinderAtom{node.word, mass});
    } else {
      std::vector<double> terms(static_cast<std::size_t>(k));
      double max_abs = 0.0;
      for (int t = 0; t < k; ++t) {
        terms[static_cast<std::size_t>(t)] = spec.term(scheme.block_begin(j) + t)[0];
        max_abs = std::max(max_abs, std::abs(terms[static_cast<std::size_t>(t)]));
      }
      std::vector<NodeF> next;
      next.reserve(frontier_f.size() * keep);
      for (const NodeF& node : frontier_f) {
        std::size_t found = 0;
        std::size_t total = 0;
        for (std::size_t p = 0; p < patterns; ++p) {
          double s_next = node.s;
          for (int t = 0; t < k; ++t) {
            const bool neg = (p >> (k - 1 - t)) & 1u;
            s_next += neg ? -terms[static_cast<std::size_t>(t)] : terms[static_cast<std::size_t>(t)];
          }
          const double delta = s_next - node.s;
          const bool ok =
              !((node.s - params.target) * delta > 0.0) && std::abs(delta) >= max_abs;
          if (ok) {
            ++total;
            if (found < keep) {
              ++found;
              next.push_back(NodeF{(node.word << k) | p, s_next});
            }
          }
        }
        if (total < keep) deficit(node.word, total);
      }
      frontier_f = std::move(next);
      level.atoms.reserve(frontier_f.size());
      for (const NodeF& node : frontier_f) level.atoms.push_back(CylinderAtom{node.word, mass});
    }
    mu.levels.push_back(std::move(level));
  }
  return mu;
}

std::uint64_t theta_class_of(std::span<const Sign> block) {
  const int k = static_cast<int>(block.size());
  if (k < 2 || k > 63) throw PreconditionError("block width must be in [2, 63]");
  const bool flip = block[0] < 0;
  std::uint64_t id = 0;
  for (int t = 1; t < k; ++t) {
    const Sign s = block[static_cast<std::size_t>(t)];
    const bool neg = flip ? (s > 0) : (s < 0);
    id = (id << 1) | (neg ? 1u : 0u);
  }
  return id;
}

SignWord theta_representative(std::uint64_t class_id, int k) {
  if (k < 2 || k > 63) throw PreconditionError("block width must be in [2, 63]");
  SignWord w(static_cast<std::size_t>(k));
  w[0] = 1;
  for (int t = 1; t < k; ++t) {
    w[static_cast<std::size_t>(t)] = ((class_id >> (k - 1 - t)) & 1u) ? Sign(-1) : Sign(1);
  }
  return w;
}

std::vector<std::uint64_t> theta_project(std::span<const Sign> word, int k) {
  if (k < 2 || k > 63) throw PreconditionError("block width must be in [2, 63]");
  const std::size_t blocks = word.size() / static_cast<std::size_t>(k);
  std::vector<std::uint64_t> classes;
  classes.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    classes.push_back(theta_class_of(word.subspan(b * static_cast<std::size_t>(k),
                                                  static_cast<std::size_t>(k))));
  }
  return classes;
}

UltraDist theta_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                         int k) {
  const std::size_t len = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < len; ++i) {
    if (a[i] != b[i]) {
      return {std::ldexp(1.0, -static_cast<int>(k * (i + 1))), false};
    }
  }
  return {std::ldexp(1.0, -static_cast<int>(k * (len + 1))), true};
}

DimensionCertificate mdp_certify(const CylinderMeasure& mu, const Rational& s, const Rational& c,
                                 int depth) {
  if (s <= 0) throw PreconditionError("exponent s must be positive");
  if (c <= 0) throw PreconditionError("constant c must be positive");
  if (depth < 1) throw PreconditionError("certificate depth must be at least 1");
  if (depth > mu.depth()) {
    throw PreconditionError("measure holds " + std::to_string(mu.depth()) +
                            " levels, certificate asked for " + std::to_string(depth));
  }

  DimensionCertificate cert;
  cert.s = s;
  cert.c = c;
  cert.depth = depth;
  cert.certified = true;
  cert.first_violation_level = -1;
  cert.convention = mu.space == CylinderSpace::Omega
                        ? "sign-cylinder diameter 2^-(len+1), checked at stored levels"
                        : "class-cylinder diameter 2^-(k*(len+1)), checked at stored levels";

  // Exact verdicts compare mass^q * 2^(e*p) against c^q for s = p/q; only
  // worthwhile when q stays small.
  long p = 0;
  long q = 0;
  bool exact = mpz_fits_slong_p(s.get_num().get_mpz_t()) &&
               mpz_fits_slong_p(s.get_den().get_mpz_t());
  if (exact) {
    p = s.get_num().get_si();
    q = s.get_den().get_si();
    exact = q >= 1 && q <= 64 && p >= 0 && p <= 1024;
  }
  cert.exact_comparison = exact;

  const double sd = to_double(s);
  Rational c_pow_q;
  if (exact) c_pow_q = rational_pow(c, q);

  for (int lvl = 0; lvl < depth; ++lvl) {
    const CylinderLevel& level = mu.levels[static_cast<std::size_t>(lvl)];
    if (level.atoms.empty()) {
      throw PreconditionError("measure level " + std::to_string(lvl + 1) + " holds no atoms");
    }
    Rational max_mass = level.atoms[0].mass;
    for (const CylinderAtom& a : level.atoms) {
      if (a.mass > max_mass) max_mass = a.mass;
    }
    const long e = mu.diam_exponent(lvl);
    cert.max_ratio.push_back(to_double(max_mass) * std::pow(2.0, static_cast<double>(e) * sd));

    bool ok;
    if (exact) {
      ok = rational_pow(max_mass, q) * pow2(e * p) <= c_pow_q;
    } else {
      const long double lhs = static_cast<long double>(to_double(max_mass));
      const long double rhs = static_cast<long double>(to_double(c)) *
                              std::exp2(-static_cast<long double>(e) * static_cast<long double>(sd));
      ok = lhs <= rhs * (1.0L + 1e-12L);
    }
    if (!ok && cert.certified) {
      cert.certified = false;
      cert.first_violation_level = lvl + 1;
    }
  }
  return cert;
}

}  // namespace signum
