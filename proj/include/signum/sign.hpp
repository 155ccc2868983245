#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "signum/errors.hpp"

namespace signum {

/// One sign, exactly -1 or +1. Stored as int8 so million-entry words stay small.
using Sign = std::int8_t;

/// Finite word over {-1,+1}. word[i] is the sign of term (start_index + i).
using SignWord = std::vector<Sign>;

inline std::string sign_word_to_string(std::span<const Sign> w) {
  std::string s;
  s.reserve(w.size());
  for (Sign b : w) s.push_back(b > 0 ? '+' : '-');
  return s;
}

/// Accepts the compact form "+-+" and the list form "+1,-1,1".
inline SignWord parse_sign_word(const std::string& text) {
  SignWord w;
  if (text.find(',') == std::string::npos) {
    for (char c : text) {
      if (c == '+') w.push_back(1);
      else if (c == '-') w.push_back(-1);
      else if (!std::isspace(static_cast<unsigned char>(c)))
        throw ParseError("sign word may contain only '+' and '-', got '" + std::string(1, c) + "'", 0);
    }
    return w;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    std::size_t b = tok.find_first_not_of(" \t");
    std::size_t e = tok.find_last_not_of(" \t");
    tok = b == std::string::npos ? "" : tok.substr(b, e - b + 1);
    if (tok == "1" || tok == "+1") w.push_back(1);
    else if (tok == "-1") w.push_back(-1);
    else throw ParseError("sign entries must be +1 or -1, got '" + tok + "'", 0);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return w;
}

/// Packed form: bit (len-1-t) holds position t, 0 for +1 and 1 for -1, so
/// numeric order on packed words equals lexicographic order with +1 < -1.
inline SignWord unpack_sign_word(std::uint64_t bits, int len) {
  SignWord w(static_cast<std::size_t>(len));
  for (int t = 0; t < len; ++t) {
    w[static_cast<std::size_t>(t)] = ((bits >> (len - 1 - t)) & 1u) ? Sign(-1) : Sign(1);
  }
  return w;
}

inline std::uint64_t pack_sign_word(std::span<const Sign> w) {
  std::uint64_t bits = 0;
  for (Sign s : w) bits = (bits << 1) | (s < 0 ? 1u : 0u);
  return bits;
}

/// Distance in the sign-space ultrametric. When two finite prefixes agree
/// everywhere, the true distance of their infinite extensions is only known
/// to be at most 2^-(len+1); is_bound marks that case.
struct UltraDist {
  double value;
  bool is_bound;
};

/// rho(x, y) = 2^-n where n is the 1-based index of the first disagreement.
/// same_stream declares that both prefixes come from one infinite stream, in
/// which case the distance is exactly 0.
inline UltraDist ultrametric_distance(std::span<const Sign> x, std::span<const Sign> y,
                                      bool same_stream = false) {
  if (same_stream) return {0.0, false};
  std::size_t len = x.size() < y.size() ? x.size() : y.size();
  for (std::size_t i = 0; i < len; ++i)
    if (x[i] != y[i]) return {std::ldexp(1.0, -static_cast<int>(i + 1)), false};
  return {std::ldexp(1.0, -static_cast<int>(len + 1)), true};
}

/// How a sign was chosen; recorded per index so composite constructions can
/// show which rule produced which block.
enum class SignSource : std::uint8_t {
  Unset = 0,
  Prefix,    // fixed +1 head of a construction
  Greedy,    // one-dimensional greedy toward a target
  Balanced,  // finite balancing of prefix norms
  Carrier,   // Levy-direction subsequence inside a stage construction
  Filler,    // leftover indices inside a partition block
  Free,      // free coordinates of a partition block
  Pairing,   // +/- cancellation on equal consecutive terms
  Given,     // supplied by the caller
};

inline const char* sign_source_name(SignSource s) {
  switch (s) {
    case SignSource::Unset: return "unset";
    case SignSource::Prefix: return "prefix";
    case SignSource::Greedy: return "greedy";
    case SignSource::Balanced: return "balanced";
    case SignSource::Carrier: return "carrier";
    case SignSource::Filler: return "filler";
    case SignSource::Free: return "free";
    case SignSource::Pairing: return "pairing";
    case SignSource::Given: return "given";
  }
  return "unset";
}

struct ProvenanceSpan {
  std::size_t begin;  // positions, 0-based within the word
  std::size_t end;    // exclusive
  SignSource source;
};

/// A sign word under construction. Positions may be assigned out of order
/// (stage constructions fill several subsequences); finalize() checks that
/// no position was left unset.
class SignStream {
 public:
  explicit SignStream(std::size_t n) : word_(n, 0), source_(n, static_cast<std::uint8_t>(SignSource::Unset)) {}

  std::size_t size() const { return word_.size(); }

  void assign(std::size_t i, Sign s, SignSource src) {
    if (i >= word_.size()) throw PreconditionError("sign stream index out of range");
    if (word_[i] != 0) throw PreconditionError("sign stream position assigned twice");
    if (s != 1 && s != -1) throw PreconditionError("sign must be +1 or -1");
    word_[i] = s;
    source_[i] = static_cast<std::uint8_t>(src);
  }

  bool assigned(std::size_t i) const { return word_[i] != 0; }
  Sign at(std::size_t i) const { return word_[i]; }

  const SignWord& finalize() const {
    for (std::size_t i = 0; i < word_.size(); ++i)
      if (word_[i] == 0)
        throw PreconditionError("sign stream position " + std::to_string(i) + " was never assigned");
    return word_;
  }

  const SignWord& word() const { return word_; }

  std::vector<ProvenanceSpan> provenance() const {
    std::vector<ProvenanceSpan> spans;
    std::size_t i = 0;
    while (i < word_.size()) {
      std::size_t j = i + 1;
      while (j < word_.size() && source_[j] == source_[i]) ++j;
      spans.push_back({i, j, static_cast<SignSource>(source_[i])});
      i = j;
    }
    return spans;
  }

 private:
  SignWord word_;  // 0 marks "not yet assigned"
  std::vector<std::uint8_t> source_;
};

}  // namespace signum
