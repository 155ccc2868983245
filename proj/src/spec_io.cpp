#include "signum/spec_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <utility>

#include "signum/errors.hpp"

namespace signum {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
  bool used = false;
};

/// Parsed key/value lines with duplicate detection and consumption
/// tracking, so every key is either used by the builder or reported.
class KeyTable {
 public:
  KeyTable(const std::string& text, std::string origin) : origin_(std::move(origin)) {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      std::size_t hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      std::string stripped = trim(raw);
      if (stripped.empty()) continue;
      std::size_t eq = stripped.find('=');
      if (eq == std::string::npos) fail(line, "expected 'key = value'");
      std::string key = trim(stripped.substr(0, eq));
      std::string value = trim(stripped.substr(eq + 1));
      if (key.empty()) fail(line, "empty key");
      if (value.empty()) fail(line, "empty value for key '" + key + "'");
      if (key.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789_.") != std::string::npos)
        fail(line, "key '" + key + "' has characters outside [a-z0-9_.]");
      for (const Entry& e : entries_)
        if (e.key == key)
          fail(line, "duplicate key '" + key + "' (first at line " + std::to_string(e.line) + ")");
      entries_.push_back(Entry{std::move(key), std::move(value), line, false});
    }
  }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ParseError(origin_ + ":" + std::to_string(line) + ": " + msg, line);
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(origin_ + ": " + msg); }

  const Entry* find(const std::string& key) const {
    for (const Entry& e : entries_)
      if (e.key == key) return &e;
    return nullptr;
  }

  /// Marks the key used and returns its value; missing -> diagnostic.
  const Entry& require(const std::string& key) {
    const Entry* e = take(key);
    if (!e) fail("missing required key '" + key + "'");
    return *e;
  }

  /// Marks the key used when present.
  const Entry* take(const std::string& key) {
    for (Entry& e : entries_)
      if (e.key == key) {
        e.used = true;
        return &e;
      }
    return nullptr;
  }

  bool has_prefix(const std::string& prefix) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) {
      return e.key.compare(0, prefix.size(), prefix) == 0;
    });
  }

  void check_all_used() const {
    const Entry* first = nullptr;
    for (const Entry& e : entries_)
      if (!e.used && (!first || e.line < first->line)) first = &e;
    if (first) fail(first->line, "unknown or misplaced key '" + first->key + "'");
  }

 private:
  std::string origin_;
  std::vector<Entry> entries_;
};

long parse_integer(const KeyTable& t, const Entry& e) {
  long v = 0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc{} || p != end)
    t.fail(e.line, "key '" + e.key + "': '" + e.value + "' is not an integer");
  return v;
}

Rational parse_scalar(const KeyTable& t, const Entry& e, const std::string& part) {
  std::optional<Rational> q = parse_rational(trim(part));
  if (!q)
    t.fail(e.line, "key '" + e.key + "': '" + trim(part) +
                       "' is not a rational (want p, p/q, or a finite decimal)");
  return *q;
}

Vec parse_vector(const KeyTable& t, const Entry& e) {
  Vec v;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = e.value.find(',', pos);
    std::string part = e.value.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (trim(part).empty()) t.fail(e.line, "key '" + e.key + "': empty vector component");
    v.push_back(to_double(parse_scalar(t, e, part)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return v;
}

bool parse_bool(const KeyTable& t, const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  t.fail(e.line, "key '" + e.key + "': want true or false");
}

SequenceSpec build_block(KeyTable& t, const std::string& prefix);

/// Note which line anchors a block, for wrapping construction failures.
int block_line(const KeyTable& t, const std::string& prefix) {
  const Entry* e = t.find(prefix + "family");
  return e ? e->line : 0;
}

SequenceSpec build_family(KeyTable& t, const std::string& prefix, const Entry& family) {
  const std::string& name = family.value;
  if (name == "power_decay") {
    Vec coeff = parse_vector(t, t.require(prefix + "coeff"));
    Vec alpha = parse_vector(t, t.require(prefix + "alpha"));
    if (coeff.size() != alpha.size())
      t.fail(family.line, "coeff has " + std::to_string(coeff.size()) + " components but alpha has " +
                              std::to_string(alpha.size()));
    long start = parse_integer(t, t.require(prefix + "start"));
    return SequenceSpec::power_decay(start, std::move(coeff), std::move(alpha));
  }
  if (name == "geometric") {
    Vec coeff = parse_vector(t, t.require(prefix + "coeff"));
    const Entry& ratio_e = t.require(prefix + "ratio");
    Rational ratio = parse_scalar(t, ratio_e, ratio_e.value);
    long start = parse_integer(t, t.require(prefix + "start"));
    return SequenceSpec::geometric(start, std::move(coeff), std::move(ratio));
  }
  if (name == "explicit") {
    long dim = parse_integer(t, t.require(prefix + "dim"));
    if (dim < 1 || dim > 64) t.fail(family.line, "explicit family needs dim in [1, 64]");
    std::vector<Vec> terms;
    for (int i = 0;; ++i) {
      const Entry* e = t.take(prefix + "term." + std::to_string(i));
      if (!e) break;
      Vec term = parse_vector(t, *e);
      if (static_cast<long>(term.size()) != dim)
        t.fail(e->line, "term has " + std::to_string(term.size()) + " components, dim is " +
                            std::to_string(dim));
      terms.push_back(std::move(term));
    }
    bool divergent = false;
    if (const Entry* e = t.take(prefix + "divergent")) divergent = parse_bool(t, *e);
    long start = parse_integer(t, t.require(prefix + "start"));
    return SequenceSpec::explicit_list(static_cast<int>(dim), start, std::move(terms), divergent);
  }
  if (name == "alternating") {
    if (!t.has_prefix(prefix + "inner."))
      t.fail(family.line, "alternating family needs an inner.* block");
    SequenceSpec inner = build_block(t, prefix + "inner.");
    if (const Entry* e = t.take(prefix + "start"))
      if (parse_integer(t, *e) != inner.start_index())
        t.fail(e->line, "start disagrees with inner.start");
    return SequenceSpec::alternating(std::move(inner));
  }
  if (name == "interleaved") {
    std::vector<SequenceSpec> subs;
    for (int i = 0;; ++i) {
      std::string sub_prefix = prefix + "sub." + std::to_string(i) + ".";
      if (!t.has_prefix(sub_prefix)) break;
      subs.push_back(build_block(t, sub_prefix));
    }
    if (subs.empty()) t.fail(family.line, "interleaved family needs sub.0.*, sub.1.*, ...");
    long start = parse_integer(t, t.require(prefix + "start"));
    return SequenceSpec::interleaved(start, std::move(subs));
  }
  if (name == "log_decay") {
    std::uint64_t angle_seed = 0;
    if (const Entry* e = t.take(prefix + "angle_seed")) {
      long v = parse_integer(t, *e);
      if (v < 0) t.fail(e->line, "angle_seed must be nonnegative");
      angle_seed = static_cast<std::uint64_t>(v);
    }
    long start = parse_integer(t, t.require(prefix + "start"));
    return SequenceSpec::log_decay(start, angle_seed);
  }
  if (name == "liouville") {
    LiouvilleGrowth growth = LiouvilleGrowth::Desk;
    if (const Entry* e = t.take(prefix + "growth")) {
      if (e->value == "tower")
        growth = LiouvilleGrowth::Tower;
      else if (e->value == "desk")
        growth = LiouvilleGrowth::Desk;
      else
        t.fail(e->line, "growth must be tower or desk");
    }
    long start = parse_integer(t, t.require(prefix + "start"));
    return SequenceSpec::liouville(start, growth);
  }
  t.fail(family.line,
         "unknown family '" + name +
             "' (want explicit, power_decay, geometric, alternating, interleaved, "
             "log_decay, liouville)");
}

SequenceSpec build_block(KeyTable& t, const std::string& prefix) {
  const Entry& family = t.require(prefix + "family");
  int line = block_line(t, prefix);
  try {
    SequenceSpec spec = build_family(t, prefix, family);
    if (const Entry* e = t.take(prefix + "dim"))
      if (parse_integer(t, *e) != spec.dim())
        t.fail(e->line, "dim disagrees with the family parameters (derived dim " +
                            std::to_string(spec.dim()) + ")");
    return spec;
  } catch (const PreconditionError& e) {
    // Family invariants violated by the file's numbers: a config problem.
    t.fail(line, e.what());
  }
}

std::string scalar_text(double x) { return rational_to_string(Rational(x)); }

std::string vector_text(const Vec& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += scalar_text(v[i]);
  }
  return out;
}

void write_block(std::string& out, const SequenceSpec& spec, const std::string& prefix) {
  struct Visitor {
    std::string& out;
    const SequenceSpec& spec;
    const std::string& prefix;
    void line(const std::string& key, const std::string& value) const {
      out += prefix + key + " = " + value + "\n";
    }
    void operator()(const ExplicitFamily& f) const {
      line("family", "explicit");
      line("dim", std::to_string(spec.dim()));
      line("start", std::to_string(spec.start_index()));
      for (std::size_t i = 0; i < f.terms.size(); ++i)
        line("term." + std::to_string(i), vector_text(f.terms[i]));
      if (f.declared_divergent) line("divergent", "true");
    }
    void operator()(const PowerDecayFamily& f) const {
      line("family", "power_decay");
      line("start", std::to_string(spec.start_index()));
      line("coeff", vector_text(f.coeff));
      line("alpha", vector_text(f.alpha));
    }
    void operator()(const GeometricFamily& f) const {
      line("family", "geometric");
      line("start", std::to_string(spec.start_index()));
      line("coeff", vector_text(f.coeff));
      line("ratio", rational_to_string(f.ratio));
    }
    void operator()(const AlternatingFamily& f) const {
      line("family", "alternating");
      write_block(out, *f.inner, prefix + "inner.");
    }
    void operator()(const InterleavedFamily& f) const {
      line("family", "interleaved");
      line("start", std::to_string(spec.start_index()));
      for (std::size_t i = 0; i < f.subs.size(); ++i)
        write_block(out, *f.subs[i], prefix + "sub." + std::to_string(i) + ".");
    }
    void operator()(const LogDecayFamily& f) const {
      line("family", "log_decay");
      line("start", std::to_string(spec.start_index()));
      line("angle_seed", std::to_string(f.angle_seed));
    }
    void operator()(const LiouvilleFamily& f) const {
      line("family", "liouville");
      line("start", std::to_string(spec.start_index()));
      line("growth", f.growth == LiouvilleGrowth::Tower ? "tower" : "desk");
    }
  };
  std::visit(Visitor{out, spec, prefix}, spec.family());
}

std::string render_measure_word(const CylinderMeasure& mu, int level_index,
                                std::uint64_t packed) {
  const int symbols = mu.levels[static_cast<std::size_t>(level_index)].word_symbols;
  if (mu.space == CylinderSpace::Omega) {
    SignWord w = unpack_sign_word(packed, symbols);
    return sign_word_to_string(w);
  }
  std::string out;
  const int bits = mu.k - 1;
  for (int i = 0; i < symbols; ++i) {
    std::uint64_t cls =
        (packed >> (bits * (symbols - 1 - i))) & ((std::uint64_t{1} << bits) - 1);
    if (i) out += '|';
    SignWord rep = theta_representative(cls, mu.k);
    out += sign_word_to_string(rep);
  }
  return out;
}

std::uint64_t parse_measure_word(const CylinderMeasure& mu, const std::string& text,
                                 int expected_symbols) {
  if (mu.space == CylinderSpace::Omega) {
    SignWord w = parse_sign_word(text);
    if (static_cast<int>(w.size()) != expected_symbols)
      throw ParseError("measure atom word '" + text + "' should have " +
                       std::to_string(expected_symbols) + " signs");
    return pack_sign_word(w);
  }
  const int bits = mu.k - 1;
  std::uint64_t packed = 0;
  int symbols = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t bar = text.find('|', pos);
    std::string part = text.substr(pos, bar == std::string::npos ? bar : bar - pos);
    SignWord block = parse_sign_word(part);
    if (static_cast<int>(block.size()) != mu.k)
      throw ParseError("class representative '" + part + "' should have k=" +
                       std::to_string(mu.k) + " signs");
    packed = (packed << bits) | theta_class_of(block);
    ++symbols;
    if (bar == std::string::npos) break;
    pos = bar + 1;
  }
  if (symbols != expected_symbols)
    throw ParseError("measure atom word '" + text + "' should have " +
                     std::to_string(expected_symbols) + " classes");
  return packed;
}

Rational parse_mass(const Json& value) {
  if (!value.is_string()) throw ParseError("measure masses must be rational strings");
  std::optional<Rational> q = parse_rational(value.get<std::string>());
  if (!q) throw ParseError("bad rational mass '" + value.get<std::string>() + "'");
  return *q;
}

}  // namespace

SequenceSpec parse_spec_text(const std::string& text, const std::string& origin) {
  KeyTable table(text, origin);
  SequenceSpec spec = build_block(table, "");
  std::vector<Vec> dirs;
  for (int i = 0;; ++i) {
    const Entry* e = table.take("levy_direction." + std::to_string(i));
    if (!e) break;
    Vec dir = parse_vector(table, *e);
    if (static_cast<int>(dir.size()) != spec.dim())
      table.fail(e->line, "direction has " + std::to_string(dir.size()) +
                              " components, spec dim is " + std::to_string(spec.dim()));
    dirs.push_back(std::move(dir));
  }
  table.check_all_used();
  spec.set_levy_directions(std::move(dirs));
  return spec;
}

SequenceSpec load_spec_file(const std::string& path) {
  return parse_spec_text(read_text_file(path), path);
}

std::string spec_to_text(const SequenceSpec& spec) {
  std::string out;
  write_block(out, spec, "");
  const std::vector<Vec>& dirs = spec.levy_directions();
  for (std::size_t i = 0; i < dirs.size(); ++i)
    out += "levy_direction." + std::to_string(i) + " = " + vector_text(dirs[i]) + "\n";
  return out;
}

std::string json_to_text(const Json& artifact) { return artifact.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << content;
  if (!out.flush()) throw ParseError("short write to '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

Json measure_to_json(const CylinderMeasure& mu) {
  Json j;
  j["schema_version"] = "1";
  j["kind"] = "cylinder-measure";
  j["space"] = mu.space == CylinderSpace::Omega ? "omega" : "theta";
  j["k"] = mu.k;
  j["rule"] = mu.rule;
  Json levels = Json::array();
  for (int i = 0; i < mu.depth(); ++i) {
    const CylinderLevel& level = mu.levels[static_cast<std::size_t>(i)];
    Json atoms = Json::array();
    for (const CylinderAtom& atom : level.atoms) {
      Json a;
      a["word"] = render_measure_word(mu, i, atom.word);
      a["mass"] = rational_to_string(atom.mass);
      atoms.push_back(std::move(a));
    }
    Json jl;
    jl["word_symbols"] = level.word_symbols;
    jl["atoms"] = std::move(atoms);
    levels.push_back(std::move(jl));
  }
  j["levels"] = std::move(levels);
  return j;
}

CylinderMeasure measure_from_json(const Json& j) {
  try {
    if (j.value("schema_version", "") != "1")
      throw ParseError("unsupported artifact schema_version");
    if (j.value("kind", "") != "cylinder-measure")
      throw ParseError("artifact kind is not cylinder-measure");
    const std::string space = j.at("space").get<std::string>();
    CylinderMeasure mu;
    if (space == "omega")
      mu.space = CylinderSpace::Omega;
    else if (space == "theta")
      mu.space = CylinderSpace::Theta;
    else
      throw ParseError("space must be omega or theta");
    mu.k = j.at("k").get<int>();
    if (mu.k < 1 || mu.k > 32) throw ParseError("measure k out of range [1, 32]");
    if (mu.space == CylinderSpace::Theta && mu.k < 2)
      throw ParseError("theta measures need k >= 2");
    mu.rule = j.at("rule").get<std::string>();
    for (const Json& jl : j.at("levels")) {
      CylinderLevel level;
      level.word_symbols = jl.at("word_symbols").get<int>();
      const int bits = mu.space == CylinderSpace::Omega ? 1 : mu.k - 1;
      if (level.word_symbols < 1 || level.word_symbols * bits > 63)
        throw ParseError("level word_symbols out of range");
      for (const Json& ja : jl.at("atoms")) {
        CylinderAtom atom{
            parse_measure_word(mu, ja.at("word").get<std::string>(), level.word_symbols),
            parse_mass(ja.at("mass"))};
        level.atoms.push_back(std::move(atom));
      }
      std::sort(level.atoms.begin(), level.atoms.end(),
                [](const CylinderAtom& a, const CylinderAtom& b) { return a.word < b.word; });
      for (std::size_t i = 1; i < level.atoms.size(); ++i)
        if (level.atoms[i].word == level.atoms[i - 1].word)
          throw ParseError("duplicate atom word in measure level");
      mu.levels.push_back(std::move(level));
    }
    return mu;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed measure JSON: ") + e.what());
  }
}

CylinderMeasure load_measure_file(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return measure_from_json(j);
}

Json certificate_to_json(const DimensionCertificate& cert) {
  Json j;
  j["schema_version"] = "1";
  j["kind"] = "dimension-certificate";
  j["s"] = rational_to_string(cert.s);
  j["c"] = rational_to_string(cert.c);
  j["depth"] = cert.depth;
  j["exact_comparison"] = cert.exact_comparison;
  j["convention"] = cert.convention;
  j["per_depth_max_ratio"] = cert.max_ratio;
  j["verdict"] = cert.certified ? "certified" : "not certified";
  j["first_violation_level"] = cert.first_violation_level;
  return j;
}

}  // namespace signum
