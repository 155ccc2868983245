// Python bindings for the signed-series toolkit. Results come back as plain
// dicts/lists of builtins so callers never hold references into C++ state;
// exact rationals cross the boundary as canonical "p/q" strings.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "signum/achieve.hpp"
#include "signum/balance.hpp"
#include "signum/dimension.hpp"
#include "signum/errors.hpp"
#include "signum/greedy.hpp"
#include "signum/levy.hpp"
#include "signum/spec_io.hpp"
#include "signum/target.hpp"

namespace py = pybind11;
using namespace signum;

namespace {

Rational parse_rat_py(const std::string& text, const char* what) {
  std::optional<Rational> q = parse_rational(text);
  if (!q) throw PreconditionError(std::string(what) + ": '" + text + "' is not a rational");
  return *q;
}

py::list vec_to_list(const Vec& v) {
  py::list out;
  for (double x : v) out.append(x);
  return out;
}

py::dict greedy_py(const SequenceSpec& spec, double target, long depth, double delta) {
  GreedyRun run = greedy_signs(spec, target, depth);
  py::dict d;
  d["signs"] = sign_word_to_string(run.signs);
  d["bound"] = run.bound;
  d["max_abs_dev"] = run.max_abs_dev;
  d["bound_holds"] = run.max_abs_dev <= run.bound;
  d["first_crossing"] = run.first_crossing;
  std::size_t last = run.trace.size() - 1;
  d["final_index"] = run.trace.index_at(last);
  d["final_dist"] = run.trace.dist_at(last);
  if (delta > 0.0) {
    long pos = first_stable_position(run.trace, delta);
    d["settled_index"] = pos >= 0 ? py::cast(spec.start_index() + pos) : py::cast(-1);
  }
  return d;
}

py::dict lambda_count_py(const SequenceSpec& spec, int k, double target, int levels) {
  LambdaCount c = lambda_count(spec, LambdaParams{target, k}, levels);
  py::dict d;
  d["k"] = c.k;
  d["levels"] = c.levels;
  d["survivors"] = c.survivors;
  d["min_branching"] = c.min_branching;
  d["branching_floor"] = k >= 2 ? (1L << (k - 2)) : 1L;
  return d;
}

py::dict membership_py(const SequenceSpec& spec, int k, double target,
                       const std::string& word) {
  LambdaReport rep = lambda_membership(spec, LambdaParams{target, k}, parse_sign_word(word));
  py::dict d;
  d["member"] = rep.member;
  d["first_violation_block"] = rep.first_violation_block;
  d["violated_condition"] = rep.violated_condition;
  return d;
}

py::dict certificate_to_dict(const DimensionCertificate& cert) {
  py::dict d;
  d["s"] = rational_to_string(cert.s);
  d["c"] = rational_to_string(cert.c);
  d["depth"] = cert.depth;
  d["certified"] = cert.certified;
  d["exact_comparison"] = cert.exact_comparison;
  d["convention"] = cert.convention;
  d["first_violation_level"] = cert.first_violation_level;
  d["per_depth_max_ratio"] = cert.max_ratio;
  return d;
}

py::dict certify_steering_py(const SequenceSpec& spec, int k, double target, int levels,
                             const std::string& s, const std::string& c) {
  CylinderMeasure mu = build_lambda_measure(spec, LambdaParams{target, k}, levels);
  return certificate_to_dict(
      mdp_certify(mu, parse_rat_py(s, "s"), parse_rat_py(c, "c"), mu.depth()));
}

py::dict certify_uniform_py(int depth, const std::string& s, const std::string& c, int theta_k) {
  CylinderMeasure mu = theta_k > 0 ? uniform_theta_measure(theta_k, depth)
                                   : uniform_measure(depth);
  return certificate_to_dict(
      mdp_certify(mu, parse_rat_py(s, "s"), parse_rat_py(c, "c"), mu.depth()));
}

py::dict levy_py(const SequenceSpec& spec, const Vec& direction, long horizon) {
  LevyDecomposition dec = levy_decompose(spec, direction, horizon);
  py::dict d;
  d["direction"] = vec_to_list(dec.direction);
  d["horizon"] = dec.horizon;
  d["omega_mass"] = dec.omega_mass;
  d["member_count"] = dec.indices.size();
  py::list blocks;
  for (const LevyBlock& b : dec.blocks) {
    py::dict jb;
    jb["m"] = b.index;
    jb["gamma"] = b.gamma;
    jb["begin"] = b.begin;
    jb["end"] = b.end;
    jb["size"] = b.members.size();
    jb["sigma"] = b.sigma;
    blocks.append(jb);
  }
  d["blocks"] = blocks;
  return d;
}

py::dict ls_probe_py(const SequenceSpec& spec, long horizon, int probes, std::uint64_t seed) {
  LsReport ls = ls_estimate(spec, horizon, probes, seed);
  py::dict d;
  d["horizon"] = ls.horizon;
  d["min_mass"] = ls.min_mass;
  d["argmin_direction"] = vec_to_list(ls.probes[ls.argmin]);
  py::list rows;
  for (std::size_t p = 0; p < ls.probes.size(); ++p) {
    py::dict row;
    row["direction"] = vec_to_list(ls.probes[p]);
    row["mass"] = ls.mass[p];
    row["half_mass"] = ls.half_mass[p];
    rows.append(row);
  }
  d["rows"] = rows;
  return d;
}

py::dict hit_py(const SequenceSpec& spec, const Vec& target, int stages, long horizon) {
  HitResult hit = hit_target(spec, target, stages, horizon);
  py::dict d;
  d["complete"] = hit.plan.complete;
  d["c_first"] = hit.plan.c_first;
  d["c_later"] = hit.plan.c_later;
  d["head_end"] = hit.plan.head_end;
  py::list recs;
  for (const StageRecord& st : hit.plan.stages) {
    py::dict js;
    js["stage"] = st.stage;
    js["begin"] = st.begin;
    js["end"] = st.end;
    js["residual_norm"] = st.residual_norm;
    js["claimed_bound"] = st.claimed_bound;
    js["closed"] = st.closed;
    recs.append(js);
  }
  d["stages"] = recs;
  std::size_t last = hit.trace.size() - 1;
  d["final_index"] = hit.trace.index_at(last);
  d["final_dist"] = hit.trace.dist_at(last);
  return d;
}

py::dict explore_py(const SequenceSpec& spec, int depth) {
  AchievementCover cover = explore(spec, depth);
  py::dict d;
  d["depth"] = cover.depth;
  d["exact"] = cover.exact;
  d["classification"] = cover.classification;
  d["tail_radius"] = rational_to_string(cover.tail_radius);
  d["distinct_sums"] = cover.distinct_sums;
  d["min_sum"] = rational_to_string(cover.min_sum);
  d["max_sum"] = rational_to_string(cover.max_sum);
  auto intervals_to_list = [](const std::vector<RationalInterval>& ivs) {
    py::list out;
    for (const RationalInterval& iv : ivs) {
      py::dict ji;
      ji["lo"] = rational_to_string(iv.lo);
      ji["hi"] = rational_to_string(iv.hi);
      out.append(ji);
    }
    return out;
  };
  d["intervals"] = intervals_to_list(cover.intervals);
  d["gaps"] = intervals_to_list(cover.gaps);
  return d;
}

py::dict balance_py(const SequenceSpec& spec, long take, const std::string& strategy) {
  std::vector<Vec> xs;
  xs.reserve(static_cast<std::size_t>(take > 0 ? take : 0));
  for (long n = spec.start_index(); n < spec.start_index() + take; ++n)
    xs.push_back(spec.term(n));
  BalanceResult r;
  if (strategy == "exhaustive")
    r = balance_exhaustive(xs);
  else if (strategy == "greedy")
    r = balance_greedy(xs);
  else if (strategy == "pairing") {
    std::optional<BalanceResult> p = balance_pairing(xs);
    if (!p) throw PreconditionError("pairing strategy needs consecutive equal pairs");
    r = std::move(*p);
  } else {
    throw PreconditionError("strategy must be exhaustive, greedy or pairing");
  }
  py::dict d;
  d["signs"] = sign_word_to_string(r.signs);
  d["max_prefix_norm"] = r.max_prefix_norm;
  return d;
}

py::dict block_converge_py(const SequenceSpec& spec, long depth) {
  BlockConvergeResult r = block_sign_converge(spec, depth);
  py::dict d;
  d["M"] = r.plan.M;
  d["K"] = r.plan.K;
  d["sup_prefix_inf"] = r.plan.sup_prefix_inf;
  d["max_term_inf"] = r.plan.max_term_inf;
  d["guarantee"] = r.plan.K * r.plan.M;
  d["block_count"] = r.plan.blocks.size();
  return d;
}

py::dict partition_py(const SequenceSpec& spec, const Vec& target, int k, int levels) {
  TriplePartition part = partition_for_dimension(spec, target, k, levels);
  py::dict d;
  d["k"] = part.k;
  d["levels"] = part.levels;
  d["class_counts"] = part.class_counts;
  d["class_floor"] = part.class_floor;
  bool ok = true;
  for (std::size_t i = 0; i < part.class_counts.size(); ++i)
    ok = ok && part.class_counts[i] >= part.class_floor[i];
  d["floor_ok"] = ok;
  d["demo_residual"] = part.demo_residual;
  return d;
}

py::dict ultrametric_py(const std::string& a, const std::string& b) {
  UltraDist u = ultrametric_distance(parse_sign_word(a), parse_sign_word(b));
  py::dict d;
  d["value"] = u.value;
  d["is_bound"] = u.is_bound;
  return d;
}

}  // namespace

PYBIND11_MODULE(_signum, m) {
  m.doc() = "signed-series toolkit: sign constructions, certificates, achievement sets";

  py::register_exception<ParseError>(m, "SpecParseError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);

  py::class_<SequenceSpec>(m, "SequenceSpec",
                           "A term-sequence description loaded from config text.")
      .def_property_readonly("dim", &SequenceSpec::dim)
      .def_property_readonly("start_index", &SequenceSpec::start_index)
      .def_property_readonly("family_name", &SequenceSpec::family_name)
      .def("term", [](const SequenceSpec& s, long n) { return vec_to_list(s.term(n)); },
           py::arg("n"), "Term a_n as a list of floats.")
      .def("__repr__", [](const SequenceSpec& s) {
        return "<SequenceSpec " + s.family_name() + " dim=" + std::to_string(s.dim()) + ">";
      });

  m.def("parse_spec", [](const std::string& text) { return parse_spec_text(text, "<python>"); },
        py::arg("text"), "Parse a sequence spec from config text.");
  m.def("load_spec", &load_spec_file, py::arg("path"),
        "Load a sequence spec from a config file.");
  m.def("render_spec", &spec_to_text, py::arg("spec"),
        "Canonical config text for a spec (round-trips through parse_spec).");

  m.def("greedy", &greedy_py, py::arg("spec"), py::arg("target"), py::arg("depth"),
        py::arg("delta") = 0.0,
        "Greedy signs toward a 1-D target; reports the deviation bound and, with "
        "delta > 0, the first index after which the sums stay within delta.");
  m.def("lambda_count", &lambda_count_py, py::arg("spec"), py::arg("k"), py::arg("target"),
        py::arg("levels"), "Level-by-level census of the steering block set.");
  m.def("lambda_membership", &membership_py, py::arg("spec"), py::arg("k"), py::arg("target"),
        py::arg("word"), "Blockwise membership report for one sign word.");
  m.def("certify_steering", &certify_steering_py, py::arg("spec"), py::arg("k"),
        py::arg("target"), py::arg("levels"), py::arg("s"), py::arg("c"),
        "Build the width-k subdivision measure and check mass <= c * diam^s on it.");
  m.def("certify_uniform", &certify_uniform_py, py::arg("depth"), py::arg("s"), py::arg("c"),
        py::arg("theta_k") = 0,
        "Check mass <= c * diam^s on the uniform measure (sign space, or width-k "
        "class space when theta_k >= 2).");
  m.def("levy", &levy_py, py::arg("spec"), py::arg("direction"), py::arg("horizon"),
        "Aligned-block decomposition along a unit direction.");
  m.def("ls_probe", &ls_probe_py, py::arg("spec"), py::arg("horizon"), py::arg("probes") = 8,
        py::arg("seed") = 0, "Directional mass minimum over a probe set.");
  m.def("hit", &hit_py, py::arg("spec"), py::arg("target"), py::arg("stages"),
        py::arg("horizon"), "Stagewise construction steering partial sums to a target.");
  m.def("explore", &explore_py, py::arg("spec"), py::arg("depth"),
        "Certified interval cover of the 1-D achievement set (exact arithmetic).");
  m.def("balance", &balance_py, py::arg("spec"), py::arg("take"),
        py::arg("strategy") = "greedy", "Sign the first `take` terms to balance prefixes.");
  m.def("block_converge", &block_converge_py, py::arg("spec"), py::arg("depth"),
        "Blockwise signing of a null sequence with the telescoped sup bound.");
  m.def("partition", &partition_py, py::arg("spec"), py::arg("target"), py::arg("k"),
        py::arg("levels"), "Carrier/filler/free partition and free-class counts.");
  m.def("theta_class", [](const std::string& word) {
          return theta_class_of(parse_sign_word(word));
        },
        py::arg("word"), "Canonical class id of one block (the word is the block).");
  m.def("ultrametric", &ultrametric_py, py::arg("a"), py::arg("b"),
        "Stream distance 2^-(first disagreement) of two sign words.");
}
