#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
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

namespace {

using namespace signum;

Vec parse_vec_arg(const std::string& text, const std::string& what) {
  Vec v;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string part = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    std::optional<Rational> q = parse_rational(part);
    if (!q) throw ParseError(what + ": '" + part + "' is not a number");
    v.push_back(to_double(*q));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (v.empty()) throw ParseError(what + ": empty vector");
  return v;
}

Rational parse_rat_arg(const std::string& text, const std::string& what) {
  std::optional<Rational> q = parse_rational(text);
  if (!q) throw ParseError(what + ": '" + text + "' is not a rational");
  return *q;
}

std::vector<double> parse_list_arg(const std::string& text, const std::string& what) {
  Vec v = parse_vec_arg(text, what);
  return v;
}

Json vec_to_json(const Vec& v) { return Json(v); }

Json spans_to_json(const std::vector<ProvenanceSpan>& spans) {
  Json arr = Json::array();
  for (const ProvenanceSpan& s : spans) {
    Json j;
    j["begin"] = s.begin;
    j["end"] = s.end;
    j["source"] = sign_source_name(s.source);
    arr.push_back(std::move(j));
  }
  return arr;
}

void write_trace_csv(const std::string& path, const PartialSumTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  trace.write_csv(out);
  if (!out.flush()) throw ParseError("short write to '" + path + "'");
}

/// Options shared by every subcommand.
struct Common {
  std::string spec_path;
  std::string mode = "float";
  std::uint64_t seed = 0;
  std::string out;
};

void add_common(CLI::App* sub, Common& c, bool spec_required = true) {
  CLI::Option* spec = sub->add_option("--spec", c.spec_path, "sequence spec file");
  if (spec_required) spec->required();
  sub->add_option("--mode", c.mode, "arithmetic mode: float or exact")
      ->check(CLI::IsMember({"float", "exact"}))
      ->capture_default_str();
  sub->add_option("--seed", c.seed, "seed for derived randomness")->capture_default_str();
  sub->add_option("--out", c.out, "artifact output path");
}

SequenceSpec load_spec(const Common& c) {
  if (c.spec_path.empty()) throw ParseError("--spec is required for this invocation");
  SequenceSpec spec = load_spec_file(c.spec_path);
  if (c.mode == "exact" && !spec.exact_capable())
    throw PreconditionError("exact mode: family has no exact term representation");
  return spec;
}

Json artifact_header(const std::string& kind, const Common& c) {
  Json j;
  j["schema_version"] = "1";
  j["kind"] = kind;
  j["mode"] = c.mode;
  j["seed"] = c.seed;
  return j;
}

void emit(const Common& c, const Json& artifact) {
  if (!c.out.empty()) write_text_file(c.out, json_to_text(artifact));
}

const char* strategy_name(BalanceStrategy s) {
  switch (s) {
    case BalanceStrategy::Exhaustive: return "exhaustive";
    case BalanceStrategy::Greedy: return "greedy";
    case BalanceStrategy::Pairing: return "pairing";
  }
  return "greedy";
}

// ---- balance ----

struct BalanceOpts {
  Common common;
  long take = 0;
  long converge = 0;
  std::string strategy = "greedy";
  std::string trace_out;
};

int run_balance(const BalanceOpts& o) {
  SequenceSpec spec = load_spec(o.common);
  if ((o.take > 0) == (o.converge > 0))
    throw ParseError("balance: give exactly one of --take N or --converge N");

  if (o.take > 0) {
    std::vector<Vec> xs;
    xs.reserve(static_cast<std::size_t>(o.take));
    for (long n = spec.start_index(); n < spec.start_index() + o.take; ++n)
      xs.push_back(spec.term(n));
    BalanceResult r;
    if (o.strategy == "exhaustive")
      r = balance_exhaustive(xs);
    else if (o.strategy == "pairing") {
      std::optional<BalanceResult> p = balance_pairing(xs);
      if (!p) throw PreconditionError("pairing strategy needs consecutive equal pairs");
      r = std::move(*p);
    } else
      r = balance_greedy(xs);

    Json j = artifact_header("balance", o.common);
    j["count"] = o.take;
    j["strategy"] = strategy_name(r.strategy);
    j["signs"] = sign_word_to_string(r.signs);
    j["max_prefix_norm"] = r.max_prefix_norm;
    emit(o.common, j);
    std::cout << "balance: n=" << o.take << " strategy=" << strategy_name(r.strategy)
              << " max_prefix_norm=" << r.max_prefix_norm << "\n";
    return 0;
  }

  BlockConvergeResult r = block_sign_converge(spec, o.converge);
  Json j = artifact_header("block-signing", o.common);
  j["depth"] = o.converge;
  j["M"] = r.plan.M;
  j["K"] = r.plan.K;
  j["sup_prefix_inf"] = r.plan.sup_prefix_inf;
  j["max_term_inf"] = r.plan.max_term_inf;
  j["guarantee"] = r.plan.K * r.plan.M;
  Json blocks = Json::array();
  for (const SigningBlock& b : r.plan.blocks) {
    Json jb;
    jb["begin"] = b.begin;
    jb["end"] = b.end;
    jb["level"] = b.level;
    jb["term_cap"] = b.term_cap;
    jb["max_prefix_norm"] = b.max_prefix_norm;
    blocks.push_back(std::move(jb));
  }
  j["blocks"] = std::move(blocks);
  emit(o.common, j);
  if (!o.trace_out.empty()) write_trace_csv(o.trace_out, r.trace);
  std::cout << "block-signing: depth=" << o.converge << " sup=" << r.plan.sup_prefix_inf
            << " guarantee=" << r.plan.K * r.plan.M << "\n";
  return 0;
}

// ---- greedy ----

struct GreedyOpts {
  Common common;
  std::string target = "0";
  long depth = 1000;
  double delta = 0.0;
  std::string trace_out;
  std::string signs_out;
};

int run_greedy(const GreedyOpts& o) {
  SequenceSpec spec = load_spec(o.common);
  double target = to_double(parse_rat_arg(o.target, "--target"));
  GreedyRun run = greedy_signs(spec, target, o.depth);

  Json j = artifact_header("greedy-run", o.common);
  j["target"] = target;
  j["depth"] = o.depth;
  j["bound"] = run.bound;
  j["max_abs_dev"] = run.max_abs_dev;
  j["bound_holds"] = run.max_abs_dev <= run.bound;
  j["first_crossing"] = run.first_crossing;
  if (o.delta > 0.0) {
    long pos = first_stable_position(run.trace, o.delta);
    j["delta"] = o.delta;
    j["settled_index"] = pos >= 0 ? spec.start_index() + pos : -1;
  }
  std::size_t last = run.trace.size() - 1;
  j["final_index"] = run.trace.index_at(last);
  j["final_dist"] = run.trace.dist_at(last);
  emit(o.common, j);
  if (!o.trace_out.empty()) write_trace_csv(o.trace_out, run.trace);
  if (!o.signs_out.empty())
    write_text_file(o.signs_out, sign_word_to_string(run.signs) + "\n");
  std::cout << "greedy: target=" << target << " depth=" << o.depth
            << " final_dist=" << run.trace.dist_at(last) << " bound=" << run.bound << "\n";
  return 0;
}

// ---- lambda-count ----

struct LambdaOpts {
  Common common;
  int k = 3;
  std::string target = "0";
  int levels = 1;
  std::string check_word;
  std::string measure_out;
};

int run_lambda(const LambdaOpts& o) {
  SequenceSpec spec = load_spec(o.common);
  LambdaParams params{to_double(parse_rat_arg(o.target, "--target")), o.k};

  Json j = artifact_header("lambda-count", o.common);
  j["k"] = o.k;
  j["target"] = params.target;
  j["levels"] = o.levels;

  if (!o.check_word.empty()) {
    SignWord w = parse_sign_word(o.check_word);
    LambdaReport rep = lambda_membership(spec, params, w);
    Json jc;
    jc["word"] = sign_word_to_string(w);
    jc["member"] = rep.member;
    jc["first_violation_block"] = rep.first_violation_block;
    jc["violated_condition"] = rep.violated_condition;
    j["membership"] = std::move(jc);
  }

  LambdaCount count = lambda_count(spec, params, o.levels);
  j["survivors"] = count.survivors;
  j["min_branching"] = count.min_branching;
  const long floor_per_level = o.k >= 2 ? (1L << (o.k - 2)) : 1;
  j["branching_floor"] = floor_per_level;
  bool ok = true;
  for (long b : count.min_branching) ok = ok && b >= floor_per_level;
  j["branching_ok"] = ok;
  emit(o.common, j);

  if (!o.measure_out.empty()) {
    CylinderMeasure mu = build_lambda_measure(spec, params, o.levels);
    write_text_file(o.measure_out, json_to_text(measure_to_json(mu)));
  }
  std::cout << "lambda-count: k=" << o.k << " levels=" << o.levels << " survivors=";
  for (std::size_t i = 0; i < count.survivors.size(); ++i)
    std::cout << (i ? "," : "") << count.survivors[i];
  std::cout << " branching_ok=" << (ok ? "yes" : "no") << "\n";
  return 0;
}

// ---- levy ----

struct LevyOpts {
  Common common;
  long horizon = 100000;
  std::string direction;
  int probes = 8;
  std::string radii = "0.25,0.0625,0.015625";
  bool ls = false;
};

int run_levy(const LevyOpts& o) {
  SequenceSpec spec = load_spec(o.common);

  if (!o.direction.empty()) {
    Vec dir = parse_vec_arg(o.direction, "--direction");
    LevyDecomposition dec = levy_decompose(spec, dir, o.horizon);
    Json j = artifact_header("levy-decomposition", o.common);
    j["direction"] = vec_to_json(dec.direction);
    j["horizon"] = dec.horizon;
    j["omega_mass"] = dec.omega_mass;
    j["member_count"] = dec.indices.size();
    Json blocks = Json::array();
    for (const LevyBlock& b : dec.blocks) {
      Json jb;
      jb["m"] = b.index;
      jb["gamma"] = b.gamma;
      jb["begin"] = b.begin;
      jb["end"] = b.end;
      jb["size"] = b.members.size();
      jb["sigma"] = b.sigma;
      blocks.push_back(std::move(jb));
    }
    j["blocks"] = std::move(blocks);
    if (dec.incomplete) {
      Json jb;
      jb["m"] = dec.incomplete->index;
      jb["gamma"] = dec.incomplete->gamma;
      jb["size"] = dec.incomplete->members.size();
      jb["sigma"] = dec.incomplete->sigma;
      j["incomplete"] = std::move(jb);
    } else {
      j["incomplete"] = nullptr;
    }
    emit(o.common, j);
    std::cout << "levy: blocks=" << dec.blocks.size() << " omega_mass=" << dec.omega_mass
              << "\n";
    return 0;
  }

  std::vector<Vec> probes = probe_directions(spec.dim(), o.probes, o.common.seed);
  std::vector<double> radii = parse_list_arg(o.radii, "--radii");
  DirectionalMassReport rep = directional_mass(spec, o.horizon, probes, radii);
  Json j = artifact_header("directional-mass", o.common);
  j["horizon"] = rep.horizon;
  j["radii"] = rep.radii;
  j["all_zero"] = rep.all_zero;
  Json jp = Json::array();
  for (std::size_t p = 0; p < rep.probes.size(); ++p) {
    Json one;
    one["direction"] = vec_to_json(rep.probes[p]);
    Json masses = Json::array();
    for (std::size_t r = 0; r < rep.radii.size(); ++r) {
      Json jm;
      jm["radius"] = rep.radii[r];
      jm["mass_at_n"] = rep.mass[p][r][0];
      jm["mass_at_2n"] = rep.mass[p][r][1];
      jm["mass_at_4n"] = rep.mass[p][r][2];
      masses.push_back(std::move(jm));
    }
    one["mass"] = std::move(masses);
    one["candidate"] = static_cast<bool>(rep.candidate[p]);
    jp.push_back(std::move(one));
  }
  j["probes"] = std::move(jp);

  if (o.ls) {
    LsReport ls = ls_estimate(spec, o.horizon, o.probes, o.common.seed);
    Json jl;
    jl["horizon"] = ls.horizon;
    Json rows = Json::array();
    for (std::size_t p = 0; p < ls.probes.size(); ++p) {
      Json row;
      row["direction"] = vec_to_json(ls.probes[p]);
      row["mass"] = ls.mass[p];
      row["half_mass"] = ls.half_mass[p];
      rows.push_back(std::move(row));
    }
    jl["rows"] = std::move(rows);
    jl["argmin_direction"] = vec_to_json(ls.probes[ls.argmin]);
    jl["min_mass"] = ls.min_mass;
    j["ls"] = std::move(jl);
  }
  emit(o.common, j);
  std::cout << "directional-mass: probes=" << probes.size()
            << " all_zero=" << (rep.all_zero ? "yes" : "no") << "\n";
  return 0;
}

// ---- hit ----

struct HitOpts {
  Common common;
  std::string target;
  int stages = 4;
  long horizon = 200000;
};

int run_hit(const HitOpts& o) {
  SequenceSpec spec = load_spec(o.common);
  Vec target = parse_vec_arg(o.target, "--target");
  HitResult hit = hit_target(spec, target, o.stages, o.horizon);
  const TargetPlan& plan = hit.plan;

  Json j = artifact_header("hit-plan", o.common);
  j["target"] = vec_to_json(plan.target);
  Json dirs = Json::array();
  for (const Vec& u : plan.directions) dirs.push_back(vec_to_json(u));
  j["directions"] = std::move(dirs);
  j["gram_det"] = plan.gram_det;
  j["beta0"] = vec_to_json(plan.beta0);
  j["k0"] = plan.k0;
  j["omega_mass"] = plan.omega_mass;
  j["c_first"] = plan.c_first;
  j["c_first_coarse"] = plan.c_first_coarse;
  j["c_later"] = plan.c_later;
  j["head_end"] = plan.head_end;
  j["complete"] = plan.complete;
  Json stages = Json::array();
  for (const StageRecord& s : plan.stages) {
    Json js;
    js["stage"] = s.stage;
    js["begin"] = s.begin;
    js["end"] = s.end;
    js["tolerance"] = s.tolerance;
    js["stage_targets"] = vec_to_json(s.stage_targets);
    js["residual_norm"] = s.residual_norm;
    js["claimed_bound"] = s.claimed_bound;
    js["residual_ok"] = s.residual_norm <= s.claimed_bound;
    js["max_within_norm"] = s.max_within_norm;
    if (std::isfinite(s.within_bound)) {
      js["within_bound"] = s.within_bound;
      js["within_ok"] = s.max_within_norm <= s.within_bound;
    } else {
      js["within_bound"] = nullptr;
      js["within_ok"] = nullptr;
    }
    js["closed"] = s.closed;
    stages.push_back(std::move(js));
  }
  j["stages"] = std::move(stages);
  Json carriers = Json::array();
  for (const std::vector<long>& c : plan.carriers) carriers.push_back(Json(c));
  j["carriers"] = std::move(carriers);
  j["filler_count"] = plan.filler_count;
  j["provenance"] = spans_to_json(hit.provenance);
  std::size_t last = hit.trace.size() - 1;
  j["final_index"] = hit.trace.index_at(last);
  j["final_dist"] = hit.trace.dist_at(last);

  // --out takes "plan.json" or "plan.json,trace.csv".
  std::string plan_path = o.common.out;
  std::string trace_path;
  std::size_t comma = plan_path.find(',');
  if (comma != std::string::npos) {
    trace_path = plan_path.substr(comma + 1);
    plan_path.resize(comma);
  }
  if (!plan_path.empty()) write_text_file(plan_path, json_to_text(j));
  if (!trace_path.empty()) write_trace_csv(trace_path, hit.trace);

  std::cout << "hit: stages=" << plan.stages.size() << " complete=" << (plan.complete ? "yes" : "no")
            << " final_dist=" << hit.trace.dist_at(last) << "\n";
  if (!plan.complete) {
    std::cerr << "hit: horizon " << o.horizon << " exhausted before stage " << o.stages
              << " closed\n";
    return 3;
  }
  return 0;
}

// ---- certify ----

struct CertifyOpts {
  Common common;
  std::string measure_path;
  int uniform_depth = 0;
  int theta_k = 0;
  int k = 0;
  std::string target = "0";
  int levels = 0;
  std::string s = "1";
  std::string c = "2";
  int depth = 0;
};

int run_certify(const CertifyOpts& o) {
  CylinderMeasure mu;
  if (!o.measure_path.empty()) {
    mu = load_measure_file(o.measure_path);
  } else if (!o.common.spec_path.empty()) {
    if (o.k < 2 || o.levels < 1)
      throw ParseError("certify --spec needs --k >= 2 and --levels >= 1");
    SequenceSpec spec = load_spec(o.common);
    LambdaParams params{to_double(parse_rat_arg(o.target, "--target")), o.k};
    mu = build_lambda_measure(spec, params, o.levels);
  } else if (o.uniform_depth > 0) {
    mu = o.theta_k > 0 ? uniform_theta_measure(o.theta_k, o.uniform_depth)
                       : uniform_measure(o.uniform_depth);
  } else {
    throw ParseError("certify needs a measure: --measure FILE, --spec ... or --uniform-depth D");
  }

  if (auto bad = mu.first_mass_inconsistency())
    throw PreconditionError("measure violates mass conservation at level " +
                            std::to_string(bad->first));

  int depth = o.depth > 0 ? o.depth : mu.depth();
  DimensionCertificate cert =
      mdp_certify(mu, parse_rat_arg(o.s, "--s"), parse_rat_arg(o.c, "--c"), depth);

  Json j = certificate_to_json(cert);
  j["mode"] = o.common.mode;
  j["seed"] = o.common.seed;
  Json jm;
  jm["space"] = mu.space == CylinderSpace::Omega ? "omega" : "theta";
  jm["k"] = mu.k;
  jm["rule"] = mu.rule;
  jm["depth"] = mu.depth();
  j["measure"] = std::move(jm);
  emit(o.common, j);
  std::cout << "certify: s=" << rational_to_string(cert.s) << " c=" << rational_to_string(cert.c)
            << " depth=" << cert.depth << " verdict="
            << (cert.certified ? "certified" : "not certified");
  if (!cert.certified) std::cout << " first_violation_level=" << cert.first_violation_level;
  std::cout << "\n";
  return 0;
}

// ---- achieve ----

struct AchieveOpts {
  Common common;
  int depth = 12;
  std::string probe_targets;
  double delta = 1e-3;
  long horizon = 1000000;
  std::string cells_out;
};

int run_achieve(const AchieveOpts& o) {
  SequenceSpec spec = load_spec(o.common);

  if (!o.probe_targets.empty()) {
    std::vector<double> targets = parse_list_arg(o.probe_targets, "--probe-targets");
    std::vector<DensityProbe> probes = probe_density(spec, targets, o.delta, o.horizon);
    Json j = artifact_header("density-probe", o.common);
    j["delta"] = o.delta;
    j["horizon"] = o.horizon;
    Json rows = Json::array();
    int witnessed = 0;
    for (const DensityProbe& p : probes) {
      Json row;
      row["target"] = p.target;
      row["witnessed"] = p.witnessed;
      row["settled_index"] = p.settled_at >= 0 ? spec.start_index() + p.settled_at : -1;
      row["final_dev"] = p.final_dev;
      rows.push_back(std::move(row));
      witnessed += p.witnessed ? 1 : 0;
    }
    j["targets"] = std::move(rows);
    emit(o.common, j);
    std::cout << "density-probe: witnessed " << witnessed << "/" << probes.size()
              << " targets at delta=" << o.delta << "\n";
    return 0;
  }

  if (spec.dim() == 1) {
    AchievementCover cover = explore(spec, o.depth);
    Json j = artifact_header("achievement-cover", o.common);
    j["depth"] = cover.depth;
    j["exact"] = cover.exact;
    j["tail_radius"] = rational_to_string(cover.tail_radius);
    j["distinct_sums"] = cover.distinct_sums;
    j["min_sum"] = rational_to_string(cover.min_sum);
    j["max_sum"] = rational_to_string(cover.max_sum);
    j["classification"] = cover.classification;
    Json ivs = Json::array();
    for (const RationalInterval& iv : cover.intervals) {
      Json ji;
      ji["lo"] = rational_to_string(iv.lo);
      ji["hi"] = rational_to_string(iv.hi);
      ivs.push_back(std::move(ji));
    }
    j["intervals"] = std::move(ivs);
    Json gaps = Json::array();
    for (const RationalInterval& gp : cover.gaps) {
      Json jg;
      jg["lo"] = rational_to_string(gp.lo);
      jg["hi"] = rational_to_string(gp.hi);
      gaps.push_back(std::move(jg));
    }
    j["gaps"] = std::move(gaps);
    emit(o.common, j);
    std::cout << "achieve: depth=" << cover.depth << " classification=" << cover.classification
              << " intervals=" << cover.intervals.size() << " gaps=" << cover.gaps.size()
              << "\n";
    return 0;
  }

  if (spec.dim() == 2) {
    GridCover grid = explore_grid(spec, o.depth);
    Json j = artifact_header("achievement-grid", o.common);
    j["depth"] = grid.depth;
    j["cell"] = grid.cell;
    j["occupied"] = grid.occupied;
    j["min_x"] = grid.min_x;
    j["max_x"] = grid.max_x;
    j["min_y"] = grid.min_y;
    j["max_y"] = grid.max_y;
    emit(o.common, j);
    if (!o.cells_out.empty()) {
      std::string csv = "cell_x,cell_y\n";
      for (const auto& [x, y] : grid.cells)
        csv += std::to_string(x) + "," + std::to_string(y) + "\n";
      write_text_file(o.cells_out, csv);
    }
    std::cout << "achieve: depth=" << grid.depth << " occupied_cells=" << grid.occupied << "\n";
    return 0;
  }

  throw PreconditionError("achieve covers dim 1 (intervals) and dim 2 (grid) only");
}

// ---- partition ----

struct PartitionOpts {
  Common common;
  std::string target;
  int k = 4;
  int levels = 1;
};

int run_partition(const PartitionOpts& o) {
  SequenceSpec spec = load_spec(o.common);
  Vec target = parse_vec_arg(o.target, "--target");
  TriplePartition part = partition_for_dimension(spec, target, o.k, o.levels);

  Json j = artifact_header("triple-partition", o.common);
  j["k"] = part.k;
  j["levels"] = part.levels;
  j["window_end"] = part.window_end;
  j["class_counts"] = part.class_counts;
  j["class_floor"] = part.class_floor;
  bool ok = true;
  for (std::size_t i = 0; i < part.class_counts.size(); ++i)
    ok = ok && part.class_counts[i] >= part.class_floor[i];
  j["floor_ok"] = ok;
  Json blocks = Json::array();
  for (const BlockTriple& b : part.blocks) {
    Json jb;
    jb["block"] = b.block;
    jb["carrier"] = Json(b.carrier);
    jb["filler"] = Json(b.filler);
    jb["free"] = Json(b.free_indices);
    blocks.push_back(std::move(jb));
  }
  j["blocks"] = std::move(blocks);
  j["demo_signs"] = sign_word_to_string(part.demo_signs);
  j["demo_residual"] = part.demo_residual;
  j["provenance"] = spans_to_json(part.provenance);
  emit(o.common, j);
  std::cout << "partition: k=" << part.k << " levels=" << part.levels << " class_counts=";
  for (std::size_t i = 0; i < part.class_counts.size(); ++i)
    std::cout << (i ? "," : "") << part.class_counts[i];
  std::cout << " floor_ok=" << (ok ? "yes" : "no") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"signed-series toolkit: sign constructions, certificates, achievement sets"};
  app.require_subcommand(1);

  BalanceOpts balance_opts;
  CLI::App* balance = app.add_subcommand("balance", "sign finite vector lists / dyadic blocks");
  add_common(balance, balance_opts.common);
  balance->add_option("--take", balance_opts.take, "balance the first N terms");
  balance->add_option("--converge", balance_opts.converge, "block-sign the first N terms");
  balance->add_option("--strategy", balance_opts.strategy, "greedy, exhaustive, or pairing")
      ->check(CLI::IsMember({"greedy", "exhaustive", "pairing"}))
      ->capture_default_str();
  balance->add_option("--trace-out", balance_opts.trace_out, "partial-sum CSV (converge)");

  GreedyOpts greedy_opts;
  CLI::App* greedy = app.add_subcommand("greedy", "greedy signs toward a 1-D target");
  add_common(greedy, greedy_opts.common);
  greedy->add_option("--target", greedy_opts.target, "target value")->required();
  greedy->add_option("--depth", greedy_opts.depth, "number of terms")->capture_default_str();
  greedy->add_option("--delta", greedy_opts.delta, "report first index settled within delta");
  greedy->add_option("--trace-out", greedy_opts.trace_out, "partial-sum CSV path");
  greedy->add_option("--signs-out", greedy_opts.signs_out, "sign word text path");

  LambdaOpts lambda_opts;
  CLI::App* lambda =
      app.add_subcommand("lambda-count", "count steering-block words level by level");
  add_common(lambda, lambda_opts.common);
  lambda->add_option("--k", lambda_opts.k, "block width >= 2")->capture_default_str();
  lambda->add_option("--target", lambda_opts.target, "steering target L")->capture_default_str();
  lambda->add_option("--levels", lambda_opts.levels, "levels to enumerate")->capture_default_str();
  lambda->add_option("--check-word", lambda_opts.check_word, "report membership of this word");
  lambda->add_option("--measure-out", lambda_opts.measure_out,
                     "write the subdivision measure JSON");

  LevyOpts levy_opts;
  CLI::App* levy = app.add_subcommand("levy", "directional mass and block decomposition");
  add_common(levy, levy_opts.common);
  levy->add_option("--horizon", levy_opts.horizon, "scan horizon")->capture_default_str();
  levy->add_option("--direction", levy_opts.direction, "decompose along this unit vector");
  levy->add_option("--probes", levy_opts.probes, "probe direction count")->capture_default_str();
  levy->add_option("--radii", levy_opts.radii, "mass radii")->capture_default_str();
  levy->add_flag("--ls", levy_opts.ls, "add the summable-direction probe");

  HitOpts hit_opts;
  CLI::App* hit = app.add_subcommand("hit", "stagewise construction hitting a target in R^d");
  add_common(hit, hit_opts.common);
  hit->add_option("--target", hit_opts.target, "target vector x1,...,xd")->required();
  hit->add_option("--stages", hit_opts.stages, "stage count")->capture_default_str();
  hit->add_option("--horizon", hit_opts.horizon, "index budget")->capture_default_str();
  hit->get_option("--out")->description("plan.json or plan.json,trace.csv");

  CertifyOpts certify_opts;
  CLI::App* certify = app.add_subcommand("certify", "mass-distribution dimension certificate");
  add_common(certify, certify_opts.common, /*spec_required=*/false);
  certify->add_option("--measure", certify_opts.measure_path, "measure JSON file");
  certify->add_option("--uniform-depth", certify_opts.uniform_depth,
                      "uniform measure of this depth");
  certify->add_option("--theta-k", certify_opts.theta_k,
                      "use the width-k class space with --uniform-depth");
  certify->add_option("--k", certify_opts.k, "block width for --spec measures");
  certify->add_option("--target", certify_opts.target, "steering target for --spec measures")
      ->capture_default_str();
  certify->add_option("--levels", certify_opts.levels, "levels for --spec measures");
  certify->add_option("--s", certify_opts.s, "exponent s")->required();
  certify->add_option("--c", certify_opts.c, "constant c")->required();
  certify->add_option("--depth", certify_opts.depth, "levels to check (default: all)");

  AchieveOpts achieve_opts;
  CLI::App* achieve = app.add_subcommand("achieve", "achievement-set cover / density probes");
  add_common(achieve, achieve_opts.common);
  achieve->add_option("--depth", achieve_opts.depth, "enumeration depth")->capture_default_str();
  achieve->add_option("--probe-targets", achieve_opts.probe_targets,
                      "greedy-witness these targets instead of covering");
  achieve->add_option("--delta", achieve_opts.delta, "witness tolerance")->capture_default_str();
  achieve->add_option("--horizon", achieve_opts.horizon, "witness horizon")->capture_default_str();
  achieve->add_option("--cells-out", achieve_opts.cells_out, "occupied-cell CSV (dim 2)");

  PartitionOpts partition_opts;
  CLI::App* partition =
      app.add_subcommand("partition", "carrier/filler/free block partition and class counts");
  add_common(partition, partition_opts.common);
  partition->add_option("--target", partition_opts.target, "target vector")->required();
  partition->add_option("--k", partition_opts.k, "block width")->capture_default_str();
  partition->add_option("--levels", partition_opts.levels, "levels to count")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(balance)) return run_balance(balance_opts);
    if (app.got_subcommand(greedy)) return run_greedy(greedy_opts);
    if (app.got_subcommand(lambda)) return run_lambda(lambda_opts);
    if (app.got_subcommand(levy)) return run_levy(levy_opts);
    if (app.got_subcommand(hit)) return run_hit(hit_opts);
    if (app.got_subcommand(certify)) return run_certify(certify_opts);
    if (app.got_subcommand(achieve)) return run_achieve(achieve_opts);
    if (app.got_subcommand(partition)) return run_partition(partition_opts);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
