// End-to-end tests of the command-line binary: exit-code contract, artifact
// structure, and run-to-run determinism. Build with SIGNUM_CLI_PATH pointing
// at the binary.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "signum/spec_io.hpp"

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  if (ok) {
    std::cout << "ok: " << what << "\n";
  } else {
    ++failures;
    std::cout << "FAILED: " << what << "\n";
  }
}

fs::path g_root;

int run(const std::string& args) {
  std::string cmd = std::string(SIGNUM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -2;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

signum::Json load_json(const fs::path& p) {
  return signum::Json::parse(slurp(p), nullptr, /*allow_exceptions=*/true);
}

std::string path(const std::string& name) { return (g_root / name).string(); }

void write_configs() {
  std::ofstream(g_root / "h.cfg") << "family = power_decay\nstart = 1\ncoeff = 1\nalpha = 1\n";
  std::ofstream(g_root / "geo3.cfg")
      << "family = geometric\nstart = 1\ncoeff = 1\nratio = 1/3\n";
  std::ofstream(g_root / "inter.cfg")
      << "family = interleaved\nstart = 1\n"
         "sub.0.family = power_decay\nsub.0.start = 1\nsub.0.coeff = 1, 0\nsub.0.alpha = 1, 1\n"
         "sub.1.family = power_decay\nsub.1.start = 1\nsub.1.coeff = 0, 1\nsub.1.alpha = 1, 1\n"
         "levy_direction.0 = 1, 0\nlevy_direction.1 = 0, 1\n";
  std::ofstream(g_root / "pairs.cfg")
      << "family = explicit\ndim = 2\nstart = 0\n"
         "term.0 = 1, 0\nterm.1 = 1, 0\nterm.2 = 0, 1\nterm.3 = 0, 1\n";
  std::ofstream(g_root / "bad.cfg") << "family = bogus\nstart = 0\n";
}

void test_exit_codes() {
  check(run("balance --spec " + path("h.cfg") + " --take 6") == 0, "balance take exits 0");
  check(run("balance --spec " + path("nope.cfg") + " --take 6") == 1,
        "missing spec file exits 1");
  check(run("balance --spec " + path("bad.cfg") + " --take 6") == 1,
        "unknown family exits 1");
  check(run("greedy --spec " + path("h.cfg")) == 1, "missing required flag exits 1");
  check(run("balance --spec " + path("h.cfg") + " --take 3 --converge 3") == 1,
        "take and converge together exit 1");
  check(run("lambda-count --spec " + path("h.cfg") + " --k 1 --levels 1") == 2,
        "block width 1 exits 2");
  check(run("balance --spec " + path("h.cfg") + " --take 5 --strategy pairing") == 2,
        "pairing on unpaired terms exits 2");
  check(run("achieve --spec " + path("h.cfg") + " --depth 10") == 2,
        "cover of a non-summable sequence exits 2");
  check(run("lambda-count --spec " + path("h.cfg") + " --k 5 --levels 5") == 3,
        "enumeration budget exits 3");
  check(run("achieve --spec " + path("geo3.cfg") + " --depth 23") == 3,
        "cover depth budget exits 3");
  check(run("hit --spec " + path("inter.cfg") + " --target 1,-2 --stages 8 --horizon 64") == 3,
        "starved stage horizon exits 3");
}

void test_greedy_artifacts() {
  int rc = run("greedy --spec " + path("h.cfg") +
               " --target 2 --depth 5000 --delta 0.01 --out " + path("g.json") +
               " --trace-out " + path("g.csv") + " --signs-out " + path("g.txt"));
  check(rc == 0, "greedy run exits 0");
  signum::Json j = load_json(g_root / "g.json");
  check(j["schema_version"] == "1", "greedy artifact carries schema_version 1");
  check(j["kind"] == "greedy-run", "greedy artifact kind");
  check(j["bound_holds"].get<bool>(), "greedy artifact records the bound holding");
  check(j["settled_index"].get<long>() >= 1, "greedy artifact records a settled index");

  std::istringstream csv(slurp(g_root / "g.csv"));
  std::string header;
  std::getline(csv, header);
  check(header == "N,S_1,dist_to_target", "trace CSV header");
  long rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  check(rows == 5000, "trace CSV has one row per term");

  std::string signs = slurp(g_root / "g.txt");
  check(signs.size() == 5001 && signs.back() == '\n', "sign word file length");
  check(signs.find_first_not_of("+-\n") == std::string::npos, "sign word alphabet");
}

void test_lambda_artifacts() {
  int rc = run("lambda-count --spec " + path("h.cfg") +
               " --k 3 --levels 2 --check-word ++- --out " + path("lam.json") +
               " --measure-out " + path("mu.json"));
  check(rc == 0, "lambda-count exits 0");
  signum::Json j = load_json(g_root / "lam.json");
  check(j["kind"] == "lambda-count", "lambda artifact kind");
  check(j["branching_ok"].get<bool>(), "lambda artifact branching verdict");
  check(j["membership"]["member"].get<bool>(), "++- membership recorded");
  check(j["survivors"].size() == 2, "lambda artifact has one survivor count per level");

  signum::Json mu = load_json(g_root / "mu.json");
  check(mu["space"] == "omega", "measure JSON names its space");
  check(mu["rule"] == "block-subdivision", "measure JSON names its rule");

  rc = run("certify --measure " + path("mu.json") + " --s 1/3 --c 8 --out " +
           path("cert.json"));
  check(rc == 0, "certify from measure file exits 0");
  signum::Json cert = load_json(g_root / "cert.json");
  check(cert["verdict"] == "certified", "measure-file certificate verdict");
  check(cert["exact_comparison"].get<bool>(), "measure-file certificate decided exactly");
}

void test_certify_uniform() {
  int rc = run("certify --uniform-depth 10 --s 1 --c 2 --out " + path("u.json"));
  check(rc == 0, "uniform certify exits 0");
  check(load_json(g_root / "u.json")["verdict"] == "certified", "uniform s=1 c=2 certified");

  rc = run("certify --uniform-depth 10 --s 3/2 --c 2 --out " + path("u2.json"));
  check(rc == 0, "failed certificate still exits 0");
  signum::Json j = load_json(g_root / "u2.json");
  check(j["verdict"] == "not certified", "uniform s=3/2 rejected");
  check(j["first_violation_level"].get<int>() == 1, "violation located at level 1");

  rc = run("certify --uniform-depth 7 --theta-k 3 --s 2/3 --c 4 --out " + path("t.json"));
  check(rc == 0, "class-space certify exits 0");
  check(load_json(g_root / "t.json")["verdict"] == "certified",
        "width-3 class space s=2/3 c=4 certified");
}

void test_levy_artifacts() {
  int rc = run("levy --spec " + path("inter.cfg") +
               " --direction 1,0 --horizon 20000 --out " + path("levy.json"));
  check(rc == 0, "levy decomposition exits 0");
  signum::Json j = load_json(g_root / "levy.json");
  check(j["kind"] == "levy-decomposition", "levy artifact kind");
  bool sigmas_ok = !j["blocks"].empty();
  for (const auto& b : j["blocks"]) {
    double sigma = b["sigma"].get<double>();
    sigmas_ok = sigmas_ok && sigma >= 1.0 && sigma <= 2.0;
  }
  check(sigmas_ok, "every completed block has sigma in [1,2]");

  rc = run("levy --spec " + path("inter.cfg") + " --horizon 20000 --ls --out " +
           path("mass.json"));
  check(rc == 0, "directional mass exits 0");
  signum::Json m = load_json(g_root / "mass.json");
  check(m["kind"] == "directional-mass", "mass artifact kind");
  check(m.contains("ls") && m["ls"].contains("min_mass"), "ls probe attached");
}

void test_hit_and_partition() {
  int rc = run("hit --spec " + path("inter.cfg") +
               " --target 1,-2 --stages 5 --horizon 200000 --out " + path("plan.json") + "," +
               path("hit.csv"));
  check(rc == 0, "hit exits 0");
  signum::Json j = load_json(g_root / "plan.json");
  check(j["complete"].get<bool>(), "hit plan complete");
  bool residuals_ok = j["stages"].size() == 5;
  for (const auto& st : j["stages"]) residuals_ok = residuals_ok && st["residual_ok"].get<bool>();
  check(residuals_ok, "every stage residual within its claimed bound");
  std::istringstream csv(slurp(g_root / "hit.csv"));
  std::string header;
  std::getline(csv, header);
  check(header == "N,S_1,S_2,dist_to_target", "hit trace CSV header");

  rc = run("partition --spec " + path("inter.cfg") +
           " --target 1,-2 --k 5 --levels 2 --out " + path("part.json"));
  check(rc == 0, "partition exits 0");
  signum::Json p = load_json(g_root / "part.json");
  check(p["floor_ok"].get<bool>(), "partition class counts meet their floors");
  check(p["class_counts"].size() == 2, "partition reports one count per level");
}

void test_achieve_artifacts() {
  int rc = run("achieve --spec " + path("geo3.cfg") + " --depth 10 --out " + path("ach.json"));
  check(rc == 0, "achieve exits 0");
  signum::Json j = load_json(g_root / "ach.json");
  check(j["classification"] == "gapped", "ratio-1/3 cover is gapped");
  check(j["exact"].get<bool>(), "ratio-1/3 cover computed exactly");
  check(j["intervals"].size() == j["gaps"].size() + 1, "gaps sit between intervals");

  rc = run("achieve --spec " + path("h.cfg") +
           " --probe-targets 0,1 --delta 0.01 --horizon 20000 --out " + path("probe.json"));
  check(rc == 0, "density probe exits 0");
  signum::Json p = load_json(g_root / "probe.json");
  check(p["kind"] == "density-probe", "probe artifact kind");
  bool witnessed = p["targets"].size() == 2;
  for (const auto& t : p["targets"]) witnessed = witnessed && t["witnessed"].get<bool>();
  check(witnessed, "both probe targets witnessed");
}

void test_balance_pairing() {
  int rc = run("balance --spec " + path("pairs.cfg") +
               " --take 4 --strategy pairing --out " + path("pair.json"));
  check(rc == 0, "pairing strategy exits 0");
  signum::Json j = load_json(g_root / "pair.json");
  check(j["signs"] == "+-+-", "pairing signs alternate within pairs");
  check(j["max_prefix_norm"].get<double>() == 1.0, "pairing objective");
}

void test_determinism() {
  std::string args = "levy --spec " + path("inter.cfg") +
                     " --horizon 20000 --ls --seed 17 --out ";
  check(run(args + path("d1.json")) == 0 && run(args + path("d2.json")) == 0,
        "repeated levy runs exit 0");
  std::string a = slurp(g_root / "d1.json");
  check(!a.empty() && a == slurp(g_root / "d2.json"),
        "repeated levy runs write identical artifacts");
}

}  // namespace

int main() {
  g_root = fs::temp_directory_path() /
           ("signum-cli-" + std::to_string(static_cast<long>(::getpid())));
  fs::remove_all(g_root);
  fs::create_directories(g_root);
  write_configs();

  test_exit_codes();
  test_greedy_artifacts();
  test_lambda_artifacts();
  test_certify_uniform();
  test_levy_artifacts();
  test_hit_and_partition();
  test_achieve_artifacts();
  test_balance_pairing();
  test_determinism();

  fs::remove_all(g_root);
  if (failures != 0) {
    std::cout << failures << " checks failed\n";
    return 1;
  }
  std::cout << "all cli checks passed\n";
  return 0;
}
