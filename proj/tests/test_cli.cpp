#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_path() {
  const char* p = std::getenv("STRUCMIX_CLI");
  return p ? p : "";
}

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

RunResult run(const fs::path& dir, const std::string& args) {
  auto out_file = dir / "stdout.txt";
  std::string cmd = cli_path() + " " + args + " > " + out_file.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(rc);
  std::ifstream in(out_file);
  r.stdout_text.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return r;
}

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("analyze on toy graphs", "[cli]") {
  if (cli_path().empty()) SKIP("STRUCMIX_CLI not set");
  auto dir = fresh_dir("strucmix_cli_analyze");
  write(dir / "tri.edges", "0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n");
  write(dir / "tri.labels", "0 0\n1 0\n2 0\n3 1\n4 1\n5 1\n");

  auto res = run(dir, "--out-dir " + dir.string() + " analyze --input " +
                          (dir / "tri.edges").string() + " --labels " +
                          (dir / "tri.labels").string());
  REQUIRE(res.exit_code == 0);
  auto summary = json::parse(slurp(dir / "analyze_summary.json"));
  CHECK(summary["r_global"].get<double>() == Catch::Approx(1.0).margin(1e-9));

  // K22: every node at r_local = -1, histogram mass in the first bin
  write(dir / "k22.edges", "0 2\n0 3\n1 2\n1 3\n");
  write(dir / "k22.labels", "0 0\n1 0\n2 1\n3 1\n");
  auto res2 = run(dir, "--out-dir " + dir.string() + " analyze --input " +
                           (dir / "k22.edges").string() + " --labels " +
                           (dir / "k22.labels").string());
  REQUIRE(res2.exit_code == 0);
  auto hist = slurp(dir / "analyze_histogram.csv");
  CHECK(hist.find("-1,-0.951219512195,4\n") != std::string::npos);
  auto nodes = slurp(dir / "analyze_nodes.csv");
  CHECK(nodes.find("node,r_local,epsilon,lambda,defined") == 0);
}

TEST_CASE("transform --T 0 --mode naive on a 4-node path emits the expected file", "[cli]") {
  if (cli_path().empty()) SKIP("STRUCMIX_CLI not set");
  auto dir = fresh_dir("strucmix_cli_transform");
  write(dir / "path.edges", "0 1\n1 2\n2 3\n");

  auto res = run(dir, "--out-dir " + dir.string() + " transform --input " +
                          (dir / "path.edges").string() + " --T 0 --mode naive --out comp.tsv");
  REQUIRE(res.exit_code == 0);

  // hand enumeration: degrees (1,2,2,1); pairs with equal degree get weight 1,
  // the rest e^-1 = 0.367879441171 at 12 significant digits
  const std::string expected =
      "# strucmix computation graph\n"
      "# nodes=4 T=0 mode=naive budget=0 floor=0\n"
      "src\tdst\trel\tweight\n"
      "0\t1\t0\t0.367879441171\n"
      "1\t0\t0\t0.367879441171\n"
      "0\t2\t0\t0.367879441171\n"
      "2\t0\t0\t0.367879441171\n"
      "0\t3\t0\t1\n"
      "3\t0\t0\t1\n"
      "1\t2\t0\t1\n"
      "2\t1\t0\t1\n"
      "1\t3\t0\t0.367879441171\n"
      "3\t1\t0\t0.367879441171\n"
      "2\t3\t0\t0.367879441171\n"
      "3\t2\t0\t0.367879441171\n"
      "0\t1\tp\t1\n"
      "1\t0\tp\t1\n"
      "1\t2\tp\t1\n"
      "2\t1\tp\t1\n"
      "2\t3\tp\t1\n"
      "3\t2\tp\t1\n";
  CHECK(slurp(dir / "comp.tsv") == expected);

  // byte-identical rerun
  auto first = slurp(dir / "comp.tsv");
  auto res2 = run(dir, "--out-dir " + dir.string() + " transform --input " +
                           (dir / "path.edges").string() + " --T 0 --mode naive --out comp.tsv");
  REQUIRE(res2.exit_code == 0);
  CHECK(slurp(dir / "comp.tsv") == first);

  // manifest lists the artifact and digests the input
  auto manifest = json::parse(slurp(dir / "manifest_transform.json"));
  CHECK(manifest["command"] == "transform");
  CHECK(manifest["inputs"][0]["fnv1a64"].get<std::string>().size() == 16);
  CHECK(manifest["outputs"][0].get<std::string>().find("comp.tsv") != std::string::npos);
}

TEST_CASE("shift report mean delta is positive on the twins synthetic", "[cli][slow]") {
  if (cli_path().empty()) SKIP("STRUCMIX_CLI not set");
  auto dir = fresh_dir("strucmix_cli_shift");
  write(dir / "spec.json",
        R"({"generator": "hub-spoke", "motifs_per_class": 3, "background_per_anchor": 5, "seed": 2})");
  REQUIRE(run(dir, "--out-dir " + dir.string() + " gen-synthetic --spec " +
                       (dir / "spec.json").string() + " --out-prefix twins")
              .exit_code == 0);
  auto res = run(dir, "--out-dir " + dir.string() + " transform --input " +
                          (dir / "twins.edges.txt").string() + " --labels " +
                          (dir / "twins.labels.txt").string() +
                          " --T 3 --mode practical --out comp.tsv --shift-report");
  REQUIRE(res.exit_code == 0);
  auto summary = json::parse(slurp(dir / "shift_summary.json"));
  CHECK(summary["mean_delta"].get<double>() > 0.0);
  CHECK(summary["nodes"].get<int>() >= 6);
}

TEST_CASE("train and ablate emit well-formed reports", "[cli][slow]") {
  if (cli_path().empty()) SKIP("STRUCMIX_CLI not set");
  auto dir = fresh_dir("strucmix_cli_train");
  write(dir / "spec.json",
        R"({"generator": "planted-partition", "blocks": 2, "block_size": 10,
            "p_intra": 0.6, "p_inter": 0.05, "feature_noise": 0.4, "seed": 3})");
  REQUIRE(run(dir, "--out-dir " + dir.string() + " gen-synthetic --spec " +
                       (dir / "spec.json").string() + " --out-prefix pp")
              .exit_code == 0);
  REQUIRE(run(dir, "--out-dir " + dir.string() + " transform --input " +
                       (dir / "pp.edges.txt").string() + " --T 1 --mode practical --out comp.tsv")
              .exit_code == 0);
  REQUIRE(run(dir, "--out-dir " + dir.string() + " make-splits --labels " +
                       (dir / "pp.labels.txt").string() + " --count 2 --out-prefix sp")
              .exit_code == 0);

  auto res = run(dir, "--out-dir " + dir.string() + " train --comp " +
                          (dir / "comp.tsv").string() + " --features " +
                          (dir / "pp.features.txt").string() + " --labels " +
                          (dir / "pp.labels.txt").string() + " --splits " +
                          (dir / "sp_0.json").string() +
                          " --variant wrgat --relations all --epochs 40 --dropout 0.2");
  REQUIRE(res.exit_code == 0);
  auto report = json::parse(slurp(dir / "train_report.json"));
  CHECK(report.contains("test_accuracy"));
  CHECK(report.contains("history"));
  CHECK(report["history"].size() >= 1);
  CHECK(report["variant"] == "wrgat");
  // report schema round-trips
  CHECK(json::parse(report.dump()) == report);

  auto ab = run(dir, "--out-dir " + dir.string() + " ablate --comp " +
                         (dir / "comp.tsv").string() + " --features " +
                         (dir / "pp.features.txt").string() + " --labels " +
                         (dir / "pp.labels.txt").string() +
                         " --num-splits 1 --epochs 30 --dropout 0.2");
  REQUIRE(ab.exit_code == 0);
  auto grid = json::parse(slurp(dir / "ablate_report.json"));
  REQUIRE(grid["cells"].size() == 6);
  for (auto& cell : grid["cells"]) {
    CHECK(cell.contains("gain_over_proximity_baseline"));
    CHECK(cell["completed"].get<int>() == 1);
  }
  CHECK(fs::exists(dir / "ablate_assortativity_curves.csv"));
}

TEST_CASE("exit codes: usage 1, data error 2", "[cli]") {
  if (cli_path().empty()) SKIP("STRUCMIX_CLI not set");
  auto dir = fresh_dir("strucmix_cli_errors");

  CHECK(run(dir, "analyze").exit_code == 1);                  // missing required flags
  CHECK(run(dir, "no-such-command").exit_code == 1);

  CHECK(run(dir, "--out-dir " + dir.string() +
                     " analyze --input /nonexistent.edges --labels /nonexistent.labels")
            .exit_code == 2);

  write(dir / "bad.edges", "0 1\nbogus line\n");
  write(dir / "bad.labels", "0 0\n1 1\n");
  CHECK(run(dir, "--out-dir " + dir.string() + " analyze --input " +
                     (dir / "bad.edges").string() + " --labels " + (dir / "bad.labels").string())
            .exit_code == 2);

  // unlabeled graph cannot be analyzed
  write(dir / "ok.edges", "0 1\n");
  write(dir / "one.labels", "0 0\n1 0\n");
  CHECK(run(dir, "--out-dir " + dir.string() + " analyze --input " +
                     (dir / "ok.edges").string() + " --labels " + (dir / "one.labels").string())
            .exit_code == 3);  // single-label graph: assortativity undefined
}
