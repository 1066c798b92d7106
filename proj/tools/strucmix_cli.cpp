// strucmix: measure node-level mixing patterns, rewire graphs into
// multi-relational computation graphs, and train relation-aware GNNs on them.
//
// Subcommands: analyze, transform, train, ablate, make-splits, gen-synthetic.
// Every run is a pure function of (inputs, flags, --seed); artifacts are
// byte-stable across reruns. Exit codes: 0 ok, 1 usage, 2 data error,
// 3 numerical failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "strucmix/compgraph.hpp"
#include "strucmix/datasets.hpp"
#include "strucmix/errors.hpp"
#include "strucmix/graph.hpp"
#include "strucmix/mixing.hpp"
#include "strucmix/rng.hpp"
#include "strucmix/splits.hpp"
#include "strucmix/wrgnn.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace strucmix;

namespace {

struct GlobalArgs {
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  int threads = 1;
};

std::string fmt12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string file_digest_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

// Exact-rerun metadata: every input digested, every artifact listed.
class Manifest {
 public:
  Manifest(std::string command, const GlobalArgs& g) : started_(utc_now()) {
    doc_["command"] = std::move(command);
    doc_["seed"] = g.seed;
    doc_["threads"] = g.threads;
    doc_["out_dir"] = g.out_dir;
    doc_["inputs"] = json::array();
    doc_["outputs"] = json::array();
  }
  void config(json cfg) { doc_["config"] = std::move(cfg); }
  void input(const std::string& path) {
    doc_["inputs"].push_back({{"path", path}, {"fnv1a64", file_digest_hex(path)}});
  }
  void output(const std::string& path) { doc_["outputs"].push_back(path); }
  void write(const std::string& path) {
    doc_["started_utc"] = started_;
    doc_["finished_utc"] = utc_now();
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << doc_.dump(2) << "\n";
  }

 private:
  json doc_;
  std::string started_;
};

std::string out_path(const GlobalArgs& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return (fs::path(g.out_dir) / name).string();
}

// labels from a file, sized to n (missing rows stay -1)
std::pair<std::vector<int>, int> labels_for(const std::string& path, int n) {
  auto rows = LabeledGraph::load_label_rows(path);
  std::vector<int> labels(n, -1);
  int num_classes = 0;
  for (auto& [u, y] : rows) {
    if (u >= n)
      throw DataError(path + ": node id " + std::to_string(u) +
                      " exceeds graph size " + std::to_string(n));
    labels[u] = y;
    num_classes = std::max(num_classes, y + 1);
  }
  return {labels, num_classes};
}

std::pair<std::vector<double>, int> features_for(const std::string& path, int n) {
  auto fr = LabeledGraph::load_feature_rows(path);
  if (fr.dim <= 0) throw DataError(path + ": no feature columns");
  std::vector<double> x(static_cast<std::size_t>(n) * fr.dim, 0.0);
  for (auto& [u, row] : fr.rows) {
    if (u >= n)
      throw DataError(path + ": node id " + std::to_string(u) +
                      " exceeds graph size " + std::to_string(n));
    std::copy(row.begin(), row.end(), x.begin() + static_cast<std::size_t>(u) * fr.dim);
  }
  return {x, fr.dim};
}

// ---------------------------------------------------------------------------
// analyze: per-node assortativity / smoothness CSVs + JSON summary

struct AnalyzeArgs {
  std::string input, labels;
  std::optional<std::string> features;
  double tol = 1e-6;
};

void cmd_analyze(const GlobalArgs& g, const AnalyzeArgs& a) {
  Manifest manifest("analyze", g);
  manifest.input(a.input);
  manifest.input(a.labels);
  if (a.features) manifest.input(*a.features);
  manifest.config({{"input", a.input},
                   {"labels", a.labels},
                   {"features", a.features ? *a.features : ""},
                   {"tol", a.tol}});

  auto graph = LabeledGraph::load(a.input, a.labels, a.features, &std::cerr);
  if (!graph.has_labels()) throw DataError("analyze requires labeled nodes");
  auto profile = assortativity_profile(graph, a.tol, g.threads);

  auto nodes_csv = out_path(g, "analyze_nodes.csv");
  {
    std::ofstream out(nodes_csv);
    out << "node,r_local,epsilon,lambda,defined\n";
    for (int u = 0; u < graph.num_nodes(); ++u) {
      auto eps = label_smoothness(graph, u);
      auto lam = feature_smoothness(graph, u);
      out << u << ',' << (profile.r_local[u] ? fmt12(*profile.r_local[u]) : "") << ','
          << (eps ? fmt12(*eps) : "") << ',' << (lam ? fmt12(*lam) : "") << ','
          << (profile.r_local[u] ? 1 : 0) << "\n";
    }
  }
  auto hist_csv = out_path(g, "analyze_histogram.csv");
  {
    std::ofstream out(hist_csv);
    out << "bin_lo,bin_hi,count\n";
    for (int b = 0; b < AssortativityProfile::kBins; ++b) {
      double lo = -1.0 + 2.0 * b / AssortativityProfile::kBins;
      double hi = -1.0 + 2.0 * (b + 1) / AssortativityProfile::kBins;
      out << fmt12(lo) << ',' << fmt12(hi) << ',' << profile.histogram[b] << "\n";
    }
  }
  auto summary_path = out_path(g, "analyze_summary.json");
  {
    long defined = 0, negative = 0;
    for (auto& r : profile.r_local) {
      if (!r) continue;
      ++defined;
      if (*r < 0) ++negative;
    }
    json summary = {{"r_global", profile.r_global},
                    {"num_nodes", graph.num_nodes()},
                    {"num_edges", graph.num_edges()},
                    {"num_classes", graph.num_classes()},
                    {"nodes_with_defined_r_local", defined},
                    {"disassortative_nodes", negative}};
    std::ofstream(summary_path) << summary.dump(2) << "\n";
    std::cout << "r_global = " << fmt12(profile.r_global) << "\n";
  }
  manifest.output(nodes_csv);
  manifest.output(hist_csv);
  manifest.output(summary_path);
  manifest.write(out_path(g, "manifest_analyze.json"));
}

// ---------------------------------------------------------------------------
// transform: build the computation graph (+ optional shift report)

struct TransformArgs {
  std::string input, out = "comp.tsv";
  std::optional<std::string> labels;
  int T = 3;
  std::string mode = "practical";
  int budget = 0;
  double floor = 0;
  bool shift = false;
  double tol = 1e-6;
};

void cmd_transform(const GlobalArgs& g, const TransformArgs& a) {
  Manifest manifest("transform", g);
  manifest.input(a.input);
  if (a.labels) manifest.input(*a.labels);
  manifest.config({{"input", a.input},
                   {"labels", a.labels ? *a.labels : ""},
                   {"T", a.T},
                   {"mode", a.mode},
                   {"budget", a.budget},
                   {"floor", a.floor},
                   {"shift_report", a.shift}});

  auto graph = LabeledGraph::load(a.input, a.labels, {}, &std::cerr);
  BuildOptions opt;
  opt.weight_floor = a.floor;
  opt.threads = g.threads;
  ComputationGraph comp;
  if (a.mode == "naive") {
    comp = build_naive(graph, a.T, opt);
  } else if (a.mode == "practical") {
    comp = build_practical(graph, a.T, a.budget, opt);
  } else {
    throw DataError("unknown --mode '" + a.mode + "' (expected naive|practical)");
  }
  auto comp_path = out_path(g, a.out);
  save_computation_graph(comp, comp_path);
  manifest.output(comp_path);
  std::cout << "computation graph: " << comp.structural_edge_count() << " structural + "
            << comp.proximity.size() << " proximity edges\n";

  if (a.shift) {
    if (!graph.has_labels()) throw DataError("--shift-report requires --labels");
    auto rep = shift_report(graph, comp, a.tol, g.threads);
    auto shift_csv = out_path(g, "shift_nodes.csv");
    {
      std::ofstream out(shift_csv);
      out << "node,r_before,r_after\n";
      for (std::size_t i = 0; i < rep.nodes.size(); ++i)
        out << rep.nodes[i] << ',' << fmt12(rep.r_before[i]) << ',' << fmt12(rep.r_after[i])
            << "\n";
    }
    auto shift_json = out_path(g, "shift_summary.json");
    json summary = {{"nodes", rep.nodes.size()},
                    {"mean_r_before", rep.mean_before},
                    {"mean_r_after", rep.mean_after},
                    {"mean_delta", rep.mean_after - rep.mean_before}};
    std::ofstream(shift_json) << summary.dump(2) << "\n";
    manifest.output(shift_csv);
    manifest.output(shift_json);
    std::cout << "shift: mean r_local " << fmt12(rep.mean_before) << " -> "
              << fmt12(rep.mean_after) << " over " << rep.nodes.size() << " nodes\n";
  }
  manifest.write(out_path(g, "manifest_transform.json"));
}

// ---------------------------------------------------------------------------
// train / ablate

struct ModelArgs {
  std::string comp, labels;
  std::optional<std::string> features;
  std::string variant = "wrgat";     // wrgat | wrgcn
  std::string relations = "all";     // all | proximity | structure
  int hidden = 16, mlp_hidden = 16;
  double lr = 0.01, weight_decay = 5e-4, dropout = 0.5;
  int epochs = 500, patience = 100;
  bool shared_attention = false;
};

RelationFilter filter_of(const std::string& name) {
  if (name == "all") return RelationFilter::All;
  if (name == "proximity") return RelationFilter::ProximityOnly;
  if (name == "structure") return RelationFilter::StructureOnly;
  throw DataError("unknown --relations '" + name + "' (expected all|proximity|structure)");
}

struct LoadedTask {
  ComputationGraph comp;
  std::vector<int> labels;
  int num_classes = 0;
  std::vector<double> features;
  int feature_dim = 0;
};

LoadedTask load_task(const ModelArgs& m, Manifest& manifest) {
  LoadedTask t;
  manifest.input(m.comp);
  manifest.input(m.labels);
  t.comp = load_computation_graph(m.comp);
  std::tie(t.labels, t.num_classes) = labels_for(m.labels, t.comp.num_nodes);
  if (t.num_classes < 2) throw DataError("need at least two classes to train");
  if (m.features) {
    manifest.input(*m.features);
    std::tie(t.features, t.feature_dim) = features_for(*m.features, t.comp.num_nodes);
  } else {
    // attribute-free graphs get one-hot bucketed-degree features
    std::vector<std::pair<int, int>> prox;
    for (auto& e : t.comp.proximity) prox.emplace_back(e.u, e.v);
    LabeledGraph skeleton(t.comp.num_nodes, std::move(prox));
    t.features = degree_bucket_features(skeleton, &t.feature_dim);
  }
  return t;
}

struct CellResult {
  TrainResult history;
  EvalResult test;
};

CellResult run_cell(const LoadedTask& task, const ModelArgs& m, const SplitSet& split,
                    std::uint64_t seed) {
  auto rg = RelationalGraph::from(task.comp, filter_of(m.relations));
  WrgnnConfig cfg;
  cfg.in_dim = task.feature_dim;
  cfg.hidden = m.hidden;
  cfg.mlp_hidden = m.mlp_hidden;
  cfg.num_classes = task.num_classes;
  cfg.num_relations = rg.num_relations();
  cfg.attention = m.variant == "wrgat";
  cfg.shared_attention = m.shared_attention;
  cfg.dropout = m.dropout;
  if (m.variant != "wrgat" && m.variant != "wrgcn")
    throw DataError("unknown --variant '" + m.variant + "' (expected wrgat|wrgcn)");

  TrainConfig tc;
  tc.lr = m.lr;
  tc.weight_decay = m.weight_decay;
  tc.max_epochs = m.epochs;
  tc.patience = m.patience;
  tc.seed = seed;

  WrgnnModel model(cfg);
  CellResult res;
  res.history = train(model, rg, task.features, task.labels, split, tc);
  res.test = evaluate(model, rg, task.features, task.labels, split.test);
  return res;
}

json history_json(const TrainResult& r) {
  json hist = json::array();
  for (auto& e : r.history)
    hist.push_back({{"epoch", e.epoch},
                    {"train_loss", e.train_loss},
                    {"train_acc", e.train_acc},
                    {"val_loss", e.val_loss},
                    {"val_acc", e.val_acc}});
  return hist;
}

void cmd_train(const GlobalArgs& g, const ModelArgs& m, const std::string& splits_path) {
  Manifest manifest("train", g);
  auto task = load_task(m, manifest);
  manifest.input(splits_path);
  manifest.config({{"comp", m.comp},
                   {"labels", m.labels},
                   {"features", m.features ? *m.features : "(degree buckets)"},
                   {"splits", splits_path},
                   {"variant", m.variant},
                   {"relations", m.relations},
                   {"hidden", m.hidden},
                   {"mlp_hidden", m.mlp_hidden},
                   {"lr", m.lr},
                   {"weight_decay", m.weight_decay},
                   {"dropout", m.dropout},
                   {"epochs", m.epochs},
                   {"patience", m.patience}});

  auto split = load_splits_json(splits_path);
  validate_split(split, task.labels);
  auto cell = run_cell(task, m, split, child_seed(g.seed, "train"));

  auto correctness_csv = out_path(g, "train_correctness.csv");
  {
    std::ofstream out(correctness_csv);
    out << "node,label,predicted,correct\n";
    for (std::size_t i = 0; i < split.test.size(); ++i) {
      int u = split.test[i];
      out << u << ',' << task.labels[u] << ',' << cell.test.predicted[u] << ','
          << int(cell.test.correct[i]) << "\n";
    }
  }
  auto report_path = out_path(g, "train_report.json");
  json report = {{"variant", m.variant},
                 {"relations", m.relations},
                 {"test_accuracy", cell.test.accuracy},
                 {"test_f1_micro", cell.test.f1_micro},
                 {"best_epoch", cell.history.best_epoch},
                 {"best_val_acc", cell.history.best_val_acc},
                 {"epochs_run", cell.history.history.size()},
                 {"history", history_json(cell.history)},
                 {"correctness_csv", correctness_csv}};
  std::ofstream(report_path) << report.dump(2) << "\n";
  manifest.output(correctness_csv);
  manifest.output(report_path);
  manifest.write(out_path(g, "manifest_train.json"));
  std::cout << "test accuracy " << fmt12(cell.test.accuracy) << ", F1-micro "
            << fmt12(cell.test.f1_micro) << "\n";
}

struct AblateArgs {
  int num_splits = 10;
  double train_frac = 0.6, val_frac = 0.2;
  int r_local_bins = 8;
  double tol = 1e-6;
};

void cmd_ablate(const GlobalArgs& g, const ModelArgs& m, const AblateArgs& a) {
  Manifest manifest("ablate", g);
  auto task = load_task(m, manifest);
  manifest.config({{"comp", m.comp},
                   {"labels", m.labels},
                   {"features", m.features ? *m.features : "(degree buckets)"},
                   {"num_splits", a.num_splits},
                   {"train_frac", a.train_frac},
                   {"val_frac", a.val_frac},
                   {"hidden", m.hidden},
                   {"mlp_hidden", m.mlp_hidden},
                   {"lr", m.lr},
                   {"weight_decay", m.weight_decay},
                   {"dropout", m.dropout},
                   {"epochs", m.epochs},
                   {"patience", m.patience}});

  std::vector<SplitSet> splits;
  for (int i = 0; i < a.num_splits; ++i) {
    RngStream rng(g.seed, "splits/" + std::to_string(i));
    splits.push_back(stratified_split(task.labels, a.train_frac, a.val_frac, rng));
  }

  // r_local on the original graph (= the proximity relation of C)
  std::vector<std::pair<int, int>> prox;
  for (auto& e : task.comp.proximity) prox.emplace_back(e.u, e.v);
  LabeledGraph original(task.comp.num_nodes, std::move(prox), task.labels);
  auto profile = assortativity_profile(original, a.tol, g.threads);

  const std::vector<std::string> variants = {"wrgcn", "wrgat"};
  const std::vector<std::string> relation_modes = {"proximity", "structure", "all"};

  json cells = json::array();
  std::map<std::pair<std::string, std::string>, double> means;
  auto curves_csv = out_path(g, "ablate_assortativity_curves.csv");
  std::ofstream curves(curves_csv);
  curves << "variant,relations,bin_lo,bin_hi,n,accuracy\n";

  for (auto& variant : variants) {
    for (auto& rel_mode : relation_modes) {
      ModelArgs cell_args = m;
      cell_args.variant = variant;
      cell_args.relations = rel_mode;
      json accs = json::array();
      std::vector<long> bin_total(a.r_local_bins, 0), bin_hit(a.r_local_bins, 0);
      double mean = 0;
      int ok = 0;
      std::string error;
      for (int i = 0; i < a.num_splits; ++i) {
        try {
          auto cell = run_cell(task, cell_args, splits[i],
                               child_seed(g.seed, "ablate/" + variant + "/" + rel_mode + "/" +
                                                      std::to_string(i)));
          accs.push_back(cell.test.accuracy);
          mean += cell.test.accuracy;
          ++ok;
          for (std::size_t t = 0; t < splits[i].test.size(); ++t) {
            int u = splits[i].test[t];
            if (!profile.r_local[u]) continue;
            int b = std::clamp(
                static_cast<int>((*profile.r_local[u] + 1.0) / 2.0 * a.r_local_bins), 0,
                a.r_local_bins - 1);
            ++bin_total[b];
            bin_hit[b] += cell.test.correct[t];
          }
        } catch (const std::exception& e) {
          error = e.what();  // keep partial grid results
        }
      }
      if (ok > 0) mean /= ok;
      double var = 0;
      for (auto& acc : accs) var += (acc.get<double>() - mean) * (acc.get<double>() - mean);
      double stdev = ok > 1 ? std::sqrt(var / (ok - 1)) : 0.0;
      means[{variant, rel_mode}] = mean;
      json cell = {{"variant", variant},     {"relations", rel_mode}, {"accuracies", accs},
                   {"mean_accuracy", mean},  {"std_accuracy", stdev}, {"completed", ok}};
      if (!error.empty()) cell["error"] = error;
      cells.push_back(cell);
      for (int b = 0; b < a.r_local_bins; ++b) {
        if (bin_total[b] == 0) continue;
        double lo = -1.0 + 2.0 * b / a.r_local_bins;
        double hi = -1.0 + 2.0 * (b + 1) / a.r_local_bins;
        curves << variant << ',' << rel_mode << ',' << fmt12(lo) << ',' << fmt12(hi) << ','
               << bin_total[b] << ',' << fmt12(double(bin_hit[b]) / bin_total[b]) << "\n";
      }
    }
  }
  curves.close();

  double baseline = means[{"wrgcn", "proximity"}];
  for (auto& cell : cells)
    cell["gain_over_proximity_baseline"] = cell["mean_accuracy"].get<double>() - baseline;

  auto report_path = out_path(g, "ablate_report.json");
  json report = {{"baseline_wrgcn_proximity", baseline},
                 {"num_splits", a.num_splits},
                 {"cells", cells},
                 {"curves_csv", curves_csv}};
  std::ofstream(report_path) << report.dump(2) << "\n";
  manifest.output(report_path);
  manifest.output(curves_csv);
  manifest.write(out_path(g, "manifest_ablate.json"));
  for (auto& cell : cells)
    std::cout << cell["variant"].get<std::string>() << "/"
              << cell["relations"].get<std::string>() << ": mean accuracy "
              << fmt12(cell["mean_accuracy"].get<double>()) << " (gain "
              << fmt12(cell["gain_over_proximity_baseline"].get<double>()) << ")\n";
}

// ---------------------------------------------------------------------------
// make-splits / gen-synthetic

void cmd_make_splits(const GlobalArgs& g, const std::string& labels_path, double train_frac,
                     double val_frac, int count, const std::string& out_prefix) {
  Manifest manifest("make-splits", g);
  manifest.input(labels_path);
  manifest.config({{"labels", labels_path},
                   {"train_frac", train_frac},
                   {"val_frac", val_frac},
                   {"count", count},
                   {"out_prefix", out_prefix}});
  auto rows = LabeledGraph::load_label_rows(labels_path);
  int n = 0;
  for (auto& [u, y] : rows) n = std::max(n, u + 1);
  std::vector<int> labels(n, -1);
  for (auto& [u, y] : rows) labels[u] = y;
  for (int i = 0; i < count; ++i) {
    RngStream rng(g.seed, "splits/" + std::to_string(i));
    auto split = stratified_split(labels, train_frac, val_frac, rng);
    auto path = out_path(g, out_prefix + "_" + std::to_string(i) + ".json");
    save_splits_json(split, path);
    manifest.output(path);
  }
  manifest.write(out_path(g, "manifest_make_splits.json"));
}

void cmd_gen_synthetic(const GlobalArgs& g, const std::string& spec_path,
                       const std::string& out_prefix) {
  Manifest manifest("gen-synthetic", g);
  manifest.input(spec_path);
  std::ifstream in(spec_path);
  if (!in) throw DataError("cannot open " + spec_path);
  json spec;
  try {
    in >> spec;
  } catch (const json::exception& e) {
    throw DataError(spec_path + ": " + e.what());
  }
  if (!spec.contains("seed")) spec["seed"] = g.seed;
  manifest.config(spec);
  auto graph = gen_synthetic(spec);

  auto edges_path = out_path(g, out_prefix + ".edges.txt");
  graph.save_edge_list(edges_path);
  manifest.output(edges_path);
  if (graph.has_labels()) {
    auto labels_path = out_path(g, out_prefix + ".labels.txt");
    graph.save_labels(labels_path);
    manifest.output(labels_path);
  }
  if (graph.has_features()) {
    auto features_path = out_path(g, out_prefix + ".features.txt");
    graph.save_features(features_path);
    manifest.output(features_path);
  }
  manifest.write(out_path(g, "manifest_gen_synthetic.json"));
  std::cout << "generated " << graph.num_nodes() << " nodes, " << graph.num_edges()
            << " edges\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixing-pattern analysis and relation-aware GNN training"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--seed", g.seed, "root seed for all randomness");
  app.add_option("--out-dir", g.out_dir, "directory for artifacts");
  app.add_option("--threads", g.threads, "worker threads for parallel stages");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "per-node assortativity and smoothness");
  analyze->add_option("--input", an.input, "edge list")->required();
  analyze->add_option("--labels", an.labels, "label file")->required();
  std::string an_features;
  analyze->add_option("--features", an_features, "feature file");
  analyze->add_option("--tol", an.tol, "TotalRank truncation tolerance");

  TransformArgs tr;
  auto* transform = app.add_subcommand("transform", "build the computation graph");
  transform->add_option("--input", tr.input, "edge list")->required();
  std::string tr_labels;
  transform->add_option("--labels", tr_labels, "label file (needed for --shift-report)");
  transform->add_option("--T", tr.T, "highest structural relation (relations 0..T)");
  transform->add_option("--mode", tr.mode, "naive|practical");
  transform->add_option("--budget", tr.budget, "candidates per side (0 = ceil(log2 n))");
  transform->add_option("--floor", tr.floor, "drop structural edges with weight below this");
  transform->add_option("--out", tr.out, "output TSV name");
  transform->add_flag("--shift-report", tr.shift, "recompute r_local on C for r_local<0 nodes");
  transform->add_option("--tol", tr.tol, "TotalRank truncation tolerance");

  ModelArgs mo;
  std::string mo_features, mo_splits;
  auto add_model_options = [&](CLI::App* cmd, bool with_variant) {
    cmd->add_option("--comp", mo.comp, "computation graph TSV")->required();
    cmd->add_option("--labels", mo.labels, "label file")->required();
    cmd->add_option("--features", mo_features, "feature file (omit for degree buckets)");
    if (with_variant) {
      cmd->add_option("--variant", mo.variant, "wrgat|wrgcn");
      cmd->add_option("--relations", mo.relations, "all|proximity|structure");
    }
    cmd->add_option("--hidden", mo.hidden, "hidden width");
    cmd->add_option("--mlp-hidden", mo.mlp_hidden, "classifier hidden width");
    cmd->add_option("--lr", mo.lr, "Adam learning rate");
    cmd->add_option("--weight-decay", mo.weight_decay, "L2 penalty");
    cmd->add_option("--dropout", mo.dropout, "hidden-state dropout rate");
    cmd->add_option("--epochs", mo.epochs, "max epochs");
    cmd->add_option("--patience", mo.patience, "early-stopping patience");
    cmd->add_flag("--shared-attention", mo.shared_attention,
                  "one attention vector per layer instead of per relation");
  };

  auto* train_cmd = app.add_subcommand("train", "train one configuration");
  add_model_options(train_cmd, true);
  train_cmd->add_option("--splits", mo_splits, "split JSON")->required();

  AblateArgs ab;
  auto* ablate = app.add_subcommand("ablate", "run the {wrgcn,wrgat} x {relations} grid");
  add_model_options(ablate, false);
  ablate->add_option("--num-splits", ab.num_splits, "random splits per cell");
  ablate->add_option("--train-frac", ab.train_frac, "train fraction");
  ablate->add_option("--val-frac", ab.val_frac, "val fraction");
  ablate->add_option("--r-local-bins", ab.r_local_bins, "bins for accuracy-vs-r_local curves");

  std::string ms_labels, ms_prefix = "split";
  double ms_train = 0.6, ms_val = 0.2;
  int ms_count = 10;
  auto* make_splits = app.add_subcommand("make-splits", "random stratified splits");
  make_splits->add_option("--labels", ms_labels, "label file")->required();
  make_splits->add_option("--train-frac", ms_train, "train fraction");
  make_splits->add_option("--val-frac", ms_val, "val fraction");
  make_splits->add_option("--count", ms_count, "number of splits");
  make_splits->add_option("--out-prefix", ms_prefix, "output name prefix");

  std::string gs_spec, gs_prefix = "synthetic";
  auto* gen = app.add_subcommand("gen-synthetic", "generate a synthetic benchmark");
  gen->add_option("--spec", gs_spec, "generator spec JSON")->required();
  gen->add_option("--out-prefix", gs_prefix, "output name prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*analyze) {
      if (!an_features.empty()) an.features = an_features;
      cmd_analyze(g, an);
    } else if (*transform) {
      if (!tr_labels.empty()) tr.labels = tr_labels;
      cmd_transform(g, tr);
    } else if (*train_cmd) {
      if (!mo_features.empty()) mo.features = mo_features;
      cmd_train(g, mo, mo_splits);
    } else if (*ablate) {
      if (!mo_features.empty()) mo.features = mo_features;
      cmd_ablate(g, mo, ab);
    } else if (*make_splits) {
      cmd_make_splits(g, ms_labels, ms_train, ms_val, ms_count, ms_prefix);
    } else if (*gen) {
      cmd_gen_synthetic(g, gs_spec, gs_prefix);
    }
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
