// Command-line front end: dataset generation and splitting, label
// synthesis, training, inference, evaluation and TOS scoring.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "icd/errors.hpp"
#include "icd/harness.hpp"
#include "icd/model.hpp"
#include "icd/synthgen.hpp"
#include "icd/text.hpp"

namespace fs = std::filesystem;
using namespace icd;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct GenerateArgs {
  std::string model = "gn";
  int count = 10;
  std::string outdir;
  std::uint64_t seed = 0;
  GnSpec gn;
  LfrSpec lfr;
};

void run_generate(const GenerateArgs& a) {
  std::vector<LabeledGraph> graphs;
  graphs.reserve(static_cast<std::size_t>(a.count));
  for (int i = 0; i < a.count; ++i) {
    if (a.model == "gn") {
      GnSpec spec = a.gn;
      spec.seed = a.seed + static_cast<std::uint64_t>(i);
      graphs.push_back(generate_gn(spec));
    } else {
      LfrSpec spec = a.lfr;
      spec.seed = a.seed + static_cast<std::uint64_t>(i);
      graphs.push_back(generate_lfr(spec));
    }
  }
  const DatasetSplit split = write_dataset(a.outdir, graphs);
  std::cout << "wrote " << graphs.size() << " graphs to " << a.outdir << " (train "
            << split.train().size() << ", val " << split.validation().size() << ", test "
            << split.test().size() << ")\n";
}

void run_split(const std::string& dir) {
  const DatasetSplit split = index_dataset(dir);
  std::cout << "manifest " << (fs::path(dir) / "manifest.txt").string() << ": train "
            << split.train().size() << ", val " << split.validation().size() << ", test "
            << split.test().size() << '\n';
}

void run_label(const std::string& manifest, const std::string& method, int k_override,
               std::uint64_t seed) {
  const DatasetSplit split = read_manifest(fs::path(manifest));
  // Only the training and validation graphs get synthesized labels.
  const std::size_t end = split.validation().end;
  for (std::size_t i = 0; i < end; ++i) {
    const Graph g = read_edge_list(split.graph_path(i));
    const int k = k_override > 0 ? k_override : split.entries()[i].communities;
    if (k <= 0) throw InputError("no community count for " + split.graph_path(i).string());
    const Partition p = method == "spectral" ? baseline_spectral(g, k, seed)
                                             : baseline_greedy_modularity(g, k);
    write_labels(split.pseudo_labels_path(i), p);
  }
  std::cout << "labelled " << end << " graphs with " << method << '\n';
}

struct TrainArgs {
  std::string manifest;
  std::string config_file;
  std::string outdir;
  std::string labels = "truth";
  std::vector<std::pair<std::string, std::string>> overrides;
};

void run_train(const TrainArgs& a) {
  TrainConfig cfg;
  if (!a.config_file.empty()) cfg = parse_config(slurp(a.config_file));
  for (const auto& [key, value] : a.overrides) apply_config_entry(cfg, key, value);
  cfg.validate();

  const DatasetSplit split = read_manifest(fs::path(a.manifest));
  const LabelSource source = a.labels == "pseudo" ? LabelSource::Pseudo : LabelSource::Truth;
  const auto training = load_examples(split, split.train(), source);
  const auto validation = load_examples(split, split.validation(), source);

  fs::create_directories(a.outdir);
  std::ofstream history(fs::path(a.outdir) / "history.csv");
  history << "epoch,validation,loss_d,loss_g,improved\n";
  const auto on_epoch = [&](const EpochReport& r, const IcdModel&) {
    history << r.epoch << ',' << format_significant(r.validation_score) << ',';
    if (r.epoch > 0) {
      history << format_significant(r.mean_losses.d) << ',' << format_significant(r.mean_losses.g);
    } else {
      history << ',';
    }
    history << ',' << (r.improved ? 1 : 0) << '\n';
    std::cout << "epoch " << r.epoch << "  validation " << format_significant(r.validation_score);
    if (r.epoch > 0) {
      std::cout << "  L_D " << format_significant(r.mean_losses.d) << "  L_G "
                << format_significant(r.mean_losses.g);
    }
    std::cout << (r.improved ? "  *" : "") << std::endl;
  };
  const TrainResult result = train(training, validation, cfg, on_epoch);
  const fs::path ckpt = fs::path(a.outdir) / "model.ckpt";
  save_checkpoint(ckpt, result.checkpoint);
  std::ofstream(fs::path(a.outdir) / "config.txt") << format_config(cfg);
  std::cout << "best epoch " << result.checkpoint.best_epoch << " (validation "
            << format_significant(result.checkpoint.best_score) << "), saved " << ckpt.string()
            << '\n';
}

void run_infer(const std::string& checkpoint, const std::string& graph, int k,
               const std::string& out, std::uint64_t seed) {
  const Checkpoint ckpt = load_checkpoint(fs::path(checkpoint));
  const Graph g = read_edge_list(fs::path(graph));
  const InferenceResult r = infer(ckpt, g, k, seed);
  if (out.empty()) {
    write_labels(std::cout, r.partition);
  } else {
    write_labels(fs::path(out), r.partition);
  }
  std::cerr << "feat " << format_significant(r.timing.features_s) << " s, prop "
            << format_significant(r.timing.propagation_s) << " s, clus "
            << format_significant(r.timing.clustering_s) << " s\n";
}

struct EvalArgs {
  std::string manifest;
  std::vector<std::string> methods{"icd", "spectral"};
  std::string checkpoint;
  std::string out = "eval";
  int workers = 1;
  int k = 0;
  std::uint64_t seed = 0;
};

void run_eval_command(const EvalArgs& a) {
  const DatasetSplit split = read_manifest(fs::path(a.manifest));
  std::vector<Method> methods;
  for (const auto& name : a.methods) {
    if (name == "icd") {
      if (a.checkpoint.empty()) throw InputError("method 'icd' needs --checkpoint");
      auto ckpt = std::make_shared<const Checkpoint>(load_checkpoint(fs::path(a.checkpoint)));
      methods.push_back(icd_method(ckpt, to_string(ckpt->model.config().variant), a.seed));
    } else if (name == "spectral") {
      methods.push_back(spectral_method(a.seed));
    } else if (name == "greedy") {
      methods.push_back(greedy_method());
    } else {
      throw InputError("unknown method '" + name + "'");
    }
  }
  EvalOptions options;
  options.workers = a.workers;
  options.communities = a.k;
  const EvalReport report = run_eval(split, methods, options);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  write_eval(a.out, report);
  write_summary_csv(std::cout, report);
}

void run_tos(const std::string& in_path, const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) throw InputError("cannot open " + in_path);
  const auto rows = read_summary_csv(in);
  if (rows.size() < 2) {
    std::cerr << "warning: TOS needs at least 2 methods; every score will be 0\n";
  }
  const auto table = tos_table(rows);
  if (out_path.empty() || out_path == "-") {
    write_tos_csv(std::cout, table);
  } else {
    std::ofstream out(out_path);
    if (!out) throw InputError("cannot write " + out_path);
    write_tos_csv(out, table);
  }
}

int run_gradcheck(std::uint64_t seed, double tolerance) {
  bool ok = true;
  for (const auto& row : gradient_self_test(seed)) {
    const bool pass = row.max_relative_error < tolerance;
    ok = ok && pass;
    std::cout << (pass ? "PASS " : "FAIL ") << to_string(row.variant) << "  " << row.target
              << "  max rel err " << format_significant(row.max_relative_error, 3) << " over "
              << row.coordinates << " coordinates\n";
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inductive community detection: data, training, inference and evaluation"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a labelled benchmark collection");
  generate->add_option("model", gen.model, "gn or lfr")
      ->required()
      ->check(CLI::IsMember({"gn", "lfr"}));
  generate->add_option("--count", gen.count, "Number of graphs")->capture_default_str();
  generate->add_option("--outdir", gen.outdir, "Output directory")->required();
  generate->add_option("--seed", gen.seed, "Seed of the first graph; graph i uses seed + i")
      ->capture_default_str();
  generate->add_option("--n", gen.gn.n, "Nodes (gn) / minimum nodes (lfr)");
  generate->add_option("--k", gen.gn.k, "gn: number of blocks")->capture_default_str();
  generate->add_option("--p-in", gen.gn.p_in, "gn: within-block probability")
      ->capture_default_str();
  generate->add_option("--n-max", gen.lfr.n_max, "lfr: maximum nodes");
  generate->add_option("--avg-degree", gen.lfr.avg_degree, "lfr")->capture_default_str();
  generate->add_option("--max-degree", gen.lfr.max_degree, "lfr")->capture_default_str();
  generate->add_option("--min-community", gen.lfr.min_community, "lfr")->capture_default_str();
  generate->add_option("--max-community", gen.lfr.max_community, "lfr")->capture_default_str();
  generate->add_option("--mu", gen.lfr.mu, "lfr: mixing parameter")->capture_default_str();
  generate->add_option("--tau1", gen.lfr.tau1, "lfr: degree exponent")->capture_default_str();
  generate->add_option("--tau2", gen.lfr.tau2, "lfr: community-size exponent")
      ->capture_default_str();

  std::string split_dir;
  auto* split = app.add_subcommand("split", "Write an 80/10/10 manifest over a directory");
  split->add_option("dir", split_dir, "Directory of .edges files")->required();

  std::string label_manifest, label_method = "spectral";
  int label_k = 0;
  std::uint64_t label_seed = 0;
  auto* label = app.add_subcommand(
      "label", "Synthesize training labels for the train and validation graphs with a baseline");
  label->add_option("manifest", label_manifest)->required();
  label->add_option("--method", label_method)
      ->check(CLI::IsMember({"spectral", "greedy"}))
      ->capture_default_str();
  label->add_option("--k", label_k, "Community count (default: manifest)");
  label->add_option("--seed", label_seed)->capture_default_str();

  TrainArgs tr;
  std::string variant, validation_metric, gen_widths, disc_widths;
  double alpha = NAN, beta = NAN, lr_g = NAN, lr_d = NAN;
  int p = 0, m = 0, epochs = 0, restarts = 0;
  std::uint64_t train_seed = 0;
  bool constant = false;
  auto* train_cmd = app.add_subcommand("train", "Train a model on the train/validation split");
  train_cmd->add_option("manifest", tr.manifest)->required();
  train_cmd->add_option("--config", tr.config_file, "Key/value config file");
  train_cmd->add_option("--outdir", tr.outdir, "Checkpoint directory")->required();
  train_cmd->add_option("--labels", tr.labels, "truth or pseudo")
      ->check(CLI::IsMember({"truth", "pseudo"}))
      ->capture_default_str();
  auto* o_variant = train_cmd->add_option("--variant", variant, "icd-m or icd-c");
  auto* o_alpha = train_cmd->add_option("--alpha", alpha);
  auto* o_beta = train_cmd->add_option("--beta", beta);
  auto* o_p = train_cmd->add_option("--p", p, "Graphs sampled per epoch");
  auto* o_m = train_cmd->add_option("--m", m, "Updates per sampled graph");
  auto* o_n = train_cmd->add_option("--epochs", epochs);
  auto* o_lrg = train_cmd->add_option("--lr-g", lr_g);
  auto* o_lrd = train_cmd->add_option("--lr-d", lr_d);
  auto* o_gw = train_cmd->add_option("--generator-widths", gen_widths, "e.g. 64,32,16");
  auto* o_dw = train_cmd->add_option("--discriminator-widths", disc_widths, "e.g. 16,8,1");
  auto* o_val = train_cmd->add_option("--validation", validation_metric, "nmi or modularity");
  auto* o_rs = train_cmd->add_option("--kmeans-restarts", restarts);
  auto* o_const = train_cmd->add_flag("--constant-features", constant);
  auto* o_seed = train_cmd->add_option("--seed", train_seed);

  std::string infer_ckpt, infer_graph, infer_out;
  int infer_k = 0;
  std::uint64_t infer_seed = 0;
  auto* infer_cmd = app.add_subcommand("infer", "Detect communities in one graph");
  infer_cmd->add_option("--checkpoint", infer_ckpt)->required();
  infer_cmd->add_option("--graph", infer_graph)->required();
  infer_cmd->add_option("--k", infer_k, "Number of communities")->required();
  infer_cmd->add_option("--out", infer_out, "Label file (default: stdout)");
  infer_cmd->add_option("--seed", infer_seed)->capture_default_str();

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Evaluate methods on the test graphs");
  eval->add_option("manifest", ev.manifest)->required();
  eval->add_option("--methods", ev.methods, "icd, spectral, greedy")->delimiter(',');
  eval->add_option("--checkpoint", ev.checkpoint);
  eval->add_option("--out", ev.out, "Output directory")->capture_default_str();
  eval->add_option("--workers", ev.workers)->capture_default_str();
  eval->add_option("--k", ev.k, "Community count (default: manifest)");
  eval->add_option("--seed", ev.seed)->capture_default_str();

  std::string tos_in, tos_out;
  auto* tos_cmd = app.add_subcommand("tos", "Trade-off scores from a summary CSV");
  tos_cmd->add_option("records", tos_in, "summary.csv from eval")->required();
  tos_cmd->add_option("out", tos_out, "Output CSV (default: stdout)");

  std::uint64_t gc_seed = 0;
  double gc_tol = 1e-4;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient self-test");
  gradcheck->add_option("--seed", gc_seed)->capture_default_str();
  gradcheck->add_option("--tolerance", gc_tol)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      if (generate->count("--n") > 0) gen.lfr.n = gen.gn.n;
      run_generate(gen);
    } else if (*split) {
      run_split(split_dir);
    } else if (*label) {
      run_label(label_manifest, label_method, label_k, label_seed);
    } else if (*train_cmd) {
      auto set = [&](CLI::Option* opt, const char* key, const std::string& value) {
        if (opt->count() > 0) tr.overrides.emplace_back(key, value);
      };
      set(o_variant, "variant", variant);
      set(o_alpha, "alpha", format_double(alpha));
      set(o_beta, "beta", format_double(beta));
      set(o_p, "p", std::to_string(p));
      set(o_m, "m", std::to_string(m));
      set(o_n, "n", std::to_string(epochs));
      set(o_lrg, "lr_g", format_double(lr_g));
      set(o_lrd, "lr_d", format_double(lr_d));
      set(o_gw, "generator_widths", gen_widths);
      set(o_dw, "discriminator_widths", disc_widths);
      set(o_val, "validation", validation_metric);
      set(o_rs, "kmeans_restarts", std::to_string(restarts));
      set(o_const, "constant_features", constant ? "true" : "false");
      set(o_seed, "seed", std::to_string(train_seed));
      run_train(tr);
    } else if (*infer_cmd) {
      run_infer(infer_ckpt, infer_graph, infer_k, infer_out, infer_seed);
    } else if (*eval) {
      run_eval_command(ev);
    } else if (*tos_cmd) {
      run_tos(tos_in, tos_out);
    } else if (*gradcheck) {
      return run_gradcheck(gc_seed, gc_tol);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
