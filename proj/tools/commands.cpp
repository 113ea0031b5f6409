#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dnp/archive.hpp"
#include "dnp/checkpoint.hpp"
#include "dnp/checks.hpp"
#include "dnp/crossval.hpp"
#include "dnp/synthetic.hpp"
#include "dnp/train.hpp"

namespace dnpgcn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ModelFlags {
  std::string descriptor;  // empty: keep the archive's descriptor
  int width = 128;
  int depth = 2;
  bool no_edge_in_node_update = false;
  bool no_edge_update = false;
  bool no_edge_in_readout = false;
  std::string norm = "batch";
  int epochs = 100;
  int batch_size = 32;
  double lr = 1e-3;
  std::uint64_t seed = 0;

  void add_to(CLI::App& app) {
    app.add_option("--descriptor", descriptor, "Edge descriptor: dnp, distance, distance-theta or ppf");
    app.add_option("--width", width, "Filters per layer")->capture_default_str();
    app.add_option("--depth", depth, "Message-passing layers")->capture_default_str();
    app.add_flag("--no-edge-in-node-update", no_edge_in_node_update, "Drop edge features from node updates");
    app.add_flag("--no-edge-update", no_edge_update, "Keep edge features fixed across layers");
    app.add_flag("--no-edge-in-readout", no_edge_in_readout, "Drop edge sums from the readout");
    app.add_option("--norm", norm, "Normalization: batch or none")->capture_default_str();
    app.add_option("--epochs", epochs, "Training epochs")->capture_default_str();
    app.add_option("--batch-size", batch_size, "Graphs per update")->capture_default_str();
    app.add_option("--lr", lr, "Initial learning rate, halved every 50 epochs")->capture_default_str();
    app.add_option("--seed", seed, "Seed for initialization, shuffling and splits")->capture_default_str();
  }

  TrainOptions train_options() const {
    TrainOptions o{epochs, batch_size, lr, seed};
    o.validate();
    return o;
  }

  AblationSpec spec(std::string id, DescriptorKind kind) const {
    return {std::move(id), kind, !no_edge_in_node_update, !no_edge_update, !no_edge_in_readout, width, depth,
            parse_norm_mode(norm)};
  }
};

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

json scores_json(const Scores& s) { return {{"auc", s.auc}, {"f1", s.f1}, {"accuracy", s.accuracy}}; }

json evaluation_json(const Evaluation& ev) {
  json j = scores_json(ev.scores);
  j["loss"] = ev.loss;
  j["graphs"] = ev.labels.size();
  return j;
}

json summary_json(const Summary& s) { return {{"mean", s.mean}, {"std", s.std}}; }

json report_json(const MetricReport& r) {
  json folds = json::array();
  for (std::size_t f = 0; f < r.folds.size(); ++f)
    folds.push_back({{"fold", f}, {"final", scores_json(r.final[f])}, {"selected", scores_json(r.selected[f])}});
  return {{"spec_id", r.spec_id},
          {"selected_epoch", r.selected_epoch},
          {"final", {{"auc", summary_json(r.auc_final)}, {"f1", summary_json(r.f1_final)}, {"accuracy", summary_json(r.accuracy_final)}}},
          {"selected",
           {{"auc", summary_json(r.auc_selected)}, {"f1", summary_json(r.f1_selected)}, {"accuracy", summary_json(r.accuracy_selected)}}},
          {"folds", std::move(folds)}};
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

Dataset load_archive(const std::string& path, const std::string& descriptor) {
  auto graphs = read_archive(read_text_file(path));
  if (graphs.empty()) throw ParseError(path + ": archive holds no graphs");
  Dataset ds = make_dataset(std::move(graphs));
  if (!descriptor.empty()) {
    const auto kind = parse_descriptor_kind(descriptor);
    if (ds.graphs.front().descriptor != kind) ds = refeaturize(ds, kind);
  }
  return ds;
}

// --- featurize -------------------------------------------------------------

int featurize(const std::string& manifest, const std::string& descriptor, const std::string& out_path,
              std::ostream& out, std::ostream& err) {
  const auto kind = parse_descriptor_kind(descriptor);
  const auto entries = parse_manifest(read_text_file(manifest), fs::path(manifest).parent_path());
  std::vector<MolGraph> graphs;
  int code = kOk;
  for (const auto& entry : entries) {
    if (!fs::exists(entry.path)) {
      err << "error: manifest references missing file " << entry.path.string() << "\n";
      code = std::max<int>(code, kUsage);
      continue;
    }
    try {
      graphs.push_back(load_structure(entry, kind));
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      code = std::max<int>(code, kIo);
    }
  }
  if (code != kOk) return code;
  write_text_file_atomic(out_path, write_archive(graphs));
  out << "wrote " << graphs.size() << " graphs to " << out_path << "\n";
  return kOk;
}

// --- train -------------------------------------------------------------------

int train_single(const Dataset& ds, const ModelFlags& flags, const fs::path& out_dir, bool as_json, std::ostream& out) {
  const AblationSpec spec = flags.spec("train", ds.graphs.front().descriptor);
  const ModelConfig cfg = spec.model_config(ds);
  const TrainOptions opts = flags.train_options();
  ensure_dir(out_dir);

  std::ostringstream csv;
  csv << "epoch,lr,train_loss,loss,auc,f1,accuracy\n";
  Evaluation last;
  const auto result = train(ds, cfg, opts, [&](const EpochRecord& rec, const ModelParams& p) {
    last = evaluate(p, cfg, ds.graphs, ds.class_weights);
    csv << rec.epoch << ',' << number(rec.lr) << ',' << number(rec.train_loss) << ',' << number(last.loss) << ','
        << number(last.scores.auc) << ',' << number(last.scores.f1) << ',' << number(last.scores.accuracy) << '\n';
  });

  json run = {{"command", "train"},
              {"descriptor", std::string(to_string(ds.graphs.front().descriptor))},
              {"model", config_to_json(cfg)},
              {"epochs", opts.epochs},
              {"batch_size", opts.batch_size},
              {"lr", opts.lr},
              {"seed", opts.seed},
              {"graphs", ds.graphs.size()}};
  const json report = evaluation_json(last);
  write_text_file_atomic(out_dir / "run_config.json", run.dump(2) + "\n");
  write_text_file_atomic(out_dir / "checkpoint.json", save_checkpoint(result.params, cfg));
  write_text_file_atomic(out_dir / "metrics.csv", csv.str());
  write_text_file_atomic(out_dir / "report.json", report.dump(2) + "\n");
  if (as_json) out << report.dump() << "\n";
  else
    out << "final epoch: loss " << number(last.loss) << ", auc " << number(last.scores.auc) << ", f1 "
        << number(last.scores.f1) << ", accuracy " << number(last.scores.accuracy) << "\n"
        << "wrote " << (out_dir / "checkpoint.json").string() << "\n";
  return kOk;
}

int write_cv(const Dataset& ds, const std::vector<AblationSpec>& specs, const ModelFlags& flags, int folds,
             const fs::path& out_dir, bool as_json, std::ostream& out) {
  const TrainOptions opts = flags.train_options();
  const auto reports = run_ablation(ds, specs, opts, folds);
  ensure_dir(out_dir);
  json all = json::array();
  for (const auto& r : reports) all.push_back(report_json(r));
  json run = {{"command", "cross-validate"}, {"folds", folds},        {"epochs", opts.epochs},
              {"batch_size", opts.batch_size}, {"lr", opts.lr},       {"seed", opts.seed},
              {"graphs", ds.graphs.size()},    {"specs", json::array()}};
  for (const auto& s : specs)
    run["specs"].push_back({{"id", s.id},
                            {"descriptor", std::string(to_string(s.descriptor))},
                            {"node_update", s.edge_in_node_update},
                            {"edge_update", s.edge_update},
                            {"readout", s.edge_in_readout},
                            {"width", s.width},
                            {"depth", s.depth},
                            {"norm", std::string(to_string(s.norm))}});
  write_text_file_atomic(out_dir / "run_config.json", run.dump(2) + "\n");
  write_text_file_atomic(out_dir / "results.csv", ablation_csv(specs, reports));
  write_text_file_atomic(out_dir / "results_selected_epoch.csv", ablation_csv(specs, reports, true));
  write_text_file_atomic(out_dir / "report.json", all.dump(2) + "\n");
  if (as_json) {
    out << all.dump() << "\n";
  } else {
    for (const auto& r : reports)
      out << r.spec_id << ": final-epoch auc " << number(r.auc_final.mean) << " +/- " << number(r.auc_final.std)
          << ", f1 " << number(r.f1_final.mean) << ", accuracy " << number(r.accuracy_final.mean)
          << " | selected epoch " << r.selected_epoch << " auc " << number(r.auc_selected.mean) << "\n";
  }
  return kOk;
}

// --- ablate ------------------------------------------------------------------

std::vector<AblationSpec> default_specs(const ModelFlags& f) {
  std::vector<AblationSpec> s;
  s.push_back(f.spec("reference", DescriptorKind::Dnp));
  auto no_node = f.spec("no-edge-in-node-update", DescriptorKind::Dnp);
  no_node.edge_in_node_update = false;
  auto no_update = f.spec("no-edge-update", DescriptorKind::Dnp);
  no_update.edge_update = false;
  auto no_readout = f.spec("no-edge-in-readout", DescriptorKind::Dnp);
  no_readout.edge_in_readout = false;
  s.insert(s.end(), {no_node, no_update, no_readout});
  s.push_back(f.spec("distance", DescriptorKind::Distance));
  s.push_back(f.spec("distance-theta", DescriptorKind::DistanceTheta));
  s.push_back(f.spec("ppf", DescriptorKind::Ppf));
  auto flat = f.spec("depth-0", DescriptorKind::Dnp);
  flat.depth = 0;
  s.push_back(flat);
  return s;
}

// --- eval ----------------------------------------------------------------------

int eval(const std::string& archive, const std::string& checkpoint, const std::string& descriptor, bool as_json,
         std::ostream& out) {
  const auto [params, cfg] = load_checkpoint(read_text_file(checkpoint));
  const Dataset ds = load_archive(archive, descriptor);
  if (static_cast<int>(ds.feature_width) != cfg.node_features)
    throw ConfigError("archive node feature width " + std::to_string(ds.feature_width) +
                      " does not match the checkpoint's " + std::to_string(cfg.node_features));
  std::vector<double> weights = ds.class_weights;
  if (ds.class_count > cfg.classes)
    throw ConfigError("archive has " + std::to_string(ds.class_count) + " classes, checkpoint has " +
                      std::to_string(cfg.classes));
  weights.resize(static_cast<std::size_t>(cfg.classes), 1.0);
  const Evaluation ev = evaluate(params, cfg, ds.graphs, weights);
  if (as_json) out << evaluation_json(ev).dump(2) << "\n";
  else
    out << "graphs " << ev.labels.size() << ", loss " << number(ev.loss) << ", auc " << number(ev.scores.auc)
        << ", f1 " << number(ev.scores.f1) << ", accuracy " << number(ev.scores.accuracy) << "\n";
  return kOk;
}

// --- check -----------------------------------------------------------------------

json check_json(const CheckReport& r) {
  return {{"suite", r.name},       {"trials", r.trials},       {"passed", r.passed},
          {"max_error", r.max_error}, {"threshold", r.threshold}, {"counterexample", r.counterexample},
          {"notes", r.notes},      {"seconds", r.seconds}};
}

int check(const std::string& suite, long trials, std::uint64_t seed, bool as_json, std::ostream& out) {
  const std::map<std::string, std::pair<long, CheckReport (*)(long, std::uint64_t)>> suites = {
      {"invariance", {10000, check_invariance}}, {"symmetry", {10000, check_symmetry}},
      {"injectivity", {10000, check_injectivity}}, {"chirality", {1000, check_chirality}},
      {"gradients", {20, check_gradients}},      {"embedding", {100, check_embedding_invariance}}};
  std::vector<std::string> names;
  if (suite == "all")
    for (const auto& [name, _] : suites) names.push_back(name);
  else if (suite == "invariance")
    names = {"invariance", "symmetry"};
  else if (suites.count(suite))
    names = {suite};
  else
    throw ConfigError("unknown suite '" + suite + "'");

  bool ok = true;
  json all = json::array();
  for (const auto& name : names) {
    const auto& [default_trials, fn] = suites.at(name);
    const CheckReport r = fn(trials > 0 ? trials : default_trials, seed);
    ok = ok && r.passed;
    if (as_json) {
      all.push_back(check_json(r));
      continue;
    }
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.trials << " trials, max error "
        << number(r.max_error) << " (limit " << number(r.threshold) << "), " << std::fixed << std::setprecision(2)
        << r.seconds << " s" << std::defaultfloat << "\n";
    for (const auto& n : r.notes) out << "  " << n << "\n";
    if (!r.counterexample.empty()) out << "  counterexample: " << r.counterexample << "\n";
  }
  if (as_json) out << all.dump(2) << "\n";
  return ok ? kOk : kFailure;
}

// --- gen-synthetic ---------------------------------------------------------------

int gen_synthetic(const std::string& task, int n, std::uint64_t seed, const std::string& out_path, std::ostream& out) {
  Dataset ds;
  if (task == "orientation") ds = gen_orientation_dataset(n, seed);
  else if (task == "chirality") ds = gen_chirality_dataset(n, seed);
  else throw ConfigError("unknown task '" + task + "' (expected orientation or chirality)");
  write_text_file_atomic(out_path, write_archive(ds.graphs));
  out << "wrote " << ds.graphs.size() << " graphs to " << out_path << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Directional node pair graph convolution toolkit", "dnpgcn"};
  app.require_subcommand(1);

  std::string manifest, descriptor = "dnp", out_path, archive, checkpoint, suite, task;
  bool as_json = false;
  int folds = 0, n = 100;
  long trials = 0;
  std::uint64_t seed = 0;
  ModelFlags model;
  std::vector<std::string> spec_ids;

  auto* featurize_cmd = app.add_subcommand("featurize", "Build a feature archive from a dataset manifest");
  featurize_cmd->add_option("--manifest", manifest, "JSON-lines manifest")->required();
  featurize_cmd->add_option("--descriptor", descriptor, "Edge descriptor")->capture_default_str();
  featurize_cmd->add_option("--out", out_path, "Archive to write")->required();

  auto* train_cmd = app.add_subcommand("train", "Train a model on a feature archive");
  train_cmd->add_option("archive", archive, "Feature archive")->required();
  model.add_to(*train_cmd);
  train_cmd->add_option("--folds", folds, "Cross-validate with this many folds instead of one full fit");
  train_cmd->add_option("--out", out_path, "Output directory")->required();
  train_cmd->add_flag("--json", as_json, "Print the final report as JSON");

  auto* ablate_cmd = app.add_subcommand("ablate", "Cross-validate the ablation variants on one archive");
  ablate_cmd->add_option("archive", archive, "Feature archive")->required();
  model.add_to(*ablate_cmd);
  ablate_cmd->add_option("--folds", folds, "Folds")->capture_default_str();
  ablate_cmd->add_option("--specs", spec_ids, "Subset of variants to run")->delimiter(',');
  ablate_cmd->add_option("--out", out_path, "Output directory")->required();
  ablate_cmd->add_flag("--json", as_json, "Print reports as JSON");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a feature archive");
  eval_cmd->add_option("archive", archive, "Feature archive")->required();
  eval_cmd->add_option("checkpoint", checkpoint, "Checkpoint file")->required();
  std::string eval_descriptor;
  eval_cmd->add_option("--descriptor", eval_descriptor, "Re-featurize edges with this descriptor first");
  eval_cmd->add_flag("--json", as_json, "Print the report as JSON");

  auto* check_cmd = app.add_subcommand("check", "Run a property suite");
  check_cmd->add_option("suite", suite, "invariance, symmetry, injectivity, chirality, gradients, embedding or all")
      ->required();
  check_cmd->add_option("--trials", trials, "Random cases (suite default when omitted)");
  check_cmd->add_option("--seed", seed, "Seed")->capture_default_str();
  check_cmd->add_flag("--json", as_json, "Print reports as JSON");

  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Write a synthetic archive");
  gen_cmd->add_option("task", task, "orientation or chirality")->required();
  gen_cmd->add_option("--n", n, "Graphs per class")->capture_default_str();
  gen_cmd->add_option("--seed", seed, "Seed")->capture_default_str();
  gen_cmd->add_option("--out", out_path, "Archive to write")->required();

  std::vector<std::string> argv(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(argv.begin(), argv.end());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (featurize_cmd->parsed()) return featurize(manifest, descriptor, out_path, out, err);
    if (train_cmd->parsed()) {
      const Dataset ds = load_archive(archive, model.descriptor);
      if (folds > 0) {
        const std::vector<AblationSpec> specs{model.spec("train", ds.graphs.front().descriptor)};
        return write_cv(ds, specs, model, folds, out_path, as_json, out);
      }
      return train_single(ds, model, out_path, as_json, out);
    }
    if (ablate_cmd->parsed()) {
      const Dataset ds = load_archive(archive, "");
      auto specs = default_specs(model);
      if (!spec_ids.empty()) {
        std::vector<AblationSpec> chosen;
        for (const auto& id : spec_ids) {
          const auto it = std::find_if(specs.begin(), specs.end(), [&](const AblationSpec& s) { return s.id == id; });
          if (it == specs.end()) throw ConfigError("unknown variant '" + id + "'");
          chosen.push_back(*it);
        }
        specs = std::move(chosen);
      }
      return write_cv(ds, specs, model, folds > 0 ? folds : 10, out_path, as_json, out);
    }
    if (eval_cmd->parsed()) return eval(archive, checkpoint, eval_descriptor, as_json, out);
    if (check_cmd->parsed()) return check(suite, trials, seed, as_json, out);
    if (gen_cmd->parsed()) return gen_synthetic(task, n, seed, out_path, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace dnpgcn::cli
