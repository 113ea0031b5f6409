#include "dnp/crossval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace dnpgcn {

FoldSplit kfold(const Dataset& ds, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("need at least 2 folds");
  std::map<int, std::size_t> class_sizes;
  for (const auto& g : ds.graphs) {
    if (!g.label) throw Error("graph '" + g.id + "' has no label");
    ++class_sizes[*g.label];
  }
  for (const auto& [label, n] : class_sizes)
    if (n < static_cast<std::size_t>(k))
      throw Error("class " + std::to_string(label) + " has " + std::to_string(n) + " graphs, fewer than " +
                  std::to_string(k) + " folds");

  // Units: one per group (or per ungrouped graph), in order of first appearance.
  std::vector<std::vector<std::size_t>> units;
  std::map<int, std::size_t> group_unit;
  for (std::size_t i = 0; i < ds.graphs.size(); ++i) {
    const auto& g = ds.graphs[i];
    if (g.group) {
      auto [it, inserted] = group_unit.try_emplace(*g.group, units.size());
      if (inserted) units.emplace_back();
      units[it->second].push_back(i);
    } else {
      units.push_back({i});
    }
  }
  if (units.size() < static_cast<std::size_t>(k))
    throw Error(std::to_string(units.size()) + " independent groups cannot fill " + std::to_string(k) + " folds");

  std::map<std::vector<int>, std::vector<std::size_t>> strata;
  for (std::size_t u = 0; u < units.size(); ++u) {
    std::vector<int> composition;
    for (auto i : units[u]) composition.push_back(*ds.graphs[i].label);
    std::sort(composition.begin(), composition.end());
    strata[composition].push_back(u);
  }

  FoldSplit split;
  split.k = k;
  split.seed = seed;
  split.test.assign(static_cast<std::size_t>(k), {});
  std::mt19937_64 rng(derive_seed(seed, "split"));
  std::size_t cursor = 0;
  for (auto& [composition, members] : strata) {
    std::shuffle(members.begin(), members.end(), rng);
    for (auto u : members) {
      auto& fold = split.test[cursor++ % static_cast<std::size_t>(k)];
      fold.insert(fold.end(), units[u].begin(), units[u].end());
    }
  }
  for (auto& fold : split.test) std::sort(fold.begin(), fold.end());
  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> train;
    for (int o = 0; o < k; ++o)
      if (o != f) train.insert(train.end(), split.test[o].begin(), split.test[o].end());
    std::sort(train.begin(), train.end());
    split.train.push_back(std::move(train));
  }
  return split;
}

ModelConfig AblationSpec::model_config(const Dataset& ds) const {
  ModelConfig cfg;
  cfg.width = width;
  cfg.depth = depth;
  cfg.node_features = static_cast<int>(ds.feature_width);
  cfg.classes = ds.class_count;
  cfg.norm = norm;
  cfg.edge_in_node_update = edge_in_node_update;
  cfg.edge_update = edge_update;
  cfg.edge_in_readout = edge_in_readout;
  cfg.validate();
  return cfg;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size()));
  return s;
}

namespace {

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& idx) {
  std::vector<MolGraph> graphs;
  graphs.reserve(idx.size());
  for (auto i : idx) graphs.push_back(ds.graphs[i]);
  return make_dataset(std::move(graphs), ds.class_count);
}

void summarize_into(const std::vector<Scores>& s, Summary& auc_s, Summary& f1_s, Summary& acc_s) {
  std::vector<double> a, f, c;
  for (const auto& x : s) {
    a.push_back(x.auc);
    f.push_back(x.f1);
    c.push_back(x.accuracy);
  }
  auc_s = summarize(a);
  f1_s = summarize(f);
  acc_s = summarize(c);
}

}  // namespace

MetricReport cross_validate(const Dataset& ds, const AblationSpec& spec, const TrainOptions& opts, int folds) {
  const Dataset featurized = ds.graphs.front().descriptor == spec.descriptor ? ds : refeaturize(ds, spec.descriptor);
  const ModelConfig cfg = spec.model_config(featurized);
  const FoldSplit split = kfold(featurized, folds, opts.seed);

  MetricReport report;
  report.spec_id = spec.id;
  for (int f = 0; f < folds; ++f) {
    const auto uf = static_cast<std::size_t>(f);
    const Dataset train_set = subset(featurized, split.train[uf]);
    const Dataset test_set = subset(featurized, split.test[uf]);
    FoldResult fr;
    fr.fold = f;
    fr.test_indices = split.test[uf];
    Evaluation last;
    train(train_set, cfg, opts, [&](const EpochRecord&, const ModelParams& p) {
      last = evaluate(p, cfg, test_set.graphs, train_set.class_weights);
      fr.per_epoch.push_back(last.scores);
    });
    fr.final_probabilities = last.probabilities;
    fr.labels = last.labels;
    report.final.push_back(fr.per_epoch.back());
    report.folds.push_back(std::move(fr));
  }

  double best = -1.0;
  for (int e = 0; e < opts.epochs; ++e) {
    double acc = 0.0;
    for (const auto& fr : report.folds) acc += fr.per_epoch[static_cast<std::size_t>(e)].accuracy;
    if (acc > best) {
      best = acc;
      report.selected_epoch = e;
    }
  }
  for (const auto& fr : report.folds) report.selected.push_back(fr.per_epoch[static_cast<std::size_t>(report.selected_epoch)]);
  summarize_into(report.selected, report.auc_selected, report.f1_selected, report.accuracy_selected);
  summarize_into(report.final, report.auc_final, report.f1_final, report.accuracy_final);
  return report;
}

std::vector<MetricReport> run_ablation(const Dataset& ds, std::span<const AblationSpec> specs,
                                       const TrainOptions& opts, int folds) {
  std::vector<MetricReport> out;
  for (const auto& spec : specs) {
    try {
      out.push_back(cross_validate(ds, spec, opts, folds));
    } catch (const ConfigError& e) {
      throw ConfigError("spec '" + spec.id + "': " + e.what());
    } catch (const Error& e) {
      throw Error("spec '" + spec.id + "': " + e.what());
    }
  }
  return out;
}

std::string ablation_csv(std::span<const AblationSpec> specs, std::span<const MetricReport> reports, bool selected) {
  if (specs.size() != reports.size()) throw Error("one report per spec required");
  std::ostringstream out;
  out.precision(17);
  out << "spec_id,descriptor,node_update,edge_update,readout,width,depth,fold,auc,f1,accuracy\n";
  for (std::size_t s = 0; s < specs.size(); ++s) {
    const auto& spec = specs[s];
    const auto& r = reports[s];
    auto prefix = [&](const std::string& fold) {
      out << spec.id << ',' << to_string(spec.descriptor) << ',' << int(spec.edge_in_node_update) << ','
          << int(spec.edge_update) << ',' << int(spec.edge_in_readout) << ',' << spec.width << ',' << spec.depth << ','
          << fold << ',';
    };
    const auto& rows = selected ? r.selected : r.final;
    for (std::size_t f = 0; f < rows.size(); ++f) {
      prefix(std::to_string(f));
      out << rows[f].auc << ',' << rows[f].f1 << ',' << rows[f].accuracy << '\n';
    }
    const auto& a = selected ? r.auc_selected : r.auc_final;
    const auto& f1s = selected ? r.f1_selected : r.f1_final;
    const auto& acc = selected ? r.accuracy_selected : r.accuracy_final;
    prefix("mean");
    out << a.mean << ',' << f1s.mean << ',' << acc.mean << '\n';
    prefix("std");
    out << a.std << ',' << f1s.std << ',' << acc.std << '\n';
  }
  return out.str();
}

}  // namespace dnpgcn
