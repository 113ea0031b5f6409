#include "doctest.h"

#include <set>

#include "dnp/crossval.hpp"
#include "dnp/synthetic.hpp"

using namespace dnpgcn;

namespace {

Dataset labelled(std::vector<int> labels, bool paired = false) {
  std::vector<MolGraph> gs;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    MolGraph g;
    g.id = "g" + std::to_string(k);
    g.nodes.push_back({{1.0}, DirectionalNode(Vec3{})});
    g.label = labels[k];
    if (paired) g.group = static_cast<int>(k / 2);
    gs.push_back(g);
  }
  return make_dataset(gs);
}

}  // namespace

TEST_CASE("kfold partitions exactly and stratifies") {
  std::vector<int> labels;
  for (int k = 0; k < 20; ++k) labels.push_back(k % 2);
  const auto ds = labelled(labels);
  const auto split = kfold(ds, 10, 3);
  REQUIRE(split.test.size() == 10);
  std::multiset<std::size_t> all;
  for (int f = 0; f < 10; ++f) {
    const auto& test = split.test[std::size_t(f)];
    REQUIRE(test.size() == 2);
    CHECK(ds.graphs[test[0]].label != ds.graphs[test[1]].label);
    all.insert(test.begin(), test.end());
    std::set<std::size_t> train(split.train[std::size_t(f)].begin(), split.train[std::size_t(f)].end());
    CHECK(train.size() == 18);
    for (auto i : test) CHECK(train.count(i) == 0);
  }
  CHECK(all.size() == 20);
  CHECK(std::set<std::size_t>(all.begin(), all.end()).size() == 20);

  CHECK(kfold(ds, 10, 3).test == split.test);
  CHECK(kfold(ds, 10, 4).test != split.test);
}

TEST_CASE("kfold keeps groups together") {
  const auto ds = gen_orientation_dataset(20, 2);
  const auto split = kfold(ds, 5, 1);
  for (const auto& test : split.test) {
    CHECK(test.size() == 8);
    std::set<int> groups;
    for (auto i : test) groups.insert(*ds.graphs[i].group);
    for (auto i : test) {
      // Partner of every test graph is in the same fold.
      std::size_t partners = 0;
      for (auto j : test) partners += ds.graphs[j].group == ds.graphs[i].group;
      CHECK(partners == 2);
    }
    CHECK(groups.size() == 4);
  }
}

TEST_CASE("kfold preconditions") {
  CHECK_THROWS_AS(kfold(labelled({0, 0, 0, 1, 1}), 3, 0), Error);
  CHECK_THROWS_AS(kfold(labelled({0, 1, 0, 1}, true), 3, 0), Error);
  CHECK_THROWS_AS(kfold(labelled({0, 1, 0, 1}), 1, 0), ConfigError);
}

TEST_CASE("summaries") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto s = summarize(v);
  CHECK(s.mean == 2.5);
  CHECK(s.std == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("cross validation and the ablation table") {
  const auto ds = gen_orientation_dataset(10, 5);
  TrainOptions opts;
  opts.epochs = 6;
  opts.batch_size = 8;
  opts.seed = 2;
  AblationSpec ref{"reference", DescriptorKind::Dnp, true, true, true, 8, 2, NormMode::Batch};
  AblationSpec dist{"distance", DescriptorKind::Distance, true, true, true, 8, 2, NormMode::Batch};
  AblationSpec flat{"depth0", DescriptorKind::Dnp, false, false, true, 8, 0, NormMode::None};
  const std::vector<AblationSpec> specs{ref, dist, ref, flat};
  const auto reports = run_ablation(ds, specs, opts, 5);
  REQUIRE(reports.size() == 4);

  // Duplicate spec, identical numbers.
  CHECK(reports[0].auc_final.mean == reports[2].auc_final.mean);
  CHECK(reports[0].folds[3].final_probabilities == reports[2].folds[3].final_probabilities);

  for (const auto& r : reports) {
    REQUIRE(r.folds.size() == 5);
    CHECK(r.folds[0].per_epoch.size() == 6);
    std::vector<double> acc;
    for (const auto& s : r.final) acc.push_back(s.accuracy);
    CHECK(summarize(acc).mean == r.accuracy_final.mean);
    // Stored predictions reproduce the fold metrics bit for bit.
    for (std::size_t f = 0; f < r.folds.size(); ++f) {
      const auto again = score(r.folds[f].final_probabilities, r.folds[f].labels);
      CHECK(again.auc == r.final[f].auc);
      CHECK(again.f1 == r.final[f].f1);
      CHECK(again.accuracy == r.final[f].accuracy);
    }
    CHECK(r.selected_epoch >= 0);
    CHECK(r.selected_epoch < 6);
    CHECK(r.accuracy_selected.mean >= r.accuracy_final.mean);
  }
  // Paired graphs have identical distance features, so each pair scores a tie.
  CHECK(std::abs(reports[1].auc_final.mean - 0.5) < 0.06);

  const std::string csv = ablation_csv(specs, reports);
  CHECK(csv.starts_with("spec_id,descriptor,node_update,edge_update,readout,width,depth,fold,auc,f1,accuracy\n"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 * 7);
  CHECK(csv.find("depth0,dnp,0,0,1,8,0,mean,") != std::string::npos);
  CHECK(csv.find("distance,distance,1,1,1,8,2,4,") != std::string::npos);
  CHECK(ablation_csv(specs, reports, true) != csv);

  AblationSpec broken = ref;
  broken.id = "broken";
  broken.width = 0;
  const std::vector<AblationSpec> bad{broken};
  CHECK_THROWS_WITH_AS(run_ablation(ds, bad, opts, 5), doctest::Contains("broken"), ConfigError);
}
