#include <gtest/gtest.h>

#include <fstream>

#include "crossvox/analysis.hpp"
#include "crossvox/meta.hpp"
#include "test_util.hpp"

using namespace crossvox;

namespace {

FeatureTable bundled_table() { return load_feature_table(cvtest::bundled_table_path()); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(CosineSimilarity, BasicCases) {
  const Vec a{1.0, 2.0, -0.5};
  EXPECT_DOUBLE_EQ(cosine_similarity(a, a), 1.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(Vec{1, 0}, Vec{0, 1}), 0.0);
  Vec neg = a;
  for (auto& x : neg) x = -x;
  EXPECT_DOUBLE_EQ(cosine_similarity(a, neg), -1.0);
  EXPECT_THROW(cosine_similarity(Vec{0, 0}, Vec{1, 0}), ZeroVectorError);
}

TEST(CosineSimilarity, ScaleInvariant) {
  Rng rng(17);
  for (int iter = 0; iter < 500; ++iter) {
    const std::size_t n = 2 + rng.below(16);
    Vec a(n), b(n);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal();
    if (norm(a) == 0.0 || norm(b) == 0.0) continue;
    const double base = cosine_similarity(a, b);
    EXPECT_GE(base, -1.0);
    EXPECT_LE(base, 1.0);
    Vec a2 = a, b2 = b;
    const double ca = rng.uniform(0.1, 10.0), cb = rng.uniform(0.1, 10.0);
    for (auto& x : a2) x *= ca;
    for (auto& x : b2) x *= cb;
    EXPECT_NEAR(cosine_similarity(a2, b2), base, 1e-9);
  }
}

TEST(SimilarityCurve, SingleCheckpointMatchingProbe) {
  const Vec reference{0.5, 0.5};
  std::vector<std::pair<std::int64_t, Vec>> checkpoints{{7, reference}};
  const auto curve = similarity_curve(checkpoints, [](const Vec& v) { return v; }, reference);
  ASSERT_EQ(curve.size(), 1u);
  EXPECT_EQ(curve[0].step, 7);
  EXPECT_DOUBLE_EQ(curve[0].similarity, 1.0);
}

TEST(SimilarityCurve, EmptyCheckpointListRejected) {
  const std::vector<std::pair<std::int64_t, Vec>> none;
  EXPECT_THROW(similarity_curve(none, [](const Vec& v) { return v; }, Vec{1.0}),
               EmptyBatchError);
}

TEST(SimilarityCurve, FinetuningCurveImprovesInBestSoFar) {
  const auto table = bundled_table();
  MetaTrainConfig config;
  config.model.hidden_dim = 12;
  config.model.frame_dim = 4;
  config.family.frame_dim = 4;
  config.steps = 400;
  config.batch_size = 8;
  const auto tasks = make_synthetic_tasks(table, 3, 12, 0.0, 2);
  const auto meta = meta_train(config, table, tasks, MetaProcedure::LAML);

  TaskSpec unseen;
  unseen.task_id = 50;
  unseen.seed = 1717;
  unseen.inventory = tasks[1].inventory;
  const TaskGenerator gen(config.family, unseen);
  Rng rng(3);
  std::vector<TaskBatch> corpus;
  for (int i = 0; i < 3; ++i) corpus.push_back(sample_task_batch(gen, unseen, table, 10, rng));

  const auto result = finetune(meta.state, corpus, 150, {}, 10);

  Vec reference(4, 0.0);
  std::size_t count = 0;
  for (const auto& b : corpus)
    for (const auto& t : b.targets) {
      for (std::size_t k = 0; k < 4; ++k) reference[k] += t[k];
      ++count;
    }
  for (auto& x : reference) x /= static_cast<double>(count);

  const auto probe = [&](const AcousticParams& p) {
    Vec mean(4, 0.0);
    std::size_t frames = 0;
    for (const auto& b : corpus)
      for (const auto& o : acoustic_forward(p, b.inputs)) {
        for (std::size_t k = 0; k < 4; ++k) mean[k] += o[k];
        ++frames;
      }
    for (auto& x : mean) x /= static_cast<double>(frames);
    return mean;
  };
  const auto curve = similarity_curve(result.snapshots, probe, reference);
  ASSERT_GT(curve.size(), 2u);
  double best = curve.front().similarity;
  for (const auto& p : curve) best = std::max(best, p.similarity);
  EXPECT_EQ(best, curve.back().similarity);  // best-so-far ends at the end
  EXPECT_GT(curve.back().similarity, curve.front().similarity);
  EXPECT_GT(curve.back().similarity, 0.9);
}

TEST(ZeroShotReport, DuplicateArticulatoryVectorCollapses) {
  // "g" is an ASCII alias of the velar plosive: identical features by
  // construction, so any model output matches its twin exactly.
  const auto table = bundled_table();
  const auto model = [](const ArticulatoryVector& v) {
    return Vec(v.all().begin(), v.all().end());
  };
  const auto reports = zero_shot_report(table, {"g"}, model, 3);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].artic_neighbors[0].symbol, "ɡ");  // the IPA twin
  EXPECT_NEAR(reports[0].model_neighbors[0].distance, -1.0, 1e-12);
  EXPECT_TRUE(reports[0].collapse);
}

TEST(ZeroShotReport, DistinctVowelDoesNotCollapseInRawSpace) {
  const auto table = bundled_table();
  const auto model = [](const ArticulatoryVector& v) {
    return Vec(v.all().begin(), v.all().end());
  };
  const auto reports = zero_shot_report(table, {"ø"}, model, 4);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_FALSE(reports[0].collapse);
  // Neighbor lists are sorted ascending.
  for (std::size_t i = 1; i < reports[0].model_neighbors.size(); ++i)
    EXPECT_LE(reports[0].model_neighbors[i - 1].distance,
              reports[0].model_neighbors[i].distance);
}

TEST(ZeroShotReport, KLargerThanTableTruncates) {
  const auto table = bundled_table();
  const auto model = [](const ArticulatoryVector& v) {
    return Vec(v.all().begin(), v.all().end());
  };
  const auto reports = zero_shot_report(table, {"p"}, model, 10000);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].artic_neighbors.size(), table.size() - 1);
  EXPECT_EQ(reports[0].model_neighbors.size(), table.size() - 1);
}

TEST(ZeroShotReport, HeldoutMustBeInTable) {
  const auto table = bundled_table();
  const auto model = [](const ArticulatoryVector& v) {
    return Vec(v.all().begin(), v.all().end());
  };
  EXPECT_THROW(zero_shot_report(table, {"Q"}, model, 3), HeldoutNotInTableError);
}

TEST(ZeroShotReport, MetaTrainedModelGeneralizesToHeldOutVowel) {
  const auto table = bundled_table();
  const std::string heldout = "ø";
  MetaTrainConfig config;
  config.model.hidden_dim = 16;
  config.model.frame_dim = 4;
  config.family.frame_dim = 4;
  config.family.offset_scale = 0.1;
  config.steps = 1000;
  config.batch_size = 8;
  const auto tasks = make_synthetic_tasks(table, 4, 20, 0.0, 31, {heldout});
  const auto meta = meta_train(config, table, tasks, MetaProcedure::LAML);

  // The zero-shot output for the held-out vowel should be closer to its own
  // generator target than to a random other phoneme's target.
  TaskSpec probe_task;
  probe_task.task_id = 1000;
  probe_task.seed = 777;
  probe_task.inventory = {nfd_utf8(heldout)};
  const TaskGenerator gen(config.family, probe_task);

  const auto& held_vec = table.entry(table.row_of(heldout)).vector;
  const auto out = acoustic_forward(meta.state.params, std::span(&held_vec, 1)).front();
  const auto mse = [](const Vec& x, const Vec& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return s / static_cast<double>(x.size());
  };
  const double own = mse(out, gen.target(held_vec));

  Rng rng(5);
  int closer = 0, total = 0;
  for (int i = 0; i < 25; ++i) {
    const auto& other = table.entry(rng.below(table.size())).vector;
    if (other.values == held_vec.values) continue;
    ++total;
    if (own < mse(out, gen.target(other))) ++closer;
  }
  EXPECT_GT(closer, total * 3 / 4);
}

TEST(ExportEmbeddings, DeterministicRowPerSymbol) {
  const auto table = bundled_table();
  const auto dir = cvtest::scratch_dir("export");
  const auto model = [](const ArticulatoryVector& v) {
    return Vec{v.values[0] + 2.0, v.values[1] - 1.0};
  };
  export_embeddings(table, model, dir + "/a.tsv");
  export_embeddings(table, model, dir + "/b.tsv", {"p", "a"});

  const auto a = slurp(dir + "/a.tsv");
  std::size_t rows = 0;
  for (char c : a)
    if (c == '\n') ++rows;
  EXPECT_EQ(rows, table.size() + 1);  // header + one per symbol
  EXPECT_EQ(a.find("unseen"), std::string::npos);

  const auto b = slurp(dir + "/b.tsv");
  EXPECT_NE(b.find("p\tunseen"), std::string::npos);
  EXPECT_NE(b.find("a\tunseen"), std::string::npos);

  export_embeddings(table, model, dir + "/a2.tsv");
  EXPECT_EQ(a, slurp(dir + "/a2.tsv"));
}
