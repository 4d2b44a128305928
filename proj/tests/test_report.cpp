#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "test_support.hpp"

using namespace lftc;
using lftc::testing::noisy_split;
using lftc::testing::read_file;
using lftc::testing::same_decision;
using lftc::testing::TempDir;
using lftc::testing::write_file;

namespace {

EvalReport sample_report() {
  const auto split = noisy_split(0, 6, 10);
  PipelineConfig cfg;
  cfg.knn.k = 2;
  auto r = make_report("noisy", cfg, evaluate(split.train, split.test, cfg), 42);
  r.trials = {0.5, 0.25, 0.125};
  r.ci95 = ci95(r.trials);
  return r;
}

// Writes a split as train.csv / test.csv under `dir/name`.
RunSpec spec_for(const TempDir& dir, const std::string& name, const lftc::testing::SyntheticSplit& split) {
  const auto root = dir / name;
  std::filesystem::create_directories(root);
  write_csv(split.train, root / "train.csv");
  write_csv(split.test, root / "test.csv");
  RunSpec spec;
  spec.train_path = root / "train.csv";
  spec.test_path = root / "test.csv";
  return spec;
}

std::size_t line_count(const std::string& s) { return std::size_t(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Ci95, Examples) {
  EXPECT_FALSE(ci95({}).has_value());
  EXPECT_FALSE(ci95({0.7}).has_value());
  const auto flat = ci95({0.4, 0.4, 0.4});
  ASSERT_TRUE(flat);
  EXPECT_DOUBLE_EQ(flat->mean, 0.4);
  EXPECT_DOUBLE_EQ(flat->half_width, 0.0);
  // mean 2, sample sd 1, n 3
  const auto ci = ci95({1.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(ci->mean, 2.0);
  EXPECT_NEAR(ci->half_width, 1.96 / std::sqrt(3.0), 1e-12);
}

TEST(Report, JsonRoundTrip) {
  const auto r = sample_report();
  EXPECT_EQ(report_from_string(report_to_string(r)), r);
  EXPECT_EQ(report_from_string(report_to_string(r, -1)), r);

  EvalReport bare = r;
  bare.trials.clear();
  bare.ci95.reset();
  const auto j = nlohmann::json(bare);
  EXPECT_FALSE(j.contains("trials"));
  EXPECT_FALSE(j.contains("ci95"));
  EXPECT_EQ(report_from_string(j.dump()), bare);
}

TEST(Report, JsonLayout) {
  const auto j = nlohmann::json(sample_report());
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(j["variant"], "lftc");
  EXPECT_EQ(j["config"]["k"], 2);
  EXPECT_EQ(j["config"]["seed"], 42);
  EXPECT_EQ(j["config"]["mcc_backend"], "zstd");
  EXPECT_EQ(j["config"]["ncd_backend"], "deflate");
  EXPECT_EQ(j["counts"]["samples"], 10);
  for (const char* key : {"list_build_seconds", "mcc_seconds", "cr_seconds", "total_seconds"}) {
    EXPECT_TRUE(j["timings"].contains(key)) << key;
  }
  EXPECT_TRUE(j["split"].contains("train_checksum"));
}

TEST(Report, RejectsOtherSchemaVersionsAndMalformedInput) {
  auto j = nlohmann::json(sample_report());
  j["schema_version"] = kReportSchemaVersion + 1;
  EXPECT_THROW(report_from_string(j.dump()), ValidationError);
  EXPECT_THROW(report_from_string("{"), ValidationError);
  auto missing = nlohmann::json(sample_report());
  missing.erase("counts");
  EXPECT_THROW(report_from_string(missing.dump()), ValidationError);
}

TEST(Report, SummaryCsv) {
  auto a = sample_report();
  auto b = a;
  b.dataset = "with, comma";
  b.ci95.reset();
  const auto records = csv::parse(summary_csv({a, b}));
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0].fields, summary_header());
  EXPECT_EQ(records[1].fields, summary_row(a));
  EXPECT_EQ(records[2].fields[0], "with, comma");
  EXPECT_EQ(records[2].fields[10], "");
  EXPECT_EQ(records[1].fields[1], "lftc");
}

TEST(Bundle, RoundTrip) {
  const auto split = noisy_split(1, 8, 6);
  PipelineConfig cfg;
  const Classifier c(split.train, cfg);
  const Bundle b{bundle_header(split.train, cfg), c.lists()};
  const auto data = serialize_bundle(b);
  const Bundle back = deserialize_bundle(data);
  EXPECT_EQ(back.header, b.header);
  ASSERT_EQ(back.lists.size(), b.lists.size());
  for (const auto& [label, list] : b.lists) {
    const auto& other = back.lists.at(label);
    EXPECT_EQ(other.total_length, list.total_length);
    EXPECT_EQ(other.available_segments, list.available_segments);
    ASSERT_EQ(other.compressors.size(), list.compressors.size());
    for (std::size_t i = 0; i < list.compressors.size(); ++i) {
      EXPECT_EQ(other.compressors[i].dictionary(), list.compressors[i].dictionary());
    }
  }
  EXPECT_EQ(serialize_bundle(back), data);

  const Classifier reused(split.train, cfg, back.lists);
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    EXPECT_TRUE(same_decision(c.predict(split.test[i].text, i), reused.predict(split.test[i].text, i)));
  }
}

TEST(Bundle, CorruptionIsRejected) {
  const auto split = noisy_split(2, 4, 1);
  PipelineConfig cfg;
  const auto data = serialize_bundle({bundle_header(split.train, cfg), Classifier(split.train, cfg).lists()});

  auto bad_magic = data;
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize_bundle(bad_magic), ValidationError);
  auto bad_version = data;
  bad_version[8] = char(kBundleVersion + 1);
  EXPECT_THROW(deserialize_bundle(bad_version), ValidationError);
  for (std::size_t cut : {std::size_t(0), std::size_t(5), std::size_t(12), data.size() / 2, data.size() - 1}) {
    EXPECT_THROW(deserialize_bundle(ByteView(data).substr(0, cut)), ValidationError) << cut;
  }
  EXPECT_THROW(deserialize_bundle(data + "x"), ValidationError);
  TempDir dir;
  EXPECT_THROW(load_bundle(dir / "absent.bin"), ValidationError);
}

TEST(Runner, DatasetName) {
  RunSpec s;
  s.train_path = "/data/r8/train.csv";
  EXPECT_EQ(dataset_name(s), "r8");
  s.train_path = "/data/r8_training.csv";
  EXPECT_EQ(dataset_name(s), "r8_training");
  s.dataset = "explicit";
  EXPECT_EQ(dataset_name(s), "explicit");
}

TEST(Runner, Validation) {
  RunSpec s;
  EXPECT_THROW(s.validate(), ValidationError);
  s.train_path = "a.csv";
  EXPECT_THROW(s.validate(), ValidationError);
  s.test_path = "b.csv";
  EXPECT_NO_THROW(s.validate());
  s.command = Command::fewshot;
  s.shots = 0;
  EXPECT_THROW(s.validate(), ValidationError);
  s.shots = 5;
  s.trials = 0;
  EXPECT_THROW(s.validate(), ValidationError);
  s.command = Command::sweep;
  s.trials = 1;
  EXPECT_THROW(s.validate(), ValidationError);
  s.sweep_levels = {3, 99};
  EXPECT_THROW(s.validate(), ValidationError);
  s.sweep_levels = {3};
  EXPECT_NO_THROW(s.validate());
}

TEST(Runner, EvalWritesOutputs) {
  TempDir dir;
  auto spec = spec_for(dir, "noisy", noisy_split(3, 6, 15));
  spec.out = dir / "report.json";
  spec.summary = dir / "summary.csv";
  spec.audit = dir / "audit.jsonl";
  const auto r = run_eval(spec);
  EXPECT_EQ(r.dataset, "noisy");
  EXPECT_EQ(report_from_string(read_file(*spec.out)), r);
  EXPECT_EQ(line_count(read_file(*spec.summary)), 2u);

  std::istringstream audit(read_file(*spec.audit));
  std::string line;
  std::size_t n = 0;
  while (std::getline(audit, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["sample_index"], n++);
    EXPECT_TRUE(j.contains("candidate_pair"));
    EXPECT_EQ(j["nearest"].size(), spec.pipeline.knn.k);
    const auto& pair = j["candidate_pair"];
    EXPECT_TRUE(j["predicted"] == pair["first"] || j["predicted"] == pair["second"]);
  }
  EXPECT_EQ(n, 15u);
}

TEST(Runner, BundleIsReusedAndRefreshed) {
  TempDir dir;
  auto spec = spec_for(dir, "b", noisy_split(4, 6, 10));
  spec.bundle = dir / "lists.bin";
  const auto first = run_eval(spec);
  ASSERT_TRUE(std::filesystem::exists(*spec.bundle));
  const auto bytes = read_file(*spec.bundle);
  const auto second = run_eval(spec);
  EXPECT_EQ(second.accuracy, first.accuracy);
  EXPECT_EQ(read_file(*spec.bundle), bytes);

  spec.pipeline.plan.max_compressors = 1;
  run_eval(spec);
  EXPECT_EQ(load_bundle(*spec.bundle).header.plan.max_compressors, 1u);

  write_file(*spec.bundle, "garbage");
  EXPECT_EQ(run_eval(spec).samples, 10u);
  EXPECT_NO_THROW(load_bundle(*spec.bundle));
}

TEST(Runner, FewShotIsReproducible) {
  TempDir dir;
  auto spec = spec_for(dir, "fs", noisy_split(5, 10, 20));
  spec.command = Command::fewshot;
  spec.shots = 3;
  spec.trials = 4;
  spec.seed = 11;
  const auto a = run_fewshot(spec);
  const auto b = run_fewshot(spec);
  EXPECT_EQ(a.trials, b.trials);
  EXPECT_EQ(a.per_class, b.per_class);
  EXPECT_EQ(a.ci95, b.ci95);
  ASSERT_EQ(a.trials.size(), 4u);
  ASSERT_TRUE(a.ci95);
  double mean = 0.0;
  for (double t : a.trials) mean += t / 4.0;
  EXPECT_NEAR(a.accuracy, mean, 1e-12);
  EXPECT_EQ(a.samples, 80u);
  EXPECT_EQ(a.config.shots, 3u);
  EXPECT_EQ(a.config.trials, 4u);

  spec.seed = 12;
  EXPECT_NE(run_fewshot(spec).trials, a.trials);

  spec.trials = 1;
  const auto single = run_fewshot(spec);
  EXPECT_FALSE(single.ci95);
  EXPECT_EQ(single.trials.size(), 1u);
}

TEST(Runner, CompareUsesTheSameSplit) {
  TempDir dir;
  auto spec = spec_for(dir, "cmp", noisy_split(6, 8, 12));
  spec.command = Command::compare;
  spec.out = dir / "cmp.json";
  const auto r = run_compare(spec);
  EXPECT_EQ(r.lftc.variant, "lftc");
  EXPECT_EQ(r.baseline.variant, "baseline-ncd");
  EXPECT_EQ(r.lftc.train_checksum, r.baseline.train_checksum);
  EXPECT_EQ(r.baseline.ncd_calls, 12u * 40u);
  EXPECT_LT(r.lftc.ncd_calls, r.baseline.ncd_calls);
  EXPECT_DOUBLE_EQ(r.speed_ratio, r.baseline.timings.total_seconds / std::max(r.lftc.timings.total_seconds, 1e-3));
  const auto j = nlohmann::json::parse(read_file(*spec.out));
  EXPECT_EQ(j["lftc"].get<EvalReport>(), r.lftc);
  EXPECT_EQ(j["speed_ratio"].get<double>(), r.speed_ratio);
}

TEST(Runner, SweepCoversTheGrid) {
  TempDir dir;
  auto spec = spec_for(dir, "sw", noisy_split(7, 8, 6));
  spec.command = Command::sweep;
  spec.sweep_step_sizes = {256, 65536};
  spec.sweep_caps = {1, 16};
  spec.summary = dir / "sweep.csv";
  const auto reports = run_sweep(spec);
  ASSERT_EQ(reports.size(), 4u);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& r : reports) {
    seen.insert({r.config.step_size, r.config.max_compressors});
    EXPECT_EQ(r.config.mcc_level, spec.pipeline.mcc_backend.level);
  }
  EXPECT_EQ(seen.size(), 4u);
  EXPECT_EQ(line_count(read_file(*spec.summary)), 5u);
}

TEST(Runner, MissingInputIsAValidationError) {
  TempDir dir;
  RunSpec spec;
  spec.train_path = dir / "none.csv";
  spec.test_path = dir / "none.csv";
  EXPECT_THROW(run_eval(spec), ValidationError);
}
