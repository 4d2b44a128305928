// Copyright 2026 The lftc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// lftc: evaluate compression-based text classifiers from the command line.
//
//   lftc eval    --train T.csv --test E.csv [--variant lftc]
//   lftc fewshot --train T.csv --test E.csv --shots 5 --trials 10
//   lftc compare --train T.csv --test E.csv
//   lftc sweep   --train T.csv --test E.csv --step-sizes 4096,65536 --levels 1,3
//   lftc synth   --out-dir data/synthetic
//
// Exit status: 0 success, 2 invalid input or flags, 3 runtime failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lftc.hpp"

namespace {

struct Flags {
  lftc::RunSpec spec;
  std::string variant = "lftc";
  std::string backend = "zstd";
  int level = 0;  // 0: backend default
  bool no_adaptive = false;
  std::string dictionary_mode = "trained";
  std::string aggregate = "mean";
  std::string ncd_backend = "deflate";
  int ncd_level = 0;
  std::size_t k = 1;
  std::size_t threads = lftc::default_threads();
  std::string delimiter = ",";
  std::string header = "auto";
  std::string out, summary, audit, bundle;
};

struct SynthFlags {
  std::filesystem::path out_dir = "data/synthetic";
  std::size_t per_class = 40;
  std::size_t queries = 200;
  std::size_t classes = 3;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, Flags& f) {
  auto& s = f.spec;
  cmd->add_option("--train", s.train_path, "Training CSV")->required();
  cmd->add_option("--test", s.test_path, "Test CSV")->required();
  cmd->add_option("--label-col", s.label_column, "Label column: header name or 0-based index")->capture_default_str();
  cmd->add_option("--text-col", s.text_column, "Text column: header name or 0-based index")->capture_default_str();
  cmd->add_option("--delimiter", f.delimiter, "CSV field delimiter (one character)")->capture_default_str();
  cmd->add_option("--header", f.header, "Header row: auto, yes or no")->capture_default_str();
  cmd->add_option("--dataset", s.dataset, "Dataset name for reports (default: from --train)");
  cmd->add_option("--variant", f.variant, "lftc, lftc-mcc, lftc-cr or baseline-ncd")->capture_default_str();
  cmd->add_option("--step-size", s.pipeline.plan.step_size, "Segment size in bytes")->capture_default_str();
  cmd->add_option("--max-compressors", s.pipeline.plan.max_compressors, "Compressors per class (0: no cap)")
      ->capture_default_str();
  cmd->add_option("--backend", f.backend, "Dictionary compressor: zstd or reference-lz")->capture_default_str();
  cmd->add_option("--level", f.level, "Dictionary compressor level (default: backend default)");
  cmd->add_flag("--no-adaptive-level", f.no_adaptive, "Keep --level for large inputs");
  cmd->add_option("--dictionary-mode", f.dictionary_mode, "trained or raw")->capture_default_str();
  cmd->add_option("--aggregate", f.aggregate, "Class score: mean or sum")->capture_default_str();
  cmd->add_option("--k", f.k, "Neighbours in the NCD vote")->capture_default_str();
  cmd->add_option("--ncd-backend", f.ncd_backend, "NCD compressor: deflate, zstd or reference-lz")->capture_default_str();
  cmd->add_option("--ncd-level", f.ncd_level, "NCD compressor level (default: backend default)");
  cmd->add_option("--threads", f.threads, "Worker threads (env LFTC_THREADS)")->capture_default_str();
  cmd->add_option("--seed", s.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", f.out, "Write the JSON report here instead of stdout");
  cmd->add_option("--summary", f.summary, "Write a CSV summary here");
  cmd->add_option("--audit", f.audit, "Write per-prediction JSON lines here");
  cmd->add_option("--bundle", f.bundle, "Compressor-list cache file (read if valid, else written)");
}

lftc::HeaderMode parse_header(const std::string& v) {
  if (v == "auto") return lftc::HeaderMode::automatic;
  if (v == "yes" || v == "true") return lftc::HeaderMode::present;
  if (v == "no" || v == "false") return lftc::HeaderMode::absent;
  throw lftc::ValidationError("--header must be auto, yes or no");
}

lftc::Backend make_backend(const std::string& name, int level) {
  lftc::Backend b;
  b.kind = lftc::parse_backend_kind(name);
  b.level = level == 0 ? lftc::Backend::default_level(b.kind) : level;
  b.adaptive_level = b.kind == lftc::BackendKind::zstd;
  return b;
}

// Turns parsed strings into the typed spec.
void finish(Flags& f, lftc::Command command) {
  auto& s = f.spec;
  s.command = command;
  if (f.delimiter.size() != 1) throw lftc::ValidationError("--delimiter must be a single character");
  s.csv.delimiter = f.delimiter[0];
  s.csv.header = parse_header(f.header);
  auto& p = s.pipeline;
  p.variant = lftc::parse_variant(f.variant);
  p.mcc_backend = make_backend(f.backend, f.level);
  if (f.no_adaptive) p.mcc_backend.adaptive_level = false;
  p.dictionary_mode = lftc::parse_dictionary_mode(f.dictionary_mode);
  p.aggregate = lftc::parse_aggregate(f.aggregate);
  p.knn.k = f.k;
  p.knn.backend = make_backend(f.ncd_backend, f.ncd_level);
  p.threads = f.threads;
  if (!f.out.empty()) s.out = f.out;
  if (!f.summary.empty()) s.summary = f.summary;
  if (!f.audit.empty()) s.audit = f.audit;
  if (!f.bundle.empty()) s.bundle = f.bundle;
  s.validate();
}

void print_json(const lftc::RunSpec& spec, const nlohmann::json& doc) {
  if (!spec.out) std::cout << doc.dump(2) << '\n';
}

void describe(const lftc::EvalReport& r) {
  std::fprintf(stderr, "%s %s: accuracy %.4f (%zu/%zu)", r.dataset.c_str(), r.variant.c_str(), r.accuracy, r.correct,
               r.samples);
  if (r.ci95) std::fprintf(stderr, " ± %.4f", r.ci95->half_width);
  std::fprintf(stderr, ", %.3f s, %zu NCD calls, %zu errors\n", r.timings.total_seconds, r.ncd_calls, r.errors);
}

int run_synth(const SynthFlags& f) {
  lftc::synthetic::MotifSpec ms;
  ms.classes = f.classes;
  const lftc::synthetic::MotifGenerator gen(f.seed, ms);
  std::filesystem::create_directories(f.out_dir);
  lftc::write_csv(gen.training_corpus(f.per_class), f.out_dir / "train.csv");
  lftc::write_csv(gen.query_corpus(f.queries), f.out_dir / "test.csv");
  std::fprintf(stderr, "wrote %s/{train,test}.csv\n", f.out_dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compression-based text classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lftc 0.1.0");

  Flags eval_f, fewshot_f, compare_f, sweep_f;
  SynthFlags synth_f;

  auto* eval = app.add_subcommand("eval", "Evaluate one configuration");
  add_common(eval, eval_f);

  auto* fewshot = app.add_subcommand("fewshot", "Repeated few-shot trials with a 95% interval");
  add_common(fewshot, fewshot_f);
  fewshot->add_option("--shots", fewshot_f.spec.shots, "Training samples per class")->capture_default_str();
  fewshot->add_option("--trials", fewshot_f.spec.trials, "Number of seeded draws")->capture_default_str();

  auto* compare = app.add_subcommand("compare", "Time lftc against baseline-ncd on the same split");
  add_common(compare, compare_f);

  auto* sweep = app.add_subcommand("sweep", "One evaluation per grid point");
  add_common(sweep, sweep_f);
  sweep->add_option("--step-sizes", sweep_f.spec.sweep_step_sizes, "Step sizes to try")->delimiter(',');
  sweep->add_option("--levels", sweep_f.spec.sweep_levels, "Dictionary compressor levels to try")->delimiter(',');
  sweep->add_option("--caps", sweep_f.spec.sweep_caps, "Compressor caps to try")->delimiter(',');

  auto* synth = app.add_subcommand("synth", "Write the seeded synthetic train/test corpus");
  synth->add_option("--out-dir", synth_f.out_dir, "Output directory")->capture_default_str();
  synth->add_option("--per-class", synth_f.per_class, "Training documents per class")->capture_default_str();
  synth->add_option("--queries", synth_f.queries, "Test documents")->capture_default_str();
  synth->add_option("--classes", synth_f.classes, "Number of classes")->capture_default_str();
  synth->add_option("--seed", synth_f.seed, "Random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*synth) return run_synth(synth_f);
    if (*eval) {
      finish(eval_f, lftc::Command::eval);
      const auto r = lftc::run_eval(eval_f.spec);
      print_json(eval_f.spec, r);
      describe(r);
    } else if (*fewshot) {
      finish(fewshot_f, lftc::Command::fewshot);
      const auto r = lftc::run_fewshot(fewshot_f.spec);
      print_json(fewshot_f.spec, r);
      describe(r);
    } else if (*compare) {
      finish(compare_f, lftc::Command::compare);
      const auto c = lftc::run_compare(compare_f.spec);
      print_json(compare_f.spec, {{"lftc", c.lftc}, {"baseline", c.baseline}, {"speed_ratio", c.speed_ratio}});
      describe(c.lftc);
      describe(c.baseline);
      std::fprintf(stderr, "speed ratio (baseline / lftc): %.2f\n", c.speed_ratio);
    } else if (*sweep) {
      finish(sweep_f, lftc::Command::sweep);
      const auto reports = lftc::run_sweep(sweep_f.spec);
      if (!sweep_f.spec.out && !sweep_f.spec.summary) std::cout << lftc::summary_csv(reports);
      for (const auto& r : reports) describe(r);
    }
  } catch (const lftc::ValidationError& e) {
    std::fprintf(stderr, "lftc: error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lftc: failure: %s\n", e.what());
    return 3;
  }
  return 0;
}
