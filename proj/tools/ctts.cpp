// ctts: evaluate extracted clinical timelines against reference timelines and
// run time-to-onset analyses over exposure-defined cohorts.

#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "ctts/app/commands.hpp"

// Best effort: the run already reported its errors on stderr.
static void write_log(const ctts::app::Context& ctx) {
  try {
    std::string lines;
    for (const auto& e : ctx.log.entries()) lines += e.dump() + '\n';
    ctts::app::write_file(ctx.out_dir / "log.jsonl", lines);
  } catch (const std::exception&) {
  }
}

int main(int argc, char** argv) {
  CLI::App app{"ctts - clinical textual time series evaluation and time-to-onset modelling"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", provider;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  unsigned threads = 0;
  bool svg = false, quiet = false;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed, "64-bit random seed (overrides config)");
  app.add_option("--threads", threads, "worker threads; 1 forces serial execution");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--provider", provider, "distance provider: lexical | embedding:<path>");
  app.add_option("--threshold", threshold, "cosine/lexical distance threshold for matching");
  app.add_flag("--svg", svg, "also write static SVG charts");
  app.add_flag("--quiet", quiet, "do not echo the log to stderr");

  std::string corpus_dir;
  auto* filter = app.add_subcommand("filter", "body extraction, case-report regexes and GLP-1RA lexicon matching");
  filter->add_option("corpus_dir", corpus_dir, "directory of plain-text documents")->required();

  std::string stats_corpus;
  auto* stats = app.add_subcommand("stats", "temporal statistics of a timeline corpus");
  stats->add_option("corpus", stats_corpus, "TSV directory or JSON-lines corpus")->required();

  std::string pred, ref, label = "model";
  auto* evaluate = app.add_subcommand("evaluate", "align predicted to reference timelines and score them");
  evaluate->add_option("--pred", pred, "predicted timelines")->required();
  evaluate->add_option("--ref", ref, "reference timelines")->required();

  auto* sweep = app.add_subcommand("sweep", "threshold sensitivity sweep");
  sweep->add_option("--pred", pred, "predicted timelines")->required();
  sweep->add_option("--ref", ref, "reference timelines")->required();
  sweep->add_option("--label", label, "model/annotator label used in file names")->capture_default_str();

  std::string cases, pool;
  auto* cohort = app.add_subcommand("cohort", "build treatment/comparison cohorts and survival records");
  cohort->add_option("--cases", cases, "case records (JSON lines)")->required();
  cohort->add_option("--pool", pool, "comparison sampling pool (JSON lines)");

  std::vector<std::string> records;
  auto* survival = app.add_subcommand("survival", "Kaplan-Meier, Cox model, adjusted curves and bootstrap bands");
  survival->add_option("--records", records, "survival record CSV(s), one per outcome");
  survival->add_option("--cases", cases, "case records (JSON lines); builds the cohort first");
  survival->add_option("--pool", pool, "comparison sampling pool (JSON lines)");

  CLI11_PARSE(app, argc, argv);

  ctts::app::Context ctx{{}, out_dir, ctts::app::Log(quiet ? nullptr : &std::cerr), svg};
  try {
    if (!config_path.empty()) ctx.config = ctts::RunConfig::load(config_path);
    if (seed) ctx.config.seed = *seed;
    if (threshold) ctx.config.threshold = *threshold;
    if (!provider.empty()) ctx.config.provider = provider;
    if (threads > 0) ctx.config.threads = threads;
    ctx.config.validate();

    if (*filter) {
      ctts::app::cmd_filter(corpus_dir, ctx);
    } else if (*stats) {
      ctts::app::cmd_stats(stats_corpus, ctx);
    } else if (*evaluate) {
      ctts::app::cmd_evaluate(pred, ref, ctx);
    } else if (*sweep) {
      ctts::app::cmd_sweep(pred, ref, label, ctx);
    } else if (*cohort) {
      ctts::app::cmd_cohort(cases, pool.empty() ? std::nullopt : std::optional<std::filesystem::path>(pool), ctx);
    } else if (*survival) {
      ctts::app::SurvivalInputs in;
      for (const auto& r : records) in.record_files.emplace_back(r);
      if (!cases.empty()) in.cases = cases;
      if (!pool.empty()) in.pool = pool;
      if (in.record_files.empty() && !in.cases) {
        std::cerr << "survival: pass --records or --cases\n";
        return 2;
      }
      ctts::app::cmd_survival(in, ctx);
    }
  } catch (const std::exception& e) {
    ctx.log.error("ctts", e.what());
  }
  write_log(ctx);
  return ctx.log.error_count() == 0 ? 0 : 1;
}
