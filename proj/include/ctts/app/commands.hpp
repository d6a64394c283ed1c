#pragma once

// Batch commands behind the `ctts` executable. Each command reads its inputs,
// writes its artifacts under Context::out_dir and records warnings / per-item
// errors in Context::log. Fatal problems throw ctts::Error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ctts/alignment.hpp"
#include "ctts/case_filter.hpp"
#include "ctts/cohort.hpp"
#include "ctts/config.hpp"
#include "ctts/corpus_stats.hpp"
#include "ctts/detail/parallel.hpp"
#include "ctts/detail/text.hpp"
#include "ctts/error.hpp"
#include "ctts/similarity.hpp"
#include "ctts/survival.hpp"
#include "ctts/svg.hpp"
#include "ctts/temporal_metrics.hpp"
#include "ctts/timeline.hpp"

namespace ctts::app {

namespace fs = std::filesystem;

// Structured log: one JSON object per line, {"level", "module", "message"}.
class Log {
 public:
  explicit Log(std::ostream* echo = nullptr) : echo_(echo) {}

  void info(const std::string& module, const std::string& msg) { add("info", module, msg); }
  void warn(const std::string& module, const std::string& msg) { add("warning", module, msg); }
  void error(const std::string& module, const std::string& msg) {
    ++errors_;
    add("error", module, msg);
  }

  std::size_t error_count() const { return errors_; }
  const std::vector<nlohmann::json>& entries() const { return entries_; }

  std::size_t count(const std::string& level) const {
    return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(),
                                                  [&](const nlohmann::json& e) { return e["level"] == level; }));
  }

 private:
  void add(const char* level, const std::string& module, const std::string& msg) {
    nlohmann::json e = {{"level", level}, {"module", module}, {"message", msg}};
    if (echo_) *echo_ << e.dump() << '\n';
    entries_.push_back(std::move(e));
  }

  std::ostream* echo_;
  std::vector<nlohmann::json> entries_;
  std::size_t errors_ = 0;
};

struct Context {
  RunConfig config;
  fs::path out_dir = ".";
  Log log;
  bool write_svg = false;
};

// ---------------------------------------------------------------------------
// I/O helpers
// ---------------------------------------------------------------------------

inline std::string provenance_comment(const RunConfig& cfg) {
  return "# ctts config_digest=" + cfg.digest() + " seed=" + std::to_string(cfg.seed) + "\n";
}

inline nlohmann::json provenance(const RunConfig& cfg) {
  return {{"tool", "ctts"}, {"config_digest", cfg.digest()}, {"seed", cfg.seed}, {"config", cfg.to_json()}};
}

inline void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path.string());
  out << content;
  if (!out) throw Error("io", "write failed for " + path.string());
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string opt_num(const std::optional<double>& v) { return v ? detail::format_double(*v) : std::string(); }

inline nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

// Keeps [A-Za-z0-9._-]; everything else becomes '_'.
inline std::string safe_name(std::string_view id) {
  std::string out;
  for (char c : id) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-') ? c : '_';
  return out.empty() ? "_" : out;
}

inline Lexicon load_lexicon_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("case_filter", "cannot open lexicon " + path.string());
  return Lexicon::load(in);
}

inline Lexicon builtin_lexicon(const std::string& name) {
  if (name == "glp1ra" || name == "glp") return default_glp1ra_lexicon();
  if (name == "diabetes") return default_diabetes_lexicon();
  if (name == "kidney") return default_kidney_lexicon();
  if (name == "cardiovascular") return default_cardiovascular_lexicon();
  if (name == "respiratory") return default_respiratory_lexicon();
  throw Error("config", "no built-in lexicon named '" + name + "'; supply a path");
}

inline Lexicon resolve_lexicon(const std::string& name, const std::string& path) {
  return path.empty() ? builtin_lexicon(name) : load_lexicon_file(path);
}

inline DistanceProvider make_provider(const RunConfig& cfg) {
  if (cfg.provider == "lexical") return DistanceProvider::lexical();
  const std::string path = cfg.provider.substr(std::string("embedding:").size());
  std::ifstream in(path);
  if (!in) throw Error("similarity", "cannot open embedding file " + path);
  return DistanceProvider::embedding(std::make_shared<EmbeddingStore>(load_embeddings(in)));
}

// A directory of per-case TSV files (*.tsv, *.txt; case_id from the header
// comment or the file stem) or a JSON-lines corpus file.
inline std::vector<Timeline> load_timelines(const fs::path& path) {
  std::vector<Timeline> out;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && (entry.path().extension() == ".tsv" || entry.path().extension() == ".txt"))
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::set<std::string> seen;
    for (const auto& f : files) {
      std::ifstream in(f, std::ios::binary);
      Timeline tl;
      try {
        tl = parse_timeline(in, f.stem().string());
      } catch (const ParseError& e) {
        throw Error("timeline", f.filename().string() + ": " + e.what());
      }
      if (!seen.insert(tl.case_id).second) throw Error("timeline", "duplicate case_id " + tl.case_id);
      out.push_back(std::move(tl));
    }
  } else {
    std::ifstream in(path);
    if (!in) throw Error("timeline", "cannot open " + path.string());
    out = read_timeline_corpus(in);
  }
  return out;
}

inline std::vector<CaseRecord> load_case_records(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cohort", "cannot open " + path.string());
  return read_case_records(in);
}

// ---------------------------------------------------------------------------
// filter
// ---------------------------------------------------------------------------

struct FilterRow {
  std::string doc_id;
  bool has_body = false;
  bool is_case_report = false;
  std::vector<std::string> glp_terms;

  bool is_candidate() const { return is_case_report && !glp_terms.empty(); }
};

struct FilterSummary {
  std::vector<FilterRow> rows;
  std::size_t n_errors = 0;

  std::size_t n_candidates() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.is_candidate(); }));
  }
};

// manifest.csv: doc_id,is_case_report,glp_terms (terms ';'-joined); unreadable
// or non-UTF-8 files go to filter_errors.csv and the log.
inline FilterSummary cmd_filter(const fs::path& corpus_dir, Context& ctx) {
  if (!fs::is_directory(corpus_dir)) throw Error("filter", "not a directory: " + corpus_dir.string());
  const auto glp = resolve_lexicon("glp1ra", ctx.config.glp_lexicon);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(corpus_dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  FilterSummary summary;
  std::vector<std::optional<FilterRow>> rows(files.size());
  std::vector<std::string> errors(files.size());
  detail::parallel_for(files.size(), ctx.config.threads, [&](std::size_t i) {
    std::string text;
    try {
      text = read_file(files[i]);
    } catch (const Error& e) {
      errors[i] = e.what();
      return;
    }
    if (!detail::valid_utf8(text)) {
      errors[i] = "not valid UTF-8";
      return;
    }
    FilterRow row;
    row.doc_id = files[i].stem().string();
    try {
      const auto body = extract_body(text);
      row.has_body = true;
      row.is_case_report = detect_case_report(body);
      row.glp_terms = match_lexicon(body, glp).distinct_terms();
    } catch (const Error&) {
      row.has_body = false;
    }
    rows[i] = std::move(row);
  });

  std::string manifest = provenance_comment(ctx.config) + "doc_id,is_case_report,glp_terms\n";
  std::string err_csv = provenance_comment(ctx.config) + "doc_id,error\n";
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto id = files[i].stem().string();
    if (!rows[i]) {
      ++summary.n_errors;
      ctx.log.error("filter", id + ": " + errors[i]);
      err_csv += csv_field(id) + ',' + csv_field(errors[i]) + '\n';
      continue;
    }
    const auto& r = *rows[i];
    if (!r.has_body) ctx.log.warn("filter", id + ": no body section");
    std::string terms;
    for (const auto& t : r.glp_terms) terms += (terms.empty() ? "" : ";") + t;
    manifest += csv_field(id) + ',' + (r.is_case_report ? "1" : "0") + ',' + csv_field(terms) + '\n';
    summary.rows.push_back(r);
  }
  write_file(ctx.out_dir / "manifest.csv", manifest);
  write_file(ctx.out_dir / "filter_errors.csv", err_csv);
  ctx.log.info("filter", std::to_string(summary.rows.size()) + " documents, " + std::to_string(summary.n_candidates()) +
                             " candidates, " + std::to_string(summary.n_errors) + " errors");
  return summary;
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

inline CorpusStats cmd_stats(const fs::path& corpus, Context& ctx) {
  const auto timelines = load_timelines(corpus);
  const auto stats = corpus_stats(timelines);
  auto j = to_json(stats);
  j["provenance"] = provenance(ctx.config);
  write_file(ctx.out_dir / "stats.json", j.dump(2) + "\n");
  std::ostringstream csv;
  csv << provenance_comment(ctx.config);
  write_stats_csv(stats, csv);
  write_file(ctx.out_dir / "stats.csv", csv.str());
  return stats;
}

// ---------------------------------------------------------------------------
// evaluate / sweep
// ---------------------------------------------------------------------------

struct CasePair {
  const Timeline* pred;
  const Timeline* ref;
};

// Pairs cases present on both sides (sorted by case_id); one-sided ids and
// empty references are reported and skipped.
inline std::vector<CasePair> pair_cases(const std::vector<Timeline>& pred, const std::vector<Timeline>& ref,
                                        const std::string& module, Log& log) {
  std::map<std::string, const Timeline*> p, r;
  for (const auto& t : pred) p[t.case_id] = &t;
  for (const auto& t : ref) r[t.case_id] = &t;
  std::vector<CasePair> out;
  for (const auto& [id, tl] : p)
    if (!r.count(id)) log.warn(module, "case " + id + " has no reference timeline; skipped");
  bool overlap = false;
  for (const auto& [id, tl] : r) {
    auto it = p.find(id);
    if (it == p.end()) {
      log.warn(module, "case " + id + " has no predicted timeline; skipped");
      continue;
    }
    overlap = true;
    if (tl->empty()) {
      log.warn(module, "case " + id + ": empty reference timeline; skipped");
      continue;
    }
    out.push_back({it->second, tl});
  }
  if (!overlap) throw Error(module, "no overlapping case_ids between predicted and reference corpora");
  if (out.empty()) throw Error(module, "no case has a non-empty reference timeline");
  return out;
}

struct EvaluateSummary {
  std::vector<std::string> case_ids;
  std::vector<CaseMetrics> metrics;
  double mean_match_rate = 0.0;
  std::optional<double> mean_concordance;
  std::optional<double> mean_aultc;
};

inline EvaluateSummary cmd_evaluate(const fs::path& pred_path, const fs::path& ref_path, Context& ctx) {
  const auto& cfg = ctx.config;
  const auto pred = load_timelines(pred_path);
  const auto ref = load_timelines(ref_path);
  const auto provider = make_provider(cfg);
  const auto pairs = pair_cases(pred, ref, "evaluate", ctx.log);

  std::vector<Alignment> alignments(pairs.size());
  EvaluateSummary s;
  s.metrics.resize(pairs.size());
  detail::parallel_for(pairs.size(), cfg.threads, [&](std::size_t i) {
    alignments[i] = align(*pairs[i].pred, *pairs[i].ref, provider, cfg.threshold);
    s.metrics[i] = metrics_from_alignment(alignments[i], *pairs[i].pred, *pairs[i].ref, cfg.aultc_cap_hours);
  });

  std::string csv = provenance_comment(cfg) + "case_id,n_pred,n_ref,n_matched,match_rate,concordance,aultc\n";
  double mr = 0.0, cs = 0.0, as = 0.0;
  std::size_t cn = 0, an = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& m = s.metrics[i];
    const auto& id = pairs[i].ref->case_id;
    s.case_ids.push_back(id);
    csv += csv_field(id) + ',' + std::to_string(m.n_pred) + ',' + std::to_string(m.n_ref) + ',' +
           std::to_string(m.n_matched) + ',' + detail::format_double(m.match_rate) + ',' + opt_num(m.concordance) + ',' +
           opt_num(m.aultc) + '\n';
    mr += m.match_rate;
    if (m.concordance) cs += *m.concordance, ++cn;
    if (m.aultc) as += *m.aultc, ++an;
    auto aj = alignment_to_json(alignments[i], *pairs[i].pred, *pairs[i].ref);
    aj["provenance"] = {{"config_digest", cfg.digest()}, {"seed", cfg.seed}};
    write_file(ctx.out_dir / "alignments" / (safe_name(id) + ".json"), aj.dump(2) + "\n");
  }
  s.mean_match_rate = mr / static_cast<double>(pairs.size());
  if (cn) s.mean_concordance = cs / static_cast<double>(cn);
  if (an) s.mean_aultc = as / static_cast<double>(an);
  write_file(ctx.out_dir / "metrics.csv", csv);

  nlohmann::json summary = {{"provenance", provenance(cfg)},
                            {"provider", provider.describe()},
                            {"threshold", cfg.threshold},
                            {"aultc_cap_hours", cfg.aultc_cap_hours},
                            {"n_cases", pairs.size()},
                            {"aggregation", "unweighted mean over cases where defined"},
                            {"mean",
                             {{"match_rate", s.mean_match_rate},
                              {"concordance", opt_json(s.mean_concordance)},
                              {"aultc", opt_json(s.mean_aultc)},
                              {"n_concordance", cn},
                              {"n_aultc", an}}}};
  write_file(ctx.out_dir / "metrics_summary.json", summary.dump(2) + "\n");
  return s;
}

struct SweepSummary {
  std::vector<std::string> case_ids;
  std::vector<std::vector<SweepRow>> per_case;
  std::vector<SweepRow> mean;
};

inline std::string sweep_row_csv(const SweepRow& r) {
  return detail::format_double(r.threshold) + ',' + detail::format_double(r.match_rate) + ',' + opt_num(r.concordance) +
         ',' + opt_num(r.aultc);
}

inline SweepSummary cmd_sweep(const fs::path& pred_path, const fs::path& ref_path, const std::string& label, Context& ctx) {
  const auto& cfg = ctx.config;
  const auto pred = load_timelines(pred_path);
  const auto ref = load_timelines(ref_path);
  const auto provider = make_provider(cfg);
  const auto pairs = pair_cases(pred, ref, "sweep", ctx.log);
  const auto grid = cfg.sweep.values();

  SweepSummary s;
  s.per_case.resize(pairs.size());
  detail::parallel_for(pairs.size(), cfg.threads, [&](std::size_t i) {
    s.per_case[i] = threshold_sweep(*pairs[i].pred, *pairs[i].ref, provider, grid, cfg.aultc_cap_hours);
  });
  for (const auto& p : pairs) s.case_ids.push_back(p.ref->case_id);
  s.mean = aggregate_sweeps(s.per_case);

  const std::string base = "sweep_" + safe_name(label);
  std::string cases = provenance_comment(cfg) + "case_id,threshold,match_rate,concordance,aultc\n";
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (const auto& r : s.per_case[i]) cases += csv_field(s.case_ids[i]) + ',' + sweep_row_csv(r) + '\n';
  std::string mean = provenance_comment(cfg) + "threshold,match_rate,concordance,aultc\n";
  std::string lng = provenance_comment(cfg) + "label,threshold,match_rate,metric,value\n";
  for (const auto& r : s.mean) {
    mean += sweep_row_csv(r) + '\n';
    for (const auto& [name, v] : {std::pair{"concordance", r.concordance}, std::pair{"aultc", r.aultc}})
      if (v)
        lng += csv_field(label) + ',' + detail::format_double(r.threshold) + ',' + detail::format_double(r.match_rate) + ',' +
               name + ',' + detail::format_double(*v) + '\n';
  }
  write_file(ctx.out_dir / (base + "_cases.csv"), cases);
  write_file(ctx.out_dir / (base + "_mean.csv"), mean);
  write_file(ctx.out_dir / (base + "_long.csv"), lng);

  if (ctx.write_svg) {
    svg::Chart chart{"Temporal fidelity vs event match rate (" + label + ")", "event match rate", "metric", std::pair{0.0, 1.0},
                     std::pair{0.0, 1.0}, {}};
    svg::Series conc{"concordance", {}, false, true, {}, {}}, au{"AULTC", {}, false, true, {}, {}};
    for (const auto& r : s.mean) {
      if (r.concordance) conc.points.emplace_back(r.match_rate, *r.concordance);
      if (r.aultc) au.points.emplace_back(r.match_rate, *r.aultc);
    }
    chart.series = {conc, au};
    std::ostringstream out;
    svg::render(chart, out);
    write_file(ctx.out_dir / (base + ".svg"), out.str());
  }
  return s;
}

// ---------------------------------------------------------------------------
// cohort / survival
// ---------------------------------------------------------------------------

struct CohortSummary {
  Cohort cohort;
  std::map<std::string, SurvivalTable> tables;  // outcome name -> records
};

inline CohortSummary cmd_cohort(const fs::path& cases_path, const std::optional<fs::path>& pool_path, Context& ctx) {
  const auto& cfg = ctx.config;
  const auto cases = load_case_records(cases_path);
  const auto pool = pool_path ? load_case_records(*pool_path) : std::vector<CaseRecord>{};
  const auto glp = resolve_lexicon("glp1ra", cfg.glp_lexicon);
  const auto diabetes = resolve_lexicon("diabetes", cfg.diabetes_lexicon);

  CohortSummary s;
  s.cohort = build_cohort(cases, glp, diabetes, pool, {cfg.exposure_window_hours, cfg.control_ratio, cfg.seed});
  for (const auto& w : s.cohort.warnings) ctx.log.warn("cohort", w);

  nlohmann::json manifest = cohort_to_json(s.cohort);
  manifest["provenance"] = provenance(cfg);
  manifest["lexicon_digests"] = {{"glp1ra", glp.digest()}, {"diabetes", diabetes.digest()}};
  manifest["outcomes"] = nlohmann::json::object();
  for (const auto& [name, path] : cfg.outcome_lexicons) {
    const auto lex = resolve_lexicon(name, path);
    manifest["lexicon_digests"][name] = lex.digest();
    auto table = to_survival_records(s.cohort, cases, pool, lex, cfg.baseline_policy);
    if (!table.excluded.empty())
      ctx.log.warn("cohort", name + ": " + std::to_string(table.excluded.size()) + " baseline-prevalent cases excluded");
    if (!table.age_imputed.empty())
      ctx.log.warn("cohort", name + ": age imputed for " + std::to_string(table.age_imputed.size()) + " cases");
    std::size_t events = 0, prevalent = 0;
    for (const auto& r : table.records) events += r.event, prevalent += r.baseline_prevalent;
    manifest["outcomes"][name] = {{"n_records", table.records.size()},
                                  {"n_events", events},
                                  {"n_baseline_prevalent", prevalent},
                                  {"excluded", table.excluded},
                                  {"age_imputed", table.age_imputed},
                                  {"imputed_age", table.imputed_age}};
    std::ostringstream csv;
    csv << provenance_comment(cfg);
    write_survival_csv(table.records, csv);
    write_file(ctx.out_dir / ("survival_" + safe_name(name) + ".csv"), csv.str());
    s.tables.emplace(name, std::move(table));
  }
  manifest["baseline_policy"] = policy_label(cfg.baseline_policy);
  write_file(ctx.out_dir / "cohort.json", manifest.dump(2) + "\n");
  return s;
}

struct OutcomeFit {
  std::vector<std::string> covariates;
  CoxModel model;
  std::optional<HazardReport> report;
  std::optional<ProfilePair> profiles;
  std::optional<BootstrapResult> bootstrap;
};

inline std::string curve_csv(const RunConfig& cfg, const StepFunction& s) {
  std::string out = provenance_comment(cfg) + "time_months,survival\n0," + detail::format_double(s.initial_value) + '\n';
  for (std::size_t i = 0; i < s.times.size(); ++i)
    out += detail::format_double(s.times[i]) + ',' + detail::format_double(s.values[i]) + '\n';
  return out;
}

inline std::string banded_curve_csv(const RunConfig& cfg, const StepFunction& s, const Band& band,
                                    const std::vector<double>& grid) {
  std::string out = provenance_comment(cfg) + "time_months,survival,lower,upper\n0,1,1,1\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    out += detail::format_double(grid[i]) + ',' + detail::format_double(s.value_at(grid[i])) + ',' +
           detail::format_double(band.lower.values[i]) + ',' + detail::format_double(band.upper.values[i]) + '\n';
  return out;
}

// Fits one outcome and writes its report and curves. Errors are logged with
// the outcome name and leave the returned fit without a report.
inline std::optional<OutcomeFit> fit_outcome(const std::string& name, const std::vector<SurvivalRecord>& records, Context& ctx) {
  const auto& cfg = ctx.config;
  const std::string module = "survival[" + name + "]";
  const std::string base = safe_name(name);
  try {
    if (records.empty()) throw Error("cox", "no records");
    std::vector<std::string> dropped;
    OutcomeFit fit;
    fit.covariates = identifiable_covariates(records, &dropped);
    for (const auto& d : dropped) ctx.log.warn(module, "covariate '" + d + "' is constant and was dropped");
    if (std::find(fit.covariates.begin(), fit.covariates.end(), "exposed") == fit.covariates.end())
      throw Error("cox", "covariate not identifiable: 'exposed' is constant");

    CoxFitOptions opts;
    opts.ties = cfg.ties;
    fit.model = cox_fit(std::span<const SurvivalRecord>(records), fit.covariates, opts);

    nlohmann::json report = {{"provenance", provenance(cfg)}, {"outcome", name}, {"model", model_to_json(fit.model)},
                             {"dropped_covariates", dropped}};
    std::size_t n_exposed = 0, ev_exposed = 0, ev_unexposed = 0;
    for (const auto& r : records) {
      n_exposed += r.exposed;
      (r.exposed ? ev_exposed : ev_unexposed) += r.event;
    }
    report["groups"] = {{"exposed", {{"n", n_exposed}, {"events", ev_exposed}}},
                        {"unexposed", {{"n", records.size() - n_exposed}, {"events", ev_unexposed}}}};

    std::vector<SurvivalRecord> exposed, unexposed;
    for (const auto& r : records) (r.exposed ? exposed : unexposed).push_back(r);
    write_file(ctx.out_dir / ("km_" + base + "_exposed.csv"), curve_csv(cfg, kaplan_meier(exposed)));
    write_file(ctx.out_dir / ("km_" + base + "_unexposed.csv"), curve_csv(cfg, kaplan_meier(unexposed)));

    if (!fit.model.converged) {
      write_file(ctx.out_dir / ("report_" + base + ".json"), report.dump(2) + "\n");
      ctx.log.error(module, "cox fit did not converge: " + fit.model.message);
      return fit;
    }
    fit.report = hazard_report(fit.model, cfg.confidence_level);
    fit.profiles = reference_profiles(records, fit.covariates);
    BootstrapOptions bopts;
    bopts.n_resamples = cfg.bootstrap_n;
    bopts.level = cfg.confidence_level;
    bopts.seed = cfg.seed;
    bopts.threads = cfg.threads;
    bopts.fit = opts;
    fit.bootstrap = bootstrap_bands(records, fit.covariates, *fit.profiles, bopts);
    if (fit.bootstrap->n_failed > 0)
      ctx.log.warn(module, std::to_string(fit.bootstrap->n_failed) + " of " + std::to_string(cfg.bootstrap_n) +
                               " bootstrap resamples failed to converge and were omitted");

    report["hazard_report"] = report_to_json(*fit.report);
    report["reference_profile"] = {{"mean_age", fit.profiles->mean_age},
                                   {"modal_sex", sex_label(fit.profiles->modal_sex)},
                                   {"exposed", fit.profiles->exposed},
                                   {"unexposed", fit.profiles->unexposed}};
    report["bootstrap"] = {{"n_resamples", fit.bootstrap->n_resamples},
                           {"n_converged", fit.bootstrap->n_converged},
                           {"n_failed", fit.bootstrap->n_failed},
                           {"seed", fit.bootstrap->seed},
                           {"level", fit.bootstrap->level},
                           {"method", "percentile, case-level resampling, profile fixed from full sample"}};
    write_file(ctx.out_dir / ("report_" + base + ".json"), report.dump(2) + "\n");

    const auto s_exp = adjusted_survival(fit.model, fit.profiles->exposed);
    const auto s_unexp = adjusted_survival(fit.model, fit.profiles->unexposed);
    const auto& grid = fit.bootstrap->grid;
    write_file(ctx.out_dir / ("adjusted_" + base + "_exposed.csv"), banded_curve_csv(cfg, s_exp, fit.bootstrap->exposed, grid));
    write_file(ctx.out_dir / ("adjusted_" + base + "_unexposed.csv"),
               banded_curve_csv(cfg, s_unexp, fit.bootstrap->unexposed, grid));

    if (ctx.write_svg) {
      svg::Chart chart{"Adjusted event-free survival: " + name, "months", "survival", std::nullopt, std::pair{0.0, 1.0}, {}};
      for (auto [label, curve, band] : {std::tuple{"exposed", &s_exp, &fit.bootstrap->exposed},
                                        std::tuple{"comparison", &s_unexp, &fit.bootstrap->unexposed}}) {
        svg::Series series{label, {{0.0, 1.0}}, true, false, {1.0}, {1.0}};
        for (std::size_t i = 0; i < grid.size(); ++i) {
          series.points.emplace_back(grid[i], curve->value_at(grid[i]));
          series.band_low.push_back(band->lower.values[i]);
          series.band_high.push_back(band->upper.values[i]);
        }
        chart.series.push_back(std::move(series));
      }
      std::ostringstream out;
      svg::render(chart, out);
      write_file(ctx.out_dir / ("adjusted_" + base + ".svg"), out.str());
    }
    return fit;
  } catch (const Error& e) {
    ctx.log.error(module, e.what());
    return std::nullopt;
  }
}

struct SurvivalSummary {
  std::map<std::string, std::optional<OutcomeFit>> fits;
};

// Either survival record CSVs (outcome name = file stem minus "survival_"),
// or case records from which the cohort is built first.
struct SurvivalInputs {
  std::vector<fs::path> record_files;
  std::optional<fs::path> cases;
  std::optional<fs::path> pool;
};

inline SurvivalSummary cmd_survival(const SurvivalInputs& in, Context& ctx) {
  std::map<std::string, std::vector<SurvivalRecord>> by_outcome;
  if (!in.record_files.empty()) {
    for (const auto& f : in.record_files) {
      std::ifstream is(f);
      if (!is) throw Error("survival", "cannot open " + f.string());
      auto name = f.stem().string();
      if (name.rfind("survival_", 0) == 0) name = name.substr(9);
      by_outcome[name] = read_survival_csv(is);
    }
  } else if (in.cases) {
    auto cohort = cmd_cohort(*in.cases, in.pool, ctx);
    for (auto& [name, table] : cohort.tables) by_outcome[name] = std::move(table.records);
  } else {
    throw Error("survival", "no input: pass survival record CSVs or case records");
  }
  SurvivalSummary s;
  for (const auto& [name, records] : by_outcome) s.fits[name] = fit_outcome(name, records, ctx);
  return s;
}

}  // namespace ctts::app
