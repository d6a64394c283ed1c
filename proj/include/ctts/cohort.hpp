#pragma once

// Exposure classification, treatment/comparison cohort assembly and
// keyword-based outcome ascertainment over case timelines.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "ctts/case_filter.hpp"
#include "ctts/error.hpp"
#include "ctts/survival_record.hpp"
#include "ctts/timeline.hpp"

namespace ctts {

inline constexpr double kDefaultExposureWindowHours = 72.0;
inline constexpr double kDefaultControlRatio = 5.0;

struct CaseRecord {
  CaseMetadata metadata;
  Timeline timeline;

  const std::string& case_id() const { return timeline.case_id; }
};

inline CaseRecord make_case_record(CaseMetadata meta, Timeline tl) {
  if (meta.case_id.empty()) meta.case_id = tl.case_id;
  if (meta.case_id != tl.case_id)
    throw Error("cohort", "case_id mismatch between metadata '" + meta.case_id + "' and timeline '" + tl.case_id + "'");
  return {std::move(meta), std::move(tl)};
}

// JSON-lines records combining timeline and metadata fields:
// {"case_id", "events": [{"t", "e"}], "age_years", "sex", "diagnoses"}.
inline std::vector<CaseRecord> read_case_records(std::istream& in) {
  std::vector<CaseRecord> out;
  std::unordered_set<std::string> seen;
  for_each_json_line(in, "cohort", [&](const nlohmann::json& j, std::size_t lineno) {
    auto tl = timeline_from_json(j, lineno);
    auto meta = metadata_from_json(j, lineno);
    if (!seen.insert(tl.case_id).second) throw ParseError("cohort", lineno, "duplicate case_id " + tl.case_id);
    out.push_back(make_case_record(std::move(meta), std::move(tl)));
  });
  return out;
}

inline nlohmann::json case_record_to_json(const CaseRecord& c) {
  auto j = timeline_to_json(c.timeline);
  j["age_years"] = c.metadata.age_years ? nlohmann::json(*c.metadata.age_years) : nlohmann::json(nullptr);
  j["sex"] = c.metadata.sex.category == SexCategory::Other && !c.metadata.sex.other_text.empty()
                 ? c.metadata.sex.other_text
                 : std::string(sex_label(c.metadata.sex.category));
  j["diagnoses"] = c.metadata.diagnoses;
  return j;
}

enum class ExposureClass { Treated, LateInitiator, Unexposed };

inline std::string_view exposure_label(ExposureClass e) {
  switch (e) {
    case ExposureClass::Treated: return "treated";
    case ExposureClass::LateInitiator: return "late_initiator";
    case ExposureClass::Unexposed: return "unexposed";
  }
  return "unexposed";
}

// Earliest time of an event whose text matches the lexicon.
inline std::optional<double> earliest_match(const Timeline& tl, const Lexicon& lex) {
  std::optional<double> best;
  for (const auto& e : tl.events)
    if ((!best || e.time_hours < *best) && lexicon_matches(e.text, lex)) best = e.time_hours;
  return best;
}

inline ExposureClass classify_exposure(const CaseRecord& c, const Lexicon& glp,
                                       double window_hours = kDefaultExposureWindowHours) {
  if (!(window_hours > 0.0)) throw Error("cohort", "exposure window must be > 0");
  auto t = earliest_match(c.timeline, glp);
  if (!t) return ExposureClass::Unexposed;
  return *t <= window_hours ? ExposureClass::Treated : ExposureClass::LateInitiator;
}

struct CohortMember {
  std::string case_id;
  ExposureClass exposure;
  bool exposed;        // baseline indicator used in modelling
  std::string source;  // "cases" or "pool"
};

struct Cohort {
  std::vector<CohortMember> treated;
  std::vector<CohortMember> comparison;
  std::uint64_t seed = 0;
  double ratio = kDefaultControlRatio;
  std::size_t target_comparison = 0;
  std::size_t sampled_from_pool = 0;
  std::vector<std::string> warnings;
};

struct CohortOptions {
  double window_hours = kDefaultExposureWindowHours;
  double ratio = kDefaultControlRatio;
  std::uint64_t seed = 0;
};

// treated    = diabetic and first exposure within the window
// comparison = diabetic unexposed + diabetic late initiators (exposed = false),
//              topped up by uniform sampling without replacement from the pool
//              until round(ratio * |treated|) or the pool runs out.
// Pool candidates exclude treated ids, ids already in the comparison set and
// pool cases whose own timeline shows in-window exposure.
inline Cohort build_cohort(std::span<const CaseRecord> cases, const Lexicon& glp, const Lexicon& diabetes,
                           std::span<const CaseRecord> pool, const CohortOptions& opts = {}) {
  if (!(opts.ratio > 0.0)) throw Error("cohort", "control ratio must be > 0");
  Cohort c;
  c.seed = opts.seed;
  c.ratio = opts.ratio;
  std::set<std::string> taken;
  for (const auto& rec : cases) {
    if (!has_diabetes(rec.metadata.diagnoses, diabetes)) continue;
    const auto cls = classify_exposure(rec, glp, opts.window_hours);
    if (cls == ExposureClass::Treated)
      c.treated.push_back({rec.case_id(), cls, true, "cases"});
    else
      c.comparison.push_back({rec.case_id(), cls, false, "cases"});
    taken.insert(rec.case_id());
  }
  if (c.treated.empty()) throw Error("cohort", "no treated cases");

  const double target = std::round(opts.ratio * static_cast<double>(c.treated.size()));
  c.target_comparison = static_cast<std::size_t>(target);
  if (c.comparison.size() < c.target_comparison) {
    std::vector<const CaseRecord*> candidates;
    for (const auto& rec : pool) {
      if (taken.count(rec.case_id())) continue;
      if (classify_exposure(rec, glp, opts.window_hours) == ExposureClass::Treated) continue;
      candidates.push_back(&rec);
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const CaseRecord* a, const CaseRecord* b) { return a->case_id() < b->case_id(); });
    candidates.erase(std::unique(candidates.begin(), candidates.end(),
                                 [](const CaseRecord* a, const CaseRecord* b) { return a->case_id() == b->case_id(); }),
                     candidates.end());
    std::mt19937_64 rng(opts.seed);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    const std::size_t need = c.target_comparison - c.comparison.size();
    const std::size_t take = std::min(need, candidates.size());
    for (std::size_t i = 0; i < take; ++i) {
      const auto* rec = candidates[i];
      c.comparison.push_back({rec->case_id(), classify_exposure(*rec, glp, opts.window_hours), false, "pool"});
    }
    c.sampled_from_pool = take;
    if (take < need)
      c.warnings.push_back("comparison pool exhausted: " + std::to_string(c.comparison.size()) + " of " +
                           std::to_string(c.target_comparison) + " comparison cases available");
  }
  return c;
}

enum class BaselinePolicy { Clamp, Exclude };

inline std::string_view policy_label(BaselinePolicy p) { return p == BaselinePolicy::Clamp ? "clamp" : "exclude"; }

struct OutcomeAscertainment {
  bool event = false;
  double time_hours = 0.0;
  bool baseline_prevalent = false;
  bool excluded = false;  // baseline-prevalent under the Exclude policy
};

// Earliest matching event is the outcome time; without a match the case is
// censored at its last timestamp (never before the reference point).
inline OutcomeAscertainment ascertain_outcome(const CaseRecord& c, const Lexicon& outcome,
                                              BaselinePolicy policy = BaselinePolicy::Clamp) {
  const auto& tl = c.timeline;
  if (tl.empty()) throw Error("cohort", "no follow-up for case " + c.case_id());
  OutcomeAscertainment o;
  if (auto t = earliest_match(tl, outcome)) {
    o.event = true;
    o.time_hours = *t;
    if (*t <= 0.0) {
      o.baseline_prevalent = true;
      o.time_hours = 0.0;
      if (policy == BaselinePolicy::Exclude) o.excluded = true;
    }
    return o;
  }
  double last = -std::numeric_limits<double>::infinity();
  for (const auto& e : tl.events) last = std::max(last, e.time_hours);
  o.time_hours = std::max(last, 0.0);
  return o;
}

struct SurvivalTable {
  std::vector<SurvivalRecord> records;  // sorted by case_id
  std::vector<std::string> excluded;    // dropped under BaselinePolicy::Exclude
  std::vector<std::string> age_imputed;
  double imputed_age = 0.0;
};

// Durations in months (hours / 730.5). Missing ages take the mean of the
// observed cohort ages; missing sex is already NotSpecified.
inline SurvivalTable to_survival_records(const Cohort& cohort, std::span<const CaseRecord> cases,
                                         std::span<const CaseRecord> pool, const Lexicon& outcome,
                                         BaselinePolicy policy = BaselinePolicy::Clamp) {
  std::map<std::string, const CaseRecord*> lookup;
  for (const auto& r : pool) lookup.emplace(r.case_id(), &r);
  for (const auto& r : cases) lookup[r.case_id()] = &r;

  std::vector<std::pair<const CohortMember*, const CaseRecord*>> members;
  for (const auto* group : {&cohort.treated, &cohort.comparison})
    for (const auto& m : *group) {
      auto it = lookup.find(m.case_id);
      if (it == lookup.end()) throw Error("cohort", "cohort member " + m.case_id + " has no case record");
      members.emplace_back(&m, it->second);
    }

  double age_sum = 0.0;
  std::size_t age_n = 0;
  for (const auto& [m, rec] : members)
    if (rec->metadata.age_years) age_sum += *rec->metadata.age_years, ++age_n;

  SurvivalTable table;
  table.imputed_age = age_n ? age_sum / static_cast<double>(age_n) : 0.0;
  for (const auto& [m, rec] : members) {
    const auto o = ascertain_outcome(*rec, outcome, policy);
    if (o.excluded) {
      table.excluded.push_back(m->case_id);
      continue;
    }
    SurvivalRecord r;
    r.case_id = m->case_id;
    r.duration_months = o.time_hours / kHoursPerMonth;
    if (!(r.duration_months >= 0.0)) throw Error("cohort", "negative duration for " + r.case_id);
    r.event = o.event;
    r.exposed = m->exposed;
    r.baseline_prevalent = o.baseline_prevalent;
    r.sex = rec->metadata.sex.category;
    if (rec->metadata.age_years) {
      r.age_years = *rec->metadata.age_years;
    } else {
      r.age_years = table.imputed_age;
      r.age_imputed = true;
      table.age_imputed.push_back(r.case_id);
    }
    table.records.push_back(std::move(r));
  }
  std::sort(table.records.begin(), table.records.end(),
            [](const SurvivalRecord& a, const SurvivalRecord& b) { return a.case_id < b.case_id; });
  std::sort(table.excluded.begin(), table.excluded.end());
  std::sort(table.age_imputed.begin(), table.age_imputed.end());
  return table;
}

inline nlohmann::json cohort_to_json(const Cohort& c) {
  auto members = [](const std::vector<CohortMember>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& m : v)
      a.push_back({{"case_id", m.case_id}, {"exposure_class", exposure_label(m.exposure)}, {"exposed", m.exposed},
                   {"source", m.source}});
    return a;
  };
  return {{"treated", members(c.treated)},
          {"comparison", members(c.comparison)},
          {"seed", c.seed},
          {"ratio", c.ratio},
          {"target_comparison", c.target_comparison},
          {"sampled_from_pool", c.sampled_from_pool},
          {"warnings", c.warnings}};
}

}  // namespace ctts
