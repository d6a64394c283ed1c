#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "ctts/case_filter.hpp"
#include "ctts/cohort.hpp"
#include "ctts/detail/text.hpp"
#include "ctts/error.hpp"
#include "ctts/survival.hpp"
#include "ctts/temporal_metrics.hpp"

namespace ctts {

inline constexpr std::uint64_t kDefaultSeed = 20240521;

struct SweepGridSpec {
  double start = 0.01;
  double stop = 0.50;
  double step = 0.01;

  // Values are rounded to 12 decimals so 0.1 is the double nearest 0.1.
  std::vector<double> values() const {
    if (!(step > 0.0) || !(start >= 0.0) || stop < start) throw Error("config", "invalid sweep grid");
    std::vector<double> g;
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long k = 0; k <= n; ++k) g.push_back(std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12);
    return g;
  }
};

struct RunConfig {
  std::string provider = "lexical";  // "lexical" | "embedding:<path>"
  double threshold = kDefaultMatchThreshold;
  SweepGridSpec sweep;
  std::string glp_lexicon;       // empty: built-in
  std::string diabetes_lexicon;  // empty: built-in
  std::map<std::string, std::string> outcome_lexicons = {
      {"cardiovascular", ""}, {"kidney", ""}, {"respiratory", ""}};  // empty path: built-in
  double exposure_window_hours = kDefaultExposureWindowHours;
  double control_ratio = kDefaultControlRatio;
  std::size_t bootstrap_n = 500;
  double confidence_level = 0.95;
  std::uint64_t seed = kDefaultSeed;
  double aultc_cap_hours = kDefaultAultcCapHours;
  BaselinePolicy baseline_policy = BaselinePolicy::Clamp;
  TieMethod ties = TieMethod::Efron;
  unsigned threads = 1;  // execution only; excluded from the digest

  nlohmann::json to_json() const {
    return {{"provider", provider},
            {"threshold", threshold},
            {"sweep", {{"start", sweep.start}, {"stop", sweep.stop}, {"step", sweep.step}}},
            {"glp_lexicon", glp_lexicon},
            {"diabetes_lexicon", diabetes_lexicon},
            {"outcome_lexicons", outcome_lexicons},
            {"exposure_window_hours", exposure_window_hours},
            {"control_ratio", control_ratio},
            {"bootstrap_n", bootstrap_n},
            {"confidence_level", confidence_level},
            {"seed", seed},
            {"aultc_cap_hours", aultc_cap_hours},
            {"baseline_policy", policy_label(baseline_policy)},
            {"ties", tie_label(ties)}};
  }

  std::string digest() const { return detail::hex64(detail::fnv1a64(to_json().dump())); }

  void validate() const {
    if (!(threshold >= 0.0)) throw Error("config", "threshold must be >= 0");
    (void)sweep.values();
    if (!(exposure_window_hours > 0.0)) throw Error("config", "exposure_window_hours must be > 0");
    if (!(control_ratio > 0.0)) throw Error("config", "control_ratio must be > 0");
    if (bootstrap_n < 1) throw Error("config", "bootstrap_n must be >= 1");
    if (!(confidence_level > 0.0 && confidence_level < 1.0)) throw Error("config", "confidence_level must be in (0, 1)");
    if (!(aultc_cap_hours > 0.0)) throw Error("config", "aultc_cap_hours must be > 0");
    if (provider != "lexical" && provider.rfind("embedding:", 0) != 0)
      throw Error("config", "provider must be 'lexical' or 'embedding:<path>'");
    if (outcome_lexicons.empty()) throw Error("config", "at least one outcome lexicon is required");
  }

  // Keys absent from `j` keep their defaults; unknown keys are rejected.
  static RunConfig from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known = {
        "provider",      "threshold",       "sweep",     "glp_lexicon", "diabetes_lexicon", "outcome_lexicons",
        "exposure_window_hours", "control_ratio", "bootstrap_n", "confidence_level", "seed", "aultc_cap_hours",
        "baseline_policy", "ties",          "threads"};
    if (!j.is_object()) throw Error("config", "config must be a JSON object");
    for (const auto& [k, v] : j.items())
      if (std::find(known.begin(), known.end(), k) == known.end()) throw Error("config", "unknown key '" + k + "'");
    RunConfig c;
    try {
      c.provider = j.value("provider", c.provider);
      c.threshold = j.value("threshold", c.threshold);
      if (auto s = j.find("sweep"); s != j.end()) {
        c.sweep.start = s->value("start", c.sweep.start);
        c.sweep.stop = s->value("stop", c.sweep.stop);
        c.sweep.step = s->value("step", c.sweep.step);
      }
      c.glp_lexicon = j.value("glp_lexicon", c.glp_lexicon);
      c.diabetes_lexicon = j.value("diabetes_lexicon", c.diabetes_lexicon);
      if (auto o = j.find("outcome_lexicons"); o != j.end())
        c.outcome_lexicons = o->get<std::map<std::string, std::string>>();
      c.exposure_window_hours = j.value("exposure_window_hours", c.exposure_window_hours);
      c.control_ratio = j.value("control_ratio", c.control_ratio);
      c.bootstrap_n = j.value("bootstrap_n", c.bootstrap_n);
      c.confidence_level = j.value("confidence_level", c.confidence_level);
      c.seed = j.value("seed", c.seed);
      c.aultc_cap_hours = j.value("aultc_cap_hours", c.aultc_cap_hours);
      c.threads = j.value("threads", c.threads);
      const auto policy = j.value("baseline_policy", std::string(policy_label(c.baseline_policy)));
      if (policy == "clamp")
        c.baseline_policy = BaselinePolicy::Clamp;
      else if (policy == "exclude")
        c.baseline_policy = BaselinePolicy::Exclude;
      else
        throw Error("config", "baseline_policy must be 'clamp' or 'exclude'");
      const auto ties = j.value("ties", std::string(tie_label(c.ties)));
      if (ties == "efron")
        c.ties = TieMethod::Efron;
      else if (ties == "breslow")
        c.ties = TieMethod::Breslow;
      else
        throw Error("config", "ties must be 'efron' or 'breslow'");
    } catch (const nlohmann::json::exception& e) {
      throw Error("config", std::string("bad value: ") + e.what());
    }
    c.validate();
    return c;
  }

  static RunConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("config", "cannot open " + path);
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error("config", path + " is not valid JSON: " + e.what());
    }
  }
};

}  // namespace ctts
