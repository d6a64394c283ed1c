#pragma once

#include <algorithm>
#include <map>
#include <ostream>
#include <span>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "ctts/detail/stats.hpp"
#include "ctts/detail/text.hpp"
#include "ctts/error.hpp"
#include "ctts/timeline.hpp"

namespace ctts {

struct CorpusStats {
  std::size_t n_cases = 0;
  std::size_t n_events = 0;
  double length_mean = 0.0;
  std::map<int, double> length_quantiles;         // percentile -> events per case
  double duration_days_mean = 0.0;
  std::map<int, double> duration_days_quantiles;  // percentile -> (max t - min t) / 24
  double shared_timestamp_fraction = 0.0;
  double timestamp_uniqueness_ratio_median = 0.0;
  double negative_time_fraction = 0.0;
};

inline constexpr int kStatsPercentiles[] = {1, 25, 50, 75, 99};

struct CaseTemporalProfile {
  std::size_t n_events = 0;
  std::size_t n_distinct_times = 0;
  std::size_t n_shared = 0;  // events whose time equals at least one other event's
  std::size_t n_negative = 0;
  double duration_days = 0.0;
};

inline CaseTemporalProfile profile_case(const Timeline& tl) {
  CaseTemporalProfile p;
  p.n_events = tl.events.size();
  if (tl.events.empty()) return p;
  std::unordered_map<double, std::size_t> counts;
  double lo = tl.events.front().time_hours, hi = lo;
  for (const auto& e : tl.events) {
    ++counts[e.time_hours];
    lo = std::min(lo, e.time_hours);
    hi = std::max(hi, e.time_hours);
    if (e.time_hours < 0.0) ++p.n_negative;
  }
  p.n_distinct_times = counts.size();
  for (const auto& [t, c] : counts)
    if (c > 1) p.n_shared += c;
  p.duration_days = (hi - lo) / 24.0;
  return p;
}

// Cases with no events count toward n_cases but are excluded from every
// per-case ratio, which is undefined for them.
inline CorpusStats corpus_stats(std::span<const Timeline> corpus) {
  if (corpus.empty()) throw Error("timeline", "no cases");
  CorpusStats s;
  s.n_cases = corpus.size();
  std::vector<double> lengths, durations, shared, uniqueness;
  std::size_t negative = 0;
  for (const auto& tl : corpus) {
    auto p = profile_case(tl);
    lengths.push_back(static_cast<double>(p.n_events));
    s.n_events += p.n_events;
    if (p.n_events == 0) continue;
    const auto n = static_cast<double>(p.n_events);
    durations.push_back(p.duration_days);
    shared.push_back(static_cast<double>(p.n_shared) / n);
    uniqueness.push_back(static_cast<double>(p.n_distinct_times) / n);
    negative += p.n_negative;
  }
  if (s.n_events == 0) throw Error("timeline", "no events in corpus");
  std::sort(lengths.begin(), lengths.end());
  std::sort(durations.begin(), durations.end());
  std::sort(uniqueness.begin(), uniqueness.end());
  s.length_mean = detail::mean(lengths);
  s.duration_days_mean = detail::mean(durations);
  for (int pct : kStatsPercentiles) {
    s.length_quantiles[pct] = detail::quantile_sorted(lengths, pct / 100.0);
    s.duration_days_quantiles[pct] = detail::quantile_sorted(durations, pct / 100.0);
  }
  s.shared_timestamp_fraction = detail::mean(shared);
  s.timestamp_uniqueness_ratio_median = detail::quantile_sorted(uniqueness, 0.5);
  s.negative_time_fraction = static_cast<double>(negative) / static_cast<double>(s.n_events);
  return s;
}

inline nlohmann::json to_json(const CorpusStats& s) {
  nlohmann::json j;
  j["n_cases"] = s.n_cases;
  j["n_events"] = s.n_events;
  j["length_mean"] = s.length_mean;
  j["duration_days_mean"] = s.duration_days_mean;
  for (const auto& [p, v] : s.length_quantiles) j["length_p" + std::to_string(p)] = v;
  for (const auto& [p, v] : s.duration_days_quantiles) j["duration_days_p" + std::to_string(p)] = v;
  j["shared_timestamp_fraction"] = s.shared_timestamp_fraction;
  j["timestamp_uniqueness_ratio_median"] = s.timestamp_uniqueness_ratio_median;
  j["negative_time_fraction"] = s.negative_time_fraction;
  return j;
}

// Two-column CSV: statistic,value (same keys as the JSON form).
inline void write_stats_csv(const CorpusStats& s, std::ostream& out) {
  out << "statistic,value\n";
  const auto j = to_json(s);
  for (const auto& [k, v] : j.items()) {
    out << k << ',';
    if (v.is_number_integer() || v.is_number_unsigned())
      out << v.get<long long>();
    else
      out << detail::format_double(v.get<double>());
    out << '\n';
  }
}

}  // namespace ctts
