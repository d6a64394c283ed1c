#pragma once

// Temporal fidelity over matched events: concordance of ordering, absolute
// timestamp discrepancies and the area under their log-time CDF (AULTC).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ctts/alignment.hpp"
#include "ctts/error.hpp"
#include "ctts/timeline.hpp"

namespace ctts {

inline constexpr double kDefaultAultcCapHours = 8766.0;

struct TimePair {
  double ref;
  double pred;
};

inline std::vector<TimePair> matched_times(const Alignment& a, const Timeline& pred, const Timeline& ref) {
  std::vector<TimePair> out;
  out.reserve(a.pairs.size());
  for (const auto& p : a.pairs) out.push_back({ref.events.at(p.ref).time_hours, pred.events.at(p.pred).time_hours});
  return out;
}

struct ConcordanceCounts {
  std::uint64_t concordant = 0;
  std::uint64_t pred_tied = 0;
  std::uint64_t comparable = 0;

  // (concordant + 0.5 * tied) / comparable
  double value() const {
    return (static_cast<double>(2 * concordant + pred_tied) / 2.0) / static_cast<double>(comparable);
  }
};

// O(k log k) counting: sweep by reference time and query a Fenwick tree over
// predicted-time ranks. Pairs tied in reference time are not comparable.
inline ConcordanceCounts concordance_counts(std::span<const TimePair> pts) {
  ConcordanceCounts c;
  const std::size_t k = pts.size();
  if (k < 2) return c;
  std::vector<double> pred_sorted;
  pred_sorted.reserve(k);
  for (const auto& p : pts) pred_sorted.push_back(p.pred);
  std::sort(pred_sorted.begin(), pred_sorted.end());
  pred_sorted.erase(std::unique(pred_sorted.begin(), pred_sorted.end()), pred_sorted.end());
  auto rank = [&](double v) {
    return static_cast<std::size_t>(std::lower_bound(pred_sorted.begin(), pred_sorted.end(), v) - pred_sorted.begin()) + 1;
  };

  std::vector<std::uint64_t> tree(pred_sorted.size() + 1, 0);
  auto add = [&](std::size_t i) {
    for (; i < tree.size(); i += i & (~i + 1)) ++tree[i];
  };
  auto prefix = [&](std::size_t i) {
    std::uint64_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree[i];
    return s;
  };

  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a].ref < pts[b].ref; });

  std::uint64_t inserted = 0;
  for (std::size_t g = 0; g < k;) {
    std::size_t end = g;
    while (end < k && pts[order[end]].ref == pts[order[g]].ref) ++end;
    // every earlier-inserted item has strictly smaller reference time
    for (std::size_t i = g; i < end; ++i) {
      const auto r = rank(pts[order[i]].pred);
      const auto below = prefix(r - 1);
      const auto at = prefix(r) - below;
      c.concordant += below;
      c.pred_tied += at;
      c.comparable += inserted;
    }
    for (std::size_t i = g; i < end; ++i) add(rank(pts[order[i]].pred));
    inserted += end - g;
    g = end;
  }
  return c;
}

inline std::optional<double> try_concordance(std::span<const TimePair> pts) {
  if (pts.size() < 2) return std::nullopt;
  auto c = concordance_counts(pts);
  if (c.comparable == 0) return std::nullopt;
  return c.value();
}

inline double concordance(const Alignment& a, const Timeline& pred, const Timeline& ref) {
  const auto pts = matched_times(a, pred, ref);
  if (pts.size() < 2) throw Error("temporal_metrics", "concordance undefined: fewer than 2 matched pairs");
  auto c = try_concordance(pts);
  if (!c) throw Error("temporal_metrics", "concordance undefined: all reference times tied");
  return *c;
}

// |t_pred - t_ref| per matched pair, in commit order.
inline std::vector<double> discrepancies(const Alignment& a, const Timeline& pred, const Timeline& ref) {
  if (a.pairs.empty()) throw Error("temporal_metrics", "no matched events");
  std::vector<double> out;
  out.reserve(a.pairs.size());
  for (const auto& p : a.pairs) out.push_back(std::abs(pred.events.at(p.pred).time_hours - ref.events.at(p.ref).time_hours));
  return out;
}

// Mean of 1 - min(ln(1 + d), L) / L with L = ln(1 + cap): the area under the
// empirical CDF of ln(1 + d) over [0, L], axis normalised to unit length.
// Errors at or beyond the cap contribute nothing.
inline double aultc(std::span<const double> d, double cap_hours = kDefaultAultcCapHours) {
  if (d.empty()) throw Error("temporal_metrics", "aultc undefined: no discrepancies");
  if (!(cap_hours > 0.0) || !std::isfinite(cap_hours)) throw Error("temporal_metrics", "aultc cap must be > 0");
  const double L = std::log1p(cap_hours);
  double sum = 0.0;
  for (double x : d) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw Error("temporal_metrics", "discrepancies must be finite and >= 0");
    sum += 1.0 - std::min(std::log1p(x), L) / L;
  }
  return sum / static_cast<double>(d.size());
}

struct MetricsOptions {
  double threshold = kDefaultMatchThreshold;
  double aultc_cap_hours = kDefaultAultcCapHours;
};

struct CaseMetrics {
  std::size_t n_pred = 0;
  std::size_t n_ref = 0;
  std::size_t n_matched = 0;
  double match_rate = 0.0;
  std::optional<double> concordance;  // absent with < 2 pairs or all reference times tied
  std::optional<double> aultc;        // absent with no pairs
};

inline CaseMetrics metrics_from_alignment(const Alignment& a, const Timeline& pred, const Timeline& ref,
                                          double aultc_cap_hours) {
  CaseMetrics m;
  m.n_pred = pred.size();
  m.n_ref = ref.size();
  m.n_matched = a.pairs.size();
  m.match_rate = event_match_rate(a, ref.size());
  m.concordance = try_concordance(matched_times(a, pred, ref));
  if (!a.pairs.empty()) {
    const auto d = discrepancies(a, pred, ref);
    m.aultc = aultc(d, aultc_cap_hours);
  }
  return m;
}

// Treats `b` as the reference. Used identically for annotator-vs-annotator
// and model-vs-annotator comparisons.
inline CaseMetrics agreement(const Timeline& a, const Timeline& b, const DistanceProvider& p,
                             const MetricsOptions& opts = {}) {
  if (b.empty()) throw Error("alignment", "empty reference timeline");
  const auto al = align(a, b, p, opts.threshold);
  return metrics_from_alignment(al, a, b, opts.aultc_cap_hours);
}

struct SweepRow {
  double threshold = 0.0;
  double match_rate = 0.0;
  std::optional<double> concordance;
  std::optional<double> aultc;
};

// 0.01, 0.02, ..., 0.50 computed as i / 100 so each value is the nearest
// double to its decimal literal.
inline std::vector<double> default_threshold_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 50; ++i) g.push_back(i / 100.0);
  return g;
}

inline std::vector<double> threshold_grid(int first_hundredths, int last_hundredths, int step_hundredths = 1) {
  if (first_hundredths < 0 || last_hundredths < first_hundredths || step_hundredths <= 0)
    throw Error("temporal_metrics", "invalid threshold grid");
  std::vector<double> g;
  for (int i = first_hundredths; i <= last_hundredths; i += step_hundredths) g.push_back(i / 100.0);
  return g;
}

inline void validate_grid(std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0)) throw Error("temporal_metrics", "threshold grid values must be >= 0");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw Error("temporal_metrics", "threshold grid must be strictly increasing");
  }
}

inline std::vector<SweepRow> threshold_sweep(const Timeline& pred, const Timeline& ref, const DistanceProvider& p,
                                             std::span<const double> grid, double aultc_cap_hours = kDefaultAultcCapHours) {
  validate_grid(grid);
  if (ref.empty()) throw Error("alignment", "empty reference timeline");
  const auto d = distance_matrix(pred, ref, p);
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (double tau : grid) {
    const auto m = metrics_from_alignment(align(d, tau), pred, ref, aultc_cap_hours);
    rows.push_back({tau, m.match_rate, m.concordance, m.aultc});
  }
  return rows;
}

// Unweighted mean over cases, each metric over the cases where it is defined.
inline std::vector<SweepRow> aggregate_sweeps(std::span<const std::vector<SweepRow>> per_case) {
  if (per_case.empty()) throw Error("temporal_metrics", "no cases to aggregate");
  const std::size_t n_rows = per_case.front().size();
  std::vector<SweepRow> out(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    double mr = 0.0, cs = 0.0, as = 0.0;
    std::size_t cn = 0, an = 0;
    for (const auto& rows : per_case) {
      if (rows.size() != n_rows || rows[r].threshold != per_case.front()[r].threshold)
        throw Error("temporal_metrics", "sweeps use different grids");
      mr += rows[r].match_rate;
      if (rows[r].concordance) cs += *rows[r].concordance, ++cn;
      if (rows[r].aultc) as += *rows[r].aultc, ++an;
    }
    out[r].threshold = per_case.front()[r].threshold;
    out[r].match_rate = mr / static_cast<double>(per_case.size());
    if (cn) out[r].concordance = cs / static_cast<double>(cn);
    if (an) out[r].aultc = as / static_cast<double>(an);
  }
  return out;
}

}  // namespace ctts
