#pragma once

// Greedy best-match one-to-one alignment between a predicted and a reference
// timeline: repeatedly commit the globally closest unmatched pair while its
// distance stays within the threshold.

#include <algorithm>
#include <cmath>
#include <vector>

#include "json.hpp"

#include "ctts/error.hpp"
#include "ctts/similarity.hpp"
#include "ctts/timeline.hpp"

namespace ctts {

inline constexpr double kDefaultMatchThreshold = 0.1;

struct MatchedPair {
  std::size_t pred;
  std::size_t ref;
  double distance;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

struct Alignment {
  std::vector<MatchedPair> pairs;  // in commit order (non-decreasing distance)
  std::vector<std::size_t> unmatched_pred;
  std::vector<std::size_t> unmatched_ref;
  double threshold = kDefaultMatchThreshold;
};

// Row-major pred x ref distance matrix.
class DistanceMatrix {
 public:
  DistanceMatrix(std::size_t n_pred, std::size_t n_ref) : n_pred_(n_pred), n_ref_(n_ref), d_(n_pred * n_ref, 0.0) {}

  std::size_t n_pred() const { return n_pred_; }
  std::size_t n_ref() const { return n_ref_; }
  double operator()(std::size_t p, std::size_t r) const { return d_[p * n_ref_ + r]; }
  double& operator()(std::size_t p, std::size_t r) { return d_[p * n_ref_ + r]; }

 private:
  std::size_t n_pred_, n_ref_;
  std::vector<double> d_;
};

inline DistanceMatrix distance_matrix(const Timeline& pred, const Timeline& ref, const DistanceProvider& p) {
  DistanceMatrix m(pred.size(), ref.size());
  for (std::size_t i = 0; i < pred.size(); ++i)
    for (std::size_t j = 0; j < ref.size(); ++j) {
      const double d = p.distance(pred.events[i].text, ref.events[j].text);
      if (!std::isfinite(d) || d < 0.0) throw Error("alignment", "provider returned an invalid distance");
      m(i, j) = d;
    }
  return m;
}

// Equal distances resolve to the smallest reference index, then the smallest
// predicted index. Sorting every admissible candidate once and committing in
// that order is equivalent to rescanning for the global minimum each round.
inline Alignment align(const DistanceMatrix& d, double threshold) {
  if (!(threshold >= 0.0)) throw Error("alignment", "threshold must be >= 0");
  struct Candidate {
    double dist;
    std::size_t ref, pred;
  };
  std::vector<Candidate> pool;
  for (std::size_t i = 0; i < d.n_pred(); ++i)
    for (std::size_t j = 0; j < d.n_ref(); ++j)
      if (d(i, j) <= threshold) pool.push_back({d(i, j), j, i});
  std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.ref != b.ref) return a.ref < b.ref;
    return a.pred < b.pred;
  });

  Alignment a;
  a.threshold = threshold;
  std::vector<bool> pred_used(d.n_pred(), false), ref_used(d.n_ref(), false);
  const std::size_t max_pairs = std::min(d.n_pred(), d.n_ref());
  for (const auto& c : pool) {
    if (a.pairs.size() == max_pairs) break;
    if (pred_used[c.pred] || ref_used[c.ref]) continue;
    pred_used[c.pred] = ref_used[c.ref] = true;
    a.pairs.push_back({c.pred, c.ref, c.dist});
  }
  for (std::size_t i = 0; i < d.n_pred(); ++i)
    if (!pred_used[i]) a.unmatched_pred.push_back(i);
  for (std::size_t j = 0; j < d.n_ref(); ++j)
    if (!ref_used[j]) a.unmatched_ref.push_back(j);
  return a;
}

inline Alignment align(const Timeline& pred, const Timeline& ref, const DistanceProvider& p,
                       double threshold = kDefaultMatchThreshold) {
  return align(distance_matrix(pred, ref, p), threshold);
}

inline double event_match_rate(const Alignment& a, std::size_t ref_len) {
  if (ref_len == 0) throw Error("alignment", "empty reference timeline");
  return static_cast<double>(a.pairs.size()) / static_cast<double>(ref_len);
}

inline nlohmann::json alignment_to_json(const Alignment& a, const Timeline& pred, const Timeline& ref) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : a.pairs) {
    const auto& pe = pred.events.at(p.pred);
    const auto& re = ref.events.at(p.ref);
    pairs.push_back({{"pred_index", p.pred},
                     {"ref_index", p.ref},
                     {"pred_text", pe.text},
                     {"ref_text", re.text},
                     {"pred_time", pe.time_hours},
                     {"ref_time", re.time_hours},
                     {"distance", p.distance}});
  }
  nlohmann::json up = nlohmann::json::array(), ur = nlohmann::json::array();
  for (auto i : a.unmatched_pred) up.push_back({{"index", i}, {"text", pred.events[i].text}, {"time", pred.events[i].time_hours}});
  for (auto j : a.unmatched_ref) ur.push_back({{"index", j}, {"text", ref.events[j].text}, {"time", ref.events[j].time_hours}});
  return {{"case_id", ref.case_id.empty() ? pred.case_id : ref.case_id},
          {"threshold", a.threshold},
          {"pairs", std::move(pairs)},
          {"unmatched_pred", std::move(up)},
          {"unmatched_ref", std::move(ur)}};
}

}  // namespace ctts
