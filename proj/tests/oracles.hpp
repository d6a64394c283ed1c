#pragma once

// Deliberately naive reference implementations and random generators shared
// by the unit tests and the acceptance runner. Nothing here calls into the
// library code it is used to check.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Alignment: repeatedly scan every free (pred, ref) cell for the global
// minimum; ties go to the smallest ref index, then the smallest pred index.
// ---------------------------------------------------------------------------

struct Pair {
  std::size_t pred, ref;
  double distance;
};

inline std::vector<Pair> naive_align(const std::vector<std::vector<double>>& d, double threshold) {
  const std::size_t np = d.size(), nr = np ? d[0].size() : 0;
  std::vector<bool> pu(np), ru(nr);
  std::vector<Pair> out;
  for (;;) {
    bool found = false;
    Pair best{0, 0, std::numeric_limits<double>::infinity()};
    for (std::size_t r = 0; r < nr; ++r) {
      if (ru[r]) continue;
      for (std::size_t p = 0; p < np; ++p) {
        if (pu[p]) continue;
        if (d[p][r] < best.distance) {
          best = {p, r, d[p][r]};
          found = true;
        }
      }
    }
    if (!found || best.distance > threshold) break;
    pu[best.pred] = ru[best.ref] = true;
    out.push_back(best);
  }
  return out;
}

// Token Jaccard distance written independently of the library tokenizer.
inline std::set<std::string> tokens(const std::string& s) {
  std::set<std::string> out;
  std::string cur;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c >= 0x80) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.insert(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.insert(cur);
  return out;
}

inline double jaccard_distance(const std::string& a, const std::string& b) {
  auto ta = tokens(a), tb = tokens(b);
  if (ta.empty() && tb.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& t : ta) inter += tb.count(t);
  const std::size_t uni = ta.size() + tb.size() - inter;
  return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

// ---------------------------------------------------------------------------
// Concordance by exhaustive pair enumeration. Returns {numerator*2, comparable}
// so equality can be checked on integers.
// ---------------------------------------------------------------------------

struct PairCounts {
  std::uint64_t twice_score = 0;
  std::uint64_t comparable = 0;
};

inline PairCounts concordance_pairs(const std::vector<std::pair<double, double>>& ref_pred) {
  PairCounts c;
  for (std::size_t i = 0; i < ref_pred.size(); ++i)
    for (std::size_t j = i + 1; j < ref_pred.size(); ++j) {
      const auto [ri, pi] = ref_pred[i];
      const auto [rj, pj] = ref_pred[j];
      if (ri == rj) continue;
      ++c.comparable;
      if (pi == pj)
        c.twice_score += 1;
      else if ((ri < rj) == (pi < pj))
        c.twice_score += 2;
    }
  return c;
}

// ---------------------------------------------------------------------------
// Area under the empirical CDF of capped normalised log errors, integrated
// piecewise over [0, 1].
// ---------------------------------------------------------------------------

inline double log_time_cdf_area(const std::vector<double>& d, double cap) {
  std::vector<double> x;
  for (double v : d) x.push_back(std::min(std::log(1.0 + v) / std::log(1.0 + cap), 1.0));
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double area = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double next = i + 1 < x.size() ? x[i + 1] : 1.0;
    area += (next - x[i]) * static_cast<double>(i + 1) / n;
  }
  return area;
}

// ---------------------------------------------------------------------------
// Kaplan-Meier by recounting the risk set from scratch at every event time.
// ---------------------------------------------------------------------------

inline std::vector<std::pair<double, double>> km_recount(const std::vector<double>& t, const std::vector<bool>& e) {
  std::set<double> event_times;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (e[i]) event_times.insert(t[i]);
  std::vector<std::pair<double, double>> out;
  double s = 1.0;
  for (double u : event_times) {
    double at_risk = 0, deaths = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] >= u) ++at_risk;
      if (t[i] == u && e[i]) ++deaths;
    }
    s *= 1.0 - deaths / at_risk;
    out.emplace_back(u, s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Efron partial log-likelihood evaluated directly from its definition with
// plain loops (no centring, no incremental sums).
// ---------------------------------------------------------------------------

inline double efron_loglik(const std::vector<double>& t, const std::vector<bool>& e,
                           const std::vector<std::vector<double>>& x, const std::vector<double>& beta,
                           bool breslow = false) {
  const std::size_t n = t.size();
  auto eta = [&](std::size_t i) {
    double s = 0;
    for (std::size_t k = 0; k < beta.size(); ++k) s += beta[k] * x[i][k];
    return s;
  };
  std::set<double> times;
  for (std::size_t i = 0; i < n; ++i)
    if (e[i]) times.insert(t[i]);
  double ll = 0.0;
  for (double u : times) {
    double risk = 0, tied = 0, tied_eta = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (t[i] >= u) risk += std::exp(eta(i));
      if (t[i] == u && e[i]) {
        tied += std::exp(eta(i));
        tied_eta += eta(i);
        ++m;
      }
    }
    ll += tied_eta;
    for (std::size_t l = 0; l < m; ++l) {
      const double frac = breslow ? 0.0 : static_cast<double>(l) / static_cast<double>(m);
      ll -= std::log(risk - frac * tied);
    }
  }
  return ll;
}

// ---------------------------------------------------------------------------
// Case-report detection by direct character scanning.
// ---------------------------------------------------------------------------

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// "case report" or "case present" anywhere.
inline bool scan_case_phrase(const std::string& text) {
  const auto s = lower(text);
  return s.find("case report") != std::string::npos || s.find("case present") != std::string::npos;
}

// "year" then optional '-', optional ' ', then "old".
inline bool scan_year_old(const std::string& text) {
  const auto s = lower(text);
  for (std::size_t i = s.find("year"); i != std::string::npos; i = s.find("year", i + 1)) {
    std::size_t j = i + 4;
    if (j < s.size() && s[j] == '-') ++j;
    if (j < s.size() && s[j] == ' ') ++j;
    if (s.compare(j, 3, "old") == 0) return true;
  }
  return false;
}

inline bool scan_case_report(const std::string& text) { return scan_case_phrase(text) && scan_year_old(text); }

// ---------------------------------------------------------------------------
// Random generators
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> v = {"fever", "chest", "pain", "nausea", "acute", "renal", "injury", "rash",
                                             "cough", "severe", "mild", "left", "right", "lower", "elevated"};
  return v;
}

inline std::string random_text(std::mt19937_64& rng) {
  const auto& v = vocabulary();
  std::uniform_int_distribution<std::size_t> n(1, 3), w(0, v.size() - 1);
  std::string s;
  for (std::size_t i = 0, k = n(rng); i < k; ++i) s += (i ? " " : "") + v[w(rng)];
  return s;
}

}  // namespace oracle
