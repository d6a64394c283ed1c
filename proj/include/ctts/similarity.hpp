#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "json.hpp"

#include "ctts/detail/text.hpp"
#include "ctts/error.hpp"
#include "ctts/timeline.hpp"

namespace ctts {

// 1 - cos(u, v), clamped to [0, 2].
inline double cosine_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw Error("similarity", "dimension mismatch (" + std::to_string(u.size()) + " vs " +
                                  std::to_string(v.size()) + ")");
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw Error("similarity", "zero-norm vector");
  const double d = 1.0 - dot / std::sqrt(uu * vv);
  return std::clamp(d, 0.0, 2.0);
}

// Exact-text (whitespace-trimmed) lookup of precomputed event embeddings.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return entries_.size(); }

  // Replaces any previous vector for the same text.
  void insert(std::string_view text, std::vector<double> vec) {
    if (vec.empty()) throw Error("similarity", "empty embedding vector");
    if (dimension_ == 0) dimension_ = vec.size();
    if (vec.size() != dimension_)
      throw Error("similarity", "dimension mismatch: expected " + std::to_string(dimension_) + ", got " +
                                    std::to_string(vec.size()));
    if (std::all_of(vec.begin(), vec.end(), [](double x) { return x == 0.0; }))
      throw Error("similarity", "zero vector for '" + std::string(text) + "'");
    if (!std::all_of(vec.begin(), vec.end(), [](double x) { return std::isfinite(x); }))
      throw Error("similarity", "non-finite component for '" + std::string(text) + "'");
    entries_[std::string(detail::trim(text))] = std::move(vec);
  }

  const std::vector<double>* find(std::string_view text) const {
    auto it = entries_.find(std::string(detail::trim(text)));
    return it == entries_.end() ? nullptr : &it->second;
  }

  const std::vector<double>& at(std::string_view text) const {
    if (auto* v = find(text)) return *v;
    throw Error("similarity", "missing embedding for '" + std::string(detail::trim(text)) + "'");
  }

 private:
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, std::vector<double>> entries_;
};

// JSON-lines: {"text": "...", "vector": [x, ...]} per line.
inline EmbeddingStore load_embeddings(std::istream& in) {
  EmbeddingStore store;
  for_each_json_line(in, "similarity", [&](const nlohmann::json& j, std::size_t lineno) {
    auto text = j.find("text");
    auto vec = j.find("vector");
    if (text == j.end() || !text->is_string()) throw ParseError("similarity", lineno, "missing \"text\"");
    if (vec == j.end() || !vec->is_array()) throw ParseError("similarity", lineno, "missing \"vector\"");
    std::vector<double> v;
    v.reserve(vec->size());
    for (const auto& x : *vec) {
      if (!x.is_number()) throw ParseError("similarity", lineno, "non-numeric vector component");
      v.push_back(x.get<double>());
    }
    try {
      store.insert(text->get<std::string>(), std::move(v));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError("similarity", lineno, e.what());
    }
  });
  if (store.size() == 0) throw Error("similarity", "empty embedding store");
  return store;
}

// Lowercased tokens split on anything that is not an ASCII alphanumeric or
// a non-ASCII byte.
inline std::set<std::string> lexical_tokens(std::string_view s) {
  std::set<std::string> out;
  std::string cur;
  for (char c : s) {
    if (detail::is_word_char(c)) {
      cur += detail::to_lower(c);
    } else if (!cur.empty()) {
      out.insert(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.insert(std::move(cur));
  return out;
}

// 1 - Jaccard(token sets). Two token-free texts are at distance 0.
inline double lexical_distance(std::string_view a, std::string_view b) {
  const auto ta = lexical_tokens(a);
  const auto tb = lexical_tokens(b);
  if (ta.empty() && tb.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& t : ta) inter += tb.count(t);
  const std::size_t uni = ta.size() + tb.size() - inter;
  return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

struct LexicalProvider {};

struct EmbeddingProvider {
  std::shared_ptr<const EmbeddingStore> store;
};

// Text distance used for event matching. Embedding lookups never fall back
// to the lexical metric.
class DistanceProvider {
 public:
  static DistanceProvider lexical() { return DistanceProvider(LexicalProvider{}); }
  static DistanceProvider embedding(std::shared_ptr<const EmbeddingStore> store) {
    if (!store) throw Error("similarity", "null embedding store");
    return DistanceProvider(EmbeddingProvider{std::move(store)});
  }

  bool is_lexical() const { return std::holds_alternative<LexicalProvider>(kind_); }

  std::string describe() const { return is_lexical() ? "lexical" : "embedding"; }

  double distance(std::string_view a, std::string_view b) const {
    if (is_lexical()) return lexical_distance(a, b);
    const auto& store = *std::get<EmbeddingProvider>(kind_).store;
    return cosine_distance(store.at(a), store.at(b));
  }

 private:
  explicit DistanceProvider(std::variant<LexicalProvider, EmbeddingProvider> k) : kind_(std::move(k)) {}
  std::variant<LexicalProvider, EmbeddingProvider> kind_;
};

inline double event_distance(std::string_view a, std::string_view b, const DistanceProvider& p) {
  return p.distance(a, b);
}

}  // namespace ctts
