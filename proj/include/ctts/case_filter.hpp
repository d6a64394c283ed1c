#pragma once

// Corpus filtering: body extraction, case-report candidate detection and
// lexicon matching for exposure / diabetes status.

#include <istream>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ctts/detail/text.hpp"
#include "ctts/error.hpp"

namespace ctts {

struct LexiconHit {
  std::string term;    // matched text, lowercased
  std::size_t offset;  // byte offset into the scanned text
  std::string source;  // lexicon entry that produced the hit

  friend bool operator==(const LexiconHit&, const LexiconHit&) = default;
};

struct FilterResult {
  bool is_candidate = false;
  std::vector<LexiconHit> matched_terms;

  // Distinct matched terms in first-seen order.
  std::vector<std::string> distinct_terms() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& h : matched_terms)
      if (seen.insert(h.term).second) out.push_back(h.term);
    return out;
  }
};

// A named set of case-insensitive regex patterns plus lowercase literal
// substrings. Immutable once constructed.
class Lexicon {
 public:
  Lexicon(std::string name, std::vector<std::string> regex_patterns, std::vector<std::string> literal_terms)
      : name_(std::move(name)), patterns_(std::move(regex_patterns)) {
    std::set<std::string> seen;
    for (const auto& p : patterns_) {
      if (p.empty()) throw Error("case_filter", "lexicon '" + name_ + "': empty regex pattern");
      if (!seen.insert("re:" + p).second)
        throw Error("case_filter", "lexicon '" + name_ + "': duplicate pattern '" + p + "'");
      try {
        compiled_.emplace_back(p, std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
      } catch (const std::regex_error& e) {
        throw Error("case_filter", "lexicon '" + name_ + "': pattern '" + p + "' does not compile: " + e.what());
      }
    }
    for (const auto& t : literal_terms) {
      auto lowered = detail::lowercase(t);
      if (detail::trim(lowered).empty()) throw Error("case_filter", "lexicon '" + name_ + "': empty literal term");
      if (!seen.insert("lit:" + lowered).second)
        throw Error("case_filter", "lexicon '" + name_ + "': duplicate term '" + lowered + "'");
      literals_.push_back(std::move(lowered));
    }
    if (patterns_.empty() && literals_.empty()) throw Error("case_filter", "lexicon '" + name_ + "' is empty");
  }

  const std::string& name() const { return name_; }
  const std::vector<std::string>& regex_patterns() const { return patterns_; }
  const std::vector<std::string>& literal_terms() const { return literals_; }
  const std::vector<std::regex>& compiled() const { return compiled_; }

  nlohmann::json to_json() const {
    return {{"name", name_}, {"regex_patterns", patterns_}, {"literal_terms", literals_}};
  }

  std::string digest() const { return detail::hex64(detail::fnv1a64(to_json().dump())); }

  static Lexicon from_json(const nlohmann::json& j) {
    try {
      return Lexicon(j.at("name").get<std::string>(),
                     j.value("regex_patterns", std::vector<std::string>{}),
                     j.value("literal_terms", std::vector<std::string>{}));
    } catch (const nlohmann::json::exception& e) {
      throw Error("case_filter", std::string("malformed lexicon file: ") + e.what());
    }
  }

  static Lexicon load(std::istream& in) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error("case_filter", std::string("lexicon is not valid JSON: ") + e.what());
    }
    return from_json(j);
  }

 private:
  std::string name_;
  std::vector<std::string> patterns_;
  std::vector<std::string> literals_;
  std::vector<std::regex> compiled_;
};

// Text strictly between the first "==== Body" marker and the first
// "==== Ref" marker that follows it.
inline std::string extract_body(std::string_view document) {
  constexpr std::string_view body_marker = "==== Body";
  constexpr std::string_view ref_marker = "==== Ref";
  auto b = document.find(body_marker);
  if (b == std::string_view::npos) throw Error("case_filter", "no body section");
  auto start = b + body_marker.size();
  auto r = document.find(ref_marker, start);
  if (r == std::string_view::npos) throw Error("case_filter", "no body section");
  return std::string(document.substr(start, r - start));
}

inline constexpr std::string_view kCaseReportPattern = "case (report|present)";
inline constexpr std::string_view kAgePattern = "year-? ?old";

// Candidate iff both case-insensitive patterns match somewhere in the body.
inline bool detect_case_report(std::string_view body) {
  static const std::regex case_re(std::string(kCaseReportPattern), std::regex::ECMAScript | std::regex::icase);
  static const std::regex age_re(std::string(kAgePattern), std::regex::ECMAScript | std::regex::icase);
  return std::regex_search(body.begin(), body.end(), case_re) &&
         std::regex_search(body.begin(), body.end(), age_re);
}

// All hits, overlapping ones included: after a hit at offset k the scan for
// that entry resumes at k + 1.
inline FilterResult match_lexicon(std::string_view body, const Lexicon& lex) {
  FilterResult result;
  const std::string lowered = detail::lowercase(body);
  for (std::size_t i = 0; i < lex.compiled().size(); ++i) {
    const auto& re = lex.compiled()[i];
    std::size_t pos = 0;
    std::match_results<std::string::const_iterator> m;
    while (pos <= lowered.size() && std::regex_search(lowered.cbegin() + static_cast<std::ptrdiff_t>(pos),
                                                      lowered.cend(), m, re,
                                                      pos == 0 ? std::regex_constants::match_default
                                                               : std::regex_constants::match_prev_avail)) {
      const auto off = pos + static_cast<std::size_t>(m.position(0));
      if (m.length(0) > 0) result.matched_terms.push_back({m.str(0), off, lex.regex_patterns()[i]});
      pos = off + 1;
    }
  }
  for (const auto& term : lex.literal_terms()) {
    for (auto off = lowered.find(term); off != std::string::npos; off = lowered.find(term, off + 1))
      result.matched_terms.push_back({term, off, term});
  }
  std::stable_sort(result.matched_terms.begin(), result.matched_terms.end(),
                   [](const LexiconHit& a, const LexiconHit& b) { return a.offset < b.offset; });
  result.is_candidate = !result.matched_terms.empty();
  return result;
}

inline bool lexicon_matches(std::string_view text, const Lexicon& lex) {
  const std::string lowered = detail::lowercase(text);
  for (const auto& term : lex.literal_terms())
    if (lowered.find(term) != std::string::npos) return true;
  for (const auto& re : lex.compiled())
    if (std::regex_search(lowered, re)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Built-in lexicons. The same content ships under data/lexicons/.
// ---------------------------------------------------------------------------

inline Lexicon default_glp1ra_lexicon() {
  return Lexicon("glp1ra",
                 {"glp[- ]?1(?![0-9])", "glp[- ]?1[- ]?(receptor agonist|analog|ra\\b)",
                  "glucagon[- ]like[- ]peptide[- ]?1(?![0-9])"},
                 {"semaglutide", "liraglutide", "exenatide", "dulaglutide", "lixisenatide", "albiglutide",
                  "efpeglenatide", "tirzepatide"});
}

// "dm" is word-bounded (it would otherwise fire inside "admission"); the
// rest are plain substrings, prefixes like "hyperglycem" included.
inline Lexicon default_diabetes_lexicon() {
  return Lexicon("diabetes", {"\\bdm\\b"},
                 {"diabetes", "diabetic", "type 1", "type 2", "insulin", "metabolic syndrome", "hyperglycem",
                  "hypoglycem", "ketoacidosis", "hba1c"});
}

// Outcome lexicons are editable reconstructions of figure-only keyword lists.
inline Lexicon default_kidney_lexicon() {
  return Lexicon("kidney", {"\\b(aki|ckd|esrd|eskd)\\b"},
                 {"kidney", "renal", "nephropathy", "nephritis", "nephrotic", "glomerul", "dialysis",
                  "proteinuria", "albuminuria"});
}

inline Lexicon default_cardiovascular_lexicon() {
  return Lexicon("cardiovascular", {"\\b(mi|nstemi|stemi|cad|chf)\\b"},
                 {"myocardial infarction", "heart failure", "coronary", "cardiomyopathy", "angina",
                  "atrial fibrillation", "arrhythmia", "stroke", "cardiac arrest", "tachycardia"});
}

inline Lexicon default_respiratory_lexicon() {
  return Lexicon("respiratory", {"\\b(copd|ards)\\b"},
                 {"pneumonia", "respiratory", "dyspnea", "shortness of breath", "asthma", "pulmonary",
                  "bronch", "hypoxi", "sleep apnea", "pleural effusion"});
}

inline bool has_diabetes(const std::vector<std::string>& diagnoses, const Lexicon& lex) {
  for (const auto& d : diagnoses)
    if (lexicon_matches(d, lex)) return true;
  return false;
}

inline bool has_diabetes(const std::vector<std::string>& diagnoses) {
  static const Lexicon lex = default_diabetes_lexicon();
  return has_diabetes(diagnoses, lex);
}

}  // namespace ctts
