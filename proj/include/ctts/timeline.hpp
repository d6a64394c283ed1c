#pragma once

// Textual time series: a case's clinical findings paired with their time in
// hours relative to the case reference point (t = 0). Negative times are
// pre-reference history.

#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "ctts/detail/text.hpp"
#include "ctts/error.hpp"

namespace ctts {

struct TimelineEvent {
  std::string text;
  double time_hours = 0.0;

  friend bool operator==(const TimelineEvent&, const TimelineEvent&) = default;
};

struct Timeline {
  std::string case_id;
  std::vector<TimelineEvent> events;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }

  friend bool operator==(const Timeline&, const Timeline&) = default;
};

enum class SexCategory { Male, Female, Other, NotSpecified };

struct Sex {
  SexCategory category = SexCategory::NotSpecified;
  std::string other_text;  // only meaningful for Other

  friend bool operator==(const Sex&, const Sex&) = default;
};

struct CaseMetadata {
  std::string case_id;
  std::optional<double> age_years;
  Sex sex;
  std::vector<std::string> diagnoses;
};

inline std::string_view sex_label(SexCategory c) {
  switch (c) {
    case SexCategory::Male: return "Male";
    case SexCategory::Female: return "Female";
    case SexCategory::Other: return "Other";
    case SexCategory::NotSpecified: return "NotSpecified";
  }
  return "NotSpecified";
}

// Free-text sex field → closed category. Empty, "unknown" and "not specified"
// all map to NotSpecified; anything unrecognised is Other(text).
inline Sex parse_sex(std::string_view raw) {
  auto s = detail::lowercase(detail::trim(raw));
  if (s == "male" || s == "m" || s == "man") return {SexCategory::Male, {}};
  if (s == "female" || s == "f" || s == "woman") return {SexCategory::Female, {}};
  if (s.empty() || s == "notspecified" || s == "not specified" || s == "unknown" ||
      s == "unspecified" || s == "na" || s == "n/a")
    return {SexCategory::NotSpecified, {}};
  if (s == "other") return {SexCategory::Other, {}};
  return {SexCategory::Other, std::string(detail::trim(raw))};
}

// Throws ctts::Error when an event violates the model invariants.
inline void validate_event(const TimelineEvent& e) {
  if (detail::trim(e.text).empty()) throw Error("timeline", "empty event text");
  if (!std::isfinite(e.time_hours)) throw Error("timeline", "non-finite event time");
}

inline void validate_metadata(const CaseMetadata& m) {
  if (m.case_id.empty()) throw Error("timeline", "empty case_id in metadata");
  if (m.age_years && (!std::isfinite(*m.age_years) || *m.age_years < 0.0 || *m.age_years > 130.0))
    throw Error("timeline", "age out of range [0, 130] for case " + m.case_id);
}

// ---------------------------------------------------------------------------
// Canonical TSV form
//
//   # case_id: <id>
//   time_hours<TAB>text
//   -72<TAB>fever
//
// Only the first tab separates fields. Backslash, newline and carriage return
// inside event text are written as \\, \n and \r.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string escape_event_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string unescape_event_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      char n = s[i + 1];
      if (n == '\\' || n == 'n' || n == 'r') {
        out += n == '\\' ? '\\' : (n == 'n' ? '\n' : '\r');
        ++i;
        continue;
      }
    }
    out += s[i];
  }
  return out;
}

}  // namespace detail

inline Timeline parse_timeline(std::istream& in, std::string default_case_id = {}) {
  Timeline tl;
  tl.case_id = std::move(default_case_id);
  std::string line;
  std::size_t lineno = 0;
  bool seen_record = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    std::string_view view = line;
    if (detail::trim(view).empty()) continue;
    if (view.front() == '#') {
      auto body = detail::trim(view.substr(1));
      constexpr std::string_view key = "case_id:";
      if (body.substr(0, key.size()) == key) tl.case_id = std::string(detail::trim(body.substr(key.size())));
      continue;
    }
    auto tab = view.find('\t');
    if (tab == std::string_view::npos) throw ParseError("timeline", lineno, "missing tab separator");
    auto time_field = view.substr(0, tab);
    auto text_field = view.substr(tab + 1);
    if (!seen_record && detail::trim(time_field) == "time_hours") {
      seen_record = true;
      continue;
    }
    seen_record = true;
    auto t = detail::parse_double(time_field);
    if (!t) throw ParseError("timeline", lineno, "unparsable time '" + std::string(time_field) + "'");
    auto text = detail::unescape_event_text(text_field);
    if (detail::trim(text).empty()) throw ParseError("timeline", lineno, "empty event text");
    tl.events.push_back({std::move(text), *t});
  }
  return tl;
}

inline Timeline parse_timeline(std::string_view text, std::string default_case_id = {}) {
  std::istringstream in{std::string(text)};
  return parse_timeline(in, std::move(default_case_id));
}

inline void serialize_timeline(const Timeline& tl, std::ostream& out) {
  if (!tl.case_id.empty()) out << "# case_id: " << tl.case_id << '\n';
  out << "time_hours\ttext\n";
  for (const auto& e : tl.events)
    out << detail::format_double(e.time_hours) << '\t' << detail::escape_event_text(e.text) << '\n';
}

inline std::string serialize_timeline(const Timeline& tl) {
  std::ostringstream out;
  serialize_timeline(tl, out);
  return out.str();
}

// ---------------------------------------------------------------------------
// JSON-lines corpus: {"case_id": ..., "events": [{"t": hours, "e": text}, ...]}
// Records may also carry case metadata: "age_years", "sex", "diagnoses".
// ---------------------------------------------------------------------------

inline nlohmann::json timeline_to_json(const Timeline& tl) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : tl.events) events.push_back({{"t", e.time_hours}, {"e", e.text}});
  return {{"case_id", tl.case_id}, {"events", std::move(events)}};
}

inline Timeline timeline_from_json(const nlohmann::json& j, std::size_t lineno = 0) {
  auto fail = [&](const std::string& msg) -> ParseError { return ParseError("timeline", lineno, msg); };
  if (!j.is_object()) throw fail("record is not a JSON object");
  Timeline tl;
  auto id = j.find("case_id");
  if (id == j.end() || !id->is_string() || id->get<std::string>().empty()) throw fail("missing case_id");
  tl.case_id = id->get<std::string>();
  auto ev = j.find("events");
  if (ev == j.end()) return tl;
  if (!ev->is_array()) throw fail("events is not an array");
  for (const auto& e : *ev) {
    auto t = e.find("t");
    auto txt = e.find("e");
    if (t == e.end() || !t->is_number()) throw fail("event without numeric \"t\"");
    if (txt == e.end() || !txt->is_string()) throw fail("event without string \"e\"");
    TimelineEvent event{txt->get<std::string>(), t->get<double>()};
    if (detail::trim(event.text).empty()) throw fail("empty event text");
    if (!std::isfinite(event.time_hours)) throw fail("non-finite time");
    tl.events.push_back(std::move(event));
  }
  return tl;
}

inline CaseMetadata metadata_from_json(const nlohmann::json& j, std::size_t lineno = 0) {
  CaseMetadata m;
  m.case_id = j.value("case_id", std::string{});
  if (auto a = j.find("age_years"); a != j.end() && !a->is_null()) {
    if (!a->is_number()) throw ParseError("timeline", lineno, "age_years is not a number");
    m.age_years = a->get<double>();
  }
  if (auto s = j.find("sex"); s != j.end() && s->is_string()) m.sex = parse_sex(s->get<std::string>());
  if (auto d = j.find("diagnoses"); d != j.end() && d->is_array())
    for (const auto& x : *d)
      if (x.is_string()) m.diagnoses.push_back(x.get<std::string>());
  try {
    validate_metadata(m);
  } catch (const Error& e) {
    throw ParseError("timeline", lineno, e.what());
  }
  return m;
}

// Calls `fn(json, lineno)` for each non-blank line.
template <typename Fn>
void for_each_json_line(std::istream& in, const std::string& module, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(module, lineno, std::string("invalid JSON: ") + e.what());
    }
    fn(j, lineno);
  }
}

inline std::vector<Timeline> read_timeline_corpus(std::istream& in) {
  std::vector<Timeline> out;
  std::unordered_set<std::string> seen;
  for_each_json_line(in, "timeline", [&](const nlohmann::json& j, std::size_t lineno) {
    auto tl = timeline_from_json(j, lineno);
    if (!seen.insert(tl.case_id).second) throw ParseError("timeline", lineno, "duplicate case_id " + tl.case_id);
    out.push_back(std::move(tl));
  });
  return out;
}

inline void write_timeline_corpus(const std::vector<Timeline>& corpus, std::ostream& out) {
  for (const auto& tl : corpus) out << timeline_to_json(tl).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Rule-based temporal expression normalization
// ---------------------------------------------------------------------------

enum class DayConvention {
  FirstDayIsZero,   // "day n" -> (n - 1) * 24, so day 1 is the reference day
  DayNumberTimes24  // "day n" -> n * 24
};

inline constexpr double kHoursPerDay = 24.0;
inline constexpr double kHoursPerWeek = 168.0;
inline constexpr double kHoursPerMonth = 730.5;
inline constexpr double kHoursPerYear = 8766.0;

namespace detail {

inline std::optional<double> word_number(std::string_view w) {
  static constexpr std::string_view units[] = {"zero", "one",  "two",   "three", "four",
                                               "five", "six",  "seven", "eight", "nine"};
  static constexpr std::string_view teens[] = {"ten",     "eleven",  "twelve",    "thirteen", "fourteen",
                                               "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};
  static constexpr std::string_view tens[] = {"twenty", "thirty",  "forty",  "fifty",
                                              "sixty",  "seventy", "eighty", "ninety"};
  if (w == "a" || w == "an") return 1.0;
  if (auto v = parse_double(w)) return v;
  for (std::size_t i = 0; i < std::size(units); ++i)
    if (w == units[i]) return static_cast<double>(i);
  for (std::size_t i = 0; i < std::size(teens); ++i)
    if (w == teens[i]) return static_cast<double>(10 + i);
  for (std::size_t i = 0; i < std::size(tens); ++i) {
    auto t = tens[i];
    if (w.substr(0, t.size()) != t) continue;
    double base = static_cast<double>(20 + 10 * i);
    auto rest = w.substr(t.size());
    if (rest.empty()) return base;
    if (rest.front() != '-' && rest.front() != ' ') return std::nullopt;
    rest.remove_prefix(1);
    for (std::size_t k = 1; k < std::size(units); ++k)
      if (rest == units[k]) return base + static_cast<double>(k);
    return std::nullopt;
  }
  return std::nullopt;
}

inline std::optional<double> unit_hours(std::string_view u) {
  if (u == "h" || u == "hr" || u == "hrs" || u == "hour" || u == "hours") return 1.0;
  if (u == "day" || u == "days") return kHoursPerDay;
  if (u == "wk" || u == "wks" || u == "week" || u == "weeks") return kHoursPerWeek;
  if (u == "mo" || u == "mos" || u == "month" || u == "months") return kHoursPerMonth;
  if (u == "yr" || u == "yrs" || u == "year" || u == "years") return kHoursPerYear;
  return std::nullopt;
}

// Lowercase, collapse whitespace runs, drop trailing sentence punctuation.
inline std::string canonical_phrase(std::string_view expr) {
  std::string out;
  bool pending_space = false;
  for (char c : trim(expr)) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out += ' ';
    pending_space = false;
    out += to_lower(c);
  }
  while (!out.empty() && (out.back() == '.' || out.back() == ',' || out.back() == ';' || out.back() == ':'))
    out.pop_back();
  return out;
}

#define CTTS_NUM                                                                                  \
  "([0-9]+(?:\\.[0-9]+)?|(?:twenty|thirty|forty|fifty|sixty|seventy|eighty|ninety)(?:[- ](?:one|" \
  "two|three|four|five|six|seven|eight|nine))?|ten|eleven|twelve|thirteen|fourteen|fifteen|"      \
  "sixteen|seventeen|eighteen|nineteen|one|two|three|four|five|six|seven|eight|nine|an|a)"
#define CTTS_UNIT "(hours|hour|hrs|hr|h|days|day|weeks|week|wks|wk|months|month|mos|mo|years|year|yrs|yr)"

struct TimeGrammar {
  std::regex history{"^(?:an? )?" CTTS_NUM "[- ]" CTTS_UNIT "[- ](?:long )?history(?: of\\b.*)?$",
                     std::regex::ECMAScript | std::regex::optimize};
  std::regex ago{"^" CTTS_NUM "[- ]" CTTS_UNIT " (?:ago|prior|before)\\b.*$",
                 std::regex::ECMAScript | std::regex::optimize};
  std::regex day{"^(?:on |by )?(?:hospital )?day #?" CTTS_NUM
                 "(?: of (?:hospitalization|admission|(?:the )?hospital stay))?$",
                 std::regex::ECMAScript | std::regex::optimize};
  std::regex reference{"^(?:on|at|upon) (?:the time of )?(?:admission|presentation)$",
                       std::regex::ECMAScript | std::regex::optimize};
};

#undef CTTS_NUM
#undef CTTS_UNIT

inline const TimeGrammar& time_grammar() {
  static const TimeGrammar g;
  return g;
}

}  // namespace detail

// Hour offset for a covered temporal phrase, or nullopt when the phrase is
// outside the rule grammar. Never guesses.
//
//   "<N> <unit> history of ..."      -> -N * unit   (interval start)
//   "<N> <unit> ago|prior|before"    -> -N * unit
//   "hospital day <n>" / "day <n>"   -> (n - 1) * 24 under FirstDayIsZero
//   "on admission" / "at presentation" -> 0
inline std::optional<double> normalize_time_expression(std::string_view expr,
                                                       DayConvention convention = DayConvention::FirstDayIsZero) {
  const auto& g = detail::time_grammar();
  const std::string phrase = detail::canonical_phrase(expr);
  std::smatch m;
  auto quantity = [](const std::smatch& mm) -> std::optional<double> {
    auto n = detail::word_number(mm.str(1));
    auto u = detail::unit_hours(mm.str(2));
    if (!n || !u || *n < 0.0) return std::nullopt;
    return *n * *u;
  };
  if (std::regex_match(phrase, m, g.history) || std::regex_match(phrase, m, g.ago)) {
    auto q = quantity(m);
    if (!q) return std::nullopt;
    return *q == 0.0 ? 0.0 : -*q;
  }
  if (std::regex_match(phrase, m, g.day)) {
    auto n = detail::word_number(m.str(1));
    if (!n || *n < 1.0 || std::floor(*n) != *n || m.str(1) == "a" || m.str(1) == "an") return std::nullopt;
    return convention == DayConvention::FirstDayIsZero ? (*n - 1.0) * kHoursPerDay : *n * kHoursPerDay;
  }
  if (std::regex_match(phrase, g.reference)) return 0.0;
  return std::nullopt;
}

}  // namespace ctts
