#pragma once

#include <array>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "ctts/detail/text.hpp"
#include "ctts/error.hpp"
#include "ctts/timeline.hpp"

namespace ctts {

// One case flattened for time-to-onset modelling. Durations are in months
// from the case reference point.
struct SurvivalRecord {
  std::string case_id;
  double duration_months = 0.0;
  bool event = false;
  bool exposed = false;
  double age_years = 0.0;
  SexCategory sex = SexCategory::NotSpecified;
  bool baseline_prevalent = false;
  bool age_imputed = false;

  friend bool operator==(const SurvivalRecord&, const SurvivalRecord&) = default;
};

// Indicators over {Female, Other, NotSpecified}; Male is the reference level.
inline std::array<double, 3> sex_onehot(SexCategory s) {
  return {s == SexCategory::Female ? 1.0 : 0.0, s == SexCategory::Other ? 1.0 : 0.0,
          s == SexCategory::NotSpecified ? 1.0 : 0.0};
}

inline constexpr std::string_view kSurvivalCsvHeader = "case_id,duration_months,event,exposed,age,sex,baseline_prevalent";

inline void write_survival_csv(const std::vector<SurvivalRecord>& records, std::ostream& out) {
  out << kSurvivalCsvHeader << '\n';
  for (const auto& r : records) {
    if (r.case_id.find_first_of(",\r\n") != std::string::npos)
      throw Error("survival", "case_id '" + r.case_id + "' cannot be written to CSV");
    out << r.case_id << ',' << detail::format_double(r.duration_months) << ',' << (r.event ? 1 : 0) << ','
        << (r.exposed ? 1 : 0) << ',' << detail::format_double(r.age_years) << ',' << sex_label(r.sex) << ','
        << (r.baseline_prevalent ? 1 : 0) << '\n';
  }
}

// Lines starting with '#' are provenance comments and are skipped.
inline std::vector<SurvivalRecord> read_survival_csv(std::istream& in) {
  std::vector<SurvivalRecord> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  auto flag = [&](std::string_view s) {
    s = detail::trim(s);
    if (s == "1" || s == "true") return true;
    if (s == "0" || s == "false") return false;
    throw ParseError("survival", lineno, "expected 0/1, got '" + std::string(s) + "'");
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty() || line.front() == '#') continue;
    if (!header) {
      if (line != kSurvivalCsvHeader) throw ParseError("survival", lineno, "unexpected header");
      header = true;
      continue;
    }
    auto f = detail::split(line, ',');
    if (f.size() != 7) throw ParseError("survival", lineno, "expected 7 fields");
    SurvivalRecord r;
    r.case_id = std::string(detail::trim(f[0]));
    auto dur = detail::parse_double(f[1]);
    auto age = detail::parse_double(f[4]);
    if (!dur || *dur < 0.0) throw ParseError("survival", lineno, "invalid duration");
    if (!age) throw ParseError("survival", lineno, "invalid age");
    r.duration_months = *dur;
    r.event = flag(f[2]);
    r.exposed = flag(f[3]);
    r.age_years = *age;
    r.sex = parse_sex(f[5]).category;
    r.baseline_prevalent = flag(f[6]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace ctts
