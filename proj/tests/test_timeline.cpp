#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "ctts/corpus_stats.hpp"
#include "ctts/timeline.hpp"
#include "oracles.hpp"

using namespace ctts;

namespace {

Timeline random_timeline(std::mt19937_64& rng, std::size_t max_events = 12) {
  std::uniform_int_distribution<std::size_t> n(0, max_events);
  std::uniform_int_distribution<int> kind(0, 4), hours(-9000, 9000);
  Timeline tl{"c" + std::to_string(rng() % 100000), {}};
  const std::size_t k = n(rng);
  for (std::size_t i = 0; i < k; ++i) {
    double t = 0;
    switch (kind(rng)) {
      case 0: t = 0.0; break;
      case 1: t = hours(rng); break;
      case 2: t = hours(rng) / 7.0; break;  // fractional
      case 3: t = tl.events.empty() ? -24.0 : tl.events.back().time_hours; break;  // tied
      default: t = -0.5;
    }
    std::string text = oracle::random_text(rng);
    if (rng() % 10 == 0) text += "\twith tab";
    if (rng() % 10 == 0) text += "\\ and \nnewline";
    tl.events.push_back({text, t});
  }
  return tl;
}

}  // namespace

TEST(TimelineTsv, RoundTripRandom) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    auto tl = random_timeline(rng);
    auto text = serialize_timeline(tl);
    EXPECT_EQ(parse_timeline(text), tl) << text;
  }
}

TEST(TimelineTsv, ParsesHeaderCommentsAndCrlf) {
  auto tl = parse_timeline("\xEF\xBB\xBF# case_id: abc\r\ntime_hours\ttext\r\n-72\tfever\r\n\n0\tadmitted\r\n");
  EXPECT_EQ(tl.case_id, "abc");
  ASSERT_EQ(tl.size(), 2u);
  EXPECT_EQ(tl.events[0], (TimelineEvent{"fever", -72}));
  EXPECT_EQ(tl.events[1].text, "admitted");
}

TEST(TimelineTsv, OnlyFirstTabSplits) {
  auto tl = parse_timeline("3\ta\tb\n");
  EXPECT_EQ(tl.events.at(0).text, "a\tb");
}

TEST(TimelineTsv, UnicodeMinusAccepted) {
  auto tl = parse_timeline("\xE2\x88\x92" "48\tcough\n");
  EXPECT_EQ(tl.events.at(0).time_hours, -48.0);
}

TEST(TimelineTsv, DuplicatesPreserved) {
  auto tl = parse_timeline("1\tx\n1\tx\n");
  EXPECT_EQ(tl.size(), 2u);
}

TEST(TimelineTsv, ErrorsCarryLineNumbers) {
  try {
    parse_timeline("1\tok\nabc\tbad time\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_timeline("no tab here\n"), ParseError);
  EXPECT_THROW(parse_timeline("1\t   \n"), ParseError);
  EXPECT_THROW(parse_timeline("nan\tx\n"), ParseError);
  EXPECT_THROW(parse_timeline("inf\tx\n"), ParseError);
}

TEST(TimelineJson, CorpusRoundTrip) {
  std::mt19937_64 rng(11);
  std::vector<Timeline> corpus;
  for (int i = 0; i < 30; ++i) {
    auto tl = random_timeline(rng);
    tl.case_id = "case" + std::to_string(i);
    corpus.push_back(tl);
  }
  std::stringstream ss;
  write_timeline_corpus(corpus, ss);
  EXPECT_EQ(read_timeline_corpus(ss), corpus);
}

TEST(TimelineJson, RejectsDuplicateIdsAndBadEvents) {
  std::istringstream dup(R"({"case_id":"a","events":[]}
{"case_id":"a","events":[]})");
  EXPECT_THROW(read_timeline_corpus(dup), ParseError);
  std::istringstream bad(R"({"case_id":"a","events":[{"t":"x","e":"fever"}]})");
  EXPECT_THROW(read_timeline_corpus(bad), ParseError);
  std::istringstream empty_text(R"({"case_id":"a","events":[{"t":1,"e":" "}]})");
  EXPECT_THROW(read_timeline_corpus(empty_text), ParseError);
  std::istringstream not_json("{oops");
  EXPECT_THROW(read_timeline_corpus(not_json), ParseError);
}

TEST(Metadata, SexParsing) {
  EXPECT_EQ(parse_sex("Male").category, SexCategory::Male);
  EXPECT_EQ(parse_sex(" f ").category, SexCategory::Female);
  EXPECT_EQ(parse_sex("").category, SexCategory::NotSpecified);
  EXPECT_EQ(parse_sex("Not specified").category, SexCategory::NotSpecified);
  auto o = parse_sex("Intersex");
  EXPECT_EQ(o.category, SexCategory::Other);
  EXPECT_EQ(o.other_text, "Intersex");
}

TEST(Metadata, AgeRange) {
  CaseMetadata m{"x", 131.0, {}, {}};
  EXPECT_THROW(validate_metadata(m), Error);
  m.age_years = -1;
  EXPECT_THROW(validate_metadata(m), Error);
  m.age_years = 0;
  EXPECT_NO_THROW(validate_metadata(m));
  m.age_years.reset();
  EXPECT_NO_THROW(validate_metadata(m));
}

// ---------------------------------------------------------------------------
// Time normalisation
// ---------------------------------------------------------------------------

TEST(TimeNormalization, CoveredGrammar) {
  struct Row {
    const char* phrase;
    double hours;
  };
  const Row rows[] = {
      {"three-day history of fever", -72},
      {"a three-day history of fever", -72},
      {"3-day history of cough", -72},
      {"2-week history of rash", -336},
      {"two week history", -336},
      {"a 6-month history of weight loss", -4383},
      {"one-year history of dyspnea", -8766},
      {"12-hour history of vomiting", -12},
      {"a twenty-one day long history of fatigue", -504},
      {"2 days ago", -48},
      {"5 years prior", -43830},
      {"three weeks before admission", -504},
      {"an hour ago", -1},
      {"1.5 days ago", -36},
      {"hospital day 2", 24},
      {"Hospital Day 1", 0},
      {"day 3", 48},
      {"on day 10 of hospitalization", 216},
      {"on hospital day #4", 72},
      {"by day five", 96},
      {"on admission", 0},
      {"at presentation", 0},
      {"upon the time of admission.", 0},
  };
  for (const auto& r : rows) {
    auto v = normalize_time_expression(r.phrase);
    ASSERT_TRUE(v.has_value()) << r.phrase;
    EXPECT_DOUBLE_EQ(*v, r.hours) << r.phrase;
  }
  EXPECT_EQ(normalize_time_expression("hospital day 2", DayConvention::DayNumberTimes24), 48.0);
}

TEST(TimeNormalization, UncoveredPhrasesAreAbsent) {
  for (const char* phrase : {"", "recently", "several days ago", "last week", "a few months later",
                             "day 0", "day a", "day 2.5", "hospital day", "3 fortnights ago", "history of fever",
                             "after discharge", "the next morning", "postoperative day 2 complications noted",
                             "three-day", "in 2019"}) {
    EXPECT_FALSE(normalize_time_expression(phrase).has_value()) << phrase;
  }
}

TEST(TimeNormalization, UnitConsistency) {
  for (int n = 1; n <= 60; ++n) {
    const auto s = std::to_string(n);
    auto days = normalize_time_expression(s + " days ago");
    auto weeks = normalize_time_expression(s + " weeks ago");
    auto hist = normalize_time_expression(s + "-day history of pain");
    ASSERT_TRUE(days && weeks && hist);
    EXPECT_EQ(*days, -24.0 * n);
    EXPECT_EQ(*weeks, 7.0 * *days);
    EXPECT_EQ(*hist, *days);
  }
  const char* words[] = {"one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"};
  for (int n = 1; n <= 10; ++n) {
    EXPECT_EQ(normalize_time_expression(std::string(words[n - 1]) + " days ago"), -24.0 * n);
  }
}

TEST(TimeNormalization, Deterministic) {
  for (int i = 0; i < 3; ++i) EXPECT_EQ(normalize_time_expression("four-day history of cough"), -96.0);
}

// ---------------------------------------------------------------------------
// Corpus statistics
// ---------------------------------------------------------------------------

TEST(CorpusStats, HandComputed) {
  std::vector<Timeline> corpus = {
      {"a", {{"x", -48}, {"y", 0}, {"z", 0}, {"w", 24}}},
      {"b", {{"x", 0}, {"y", 72}}},
  };
  auto s = corpus_stats(corpus);
  EXPECT_EQ(s.n_cases, 2u);
  EXPECT_EQ(s.n_events, 6u);
  EXPECT_DOUBLE_EQ(s.length_mean, 3.0);
  EXPECT_DOUBLE_EQ(s.duration_days_mean, 3.0);  // (3 + 3) / 2
  EXPECT_DOUBLE_EQ(s.shared_timestamp_fraction, 0.25);  // (2/4 + 0) / 2
  EXPECT_DOUBLE_EQ(s.timestamp_uniqueness_ratio_median, (0.75 + 1.0) / 2);
  EXPECT_DOUBLE_EQ(s.negative_time_fraction, 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(s.length_quantiles.at(50), 3.0);
  EXPECT_DOUBLE_EQ(s.length_quantiles.at(1), 2.02);
}

TEST(CorpusStats, Errors) {
  std::vector<Timeline> none;
  EXPECT_THROW(corpus_stats(none), Error);
  std::vector<Timeline> empty = {{"a", {}}};
  EXPECT_THROW(corpus_stats(empty), Error);
}

TEST(CorpusStats, PropertiesOnRandomCorpora) {
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<Timeline> corpus;
    for (int c = 0; c < 8; ++c) corpus.push_back(random_timeline(rng));
    corpus[0].events.push_back({"anchor", 1.0});
    auto s = corpus_stats(corpus);
    for (double f : {s.shared_timestamp_fraction, s.timestamp_uniqueness_ratio_median, s.negative_time_fraction}) {
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0);
    }
    double prev = -1;
    for (const auto& [p, v] : s.length_quantiles) {
      EXPECT_GE(v, prev);
      prev = v;
    }
    prev = -1;
    for (const auto& [p, v] : s.duration_days_quantiles) {
      EXPECT_GE(v, prev);
      prev = v;
    }

    auto shuffled = corpus;
    for (auto& tl : shuffled) std::shuffle(tl.events.begin(), tl.events.end(), rng);
    EXPECT_EQ(to_json(corpus_stats(shuffled)), to_json(s));
  }
}

TEST(CorpusStats, DistinctTimestamps) {
  std::vector<Timeline> distinct = {{"a", {{"x", 1}, {"y", 2}, {"z", 3}}}};
  auto s = corpus_stats(distinct);
  EXPECT_EQ(s.timestamp_uniqueness_ratio_median, 1.0);
  EXPECT_EQ(s.shared_timestamp_fraction, 0.0);
  std::vector<Timeline> tied = {{"a", {{"x", 1}, {"y", 1}, {"z", 3}}}};
  auto t = corpus_stats(tied);
  EXPECT_LT(t.timestamp_uniqueness_ratio_median, 1.0);
  EXPECT_GT(t.shared_timestamp_fraction, 0.0);
}

TEST(CorpusStats, CsvMatchesJsonKeys) {
  std::vector<Timeline> corpus = {{"a", {{"x", 1}, {"y", 2}}}};
  auto s = corpus_stats(corpus);
  std::ostringstream out;
  write_stats_csv(s, out);
  const auto csv = out.str();
  const auto j = to_json(s);
  for (const auto& [k, v] : j.items()) EXPECT_NE(csv.find("\n" + k + ","), std::string::npos) << k;
}
