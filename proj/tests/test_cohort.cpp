#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "ctts/cohort.hpp"
#include "ctts/survival_record.hpp"

using namespace ctts;

namespace {

CaseRecord make(const std::string& id, std::vector<TimelineEvent> events, bool diabetic = true,
                std::optional<double> age = 50.0, SexCategory sex = SexCategory::Male) {
  CaseMetadata m{id, age, {sex, {}}, {}};
  if (diabetic) m.diagnoses = {"Type 2 diabetes mellitus"};
  else m.diagnoses = {"Hypertension"};
  return make_case_record(m, Timeline{id, std::move(events)});
}

const Lexicon& glp() {
  static const Lexicon l = default_glp1ra_lexicon();
  return l;
}
const Lexicon& dm() {
  static const Lexicon l = default_diabetes_lexicon();
  return l;
}
const Lexicon& resp() {
  static const Lexicon l = default_respiratory_lexicon();
  return l;
}

std::set<std::string> ids(const std::vector<CohortMember>& v) {
  std::set<std::string> s;
  for (const auto& m : v) s.insert(m.case_id);
  return s;
}

std::vector<CaseRecord> random_pool(std::mt19937_64& rng, std::size_t n, const std::string& prefix) {
  std::vector<CaseRecord> out;
  std::uniform_int_distribution<int> t(-1000, 5000);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<TimelineEvent> ev{{"admitted", 0}, {"follow-up", double(t(rng))}};
    const auto r = rng() % 10;
    if (r == 0) ev.push_back({"started liraglutide", double(t(rng) % 72)});
    if (r == 1) ev.push_back({"semaglutide", 500});
    if (rng() % 3 == 0) ev.push_back({"pneumonia", double(t(rng))});
    out.push_back(make(prefix + std::to_string(i), ev, rng() % 2 == 0));
  }
  return out;
}

}  // namespace

TEST(Exposure, Classification) {
  EXPECT_EQ(classify_exposure(make("a", {{"started semaglutide", 10}}), glp()), ExposureClass::Treated);
  EXPECT_EQ(classify_exposure(make("a", {{"started semaglutide", 72}}), glp()), ExposureClass::Treated);
  EXPECT_EQ(classify_exposure(make("a", {{"started semaglutide", 72.5}}), glp()), ExposureClass::LateInitiator);
  EXPECT_EQ(classify_exposure(make("a", {{"on GLP-1 RA", -8766}, {"liraglutide", 500}}), glp()),
            ExposureClass::Treated);
  EXPECT_EQ(classify_exposure(make("a", {{"metformin", 0}}), glp()), ExposureClass::Unexposed);
  EXPECT_EQ(classify_exposure(make("a", {{"semaglutide", 100}}), glp(), 120.0), ExposureClass::Treated);
  EXPECT_THROW(classify_exposure(make("a", {}), glp(), 0.0), Error);
}

TEST(Exposure, OrderInvariant) {
  std::mt19937_64 rng(31);
  auto pool = random_pool(rng, 300, "p");
  for (auto& rec : pool) {
    const auto before = classify_exposure(rec, glp());
    std::shuffle(rec.timeline.events.begin(), rec.timeline.events.end(), rng);
    EXPECT_EQ(classify_exposure(rec, glp()), before);
  }
}

TEST(CaseRecords, ReadAndValidate) {
  std::istringstream in(R"({"case_id":"a","events":[{"t":0,"e":"x"}],"age_years":61,"sex":"F","diagnoses":["DM"]}
{"case_id":"b","events":[],"age_years":null})");
  auto recs = read_case_records(in);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].metadata.sex.category, SexCategory::Female);
  EXPECT_EQ(recs[0].metadata.age_years, 61.0);
  EXPECT_FALSE(recs[1].metadata.age_years);
  EXPECT_EQ(recs[1].metadata.sex.category, SexCategory::NotSpecified);
  EXPECT_EQ(case_record_to_json(recs[0])["sex"], "Female");

  std::istringstream bad_age(R"({"case_id":"a","events":[],"age_years":200})");
  EXPECT_THROW(read_case_records(bad_age), ParseError);
  std::istringstream dup(R"({"case_id":"a","events":[]}
{"case_id":"a","events":[]})");
  EXPECT_THROW(read_case_records(dup), ParseError);
  EXPECT_THROW(make_case_record(CaseMetadata{"x", {}, {}, {}}, Timeline{"y", {}}), Error);
}

TEST(Cohort, GroupsAndTopUp) {
  std::vector<CaseRecord> cases = {
      make("t1", {{"semaglutide", 0}}),
      make("t2", {{"liraglutide", 48}}),
      make("late", {{"liraglutide", 200}}),
      make("u1", {{"metformin", 0}}),
      make("nondm", {{"semaglutide", 0}}, false),
  };
  std::vector<CaseRecord> pool;
  for (int i = 0; i < 20; ++i) pool.push_back(make("p" + std::to_string(i), {{"x", 0}}, false));
  pool.push_back(make("pexp", {{"exenatide", 5}}, false));
  pool.push_back(make("t1", {{"x", 0}}));  // duplicate of a treated id

  auto c = build_cohort(cases, glp(), dm(), pool, {72.0, 5.0, 99});
  EXPECT_EQ(ids(c.treated), (std::set<std::string>{"t1", "t2"}));
  EXPECT_EQ(c.target_comparison, 10u);
  EXPECT_EQ(c.comparison.size(), 10u);
  EXPECT_EQ(c.sampled_from_pool, 8u);
  const auto comp = ids(c.comparison);
  EXPECT_TRUE(comp.count("late"));
  EXPECT_TRUE(comp.count("u1"));
  EXPECT_FALSE(comp.count("pexp"));
  EXPECT_FALSE(comp.count("nondm"));
  for (const auto& m : c.comparison) EXPECT_FALSE(m.exposed);
  for (const auto& m : c.treated) EXPECT_TRUE(m.exposed);
  EXPECT_TRUE(c.warnings.empty());
}

TEST(Cohort, PoolExhaustionWarns) {
  std::vector<CaseRecord> cases = {make("t1", {{"semaglutide", 0}}), make("t2", {{"semaglutide", 0}})};
  std::vector<CaseRecord> pool = {make("p1", {{"x", 0}}, false), make("p2", {{"x", 0}}, false)};
  auto c = build_cohort(cases, glp(), dm(), pool, {72.0, 5.0, 1});
  EXPECT_EQ(c.comparison.size(), 2u);
  ASSERT_EQ(c.warnings.size(), 1u);
  EXPECT_NE(c.warnings[0].find("exhausted"), std::string::npos);
}

TEST(Cohort, NoTreatedIsAnError) {
  std::vector<CaseRecord> cases = {make("u", {{"x", 0}})};
  EXPECT_THROW(build_cohort(cases, glp(), dm(), {}, {}), Error);
}

TEST(Cohort, SeededAndDisjoint) {
  std::mt19937_64 rng(32);
  auto cases = random_pool(rng, 60, "c");
  cases.push_back(make("anchor", {{"semaglutide", 0}}));
  auto pool = random_pool(rng, 400, "p");
  for (std::uint64_t seed : {1ull, 2ull, 123456789ull}) {
    auto a = build_cohort(cases, glp(), dm(), pool, {72.0, 5.0, seed});
    auto b = build_cohort(cases, glp(), dm(), pool, {72.0, 5.0, seed});
    EXPECT_EQ(cohort_to_json(a), cohort_to_json(b));
    auto t = ids(a.treated), c = ids(a.comparison);
    for (const auto& id : t) EXPECT_FALSE(c.count(id));
    EXPECT_EQ(c.size(), a.comparison.size());  // no duplicates
  }
  auto a = build_cohort(cases, glp(), dm(), pool, {72.0, 5.0, 1});
  auto b = build_cohort(cases, glp(), dm(), pool, {72.0, 5.0, 2});
  EXPECT_NE(ids(a.comparison), ids(b.comparison));
}

TEST(Outcome, Ascertainment) {
  auto o = ascertain_outcome(make("a", {{"x", -5}, {"pneumonia", 300}, {"asthma", 100}, {"y", 900}}), resp());
  EXPECT_TRUE(o.event);
  EXPECT_EQ(o.time_hours, 100.0);
  EXPECT_FALSE(o.baseline_prevalent);

  o = ascertain_outcome(make("a", {{"history of asthma", -8766}, {"y", 900}}), resp());
  EXPECT_TRUE(o.event);
  EXPECT_TRUE(o.baseline_prevalent);
  EXPECT_EQ(o.time_hours, 0.0);
  EXPECT_FALSE(o.excluded);
  o = ascertain_outcome(make("a", {{"history of asthma", 0}}), resp(), BaselinePolicy::Exclude);
  EXPECT_TRUE(o.excluded);

  o = ascertain_outcome(make("a", {{"x", -5}, {"y", 900}, {"z", 10}}), resp());
  EXPECT_FALSE(o.event);
  EXPECT_EQ(o.time_hours, 900.0);
  o = ascertain_outcome(make("a", {{"x", -50}}), resp());
  EXPECT_EQ(o.time_hours, 0.0);
  EXPECT_THROW(ascertain_outcome(make("a", {}), resp()), Error);
}

TEST(Outcome, PropertiesOnRandomCases) {
  std::mt19937_64 rng(33);
  auto pool = random_pool(rng, 500, "p");
  std::size_t matched = 0, events = 0;
  for (const auto& rec : pool) {
    double mx = -1e300;
    bool any = false;
    for (const auto& e : rec.timeline.events) {
      mx = std::max(mx, e.time_hours);
      any = any || lexicon_matches(e.text, resp());
    }
    const auto o = ascertain_outcome(rec, resp());
    EXPECT_LE(o.time_hours, std::max(mx, 0.0));
    if (!o.event) {
      EXPECT_EQ(o.time_hours, std::max(mx, 0.0));
    }
    matched += any;
    events += o.event;
  }
  EXPECT_EQ(matched, events);
}

TEST(SurvivalTable, MonthsImputationAndPolicy) {
  std::vector<CaseRecord> cases = {
      make("t1", {{"semaglutide", 0}, {"pneumonia", 730.5}}, true, 40.0, SexCategory::Female),
      make("t2", {{"semaglutide", 0}, {"follow-up", 1461}}, true, std::nullopt),
      make("u1", {{"asthma", -10}, {"follow-up", 100}}, true, 60.0),
  };
  auto c = build_cohort(cases, glp(), dm(), {}, {72.0, 0.5, 1});
  auto table = to_survival_records(c, cases, {}, resp());
  ASSERT_EQ(table.records.size(), 3u);
  EXPECT_EQ(table.records[0].case_id, "t1");
  EXPECT_EQ(table.records[0].duration_months, 1.0);
  EXPECT_TRUE(table.records[0].event);
  EXPECT_EQ(table.records[0].sex, SexCategory::Female);
  EXPECT_EQ(table.records[1].duration_months, 2.0);
  EXPECT_FALSE(table.records[1].event);
  EXPECT_TRUE(table.records[1].age_imputed);
  EXPECT_EQ(table.records[1].age_years, 50.0);
  EXPECT_EQ(table.imputed_age, 50.0);
  EXPECT_EQ(table.age_imputed, (std::vector<std::string>{"t2"}));
  EXPECT_TRUE(table.records[2].baseline_prevalent);
  EXPECT_EQ(table.records[2].duration_months, 0.0);
  EXPECT_FALSE(table.records[2].exposed);

  auto excl = to_survival_records(c, cases, {}, resp(), BaselinePolicy::Exclude);
  EXPECT_EQ(excl.records.size(), 2u);
  EXPECT_EQ(excl.excluded, (std::vector<std::string>{"u1"}));
}

TEST(SurvivalCsv, RoundTrip) {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<SurvivalRecord> recs;
  for (int i = 0; i < 100; ++i) {
    SurvivalRecord r;
    r.case_id = "c" + std::to_string(i);
    r.duration_months = u(rng) / 7.3;
    r.event = rng() % 2;
    r.exposed = rng() % 2;
    r.age_years = u(rng);
    r.sex = static_cast<SexCategory>(rng() % 4);
    r.baseline_prevalent = r.event && rng() % 5 == 0;
    recs.push_back(r);
  }
  std::stringstream ss;
  ss << "# provenance\n";
  write_survival_csv(recs, ss);
  EXPECT_EQ(read_survival_csv(ss), recs);

  std::istringstream bad("case_id,duration_months,event,exposed,age,sex,baseline_prevalent\nx,-1,0,0,50,Male,0\n");
  EXPECT_THROW(read_survival_csv(bad), ParseError);
  std::vector<SurvivalRecord> comma{{"a,b", 1, false, false, 1, SexCategory::Male, false, false}};
  std::ostringstream out;
  EXPECT_THROW(write_survival_csv(comma, out), Error);
}

TEST(SurvivalCsv, SexIndicators) {
  EXPECT_EQ(sex_onehot(SexCategory::Male), (std::array<double, 3>{0, 0, 0}));
  EXPECT_EQ(sex_onehot(SexCategory::Female), (std::array<double, 3>{1, 0, 0}));
  EXPECT_EQ(sex_onehot(SexCategory::Other), (std::array<double, 3>{0, 1, 0}));
  EXPECT_EQ(sex_onehot(SexCategory::NotSpecified), (std::array<double, 3>{0, 0, 1}));
}
