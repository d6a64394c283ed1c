// Generates the bundled synthetic corpus under <out_dir>:
//   docs/       plain-text documents for `ctts filter`
//   ref/ pred/  reference and predicted timelines (TSV) for evaluate/sweep
//   embeddings.jsonl   vectors for every event text in ref/ and pred/
//   cases.jsonl pool.jsonl   case records for cohort/survival
//
// Respiratory onset is exponential with a hazard ratio of 0.25 for the
// in-window GLP-1RA group; kidney and cardiovascular onsets have no effect.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "ctts/cohort.hpp"
#include "ctts/timeline.hpp"

namespace {

namespace fs = std::filesystem;
using ctts::Timeline;

constexpr double kMonth = 730.5;

struct Concept {
  std::string text;
  std::string paraphrase;
};

const std::vector<Concept> kConcepts = {
    {"fever", "febrile"},
    {"chest pain", "pain in chest"},
    {"nausea", "nausea and vomiting"},
    {"abdominal pain", "epigastric abdominal pain"},
    {"admitted to the hospital", "admitted to hospital"},
    {"hypertension", "history of hypertension"},
    {"obesity", "severe obesity"},
    {"type 2 diabetes mellitus", "type 2 diabetes"},
    {"metformin", "metformin therapy"},
    {"elevated lipase", "lipase elevated"},
    {"ct scan of the abdomen", "abdominal ct scan"},
    {"weight loss", "unintentional weight loss"},
    {"discharged home", "discharged"},
    {"headache", "severe headache"},
    {"fatigue", "generalized fatigue"},
    {"dyslipidemia", "hyperlipidemia"},
    {"insulin glargine", "basal insulin"},
    {"blurred vision", "vision blurred"},
};

std::vector<double> unit_noise(std::mt19937_64& rng, std::size_t dim, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<double> v(dim);
  for (auto& x : v) x = n(rng);
  return v;
}

void write_tsv(const fs::path& dir, const Timeline& tl) {
  std::ofstream out(dir / (tl.case_id + ".tsv"));
  ctts::serialize_timeline(tl, out);
}

void make_timelines(const fs::path& out, std::mt19937_64& rng) {
  fs::create_directories(out / "ref");
  fs::create_directories(out / "pred");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> n_events(6, 12);
  std::uniform_int_distribution<std::size_t> pick(0, kConcepts.size() - 1);
  std::vector<std::pair<std::string, std::size_t>> texts;  // text -> concept

  for (int c = 0; c < 25; ++c) {
    Timeline ref{"case" + std::to_string(100 + c), {}}, pred{ref.case_id, {}};
    std::vector<std::size_t> chosen;
    const int k = n_events(rng);
    while (static_cast<int>(chosen.size()) < k) {
      auto idx = pick(rng);
      if (std::find(chosen.begin(), chosen.end(), idx) == chosen.end()) chosen.push_back(idx);
    }
    for (auto idx : chosen) {
      const double r = u(rng);
      double t = r < 0.3 ? 0.0 : (r < 0.6 ? -24.0 * std::floor(u(rng) * 400) : 24.0 * std::floor(u(rng) * 10));
      ref.events.push_back({kConcepts[idx].text, t});
      texts.emplace_back(kConcepts[idx].text, idx);
      const double keep = u(rng);
      if (keep < 0.15) continue;  // missed by the extractor
      std::string text = keep < 0.3 ? kConcepts[idx].paraphrase : kConcepts[idx].text;
      const double j = u(rng);
      double pt = t;
      if (j > 0.6 && j <= 0.9) pt = t + 24.0 * (u(rng) < 0.5 ? -1 : 1) * std::ceil(u(rng) * 3);
      if (j > 0.9) pt = t + (u(rng) < 0.5 ? -720.0 : 720.0);
      pred.events.push_back({text, pt});
      texts.emplace_back(text, idx);
    }
    if (u(rng) < 0.5) {
      pred.events.push_back({"patient reported anxiety", 0.0});
      texts.emplace_back("patient reported anxiety", kConcepts.size());
    }
    std::shuffle(pred.events.begin(), pred.events.end(), rng);
    write_tsv(out / "ref", ref);
    write_tsv(out / "pred", pred);
  }

  // Concept directions plus small per-text perturbations: exact repeats share
  // one vector, paraphrases sit close to their concept.
  constexpr std::size_t dim = 16;
  std::vector<std::vector<double>> basis;
  for (std::size_t i = 0; i <= kConcepts.size(); ++i) basis.push_back(unit_noise(rng, dim, 1.0));
  std::sort(texts.begin(), texts.end());
  texts.erase(std::unique(texts.begin(), texts.end()), texts.end());
  std::ofstream emb(out / "embeddings.jsonl");
  for (const auto& [text, idx] : texts) {
    auto v = basis[idx];
    const bool paraphrase = idx < kConcepts.size() && text != kConcepts[idx].text;
    if (paraphrase) {
      auto noise = unit_noise(rng, dim, 0.08);
      for (std::size_t d = 0; d < dim; ++d) v[d] += noise[d];
    }
    emb << nlohmann::json{{"text", text}, {"vector", v}}.dump() << '\n';
  }
}

void make_docs(const fs::path& out) {
  fs::create_directories(out / "docs");
  const std::vector<std::pair<std::string, std::string>> docs = {
      {"pmc0001", "Title\n==== Body\nWe present a case report of a 57-year-old man with type 2 diabetes started on "
                  "semaglutide 0.25 mg weekly.\n==== Ref\n1. Ref."},
      {"pmc0002", "==== Body\nCase presentation: A 63 year old woman on liraglutide developed nausea.\n==== Ref\n"},
      {"pmc0003", "==== Body\nA review of GLP-1 receptor agonist pharmacology in adults.\n==== Ref\n"},
      {"pmc0004", "==== Body\nWe report the case of a 45-year old man treated with metformin.\n==== Ref\n"},
      {"pmc0005", "Abstract only. Case report of a 70-year-old man on exenatide; no body markers.\n"},
      {"pmc0006", "==== Body\nThis case presented a 52 yearold patient receiving a GLP1 analog.\n==== Ref\n"},
  };
  for (const auto& [id, text] : docs) std::ofstream(out / "docs" / (id + ".txt")) << text;
}

struct CaseSpec {
  std::string id;
  bool diabetic;
  enum { None, Early, Late } glp;
};

nlohmann::json make_case(const CaseSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> age_d(58.0, 12.0);
  Timeline tl{spec.id, {}};
  const double censor_months = 12.0 + u(rng) * 108.0;
  const double censor_h = std::round(censor_months * kMonth);
  tl.events.push_back({"admitted to the hospital", 0.0});
  tl.events.push_back({"hypertension", -8766.0 * std::ceil(u(rng) * 5)});
  if (spec.diabetic) {
    tl.events.push_back({"type 2 diabetes mellitus", -8766.0 * std::ceil(u(rng) * 10)});
    tl.events.push_back({"metformin", -8766.0 * std::ceil(u(rng) * 3)});
  } else {
    tl.events.push_back({"osteoarthritis of the knee", -8766.0 * std::ceil(u(rng) * 4)});
  }
  static const char* drugs[] = {"semaglutide", "liraglutide", "dulaglutide", "exenatide"};
  const char* drug = drugs[static_cast<int>(u(rng) * 4)];
  if (spec.glp == CaseSpec::Early) tl.events.push_back({std::string("started on ") + drug, std::round(u(rng) * 72.0)});
  if (spec.glp == CaseSpec::Late)
    tl.events.push_back({std::string("started on ") + drug, 100.0 + std::round(u(rng) * censor_h * 0.5)});

  const bool exposed = spec.glp == CaseSpec::Early;
  auto onset = [&](double monthly_rate) {
    std::exponential_distribution<double> e(monthly_rate);
    return e(rng);
  };
  struct Outcome {
    const char* text;
    double rate;
  };
  const Outcome outcomes[] = {{"community-acquired pneumonia", exposed ? 0.0125 * 0.25 : 0.0125},
                              {"acute kidney injury", 0.008},
                              {"myocardial infarction", 0.006}};
  for (const auto& o : outcomes) {
    const double t = onset(o.rate);
    if (t < censor_months) tl.events.push_back({o.text, std::round(t * kMonth)});
  }
  if (u(rng) < 0.03) tl.events.push_back({"history of asthma", -8766.0});
  tl.events.push_back({"follow-up visit", censor_h});
  std::sort(tl.events.begin(), tl.events.end(),
            [](const auto& a, const auto& b) { return a.time_hours < b.time_hours; });

  auto j = ctts::timeline_to_json(tl);
  const double sex_r = u(rng);
  j["sex"] = sex_r < 0.48 ? "Male" : (sex_r < 0.96 ? "Female" : "Not specified");
  const double age = std::clamp(std::round(age_d(rng)), 18.0, 95.0);
  j["age_years"] = u(rng) < 0.05 ? nlohmann::json(nullptr) : nlohmann::json(age);
  j["diagnoses"] = spec.diabetic ? nlohmann::json{"Type 2 diabetes mellitus", "Hypertension"}
                                 : nlohmann::json{"Hypertension", "Osteoarthritis"};
  return j;
}

void make_cases(const fs::path& out, std::mt19937_64& rng) {
  std::ofstream cases(out / "cases.jsonl"), pool(out / "pool.jsonl");
  int id = 0;
  auto next = [&](const char* prefix) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%04d", prefix, ++id);
    return std::string(buf);
  };
  for (int i = 0; i < 60; ++i) cases << make_case({next("glp"), true, CaseSpec::Early}, rng).dump() << '\n';
  for (int i = 0; i < 15; ++i) cases << make_case({next("glp"), true, CaseSpec::Late}, rng).dump() << '\n';
  for (int i = 0; i < 8; ++i) cases << make_case({next("glp"), false, CaseSpec::Early}, rng).dump() << '\n';
  for (int i = 0; i < 60; ++i) cases << make_case({next("dm"), true, CaseSpec::None}, rng).dump() << '\n';
  for (int i = 0; i < 400; ++i) pool << make_case({next("pool"), false, CaseSpec::None}, rng).dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_synthetic <out_dir>\n";
    return 2;
  }
  const fs::path out = argv[1];
  fs::create_directories(out);
  std::mt19937_64 rng(20240521);
  make_docs(out);
  make_timelines(out, rng);
  make_cases(out, rng);
  return 0;
}
