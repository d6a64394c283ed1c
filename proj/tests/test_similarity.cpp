#include <gtest/gtest.h>

#include <memory>
#include <random>
#include <sstream>

#include "ctts/similarity.hpp"
#include "oracles.hpp"

using namespace ctts;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(dim);
  for (auto& x : v) x = n(rng);
  return v;
}

}  // namespace

TEST(Cosine, KnownValues) {
  const std::vector<double> a{1, 0}, b{0, 1}, c{-1, 0}, d{2, 0};
  EXPECT_DOUBLE_EQ(cosine_distance(a, b), 1.0);
  EXPECT_DOUBLE_EQ(cosine_distance(a, c), 2.0);
  EXPECT_DOUBLE_EQ(cosine_distance(a, d), 0.0);
  const std::vector<double> z{0, 0}, e{1, 0, 0};
  EXPECT_THROW(cosine_distance(a, z), Error);
  EXPECT_THROW(cosine_distance(a, e), Error);
}

TEST(Cosine, Properties) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int i = 0; i < 1000; ++i) {
    auto u = random_vector(rng, 8), v = random_vector(rng, 8);
    const double d = cosine_distance(u, v);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 2.0);
    EXPECT_EQ(d, cosine_distance(v, u));
    EXPECT_NEAR(cosine_distance(u, u), 0.0, 1e-15);
    auto su = u, sv = v;
    const double a = scale(rng), b = scale(rng);
    for (auto& x : su) x *= a;
    for (auto& x : sv) x *= b;
    EXPECT_NEAR(cosine_distance(su, sv), d, 1e-12);
  }
}

TEST(EmbeddingStore, LoadAndLookup) {
  std::istringstream in(R"({"text":"fever","vector":[1,0,0]}

{"text":"  chest pain ","vector":[0,1,0]}
{"text":"fever","vector":[0,0,1]})");
  auto store = load_embeddings(in);
  EXPECT_EQ(store.size(), 2u);
  EXPECT_EQ(store.dimension(), 3u);
  EXPECT_EQ(store.at("fever"), (std::vector<double>{0, 0, 1}));  // later line wins
  EXPECT_NE(store.find(" chest pain"), nullptr);
  EXPECT_EQ(store.find("Fever"), nullptr);  // exact lookup, no case folding
  EXPECT_THROW(store.at("cough"), Error);
}

TEST(EmbeddingStore, RejectsBadInput) {
  auto load = [](const std::string& s) {
    std::istringstream in(s);
    return load_embeddings(in);
  };
  EXPECT_THROW(load(""), Error);
  EXPECT_THROW(load(R"({"text":"a","vector":[0,0]})"), ParseError);
  EXPECT_THROW(load(R"({"text":"a","vector":[1,0]}
{"text":"b","vector":[1,0,0]})"),
               ParseError);
  EXPECT_THROW(load(R"({"text":"a","vector":["x"]})"), ParseError);
  EXPECT_THROW(load(R"({"vector":[1]})"), ParseError);
  EXPECT_THROW(load("not json"), ParseError);
  try {
    load(R"({"text":"a","vector":[1,0]}
{"text":"b"})");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Lexical, MatchesJaccardOracle) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 2000; ++i) {
    auto a = oracle::random_text(rng), b = oracle::random_text(rng);
    const double d = lexical_distance(a, b);
    EXPECT_EQ(d, oracle::jaccard_distance(a, b));
    EXPECT_EQ(d, lexical_distance(b, a));
    EXPECT_EQ(lexical_distance(a, a), 0.0);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
  }
  EXPECT_EQ(lexical_distance("Chest pain.", "chest   PAIN"), 0.0);
  EXPECT_EQ(lexical_distance("", "  "), 0.0);
  EXPECT_EQ(lexical_distance("fever", ""), 1.0);
  EXPECT_DOUBLE_EQ(lexical_distance("acute chest pain", "chest pain"), 1.0 / 3.0);
}

TEST(Provider, EmbeddingRequiresEveryText) {
  auto store = std::make_shared<EmbeddingStore>();
  store->insert("fever", {1, 0});
  store->insert("febrile", {1, 0.1});
  auto p = DistanceProvider::embedding(store);
  EXPECT_EQ(p.describe(), "embedding");
  EXPECT_NEAR(p.distance("fever", "febrile"), 1 - 1 / std::sqrt(1.01), 1e-15);
  EXPECT_THROW(p.distance("fever", "cough"), Error);
  EXPECT_EQ(DistanceProvider::lexical().describe(), "lexical");
}

TEST(Provider, SymmetryAndSelfDistance) {
  std::mt19937_64 rng(4);
  auto store = std::make_shared<EmbeddingStore>();
  std::vector<std::string> texts;
  for (int i = 0; i < 40; ++i) {
    texts.push_back("t" + std::to_string(i));
    store->insert(texts.back(), random_vector(rng, 5));
  }
  const auto p = DistanceProvider::embedding(store);
  for (const auto& a : texts)
    for (const auto& b : texts) {
      EXPECT_EQ(p.distance(a, b), p.distance(b, a));
      if (a == b) {
        EXPECT_EQ(p.distance(a, b), 0.0);
      }
    }
}
