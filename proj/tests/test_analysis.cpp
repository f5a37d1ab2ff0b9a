#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "corpus_gen.hpp"
#include "wheacha/wheacha.hpp"

using namespace wheacha;

TEST_CASE("single-identifier wheat classifies as lexical") {
  Program p = Program::from_source("void f() {\nrandomizer;\nfill(stuff);\n}");
  RuleConfig cfg;
  cfg.rules = {{{"randomizer"}, {}, "shuffle"}};
  cfg.default_label = "plain";
  RulePresenceModel model("lex", cfg);
  QueryLedger ledger;
  Wheat w = extract_wheat(p, model, ledger);
  CHECK(serialize(w.ast) == "randomizer;");
  CHECK(classify_wheat(w, p, model, ledger) == WheatClass::Lexical);
}

TEST_CASE("call-shaped wheat classifies as syntactic") {
  Program p = Program::from_source("void f() {\nmItems.add(position);\nfill(stuff);\n}");
  RuleConfig cfg;
  cfg.rules = {{{"mItems", "add"}, {}, "addItem"}};
  cfg.default_label = "plain";
  RulePresenceModel model("syn", cfg);
  QueryLedger ledger;
  Wheat w = extract_wheat(p, model, ledger);
  CHECK(classify_wheat(w, p, model, ledger) == WheatClass::Syntactic);
}

TEST_CASE("edge-dependent wheat classifies as semantic") {
  Program p = Program::from_source("void f() {\nacc = seed + 1;\nfill(stuff);\n}");
  auto model = testgen::edge_rule_model();
  QueryLedger ledger;
  Wheat w = extract_wheat(p, model, ledger);
  REQUIRE(w.verdict.sufficient);
  // stripping the semantic edges silences the only rule
  CHECK(classify_wheat(w, p, model, ledger) == WheatClass::Semantic);
}

TEST_CASE("token-only models never classify as semantic") {
  Program p = Program::from_source("void f() {\nacc = seed + 1;\nalpha;\n}");
  auto model = testgen::monotone_rule_model();
  QueryLedger ledger;
  Wheat w = extract_wheat(p, model, ledger);
  WheatClass c = classify_wheat(w, p, model, ledger);
  CHECK(c != WheatClass::Semantic);
}

TEST_CASE("occlusion scores are zero for zero-weight tokens and positive for critical ones") {
  LinearBagConfig cfg;
  cfg.labels = {"other", "pos"};
  cfg.weights["hot"]["pos"] = 2.0;
  cfg.bias["other"] = 1.0;
  cfg.temperature = 1.0;
  LinearBagModel model("lb", cfg);
  Program p = Program::from_source("void f() { cold(hot); }");
  QueryLedger ledger;
  AttributionScores s = occlusion_attribution(p, model, ledger);
  REQUIRE(s.scores.size() == p.tokens.size());

  // independent softmax arithmetic for the hot position
  double p_orig = std::exp(2.0) / (std::exp(2.0) + std::exp(1.0));
  double p_occl = std::exp(0.0) / (std::exp(0.0) + std::exp(1.0));
  int hot_pos = -1, cold_pos = -1;
  for (const Token& t : p.tokens) {
    if (t.text == "hot") hot_pos = t.position;
    if (t.text == "cold") cold_pos = t.position;
  }
  CHECK(std::abs(s.scores[hot_pos] - (p_orig - p_occl)) < 1e-9);
  CHECK(s.scores[hot_pos] > 0.0);
  CHECK(s.scores[cold_pos] == 0.0);  // zero weight: softmax unchanged
}

TEST_CASE("occlusion requires probabilities") {
  Program p = Program::from_source("void f() { x; }");
  // external models may omit probs; emulate one via a reply without probs
  struct NoProbModel : Model {
    std::string id_ = "noprob";
    const std::string& id() const override { return id_; }
    ModelKind kind() const override { return ModelKind::External; }
    bool concurrency_safe() const override { return true; }
    Prediction predict(const std::string&) const override { return Prediction{"l", std::nullopt}; }
  } model;
  QueryLedger ledger;
  CHECK_THROWS_AS(occlusion_attribution(p, model, ledger), NoProbabilities);
}

TEST_CASE("coverage on the hand-built ten-token instance") {
  Program p = Program::from_source("void f() { c.d; }");
  REQUIRE(p.tokens.size() == 10);
  AttributionScores s;
  s.scores.assign(10, 0.0);
  // ranks: position 0 (a) first, 2 (b) second, 5 (c) third, 7 (d) fourth
  s.scores[0] = 0.9;
  s.scores[2] = 0.8;
  s.scores[5] = 0.5;
  s.scores[7] = 0.4;
  std::vector<std::string> wheat_terms = {"c", "d"};  // score ranks 3 and 4
  CHECK_FALSE(coverage(s, wheat_terms, p, 30).covered);  // ceil(3) positions
  CHECK(coverage(s, wheat_terms, p, 40).covered);
  CHECK(coverage(s, wheat_terms, p, 100).covered);
}

TEST_CASE("full-grid coverage is covered at 100 percent") {
  auto model = testgen::linear_bag_model();
  for (const auto& g : testgen::generate_corpus(10, 17)) {
    Program p = Program::from_source(g.source);
    QueryLedger ledger;
    Wheat w = extract_wheat(p, model, ledger);
    AttributionScores s = occlusion_attribution(p, model, ledger);
    CHECK(coverage(s, wheat_terminal_texts(w), p, 100).covered);
  }
}

TEST_CASE("coverage aggregate is monotone over the percentage grid") {
  auto model = testgen::linear_bag_model();
  auto corpus = testgen::generate_corpus(30, 23);
  std::vector<double> grid = {10, 30, 50, 70, 90};
  std::vector<int> covered(grid.size(), 0);
  for (const auto& g : corpus) {
    Program p = Program::from_source(g.source);
    QueryLedger ledger;
    Wheat w = extract_wheat(p, model, ledger);
    AttributionScores s = occlusion_attribution(p, model, ledger);
    std::vector<std::string> terms = wheat_terminal_texts(w);
    bool prev = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      bool c = coverage(s, terms, p, grid[i]).covered;
      if (prev) CHECK(c);  // per-program monotonicity
      prev = c;
      if (c) ++covered[i];
    }
  }
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(covered[i] >= covered[i - 1]);
}

TEST_CASE("ties in the top set break toward lower positions") {
  Program p = Program::from_source("void f() { c.d; }");
  AttributionScores s;
  s.scores.assign(10, 0.0);  // everything ties at zero
  // top 10% = ceil(1) = position 0 only
  CHECK(coverage(s, {"void"}, p, 10).covered);
  CHECK_FALSE(coverage(s, {"f"}, p, 10).covered);
}

TEST_CASE("occlusion is permutation-equivariant under token-symmetric models") {
  LinearBagConfig cfg;
  cfg.labels = {"other", "pos"};
  cfg.weights["a"]["pos"] = 1.5;
  cfg.weights["b"]["pos"] = 1.5;  // a and b are interchangeable
  cfg.bias["other"] = 1.0;
  LinearBagModel model("sym", cfg);
  Program p1 = Program::from_source("void f() { use(a, b); }");
  Program p2 = Program::from_source("void f() { use(b, a); }");
  QueryLedger ledger;
  AttributionScores s1 = occlusion_attribution(p1, model, ledger);
  AttributionScores s2 = occlusion_attribution(p2, model, ledger);
  // swapping a and b swaps their scores and leaves the rest unchanged
  REQUIRE(s1.scores.size() == s2.scores.size());
  for (std::size_t i = 0; i < s1.scores.size(); ++i)
    CHECK(s1.scores[i] == s2.scores[i]);
}
