#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "corpus_gen.hpp"
#include "wheacha/wheacha.hpp"

using namespace wheacha;

namespace {

Program running_example() {
  std::ifstream in(std::string(WHEACHA_TEST_DATA) + "/running_example.mini");
  std::stringstream ss;
  ss << in.rdbuf();
  return Program::from_source(ss.str());
}

std::unique_ptr<Model> data_model(const std::string& name) {
  return model_from_file(std::string(WHEACHA_TEST_DATA) + "/models/" + name);
}

}  // namespace

TEST_CASE("DD stalls at the five-token set with per-partition verdicts") {
  Program p = running_example();
  auto model = data_model("stall_surrogate.json");
  QueryLedger ledger;
  DdResult r = ddmin_wheat(p, *model, ledger);

  CHECK(r.final_tokens ==
        std::vector<std::string>{"size", "return", "mItems", "add", "position"});
  CHECK(r.terminal_count == 5);

  // the stalled round: five singleton partitions fail Both, five four-token
  // complements fail Sufficient
  REQUIRE(r.steps.size() >= 10);
  std::vector<DdStep> last(r.steps.end() - 10, r.steps.end());
  std::vector<std::vector<std::string>> deltas = {
      {"size"}, {"return"}, {"mItems"}, {"add"}, {"position"}};
  for (int i = 0; i < 5; ++i) {
    CHECK(last[i].tokens == deltas[i]);
    CHECK(last[i].unsatisfied == "Both");
  }
  std::vector<std::vector<std::string>> nablas = {
      {"return", "mItems", "add", "position"},
      {"size", "mItems", "add", "position"},
      {"size", "return", "add", "position"},
      {"size", "return", "mItems", "position"},
      {"size", "return", "mItems", "add"}};
  for (int i = 0; i < 5; ++i) {
    CHECK(last[5 + i].tokens == nablas[i]);
    CHECK(last[5 + i].unsatisfied == "Sufficient");
  }

  // the trace reaches the stall through the documented reductions
  CHECK(r.steps[1].tokens.size() == 10);   // second half of the 19 tokens
  CHECK(r.steps[1].unsatisfied == "Pass");
  CHECK(r.steps[2].tokens ==
        std::vector<std::string>{"size", "return", "mItems", "add", "position"});
  CHECK(r.steps[2].unsatisfied == "Pass");

  // while the baseline stalls at five tokens, extraction goes strictly lower
  QueryLedger el;
  Wheat w = extract_wheat(p, *model, el);
  CHECK(terminal_tokens(w.ast).size() < static_cast<std::size_t>(r.terminal_count));
}

TEST_CASE("DD result always passes its own conjoined test") {
  Program p = running_example();
  auto model = data_model("stall_surrogate.json");
  QueryLedger ledger;
  DdResult r = ddmin_wheat(p, *model, ledger);
  CHECK(dd_result_passes(p, *model, ledger, r));
}

TEST_CASE("on monotone models DD never beats extraction") {
  auto model = testgen::monotone_rule_model();
  for (const auto& g : testgen::generate_corpus(30, 6060)) {
    Program p = Program::from_source(g.source);
    QueryLedger ledger;
    DdResult dd = ddmin_wheat(p, model, ledger);
    Wheat w = extract_wheat(p, model, ledger);
    CAPTURE(g.source);
    CHECK(dd.terminal_count >= static_cast<int>(terminal_tokens(w.ast).size()));
  }
}

TEST_CASE("constant models leave DD at the full token sequence") {
  Program p = running_example();
  auto model = testgen::constant_model();
  QueryLedger ledger;
  DdResult r = ddmin_wheat(p, model, ledger);
  CHECK(r.terminal_count == 19);
  for (const DdStep& s : r.steps) CHECK(s.unsatisfied != "Pass");
}

TEST_CASE("the DD trace is reproducible") {
  Program p = running_example();
  auto model = data_model("stall_surrogate.json");
  QueryLedger l1, l2;
  DdResult a = ddmin_wheat(p, *model, l1);
  DdResult b = ddmin_wheat(p, *model, l2);
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].partition == b.steps[i].partition);
    CHECK(a.steps[i].tokens == b.steps[i].tokens);
    CHECK(a.steps[i].unsatisfied == b.steps[i].unsatisfied);
  }
}
