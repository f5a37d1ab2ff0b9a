// Command-line surface: wheat extraction, the delta-debugging baseline, the
// brute-force minimality oracle, wheat taxonomy, attribution coverage,
// training-data explanations, query-corpus generation, and a model server.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wheacha/wheacha.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wheacha;

namespace {

struct Config {
  std::string model_spec;
  int max_k = 3;
  int fixpoint_cap = 50;
  bool keep_header = false;
  int jobs = 1;
  int oracle_token_limit = 14;
  std::vector<double> top_pct = {10, 30, 50, 70, 90};
  int timeout_ms = 30000;
  std::string out_path;
  std::string format = "json";

  HeaderMode header() const { return keep_header ? HeaderMode::KeepHeader : HeaderMode::MaskName; }
  ExtractOptions extract_options() const {
    return ExtractOptions{max_k, fixpoint_cap, header(), jobs};
  }
};

// Config-file values apply only where no flag was given: flags win.
void merge_config_file(Config& cfg, const std::string& path, const CLI::App* cmd) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  json j = json::parse(in);
  auto unset = [cmd](const std::string& flag) {
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    return !opt || opt->count() == 0;
  };
  if (j.contains("model") && unset("--model")) cfg.model_spec = j["model"].get<std::string>();
  if (j.contains("max_k") && unset("--max-k")) cfg.max_k = j["max_k"].get<int>();
  if (j.contains("fixpoint_cap") && unset("--fixpoint-cap"))
    cfg.fixpoint_cap = j["fixpoint_cap"].get<int>();
  if (j.contains("header_mode") && unset("--keep-header") && unset("--mask-name"))
    cfg.keep_header = j["header_mode"] == "keep-header";
  if (j.contains("jobs") && unset("--jobs")) cfg.jobs = j["jobs"].get<int>();
  if (j.contains("oracle_token_limit") && unset("--oracle-token-limit"))
    cfg.oracle_token_limit = j["oracle_token_limit"].get<int>();
  if (j.contains("top_pct") && unset("--top-pct"))
    cfg.top_pct = j["top_pct"].get<std::vector<double>>();
  if (j.contains("timeout_ms") && unset("--timeout-ms"))
    cfg.timeout_ms = j["timeout_ms"].get<int>();
}

void add_common_flags(CLI::App* cmd, Config& cfg, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config file");
  cmd->add_option("--model", cfg.model_spec, "model config path or exec:<command>");
  cmd->add_option("--max-k", cfg.max_k, "largest fragment cardinality");
  cmd->add_option("--jobs", cfg.jobs, "parallel workers");
  cmd->add_option("--out", cfg.out_path, "output path (default stdout)");
  cmd->add_option("--format", cfg.format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("--fixpoint-cap", cfg.fixpoint_cap, "mutate fixpoint pass cap");
  cmd->add_option("--oracle-token-limit", cfg.oracle_token_limit,
                  "terminal-count limit for the brute-force oracle");
  cmd->add_option("--timeout-ms", cfg.timeout_ms, "external model timeout");
  auto* mask = cmd->add_flag("--mask-name", "mask the method name in candidates (default)");
  auto* keep = cmd->add_flag("--keep-header", "keep the original header in candidates");
  keep->excludes(mask);
  cmd->parse_complete_callback([&cfg, &config_path, cmd] {
    if (!config_path.empty()) merge_config_file(cfg, config_path, cmd);
    if (cmd->count("--keep-header")) cfg.keep_header = true;
    if (cmd->count("--mask-name")) cfg.keep_header = false;
  });
}

std::unique_ptr<Model> open_model(const Config& cfg) {
  if (cfg.model_spec.empty()) throw std::runtime_error("--model is required");
  return model_from_spec(cfg.model_spec, cfg.timeout_ms);
}

std::vector<std::string> collect_inputs(const std::string& input) {
  std::vector<std::string> files;
  if (fs::is_directory(input)) {
    for (const auto& e : fs::directory_iterator(input))
      if (e.path().extension() == ".mini") files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(input);
  }
  return files;
}

std::ostream& open_out(const Config& cfg, std::ofstream& file) {
  if (cfg.out_path.empty()) return std::cout;
  file.open(cfg.out_path);
  if (!file) throw std::runtime_error("cannot open " + cfg.out_path);
  return file;
}

// Prints the original program with the wheat's token spans underlined. Wheat
// nodes keep their original ids, so each surviving terminal maps back to the
// exact source token it came from.
void print_underlined(std::ostream& os, const Program& program, const Wheat& wheat) {
  std::vector<std::size_t> offsets;
  tokenize(program.source, &offsets);

  // token position of every body terminal: terminals are a text-subsequence
  // of the token stream, matched greedily in source order
  std::vector<Terminal> prog_terms = body_terminals(program.method);
  std::map<std::pair<int, int>, int> term_pos;
  std::size_t tok = 0;
  for (const Terminal& t : prog_terms) {
    while (tok < program.tokens.size() && program.tokens[tok].text != t.text) ++tok;
    if (tok >= program.tokens.size()) break;
    term_pos[{t.node_id, t.slot}] = static_cast<int>(tok++);
  }

  std::vector<int> positions;
  for (const Terminal& t : terminal_tokens(wheat.ast)) {
    auto it = term_pos.find({t.node_id, t.slot});
    if (it != term_pos.end()) positions.push_back(it->second);
  }
  std::vector<char> mark(program.source.size(), 0);
  for (int p : positions) {
    std::size_t start = offsets[p];
    std::size_t len = program.tokens[p].text.size();
    for (std::size_t i = start; i < start + len && i < mark.size(); ++i) mark[i] = 1;
  }
  std::istringstream src(program.source);
  std::string line;
  std::size_t off = 0;
  while (std::getline(src, line)) {
    os << line << "\n";
    std::string underline(line.size(), ' ');
    bool any = false;
    for (std::size_t i = 0; i < line.size(); ++i)
      if (off + i < mark.size() && mark[off + i]) { underline[i] = '^'; any = true; }
    if (any) os << underline << "\n";
    off += line.size() + 1;
  }
}

struct Failure {
  std::string path;
  std::string what;
};

int cmd_extract(const Config& cfg, const std::string& input) {
  std::unique_ptr<Model> model = open_model(cfg);
  std::vector<std::string> files = collect_inputs(input);
  WheatCache cache;

  struct Row { bool ok = false; json report; std::string text; std::string error; };
  std::vector<Row> rows(files.size());
  std::mutex protocol_mu;
  std::string protocol_error;  // a dead model connection aborts the whole run
  auto run_one = [&](std::size_t i) {
    try {
      Program p = Program::from_file(files[i]);
      Wheat w;
      if (!cache.load(p, model->id(), w)) {
        QueryLedger ledger;  // per-program, so query accounting stays exact
        w = extract_wheat(p, *model, ledger, cfg.extract_options());
        cache.store(p, model->id(), w);
      }
      rows[i].report = wheat_report(w, files[i]);
      if (cfg.format == "text") {
        std::ostringstream os;
        os << "== " << files[i] << " (label " << w.label << ", " << w.queries
           << " queries)\n";
        print_underlined(os, p, w);
        os << "wheat: " << serialize(w.ast) << "\n";
        rows[i].text = os.str();
      }
      rows[i].ok = true;
    } catch (const ProtocolError& e) {
      std::lock_guard<std::mutex> lock(protocol_mu);
      if (protocol_error.empty()) protocol_error = e.what();
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
  };

  if (cfg.jobs > 1 && model->concurrency_safe()) {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < cfg.jobs; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < files.size(); i = next.fetch_add(1))
          run_one(i);
      });
    for (auto& th : pool) th.join();
  } else {
    for (std::size_t i = 0; i < files.size(); ++i) run_one(i);
  }

  if (!protocol_error.empty()) throw ProtocolError(protocol_error);

  std::ofstream file;
  std::ostream& os = open_out(cfg, file);
  int failures = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].ok) {
      ++failures;
      std::cerr << "error: " << files[i] << ": " << rows[i].error << "\n";
      continue;
    }
    if (cfg.format == "text")
      os << rows[i].text << "\n";
    else
      os << rows[i].report.dump() << "\n";
  }
  if (failures)
    std::cerr << failures << " of " << files.size() << " programs failed\n";
  return failures ? 1 : 0;
}

int cmd_dd(const Config& cfg, const std::string& input) {
  std::unique_ptr<Model> model = open_model(cfg);
  QueryLedger ledger;
  Program p = Program::from_file(input);
  DdResult r = ddmin_wheat(p, *model, ledger, cfg.header());
  std::ofstream file;
  std::ostream& os = open_out(cfg, file);
  if (cfg.format == "text") {
    for (const DdStep& s : r.steps) {
      os << s.partition << "\t";
      for (std::size_t i = 0; i < s.tokens.size(); ++i) os << (i ? " " : "") << s.tokens[i];
      os << "\t" << s.unsatisfied << "\n";
    }
    os << "final (" << r.terminal_count << " tokens):";
    for (const auto& t : r.final_tokens) os << " " << t;
    os << "\n";
  } else {
    os << dd_trace_report(r).dump(2) << "\n";
  }
  return 0;
}

int cmd_oracle(const Config& cfg, const std::string& input) {
  std::unique_ptr<Model> model = open_model(cfg);
  QueryLedger ledger;
  Program p = Program::from_file(input);
  Wheat w = extract_wheat(p, *model, ledger, cfg.extract_options());
  OracleOptions oo;
  oo.token_limit = cfg.oracle_token_limit;
  oo.jobs = cfg.jobs;
  oo.header = cfg.header();
  OracleResult r = brute_force_check(p, *model, w, ledger, oo);
  std::ofstream file;
  std::ostream& os = open_out(cfg, file);
  json j = oracle_report(r);
  j["wheat"] = wheat_report(w, input);
  if (cfg.format == "text") {
    os << (r.confirmed_minimal ? "confirmed_minimal" : "smaller_found") << " after "
       << r.candidates_enumerated << " candidates\n";
    if (r.smaller) os << "smaller: " << r.smaller->source << "\n";
  } else {
    os << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_classify(const Config& cfg, const std::string& input) {
  std::unique_ptr<Model> model = open_model(cfg);
  std::vector<std::string> files = collect_inputs(input);
  QueryLedger ledger;
  int counts[3] = {0, 0, 0};
  int failures = 0;
  json rows = json::array();
  for (const std::string& f : files) {
    try {
      Program p = Program::from_file(f);
      Wheat w = extract_wheat(p, *model, ledger, cfg.extract_options());
      WheatClass c = classify_wheat(w, p, *model, ledger, cfg.header());
      ++counts[static_cast<int>(c)];
      rows.push_back({{"path", f}, {"class", to_string(c)}});
    } catch (const std::exception& e) {
      ++failures;
      std::cerr << "error: " << f << ": " << e.what() << "\n";
    }
  }
  std::ofstream file;
  std::ostream& os = open_out(cfg, file);
  int total = counts[0] + counts[1] + counts[2];
  json summary;
  for (int c = 0; c < 3; ++c) {
    double pct = total ? 100.0 * counts[c] / total : 0.0;
    summary[to_string(static_cast<WheatClass>(c))] = pct;
  }
  if (cfg.format == "text") {
    for (int c = 0; c < 3; ++c)
      os << to_string(static_cast<WheatClass>(c)) << "\t"
         << (total ? 100.0 * counts[c] / total : 0.0) << "%\n";
  } else {
    os << json{{"summary", summary}, {"programs", rows}}.dump(2) << "\n";
  }
  return failures ? 1 : 0;
}

int cmd_coverage(const Config& cfg, const std::string& input, const std::string& scores_path) {
  std::unique_ptr<Model> model = open_model(cfg);
  std::vector<std::string> files = collect_inputs(input);
  QueryLedger ledger;
  std::map<double, int> covered_count;
  int total = 0, failures = 0;
  json rows = json::array();
  for (const std::string& f : files) {
    try {
      Program p = Program::from_file(f);
      Wheat w = extract_wheat(p, *model, ledger, cfg.extract_options());
      AttributionScores scores;
      if (!scores_path.empty()) {
        std::ifstream in(scores_path);
        if (!in) throw std::runtime_error("cannot open scores " + scores_path);
        json sj = json::parse(in);
        scores.scores = sj.get<std::vector<double>>();
        scores.source = ScoreSource::External;
        if (scores.scores.size() != p.tokens.size())
          throw std::runtime_error("scores length does not match token count");
      } else {
        scores = occlusion_attribution(p, *model, ledger);
      }
      json row;
      row["path"] = f;
      for (double pct : cfg.top_pct) {
        CoverageResult c = coverage(scores, wheat_terminal_texts(w), p, pct);
        row["covered"][std::to_string(static_cast<int>(pct))] = c.covered;
        if (c.covered) ++covered_count[pct];
      }
      rows.push_back(std::move(row));
      ++total;
    } catch (const std::exception& e) {
      ++failures;
      std::cerr << "error: " << f << ": " << e.what() << "\n";
    }
  }
  std::ofstream file;
  std::ostream& os = open_out(cfg, file);
  json matrix;
  for (double pct : cfg.top_pct)
    matrix[std::to_string(static_cast<int>(pct))] =
        total ? 100.0 * covered_count[pct] / total : 0.0;
  if (cfg.format == "text") {
    os << "top%\tfully covered\n";
    for (double pct : cfg.top_pct)
      os << pct << "\t" << (total ? 100.0 * covered_count[pct] / total : 0.0) << "%\n";
  } else {
    os << json{{"aggregate", matrix}, {"programs", rows}}.dump(2) << "\n";
  }
  return failures ? 1 : 0;
}

Corpus load_corpus(const std::string& dir) {
  std::ifstream lin(dir + "/labels.json");
  if (!lin) throw std::runtime_error("corpus needs " + dir + "/labels.json");
  json labels = json::parse(lin);
  std::vector<CorpusEntry> entries;
  for (auto& [rel, lab] : labels.items()) {
    std::string full = dir + "/" + rel;
    entries.push_back(CorpusEntry{rel, Program::from_file(full), lab.get<std::string>()});
  }
  std::sort(entries.begin(), entries.end(),
            [](const CorpusEntry& a, const CorpusEntry& b) { return a.path < b.path; });
  return Corpus::from_entries(std::move(entries));
}

int cmd_explain(const Config& cfg, const std::string& input, const std::string& corpus_dir,
                int k) {
  std::unique_ptr<Model> model = open_model(cfg);
  QueryLedger ledger;
  WheatCache cache;
  Program test = Program::from_file(input);
  Wheat test_wheat = extract_wheat(test, *model, ledger, cfg.extract_options());
  Corpus corpus = load_corpus(corpus_dir);

  auto wheat_of = [&](const CorpusEntry& e) {
    Wheat w;
    if (cache.load(e.program, model->id(), w)) return w;
    w = extract_wheat(e.program, *model, ledger, cfg.extract_options());
    cache.store(e.program, model->id(), w);
    return w;
  };
  Ranking ours = rank_training(test_wheat, corpus, test_wheat.label, k, wheat_of);
  Ranking baseline = rank_training_baseline(test, corpus, test_wheat.label, k);

  std::ofstream file;
  std::ostream& os = open_out(cfg, file);
  if (cfg.format == "text") {
    os << "wheat-based ranking:\n";
    for (const RankedEntry& e : ours.entries)
      os << "  " << e.entry->path << "  d=" << e.distance << "  [" << e.wheat_source << "]\n";
    os << "whole-method baseline:\n";
    for (const RankedEntry& e : baseline.entries)
      os << "  " << e.entry->path << "  d=" << e.distance << "\n";
  } else {
    os << json{{"label", test_wheat.label},
               {"wheat", ranking_report(ours)},
               {"baseline", ranking_report(baseline)}}.dump(2)
       << "\n";
  }
  return 0;
}

int cmd_gen_queries(const Config& cfg, const std::string& input, const std::string& out_dir) {
  std::unique_ptr<Model> model = open_model(cfg);
  Program p = Program::from_file(input);
  std::vector<Program> queries = generate_query_corpus(p, *model, cfg.extract_options());
  fs::create_directories(out_dir);
  int i = 0;
  for (const Program& q : queries) {
    char name[32];
    std::snprintf(name, sizeof(name), "query_%04d.mini", i++);
    std::ofstream out(fs::path(out_dir) / name);
    out << q.source << "\n";
  }
  std::cout << queries.size() << " query programs written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wheat extraction for black-box code models"};
  app.require_subcommand(1);

  Config cfg;
  std::string config_path;
  std::string input, corpus_dir, scores_path, out_dir;
  int k = 5;

  auto* extract = app.add_subcommand("extract", "extract the wheat of a program or corpus");
  extract->add_option("--input", input, "a .mini file or a directory")->required();
  add_common_flags(extract, cfg, config_path);

  auto* dd = app.add_subcommand("dd", "delta-debugging baseline with a tabular trace");
  dd->add_option("--input", input)->required();
  add_common_flags(dd, cfg, config_path);

  auto* oracle = app.add_subcommand("oracle", "brute-force global-minimality check");
  oracle->add_option("--input", input)->required();
  add_common_flags(oracle, cfg, config_path);

  auto* classify = app.add_subcommand("classify", "lexical/syntactic/semantic wheat taxonomy");
  classify->add_option("--input", input, "corpus directory or file")->required();
  add_common_flags(classify, cfg, config_path);

  auto* cover = app.add_subcommand("coverage", "top-N% attribution coverage of the wheat");
  cover->add_option("--input", input)->required();
  cover->add_option("--scores", scores_path, "externally computed scores (JSON array)");
  cover->add_option("--top-pct", cfg.top_pct, "percentage grid")->delimiter(',');
  add_common_flags(cover, cfg, config_path);

  auto* explain = app.add_subcommand("explain", "rank training programs by wheat distance");
  explain->add_option("--input", input)->required();
  explain->add_option("--corpus", corpus_dir, "directory with .mini files + labels.json")
      ->required();
  explain->add_option("-k,--top-k", k, "how many entries to report");
  add_common_flags(explain, cfg, config_path);

  auto* gen = app.add_subcommand("gen-queries", "emit the query corpus of an extraction");
  gen->add_option("--input", input)->required();
  gen->add_option("--out-dir", out_dir)->required();
  add_common_flags(gen, cfg, config_path);

  auto* serve = app.add_subcommand("model-serve", "serve a built-in model over stdio");
  add_common_flags(serve, cfg, config_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(extract)) return cmd_extract(cfg, input);
    if (app.got_subcommand(dd)) return cmd_dd(cfg, input);
    if (app.got_subcommand(oracle)) return cmd_oracle(cfg, input);
    if (app.got_subcommand(classify)) return cmd_classify(cfg, input);
    if (app.got_subcommand(cover)) return cmd_coverage(cfg, input, scores_path);
    if (app.got_subcommand(explain)) return cmd_explain(cfg, input, corpus_dir, k);
    if (app.got_subcommand(gen)) return cmd_gen_queries(cfg, input, out_dir);
    if (app.got_subcommand(serve)) {
      std::unique_ptr<Model> model = open_model(cfg);
      if (model->kind() == ModelKind::External) {
        std::cerr << "model-serve requires a built-in model\n";
        return 2;
      }
      return serve_model(*model, std::cin, std::cout, std::cerr);
    }
  } catch (const ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
