#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "wheacha/augment.hpp"
#include "wheacha/errors.hpp"
#include "wheacha/parser.hpp"
#include "wheacha/program.hpp"
#include "wheacha/protocol.hpp"
#include "wheacha/token.hpp"

namespace wheacha {

struct Prediction {
  std::string label;
  std::optional<std::map<std::string, double>> probs;

  bool operator==(const Prediction& o) const { return label == o.label && probs == o.probs; }
};

// Validates the Prediction invariant: probabilities sum to 1 and argmax (ties
// broken lexicographically) equals the label.
inline void validate_prediction(const Prediction& p) {
  if (!p.probs) return;
  double sum = 0;
  std::string argmax;
  double best = -1;
  for (const auto& [lab, pr] : *p.probs) {
    sum += pr;
    if (pr > best) { best = pr; argmax = lab; }  // map order is lexicographic
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ProtocolError("prediction probabilities sum to " + std::to_string(sum));
  if (argmax != p.label)
    throw ProtocolError("prediction label does not match probability argmax");
}

enum class ModelKind { RulePresence, LinearBag, EdgeRule, External };

class Model {
 public:
  virtual ~Model() = default;
  virtual const std::string& id() const = 0;
  virtual ModelKind kind() const = 0;
  virtual bool concurrency_safe() const = 0;
  virtual Prediction predict(const std::string& source) const = 0;
  // Edge-aware models can be queried with semantic edges stripped (wheat taxonomy).
  virtual bool edge_aware() const { return false; }
  virtual Prediction predict_without_edges(const std::string& source) const {
    return predict(source);
  }
};

namespace detail {

inline std::set<std::string> matchable_tokens(const std::vector<Token>& toks) {
  std::set<std::string> out;
  for (const Token& t : toks)
    if (t.kind == TokenKind::Identifier || t.kind == TokenKind::Keyword) out.insert(t.text);
  return out;
}

inline void check_rule_token(const std::string& tok) {
  if (tok == kOov) throw std::runtime_error("model config must not reference 'oov'");
  std::vector<Token> lexed = tokenize(tok);
  if (lexed.size() != 1 ||
      (lexed[0].kind != TokenKind::Identifier && lexed[0].kind != TokenKind::Keyword))
    throw std::runtime_error("rule token is not an identifier or keyword: " + tok);
}

}  // namespace detail

struct PresenceRule {
  std::set<std::string> all_of;
  std::set<std::string> none_of;
  std::string label;
};

struct RuleConfig {
  std::vector<PresenceRule> rules;
  std::string default_label;
};

class RulePresenceModel : public Model {
 public:
  RulePresenceModel(std::string id, RuleConfig cfg) : id_(std::move(id)), cfg_(std::move(cfg)) {
    if (cfg_.default_label.empty()) throw std::runtime_error("default_label required");
    for (const PresenceRule& r : cfg_.rules) {
      if (r.label.empty()) throw std::runtime_error("rule label required");
      for (const auto& t : r.all_of) detail::check_rule_token(t);
      for (const auto& t : r.none_of) detail::check_rule_token(t);
    }
  }

  const std::string& id() const override { return id_; }
  ModelKind kind() const override { return ModelKind::RulePresence; }
  bool concurrency_safe() const override { return true; }

  Prediction predict(const std::string& source) const override {
    parse(source);  // reject unparseable input
    std::set<std::string> toks = detail::matchable_tokens(tokenize(source));
    return Prediction{match(toks), std::map<std::string, double>{{match(toks), 1.0}}};
  }

  const RuleConfig& config() const { return cfg_; }

 private:
  std::string id_;
  RuleConfig cfg_;

  std::string match(const std::set<std::string>& toks) const {
    for (const PresenceRule& r : cfg_.rules) {
      bool ok = true;
      for (const auto& t : r.all_of)
        if (!toks.count(t)) { ok = false; break; }
      if (ok)
        for (const auto& t : r.none_of)
          if (toks.count(t)) { ok = false; break; }
      if (ok) return r.label;
    }
    return cfg_.default_label;
  }
};

struct LinearBagConfig {
  std::vector<std::string> labels;
  std::map<std::string, std::map<std::string, double>> weights;  // token -> label -> w
  std::map<std::string, double> bias;
  double temperature = 1.0;
};

class LinearBagModel : public Model {
 public:
  LinearBagModel(std::string id, LinearBagConfig cfg) : id_(std::move(id)), cfg_(std::move(cfg)) {
    if (cfg_.labels.empty()) throw std::runtime_error("labels required");
    if (cfg_.temperature <= 0) throw std::runtime_error("temperature must be positive");
    std::set<std::string> labs(cfg_.labels.begin(), cfg_.labels.end());
    for (const auto& [tok, per_label] : cfg_.weights)
      for (const auto& [lab, w] : per_label)
        if (!labs.count(lab)) throw std::runtime_error("weight label not in labels: " + lab);
    for (const auto& [lab, b] : cfg_.bias)
      if (!labs.count(lab)) throw std::runtime_error("bias label not in labels: " + lab);
  }

  const std::string& id() const override { return id_; }
  ModelKind kind() const override { return ModelKind::LinearBag; }
  bool concurrency_safe() const override { return true; }

  Prediction predict(const std::string& source) const override {
    parse(source);
    std::vector<Token> toks = tokenize(source);
    std::map<std::string, double> score;
    for (const std::string& lab : cfg_.labels) {
      auto it = cfg_.bias.find(lab);
      score[lab] = it == cfg_.bias.end() ? 0.0 : it->second;
    }
    for (const Token& t : toks) {
      auto it = cfg_.weights.find(t.text);
      if (it == cfg_.weights.end()) continue;
      for (const auto& [lab, w] : it->second) score[lab] += w;
    }
    // softmax over score/temperature; argmax ties break lexicographically
    double maxs = score.begin()->second;
    for (const auto& [lab, s] : score) maxs = std::max(maxs, s);
    double z = 0;
    std::map<std::string, double> probs;
    for (const auto& [lab, s] : score) {
      double e = std::exp((s - maxs) / cfg_.temperature);
      probs[lab] = e;
      z += e;
    }
    std::string best;
    double bestp = -1;
    for (auto& [lab, p] : probs) {
      p /= z;
      if (p > bestp + 1e-15) { bestp = p; best = lab; }
    }
    return Prediction{best, std::move(probs)};
  }

  const LinearBagConfig& config() const { return cfg_; }

 private:
  std::string id_;
  LinearBagConfig cfg_;
};

struct EdgePresenceRule {
  std::set<std::string> all_of_tokens;
  std::set<EdgeKind> all_of_edge_kinds;
  std::string label;
};

struct EdgeRuleConfig {
  std::vector<EdgePresenceRule> rules;
  std::string default_label;
};

class EdgeRuleModel : public Model {
 public:
  EdgeRuleModel(std::string id, EdgeRuleConfig cfg) : id_(std::move(id)), cfg_(std::move(cfg)) {
    if (cfg_.default_label.empty()) throw std::runtime_error("default_label required");
    for (const EdgePresenceRule& r : cfg_.rules) {
      if (r.label.empty()) throw std::runtime_error("rule label required");
      for (const auto& t : r.all_of_tokens) detail::check_rule_token(t);
    }
  }

  const std::string& id() const override { return id_; }
  ModelKind kind() const override { return ModelKind::EdgeRule; }
  bool concurrency_safe() const override { return true; }
  bool edge_aware() const override { return true; }

  Prediction predict(const std::string& source) const override {
    Node method = parse(source);
    std::set<EdgeKind> kinds;
    for (const SemanticEdge& e : semantic_edges(method)) kinds.insert(e.kind);
    return evaluate(source, kinds);
  }

  Prediction predict_without_edges(const std::string& source) const override {
    parse(source);
    return evaluate(source, {});
  }

  const EdgeRuleConfig& config() const { return cfg_; }

 private:
  std::string id_;
  EdgeRuleConfig cfg_;

  Prediction evaluate(const std::string& source, const std::set<EdgeKind>& kinds) const {
    std::set<std::string> toks = detail::matchable_tokens(tokenize(source));
    std::string label = cfg_.default_label;
    for (const EdgePresenceRule& r : cfg_.rules) {
      bool ok = true;
      for (const auto& t : r.all_of_tokens)
        if (!toks.count(t)) { ok = false; break; }
      if (ok)
        for (EdgeKind k : r.all_of_edge_kinds)
          if (!kinds.count(k)) { ok = false; break; }
      if (ok) { label = r.label; break; }
    }
    return Prediction{label, std::map<std::string, double>{{label, 1.0}}};
  }
};

// Adapter speaking the line-delimited JSON protocol over a child process:
// request {"program": "<source>"}, reply {"label": ..., "probs": {...}}.
// Requests are serialized over the single connection.
class ExternalModel : public Model {
 public:
  ExternalModel(std::string id, std::string command, int timeout_ms = 30000)
      : id_(std::move(id)), command_(std::move(command)), timeout_ms_(timeout_ms),
        proc_(std::make_unique<LineProcess>(split_command(command_))) {}

  const std::string& id() const override { return id_; }
  ModelKind kind() const override { return ModelKind::External; }
  bool concurrency_safe() const override { return false; }

  Prediction predict(const std::string& source) const override {
    std::lock_guard<std::mutex> lock(mu_);
    nlohmann::json req;
    req["program"] = source;
    std::string reply = proc_->request(req.dump(), timeout_ms_);
    nlohmann::json j = nlohmann::json::parse(reply, nullptr, false);
    if (j.is_discarded()) throw ProtocolError("malformed reply: " + reply);
    if (j.contains("error")) throw ProtocolError("external model error: " + j["error"].dump());
    if (!j.contains("label") || !j["label"].is_string())
      throw ProtocolError("reply lacks a label: " + reply);
    Prediction p;
    p.label = j["label"].get<std::string>();
    if (j.contains("probs")) {
      std::map<std::string, double> probs;
      for (auto& [k, v] : j["probs"].items()) probs[k] = v.get<double>();
      p.probs = std::move(probs);
    }
    validate_prediction(p);
    return p;
  }

 private:
  std::string id_;
  std::string command_;
  int timeout_ms_;
  mutable std::mutex mu_;
  std::unique_ptr<LineProcess> proc_;
};

// ---------------------------------------------------------------------------
// Config loading
// ---------------------------------------------------------------------------

inline std::unique_ptr<Model> model_from_json(const nlohmann::json& j) {
  std::string id = j.value("id", "model");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "rule_presence") {
    RuleConfig cfg;
    cfg.default_label = j.at("default_label").get<std::string>();
    for (const auto& r : j.value("rules", nlohmann::json::array())) {
      PresenceRule rule;
      for (const auto& t : r.value("all_of", nlohmann::json::array()))
        rule.all_of.insert(t.get<std::string>());
      for (const auto& t : r.value("none_of", nlohmann::json::array()))
        rule.none_of.insert(t.get<std::string>());
      rule.label = r.at("label").get<std::string>();
      cfg.rules.push_back(std::move(rule));
    }
    return std::make_unique<RulePresenceModel>(id, std::move(cfg));
  }
  if (kind == "linear_bag") {
    LinearBagConfig cfg;
    for (const auto& l : j.at("labels")) cfg.labels.push_back(l.get<std::string>());
    for (auto& [tok, per_label] : j.value("weights", nlohmann::json::object()).items())
      for (auto& [lab, w] : per_label.items()) cfg.weights[tok][lab] = w.get<double>();
    for (auto& [lab, b] : j.value("bias", nlohmann::json::object()).items())
      cfg.bias[lab] = b.get<double>();
    cfg.temperature = j.value("temperature", 1.0);
    return std::make_unique<LinearBagModel>(id, std::move(cfg));
  }
  if (kind == "edge_rule") {
    EdgeRuleConfig cfg;
    cfg.default_label = j.at("default_label").get<std::string>();
    for (const auto& r : j.value("rules", nlohmann::json::array())) {
      EdgePresenceRule rule;
      for (const auto& t : r.value("all_of_tokens", nlohmann::json::array()))
        rule.all_of_tokens.insert(t.get<std::string>());
      for (const auto& k : r.value("all_of_edge_kinds", nlohmann::json::array())) {
        EdgeKind ek;
        if (!edge_kind_from_string(k.get<std::string>(), ek))
          throw std::runtime_error("unknown edge kind: " + k.get<std::string>());
        rule.all_of_edge_kinds.insert(ek);
      }
      rule.label = r.at("label").get<std::string>();
      cfg.rules.push_back(std::move(rule));
    }
    return std::make_unique<EdgeRuleModel>(id, std::move(cfg));
  }
  if (kind == "external") {
    return std::make_unique<ExternalModel>(id, j.at("command").get<std::string>(),
                                           j.value("timeout_ms", 30000));
  }
  throw std::runtime_error("unknown model kind: " + kind);
}

inline std::unique_ptr<Model> model_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model config " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  return model_from_json(j);
}

// "--model <cfg.json>" or "--model exec:<command line>".
inline std::unique_ptr<Model> model_from_spec(const std::string& spec, int timeout_ms = 30000) {
  if (spec.rfind("exec:", 0) == 0)
    return std::make_unique<ExternalModel>("external", spec.substr(5), timeout_ms);
  return model_from_file(spec);
}

// Serves a built-in model over the external protocol until end of input.
// Malformed requests get {"error":"bad request"} and a note on the error
// stream; the loop continues.
inline int serve_model(const Model& model, std::istream& in, std::ostream& out,
                       std::ostream& err) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("program") || !j["program"].is_string()) {
      err << "bad request: " << line << "\n";
      out << R"({"error":"bad request"})" << "\n" << std::flush;
      continue;
    }
    try {
      Prediction p = model.predict(j["program"].get<std::string>());
      nlohmann::json reply;
      reply["label"] = p.label;
      if (p.probs) {
        nlohmann::json probs = nlohmann::json::object();
        for (const auto& [lab, pr] : *p.probs) probs[lab] = pr;
        reply["probs"] = probs;
      }
      out << reply.dump() << "\n" << std::flush;
    } catch (const std::exception& e) {
      err << "prediction failed: " << e.what() << "\n";
      nlohmann::json reply;
      reply["error"] = e.what();
      out << reply.dump() << "\n" << std::flush;
    }
  }
  return 0;
}

}  // namespace wheacha
