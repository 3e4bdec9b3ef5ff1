#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "clausekit/logic/expr.hpp"

namespace clausekit::logic {

inline constexpr const char* kDefaultInstructionTemplate = "functional-prefix-v1";

struct TranslationRequest {
  std::string sentence;
  std::string session_id;
  std::string instruction_template = kDefaultInstructionTemplate;
};

/// Atom name -> source phrase.
using Glossary = std::map<std::string, std::string>;

struct TranslationResponse {
  std::string expression;
  Glossary glossary;
};

class TranslatorError : public std::runtime_error {
 public:
  enum class Code { TranslatorUnavailable, MalformedTranslation };

  TranslatorError(Code code, const std::string& what, std::string raw_reply = {})
      : std::runtime_error(what), code_(code), raw_(std::move(raw_reply)) {}

  [[nodiscard]] Code code() const { return code_; }
  /// The unparsed reply, kept for diagnostics.
  [[nodiscard]] const std::string& raw_reply() const { return raw_; }

 private:
  Code code_;
  std::string raw_;
};

/// Stage-one boundary: turns one sentence into one functional-form expression.
class TranslatorClient {
 public:
  virtual ~TranslatorClient() = default;
  virtual TranslationResponse translate(const TranslationRequest& request) = 0;
};

/// Session-scoped state shared by the sentences of one document. Glossary
/// updates are serialized so translations may be issued concurrently.
class TranslationSession {
 public:
  explicit TranslationSession(std::string id = "session-0",
                              std::string instruction_template = kDefaultInstructionTemplate)
      : id_(std::move(id)), template_(std::move(instruction_template)) {}

  [[nodiscard]] const std::string& id() const { return id_; }
  [[nodiscard]] const std::string& instruction_template() const { return template_; }

  void merge(const Glossary& g) {
    std::lock_guard lock(mu_);
    for (const auto& [atom, phrase] : g) glossary_.try_emplace(atom, phrase);
  }

  [[nodiscard]] Glossary glossary() const {
    std::lock_guard lock(mu_);
    return glossary_;
  }

 private:
  std::string id_;
  std::string template_;
  mutable std::mutex mu_;
  Glossary glossary_;
};

/// Translates one sentence and checks that the reply parses.
inline std::pair<TranslationResponse, LogicalExpr> translate_sentence(TranslatorClient& client,
                                                                      const std::string& sentence,
                                                                      TranslationSession& session) {
  TranslationResponse resp = client.translate({sentence, session.id(), session.instruction_template()});
  LogicalExpr expr;
  try {
    expr = parse_expression(resp.expression);
  } catch (const ExpressionError& e) {
    throw TranslatorError(TranslatorError::Code::MalformedTranslation,
                          "translator reply does not parse: " + std::string(e.what()), resp.expression);
  }
  for (const auto& [atom, phrase] : resp.glossary)
    if (!is_valid_atom_name(atom))
      throw TranslatorError(TranslatorError::Code::MalformedTranslation, "invalid atom name in glossary: " + atom,
                            resp.expression);
  session.merge(resp.glossary);
  return {std::move(resp), std::move(expr)};
}

/// Offline translator answering from a fixture table. Fixture lines are
/// `sentence<TAB>expression<TAB>atom=phrase;atom=phrase`; `#` lines are comments.
class StubTranslator final : public TranslatorClient {
 public:
  StubTranslator() = default;

  void add(std::string sentence, TranslationResponse response) {
    table_.insert_or_assign(std::move(sentence), std::move(response));
  }

  static StubTranslator from_stream(std::istream& in) {
    StubTranslator stub;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      auto t1 = line.find('\t');
      if (t1 == std::string::npos)
        throw std::runtime_error("fixture line " + std::to_string(line_no) + ": expected sentence<TAB>expression");
      auto t2 = line.find('\t', t1 + 1);
      TranslationResponse resp;
      resp.expression = line.substr(t1 + 1, t2 == std::string::npos ? std::string::npos : t2 - t1 - 1);
      if (t2 != std::string::npos) {
        std::stringstream entries(line.substr(t2 + 1));
        std::string entry;
        while (std::getline(entries, entry, ';')) {
          if (entry.empty()) continue;
          auto eq = entry.find('=');
          if (eq == std::string::npos)
            throw std::runtime_error("fixture line " + std::to_string(line_no) + ": glossary entry needs atom=phrase");
          resp.glossary[entry.substr(0, eq)] = entry.substr(eq + 1);
        }
      }
      stub.add(line.substr(0, t1), std::move(resp));
    }
    return stub;
  }

  static StubTranslator from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fixture file " + path);
    return from_stream(in);
  }

  TranslationResponse translate(const TranslationRequest& request) override {
    auto it = table_.find(request.sentence);
    if (it == table_.end())
      throw TranslatorError(TranslatorError::Code::MalformedTranslation,
                            "stub translator has no fixture for: " + request.sentence);
    return it->second;
  }

  [[nodiscard]] std::size_t size() const { return table_.size(); }

 private:
  std::unordered_map<std::string, TranslationResponse> table_;
};

}  // namespace clausekit::logic
