#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "clausekit/cnf.hpp"
#include "clausekit/logic/cnf_convert.hpp"
#include "clausekit/logic/expr.hpp"
#include "clausekit/logic/sentences.hpp"
#include "clausekit/logic/translator.hpp"

namespace clausekit::logic {

struct SentenceError {
  std::size_t index;  // 0-based sentence (or expression line) index
  std::string message;
};

class DocumentError : public std::runtime_error {
 public:
  explicit DocumentError(std::vector<SentenceError> errors)
      : std::runtime_error(format(errors)), errors_(std::move(errors)) {}

  [[nodiscard]] const std::vector<SentenceError>& errors() const { return errors_; }

 private:
  static std::string format(const std::vector<SentenceError>& errors) {
    std::string s = std::to_string(errors.size()) + " sentence(s) failed:";
    for (const auto& e : errors) s += "\n  [" + std::to_string(e.index) + "] " + e.message;
    return s;
  }

  std::vector<SentenceError> errors_;
};

struct CompiledDocument {
  std::vector<std::string> sentences;
  std::vector<LogicalExpr> expressions;
  CnfFormula unsimplified;
  CnfFormula cnf;
  SymbolTable symbols;
  Glossary glossary;
};

/// Conjoins the expressions, converts to CNF and simplifies.
inline CompiledDocument compile_expressions(std::vector<LogicalExpr> exprs, std::size_t clause_cap = kDefaultClauseCap) {
  if (exprs.empty()) throw EmptyInput();
  CompiledDocument doc;
  LogicalExpr whole = exprs.size() == 1 ? exprs.front() : LogicalExpr::conjunction(exprs);
  doc.unsimplified = to_cnf(whole, doc.symbols, clause_cap);
  doc.cnf = simplify_cnf(doc.unsimplified);
  doc.expressions = std::move(exprs);
  return doc;
}

/// English text -> sentences -> translator -> expressions -> CNF -> simplified CNF.
inline CompiledDocument compile_document(std::string_view text, TranslatorClient& client,
                                         std::size_t clause_cap = kDefaultClauseCap) {
  std::vector<std::string> sentences = split_sentences(text);
  TranslationSession session;
  std::vector<LogicalExpr> exprs;
  std::vector<SentenceError> errors;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    try {
      exprs.push_back(translate_sentence(client, sentences[i], session).second);
    } catch (const TranslatorError& e) {
      errors.push_back({i, e.what()});
    }
  }
  if (!errors.empty()) throw DocumentError(std::move(errors));

  CompiledDocument doc = compile_expressions(std::move(exprs), clause_cap);
  doc.sentences = std::move(sentences);
  doc.glossary = session.glossary();
  return doc;
}

/// Expression files: one expression per line; blank lines and `#` lines are skipped.
inline std::vector<LogicalExpr> read_expressions(std::istream& in) {
  std::vector<LogicalExpr> out;
  std::vector<SentenceError> errors;
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      out.push_back(parse_expression(line));
    } catch (const ExpressionError& e) {
      errors.push_back({index, e.what()});
    }
    ++index;
  }
  if (!errors.empty()) throw DocumentError(std::move(errors));
  if (out.empty()) throw EmptyInput();
  return out;
}

}  // namespace clausekit::logic
