#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clausekit::logic {

/// Propositional expression tree in the functional form emitted by the
/// translator: `And(Not(P), Or(Q, R))`.
struct LogicalExpr {
  enum class Kind { Atom, Not, And, Or, Implies, Iff };

  Kind kind = Kind::Atom;
  std::string name;                  // Atom only
  std::vector<LogicalExpr> children;  // empty for Atom

  static LogicalExpr atom(std::string n) { return {Kind::Atom, std::move(n), {}}; }
  static LogicalExpr negation(LogicalExpr e) { return {Kind::Not, {}, {std::move(e)}}; }
  static LogicalExpr conjunction(std::vector<LogicalExpr> cs) { return {Kind::And, {}, std::move(cs)}; }
  static LogicalExpr disjunction(std::vector<LogicalExpr> cs) { return {Kind::Or, {}, std::move(cs)}; }
  static LogicalExpr implies(LogicalExpr a, LogicalExpr b) {
    return {Kind::Implies, {}, {std::move(a), std::move(b)}};
  }
  static LogicalExpr iff(LogicalExpr a, LogicalExpr b) { return {Kind::Iff, {}, {std::move(a), std::move(b)}}; }

  [[nodiscard]] bool is_atom() const { return kind == Kind::Atom; }

  friend bool operator==(const LogicalExpr&, const LogicalExpr&) = default;
};

inline std::string_view kind_name(LogicalExpr::Kind k) {
  switch (k) {
    case LogicalExpr::Kind::Atom: return "Atom";
    case LogicalExpr::Kind::Not: return "Not";
    case LogicalExpr::Kind::And: return "And";
    case LogicalExpr::Kind::Or: return "Or";
    case LogicalExpr::Kind::Implies: return "Implies";
    case LogicalExpr::Kind::Iff: return "Iff";
  }
  return "?";
}

class ExpressionError : public std::runtime_error {
 public:
  enum class Code { SyntaxError, ArityError };

  ExpressionError(Code code, std::size_t offset, const std::string& what)
      : std::runtime_error((code == Code::SyntaxError ? "syntax error" : "arity error") +
                           std::string(" at offset ") + std::to_string(offset) + ": " + what),
        code_(code),
        offset_(offset) {}

  [[nodiscard]] Code code() const { return code_; }
  /// Byte offset into the parsed line.
  [[nodiscard]] std::size_t offset() const { return offset_; }

 private:
  Code code_;
  std::size_t offset_;
};

inline bool is_valid_atom_name(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  for (char c : s.substr(1)) {
    auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || u == '_')) return false;
  }
  return true;
}

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  LogicalExpr parse_all() {
    LogicalExpr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  using Kind = LogicalExpr::Kind;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ExpressionError(ExpressionError::Code::SyntaxError, pos_, msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string_view identifier() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size()) {
      auto c = static_cast<unsigned char>(text_[pos_]);
      if (std::isalpha(c) || c == '_') {
        ++pos_;
        while (pos_ < text_.size()) {
          auto d = static_cast<unsigned char>(text_[pos_]);
          if (!(std::isalnum(d) || d == '_')) break;
          ++pos_;
        }
      }
    }
    if (pos_ == start) fail(pos_ == text_.size() ? "unexpected end of input" : "expected identifier");
    return text_.substr(start, pos_ - start);
  }

  static bool keyword(std::string_view id, Kind& k) {
    if (id == "And") k = Kind::And;
    else if (id == "Or") k = Kind::Or;
    else if (id == "Not") k = Kind::Not;
    else if (id == "Implies") k = Kind::Implies;
    else if (id == "Iff") k = Kind::Iff;
    else return false;
    return true;
  }

  LogicalExpr parse_expr() {
    skip_ws();
    std::size_t start = pos_;
    std::string_view id = identifier();
    Kind kind{};
    if (!keyword(id, kind)) return LogicalExpr::atom(std::string(id));

    if (!consume('(')) fail("expected '(' after " + std::string(id));
    LogicalExpr node{kind, {}, {}};
    node.children.push_back(parse_expr());
    while (consume(',')) node.children.push_back(parse_expr());
    if (!consume(')')) fail("expected ',' or ')'");

    std::size_t n = node.children.size();
    bool ok = (kind == Kind::Not && n == 1) || ((kind == Kind::Implies || kind == Kind::Iff) && n == 2) ||
              ((kind == Kind::And || kind == Kind::Or) && n >= 2);
    if (!ok)
      throw ExpressionError(ExpressionError::Code::ArityError, start,
                            std::string(id) + " given " + std::to_string(n) + " argument(s)");
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline void print_expr(const LogicalExpr& e, std::string& out) {
  if (e.is_atom()) {
    out += e.name;
    return;
  }
  out += kind_name(e.kind);
  out += '(';
  for (std::size_t i = 0; i < e.children.size(); ++i) {
    if (i) out += ", ";
    print_expr(e.children[i], out);
  }
  out += ')';
}

}  // namespace detail

/// Grammar: expr := ATOM | KIND '(' expr (',' expr)* ')'. Keywords are
/// case-sensitive and reserved; whitespace is insignificant.
inline LogicalExpr parse_expression(std::string_view line) { return detail::ExprParser(line).parse_all(); }

inline std::string to_string(const LogicalExpr& e) {
  std::string out;
  detail::print_expr(e, out);
  return out;
}

/// Atom names in pre-order, left to right, first appearance only.
inline void collect_atoms(const LogicalExpr& e, std::vector<std::string>& out) {
  if (e.is_atom()) {
    for (const auto& s : out)
      if (s == e.name) return;
    out.push_back(e.name);
    return;
  }
  for (const auto& c : e.children) collect_atoms(c, out);
}

}  // namespace clausekit::logic
