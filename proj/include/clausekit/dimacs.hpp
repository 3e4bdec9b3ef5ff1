#pragma once

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "clausekit/cnf.hpp"

namespace clausekit {

class DimacsError : public std::runtime_error {
 public:
  enum class Code {
    MissingHeader,
    InvalidHeader,
    ClauseCountMismatch,
    LiteralOutOfRange,
    UnterminatedClause,
    InvalidToken,
    EmptyClause,
  };

  DimacsError(Code code, std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), code_(code), line_(line) {}

  [[nodiscard]] Code code() const { return code_; }
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  Code code_;
  std::size_t line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class Int>
bool parse_int(std::string_view tok, Int& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc{} && ptr == tok.data() + tok.size();
}

}  // namespace detail

/// Reads DIMACS-CNF. Clauses are delimited only by the `0` terminator and may
/// span or share lines. Anything after the declared number of clauses is
/// ignored, which skips the `%` / `0` footer found in SATLIB files.
inline CnfFormula parse_dimacs(std::istream& in) {
  using Code = DimacsError::Code;
  bool have_header = false;
  std::size_t num_vars = 0;
  std::size_t num_clauses = 0;
  std::vector<Clause> clauses;
  std::vector<Literal> current;
  std::size_t line_no = 0;
  std::string raw;

  while ((!have_header || clauses.size() < num_clauses) && std::getline(in, raw)) {
    ++line_no;
    std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == 'c') continue;

    if (!have_header) {
      if (line.front() != 'p')
        throw DimacsError(Code::MissingHeader, line_no, "expected 'p cnf' header before clauses");
      auto toks = detail::split_ws(line);
      if (toks.size() != 4 || toks[0] != "p" || toks[1] != "cnf" ||
          !detail::parse_int(toks[2], num_vars) || !detail::parse_int(toks[3], num_clauses))
        throw DimacsError(Code::InvalidHeader, line_no, "malformed header '" + std::string(line) + "'");
      have_header = true;
      clauses.reserve(num_clauses);
      continue;
    }

    for (std::string_view tok : detail::split_ws(line)) {
      std::int64_t code = 0;
      if (!detail::parse_int(tok, code))
        throw DimacsError(Code::InvalidToken, line_no, "invalid token '" + std::string(tok) + "'");
      if (code == 0) {
        if (current.empty()) throw DimacsError(Code::EmptyClause, line_no, "empty clause");
        clauses.emplace_back(std::move(current));
        current.clear();
        if (clauses.size() == num_clauses) break;
        continue;
      }
      Literal lit = Literal::from_dimacs(code);
      if (lit.var > num_vars)
        throw DimacsError(Code::LiteralOutOfRange, line_no,
                          "literal " + std::string(tok) + " exceeds " + std::to_string(num_vars) + " variables");
      current.push_back(lit);
    }
  }

  if (!have_header) throw DimacsError(Code::MissingHeader, line_no, "no 'p cnf' header found");
  if (!current.empty())
    throw DimacsError(Code::UnterminatedClause, line_no, "clause not terminated by 0");
  if (clauses.size() != num_clauses)
    throw DimacsError(Code::ClauseCountMismatch, line_no,
                      "header declares " + std::to_string(num_clauses) + " clauses, found " +
                          std::to_string(clauses.size()));
  return CnfFormula(num_vars, std::move(clauses));
}

inline CnfFormula parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in);
}

inline CnfFormula read_dimacs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_dimacs(in);
}

/// Canonical form: header, one clause per line, no comments, LF endings.
inline void write_dimacs(std::ostream& out, const CnfFormula& f) {
  out << "p cnf " << f.num_vars() << ' ' << f.num_clauses() << '\n';
  for (const Clause& c : f.clauses()) {
    for (Literal l : c) out << l.to_dimacs() << ' ';
    out << "0\n";
  }
}

inline std::string write_dimacs(const CnfFormula& f) {
  std::ostringstream out;
  write_dimacs(out, f);
  return out.str();
}

}  // namespace clausekit
