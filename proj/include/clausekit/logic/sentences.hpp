#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clausekit::logic {

class EmptyInput : public std::runtime_error {
 public:
  EmptyInput() : std::runtime_error("input text is empty") {}
};

inline const std::vector<std::string>& default_abbreviations() {
  static const std::vector<std::string> abbrevs{"Mr.", "Mrs.", "Dr.", "e.g.", "i.e."};
  return abbrevs;
}

/// Rule-based splitter. A sentence ends at `.`, `!` or `?` (optionally
/// followed by closing quotes or brackets) when the next non-space character
/// is an uppercase letter or the text ends. A `.` that closes one of the
/// listed abbreviations never ends a sentence. Sentences are returned trimmed.
inline std::vector<std::string> split_sentences(std::string_view text,
                                                const std::vector<std::string>& abbreviations = default_abbreviations()) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  auto is_closer = [](char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; };

  std::vector<std::string> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    std::size_t b = start;
    while (b < end && is_space(text[b])) ++b;
    std::size_t e = end;
    while (e > b && is_space(text[e - 1])) --e;
    if (e > b) out.emplace_back(text.substr(b, e - b));
    start = end;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;

    std::size_t end = i + 1;
    while (end < text.size() && (text[end] == '.' || text[end] == '!' || text[end] == '?')) ++end;
    while (end < text.size() && is_closer(text[end])) ++end;

    std::size_t next = end;
    while (next < text.size() && is_space(text[next])) ++next;
    bool at_end = next == text.size();
    bool boundary = at_end || (next > end && std::isupper(static_cast<unsigned char>(text[next])));
    if (!boundary) {
      i = end - 1;
      continue;
    }

    if (c == '.') {
      std::size_t w = i;
      while (w > start && !is_space(text[w - 1])) --w;
      std::string_view word = text.substr(w, i + 1 - w);
      bool abbrev = false;
      for (const auto& a : abbreviations)
        if (word == a) abbrev = true;
      if (abbrev && !at_end) {
        i = end - 1;
        continue;
      }
    }
    emit(end);
    i = end - 1;
  }
  emit(text.size());
  if (out.empty()) throw EmptyInput();
  return out;
}

}  // namespace clausekit::logic
