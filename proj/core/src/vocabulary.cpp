#include "poserefer/vocabulary.hpp"

#include "poserefer/error.hpp"

#include <cctype>
#include <stdexcept>

namespace poserefer {

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace

std::set<std::string> default_modifier_lexicon() {
  return {
      // colors
      "red", "green", "blue", "yellow", "white", "black", "brown", "gray", "grey", "orange",
      "pink", "purple", "beige", "silver", "gold",
      // materials
      "wood", "metal", "glass", "plastic",
      // sizes
      "small", "big", "large", "tiny",
  };
}

std::vector<std::string> split_label_tokens(std::string_view raw) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (!is_alpha(c)) {
      flush();
      continue;
    }
    if (!current.empty() && is_upper(c)) {
      const char prev = current.back();
      const bool next_lower = i + 1 < raw.size() && is_lower(raw[i + 1]);
      // "redVase" -> red|Vase ; "TVStand" -> TV|Stand
      if (is_lower(prev) || (is_upper(prev) && next_lower)) flush();
    }
    current += c;
  }
  flush();
  return tokens;
}

CategoryVocabulary::CategoryVocabulary() : lexicon_(default_modifier_lexicon()) {}

CategoryVocabulary::CategoryVocabulary(std::set<std::string> modifier_lexicon)
    : lexicon_(std::move(modifier_lexicon)) {}

bool CategoryVocabulary::is_modifier(std::string_view token) const {
  return lexicon_.contains(lowercase(token));
}

std::string CategoryVocabulary::normalize(std::string_view raw_label) {
  if (raw_label.empty()) throw std::invalid_argument("normalize_category: empty raw label");
  std::vector<std::string> kept;
  for (const auto& token : split_label_tokens(raw_label)) {
    std::string lower = lowercase(token);
    if (!lexicon_.contains(lower)) kept.push_back(std::move(lower));
  }
  if (kept.empty()) {
    throw ValidationError("label reduced to empty: '" + std::string(raw_label) + "'");
  }
  std::string category = join(kept);
  canonical_.insert(category);
  return category;
}

CategoryVocabulary::Canonical CategoryVocabulary::canonicalize(std::string_view raw_label) {
  try {
    return {normalize(raw_label), false};
  } catch (const ValidationError&) {
    // Not added to the canonical set: it may consist of lexicon words.
    std::vector<std::string> tokens;
    for (const auto& t : split_label_tokens(raw_label)) tokens.push_back(lowercase(t));
    std::string fallback = tokens.empty() ? lowercase(raw_label) : join(tokens);
    return {std::move(fallback), true};
  }
}

}  // namespace poserefer
