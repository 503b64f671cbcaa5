#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace poserefer {

// Category vocabulary: a modifier lexicon (colors, materials, sizes) that is
// stripped from raw scene-graph labels, and the canonical set of categories
// produced so far.
class CategoryVocabulary {
 public:
  // Shipped default lexicon: common colors, {wood, metal, glass, plastic},
  // {small, big, large, tiny}.
  CategoryVocabulary();
  explicit CategoryVocabulary(std::set<std::string> modifier_lexicon);

  const std::set<std::string>& modifier_lexicon() const { return lexicon_; }
  const std::set<std::string>& canonical() const { return canonical_; }

  bool is_modifier(std::string_view token) const;

  // Lowercase head noun of `raw_label` with modifier tokens removed; the
  // result is added to the canonical set. Throws ValidationError
  // ("label reduced to empty") when every token is a modifier, and
  // std::invalid_argument when raw_label is empty.
  std::string normalize(std::string_view raw_label);

  struct Canonical {
    std::string category;
    bool fell_back = false;  // every token was a modifier; lowercase raw kept
  };
  // normalize(), except labels that reduce to empty keep their lowercase
  // token form instead of failing, so candidate sets stay the same size.
  Canonical canonicalize(std::string_view raw_label);

 private:
  std::set<std::string> lexicon_;
  std::set<std::string> canonical_;
};

// Split at lower->upper case changes, at acronym ends ("TVStand" -> TV, Stand)
// and at every non-alphabetic character. Tokens keep their original case.
std::vector<std::string> split_label_tokens(std::string_view raw_label);

std::set<std::string> default_modifier_lexicon();

}  // namespace poserefer
