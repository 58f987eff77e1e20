#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace cqalog {

enum class WordClass : std::uint8_t { content = 0, function = 1 };

struct Token {
    std::string surface;  // lowercased
    std::string stem;     // Porter stem of surface
    std::uint32_t char_offset = 0;
    bool is_stopword = false;
    WordClass word_class = WordClass::content;
};

struct TokenizedText {
    std::vector<Token> tokens;

    std::size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }
};

/// Stopword list and closed-class (function word) lexicon. Both ship as
/// plain UTF-8 files, one word per line; built-in copies of the shipped
/// lists are compiled in so the library works without data-file paths.
class Lexicon {
  public:
    /// The compiled-in default lists.
    static const Lexicon& builtin();

    Lexicon() = default;
    Lexicon(const std::filesystem::path& stopwords, const std::filesystem::path& function_words);

    void load_stopwords(std::string_view file_contents);
    void load_function_words(std::string_view file_contents);

    bool is_stopword(std::string_view surface) const;
    bool is_function_word(std::string_view surface) const;

    std::size_t stopword_count() const { return stopwords_.size(); }
    std::size_t function_word_count() const { return function_words_.size(); }

  private:
    std::unordered_set<std::string> stopwords_;
    std::unordered_set<std::string> function_words_;
};

/// Removes HTML markup: tags are dropped (block-level tags become single
/// spaces), entities are decoded, <code> contents are kept as text, and the
/// result is whitespace-normalized. Never fails; unbalanced markup is
/// handled leniently.
std::string strip_html(std::string_view html);

/// Splits on non-alphanumerics (UTF-8 aware), lowercases ASCII, stems, and
/// flags stopwords and word class from the lexicon. Tokens longer than 64
/// bytes are dropped.
TokenizedText tokenize(std::string_view text, const Lexicon& lexicon = Lexicon::builtin());

}  // namespace cqalog
