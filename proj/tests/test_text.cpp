#include <doctest.h>

#include "cqalog/text.hpp"

using namespace cqalog;

TEST_CASE("strip_html drops tags and decodes entities") {
    CHECK(strip_html("<p>Hello <b>world</b></p>") == "Hello world");
    CHECK(strip_html("a &amp; b &lt;tag&gt;") == "a & b <tag>");
    CHECK(strip_html("<a href=\"http://x\">link</a> text") == "link text");
}

TEST_CASE("strip_html keeps code contents and survives broken markup") {
    CHECK(strip_html("use <code>std::vector&lt;int&gt;</code> here") ==
          "use std::vector<int> here");
    CHECK(strip_html("<p>unclosed <b>bold") == "unclosed bold");
    CHECK(strip_html("stray < less-than") == "stray < less-than");
    CHECK(strip_html("") == "");
}

TEST_CASE("strip_html separates block elements and normalizes whitespace") {
    std::string out = strip_html("<p>first</p><p>second</p>\n\n<br/>third");
    CHECK(out == "first second third");
}

TEST_CASE("tokenize lowercases, stems, and flags stopwords") {
    TokenizedText text = tokenize("The Runners are running quickly");
    REQUIRE(text.size() == 5);
    CHECK(text.tokens[0].surface == "the");
    CHECK(text.tokens[0].is_stopword);
    CHECK(text.tokens[1].surface == "runners");
    CHECK(text.tokens[1].stem == "runner");
    CHECK_FALSE(text.tokens[1].is_stopword);
    CHECK(text.tokens[3].stem == "run");
    CHECK(text.tokens[4].stem == "quickli");
}

TEST_CASE("tokenize splits on punctuation and keeps digits") {
    TokenizedText text = tokenize("route-66, version 2.0!");
    std::vector<std::string> surfaces;
    for (const Token& t : text.tokens) surfaces.push_back(t.surface);
    CHECK(surfaces == std::vector<std::string>{"route", "66", "version", "2", "0"});
}

TEST_CASE("tokenize records character offsets") {
    TokenizedText text = tokenize("ab  cd");
    REQUIRE(text.size() == 2);
    CHECK(text.tokens[0].char_offset == 0);
    CHECK(text.tokens[1].char_offset == 4);
}

TEST_CASE("tokenize classifies function words") {
    TokenizedText text = tokenize("between orchards");
    REQUIRE(text.size() == 2);
    CHECK(text.tokens[0].word_class == WordClass::function);
    CHECK(text.tokens[1].word_class == WordClass::content);
}

TEST_CASE("builtin lexicon is populated") {
    const Lexicon& lex = Lexicon::builtin();
    CHECK(lex.stopword_count() > 100);
    CHECK(lex.function_word_count() > 200);
    CHECK(lex.is_stopword("the"));
    CHECK(lex.is_function_word("the"));
    CHECK_FALSE(lex.is_stopword("orchard"));
    CHECK_FALSE(lex.is_function_word("orchard"));
}

TEST_CASE("tokenize drops oversized tokens") {
    std::string word(70, 'a');
    CHECK(tokenize("ok " + word + " fine").size() == 2);
}
