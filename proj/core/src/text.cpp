#include "cqalog/text.hpp"

#include <algorithm>
#include <cctype>

#include "cqalog/io.hpp"
#include "cqalog/porter.hpp"

namespace cqalog {
namespace {

// Compiled-in copies of core/data/stopwords_en.txt and
// core/data/function_words_en.txt (test-checked to stay in sync).
#include "lexicon_data.inc"

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

// Decodes the entity starting at html[pos] ('&'). Returns the decoded text
// and advances pos past the entity, or returns "&" verbatim when the text
// is not a recognizable entity.
std::string decode_entity(std::string_view html, std::size_t& pos) {
    std::size_t semi = html.find(';', pos + 1);
    if (semi == std::string_view::npos || semi - pos > 12) {
        ++pos;
        return "&";
    }
    std::string_view name = html.substr(pos + 1, semi - pos - 1);
    std::string out;
    if (!name.empty() && name[0] == '#') {
        std::uint32_t cp = 0;
        bool ok = name.size() > 1;
        if (name.size() > 2 && (name[1] == 'x' || name[1] == 'X')) {
            for (char c : name.substr(2)) {
                if (std::isxdigit(static_cast<unsigned char>(c)))
                    cp = cp * 16 + static_cast<std::uint32_t>(
                                       std::isdigit(static_cast<unsigned char>(c))
                                           ? c - '0'
                                           : std::tolower(static_cast<unsigned char>(c)) - 'a' +
                                                 10);
                else {
                    ok = false;
                    break;
                }
            }
        } else {
            for (char c : name.substr(1)) {
                if (std::isdigit(static_cast<unsigned char>(c)))
                    cp = cp * 10 + static_cast<std::uint32_t>(c - '0');
                else {
                    ok = false;
                    break;
                }
            }
        }
        if (!ok || cp == 0 || cp > 0x10ffff) {
            ++pos;
            return "&";
        }
        append_utf8(out, cp);
    } else if (name == "amp") {
        out = "&";
    } else if (name == "lt") {
        out = "<";
    } else if (name == "gt") {
        out = ">";
    } else if (name == "quot") {
        out = "\"";
    } else if (name == "apos") {
        out = "'";
    } else if (name == "nbsp") {
        out = " ";
    } else {
        ++pos;
        return "&";
    }
    pos = semi + 1;
    return out;
}

bool ascii_iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

// Inline formatting tags vanish without a word break so markup inside a
// word ("ms<b>dn</b>") does not split it. Everything else acts as a block
// boundary.
bool is_inline_tag(std::string_view name) {
    static constexpr std::string_view kInline[] = {"a",    "b",   "i",      "em",  "strong",
                                                   "code", "s",   "strike", "u",   "span",
                                                   "sub",  "sup", "kbd",    "abbr"};
    for (std::string_view t : kInline)
        if (ascii_iequals(name, t)) return true;
    return false;
}

constexpr std::size_t kMaxTokenBytes = 64;

// Non-ASCII codepoints count as word characters except for common Unicode
// punctuation and whitespace; ASCII word characters are the alphanumerics.
bool is_word_codepoint(std::uint32_t cp) {
    if (cp < 0x80)
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    if (cp == 0xa0) return false;                    // no-break space
    if (cp >= 0x2000 && cp <= 0x206f) return false;  // general punctuation
    if (cp == 0xab || cp == 0xbb) return false;      // guillemets
    if (cp >= 0x3000 && cp <= 0x303f) return false;  // CJK punctuation
    return true;
}

// Decodes one UTF-8 codepoint; invalid bytes decode as themselves so the
// tokenizer never stalls on broken input.
std::uint32_t next_codepoint(std::string_view s, std::size_t& i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
        ++i;
        return c;
    }
    int extra = (c >= 0xf0) ? 3 : (c >= 0xe0) ? 2 : (c >= 0xc0) ? 1 : 0;
    if (extra == 0 || i + static_cast<std::size_t>(extra) >= s.size()) {
        ++i;
        return c;
    }
    std::uint32_t cp = c & (0x3f >> extra);
    for (int n = 0; n < extra; ++n) {
        unsigned char cc = static_cast<unsigned char>(s[i + 1 + static_cast<std::size_t>(n)]);
        if ((cc & 0xc0) != 0x80) {
            ++i;
            return c;
        }
        cp = (cp << 6) | (cc & 0x3f);
    }
    i += 1 + static_cast<std::size_t>(extra);
    return cp;
}

}  // namespace

const Lexicon& Lexicon::builtin() {
    static const Lexicon instance = [] {
        Lexicon lex;
        lex.load_stopwords(kBuiltinStopwords);
        lex.load_function_words(kBuiltinFunctionWords);
        return lex;
    }();
    return instance;
}

Lexicon::Lexicon(const std::filesystem::path& stopwords,
                 const std::filesystem::path& function_words) {
    load_stopwords(read_file(stopwords));
    load_function_words(read_file(function_words));
}

namespace {

template <typename Insert>
void parse_word_list(std::string_view contents, Insert insert) {
    std::size_t start = 0;
    while (start <= contents.size()) {
        std::size_t end = contents.find('\n', start);
        if (end == std::string_view::npos) end = contents.size();
        std::string_view line = contents.substr(start, end - start);
        start = end + 1;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
        while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
        if (line.empty() || line[0] == '#') continue;
        std::string word(line);
        std::transform(word.begin(), word.end(), word.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        insert(word);
    }
}

}  // namespace

void Lexicon::load_stopwords(std::string_view file_contents) {
    parse_word_list(file_contents, [this](const std::string& word) {
        std::size_t apos = word.find('\'');
        if (apos == std::string::npos) {
            stopwords_.insert(word);
            return;
        }
        // The tokenizer splits on apostrophes, so list entries like "aren't"
        // are stored as their fragments.
        if (apos > 0) stopwords_.insert(word.substr(0, apos));
        if (apos + 1 < word.size()) stopwords_.insert(word.substr(apos + 1));
    });
}

void Lexicon::load_function_words(std::string_view file_contents) {
    parse_word_list(file_contents,
                    [this](const std::string& word) { function_words_.insert(word); });
}

bool Lexicon::is_stopword(std::string_view surface) const {
    return stopwords_.count(std::string(surface)) > 0;
}

bool Lexicon::is_function_word(std::string_view surface) const {
    return function_words_.count(std::string(surface)) > 0;
}

std::string strip_html(std::string_view html) {
    std::string out;
    out.reserve(html.size());
    std::size_t i = 0;
    auto emit_space = [&out] {
        if (!out.empty() && out.back() != ' ') out.push_back(' ');
    };
    auto emit_text = [&out](std::string_view text) {
        for (char c : text) {
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
                if (!out.empty() && out.back() != ' ') out.push_back(' ');
            } else {
                out.push_back(c);
            }
        }
    };
    while (i < html.size()) {
        char c = html[i];
        if (c == '<') {
            if (html.compare(i, 4, "<!--") == 0) {
                std::size_t end = html.find("-->", i + 4);
                i = (end == std::string_view::npos) ? html.size() : end + 3;
                emit_space();
                continue;
            }
            std::size_t close = html.find('>', i + 1);
            if (close == std::string_view::npos) {
                // dangling '<' near EOF: keep it as text
                out.push_back('<');
                ++i;
                continue;
            }
            std::string_view inside = html.substr(i + 1, close - i - 1);
            bool closing = !inside.empty() && inside[0] == '/';
            if (closing) inside.remove_prefix(1);
            std::size_t name_end = 0;
            while (name_end < inside.size() &&
                   (std::isalnum(static_cast<unsigned char>(inside[name_end])) != 0))
                ++name_end;
            std::string_view name = inside.substr(0, name_end);
            if (!closing && (ascii_iequals(name, "script") || ascii_iequals(name, "style"))) {
                std::string terminator = "</" + std::string(name);
                std::size_t end = html.find(terminator, close + 1);
                if (end == std::string_view::npos) {
                    i = html.size();
                } else {
                    std::size_t term_close = html.find('>', end);
                    i = (term_close == std::string_view::npos) ? html.size() : term_close + 1;
                }
                emit_space();
                continue;
            }
            if (!is_inline_tag(name)) emit_space();
            i = close + 1;
        } else if (c == '&') {
            emit_text(decode_entity(html, i));
        } else {
            emit_text(html.substr(i, 1));
            ++i;
        }
    }
    // collapse is handled during emission; strip the boundary spaces
    if (!out.empty() && out.back() == ' ') out.pop_back();
    if (!out.empty() && out.front() == ' ') out.erase(out.begin());
    return out;
}

TokenizedText tokenize(std::string_view text, const Lexicon& lexicon) {
    TokenizedText result;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t cp_start = i;
        std::uint32_t cp = next_codepoint(text, i);
        if (!is_word_codepoint(cp)) continue;

        std::size_t token_start = cp_start;
        std::size_t token_end = i;
        while (token_end < text.size()) {
            std::size_t probe = token_end;
            std::uint32_t next_cp = next_codepoint(text, probe);
            if (!is_word_codepoint(next_cp)) break;
            token_end = probe;
        }
        i = token_end;

        if (token_end - token_start > kMaxTokenBytes) continue;

        Token token;
        token.char_offset = static_cast<std::uint32_t>(token_start);
        token.surface.reserve(token_end - token_start);
        for (std::size_t p = token_start; p < token_end; ++p) {
            char ch = text[p];
            if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
            token.surface.push_back(ch);
        }
        token.stem = porter_stem(token.surface);
        token.is_stopword = lexicon.is_stopword(token.surface);
        token.word_class = lexicon.is_function_word(token.surface) ? WordClass::function
                                                                   : WordClass::content;
        result.tokens.push_back(std::move(token));
    }
    return result;
}

}  // namespace cqalog
