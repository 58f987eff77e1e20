#include "cqalog/porter.hpp"

#include <array>
#include <cstddef>

namespace cqalog {
namespace {

// Working state: the word lives in buf[0..k]. j marks the candidate stem end
// set by the most recent successful suffix match.
struct Stemmer {
    std::string buf;
    int k = 0;
    int j = 0;

    bool is_cons(int i) const {
        char c = buf[static_cast<std::size_t>(i)];
        switch (c) {
            case 'a':
            case 'e':
            case 'i':
            case 'o':
            case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !is_cons(i - 1);
            default:
                return true;
        }
    }

    // Number of vowel-consonant sequences in buf[0..j].
    int measure() const {
        int n = 0;
        int i = 0;
        for (;;) {
            if (i > j) return n;
            if (!is_cons(i)) break;
            ++i;
        }
        ++i;
        for (;;) {
            for (;;) {
                if (i > j) return n;
                if (is_cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            for (;;) {
                if (i > j) return n;
                if (!is_cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j; ++i)
            if (!is_cons(i)) return true;
        return false;
    }

    bool double_cons(int i) const {
        if (i < 1) return false;
        if (buf[static_cast<std::size_t>(i)] != buf[static_cast<std::size_t>(i - 1)]) return false;
        return is_cons(i);
    }

    // consonant-vowel-consonant ending at i, where the final consonant is not
    // w, x or y; used to restore a trailing e (hop-ing -> hop, fil-ing -> file).
    bool cvc(int i) const {
        if (i < 2 || !is_cons(i) || is_cons(i - 1) || !is_cons(i - 2)) return false;
        char c = buf[static_cast<std::size_t>(i)];
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends(std::string_view s) {
        int len = static_cast<int>(s.size());
        if (s.back() != buf[static_cast<std::size_t>(k)]) return false;
        if (len > k + 1) return false;
        if (buf.compare(static_cast<std::size_t>(k - len + 1), static_cast<std::size_t>(len), s) !=
            0)
            return false;
        j = k - len;
        return true;
    }

    void set_to(std::string_view s) {
        buf.resize(static_cast<std::size_t>(j + 1));
        buf.append(s);
        k = j + static_cast<int>(s.size());
    }

    void replace_if_measure(std::string_view s) {
        if (measure() > 0) set_to(s);
    }

    char at(int i) const { return buf[static_cast<std::size_t>(i)]; }

    // plurals and -ed / -ing
    void step1ab() {
        if (at(k) == 's') {
            if (ends("sses"))
                k -= 2;
            else if (ends("ies"))
                set_to("i");
            else if (at(k - 1) != 's')
                --k;
        }
        if (ends("eed")) {
            if (measure() > 0) --k;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k = j;
            if (ends("at"))
                set_to("ate");
            else if (ends("bl"))
                set_to("ble");
            else if (ends("iz"))
                set_to("ize");
            else if (double_cons(k)) {
                --k;
                char c = at(k);
                if (c == 'l' || c == 's' || c == 'z') ++k;
            } else if (measure() == 1 && cvc(k)) {
                set_to("e");
            }
        }
    }

    // terminal y -> i when there is another vowel in the stem
    void step1c() {
        if (ends("y") && vowel_in_stem()) buf[static_cast<std::size_t>(k)] = 'i';
    }

    struct Rule {
        std::string_view suffix;
        std::string_view replacement;
    };

    // Applies the first matching rule of the group; the per-rule m() > 0
    // condition may still veto the rewrite, but no later rule is tried.
    template <std::size_t N>
    void apply_group(const std::array<Rule, N>& rules) {
        for (const Rule& rule : rules) {
            if (ends(rule.suffix)) {
                replace_if_measure(rule.replacement);
                return;
            }
        }
    }

    void step2() {
        if (k < 1) return;
        switch (at(k - 1)) {
            case 'a':
                apply_group(std::array<Rule, 2>{{{"ational", "ate"}, {"tional", "tion"}}});
                break;
            case 'c':
                apply_group(std::array<Rule, 2>{{{"enci", "ence"}, {"anci", "ance"}}});
                break;
            case 'e':
                apply_group(std::array<Rule, 1>{{{"izer", "ize"}}});
                break;
            case 'l':
                apply_group(std::array<Rule, 5>{{{"bli", "ble"},
                                                 {"alli", "al"},
                                                 {"entli", "ent"},
                                                 {"eli", "e"},
                                                 {"ousli", "ous"}}});
                break;
            case 'o':
                apply_group(std::array<Rule, 3>{
                    {{"ization", "ize"}, {"ation", "ate"}, {"ator", "ate"}}});
                break;
            case 's':
                apply_group(std::array<Rule, 4>{{{"alism", "al"},
                                                 {"iveness", "ive"},
                                                 {"fulness", "ful"},
                                                 {"ousness", "ous"}}});
                break;
            case 't':
                apply_group(
                    std::array<Rule, 3>{{{"aliti", "al"}, {"iviti", "ive"}, {"biliti", "ble"}}});
                break;
            case 'g':
                apply_group(std::array<Rule, 1>{{{"logi", "log"}}});
                break;
            default:
                break;
        }
    }

    void step3() {
        switch (at(k)) {
            case 'e':
                apply_group(std::array<Rule, 3>{
                    {{"icate", "ic"}, {"ative", ""}, {"alize", "al"}}});
                break;
            case 'i':
                apply_group(std::array<Rule, 1>{{{"iciti", "ic"}}});
                break;
            case 'l':
                apply_group(std::array<Rule, 2>{{{"ical", "ic"}, {"ful", ""}}});
                break;
            case 's':
                apply_group(std::array<Rule, 1>{{{"ness", ""}}});
                break;
            default:
                break;
        }
    }

    // drops residual suffixes when m() > 1
    void step4() {
        if (k < 1) return;
        bool matched = false;
        switch (at(k - 1)) {
            case 'a':
                matched = ends("al");
                break;
            case 'c':
                matched = ends("ance") || ends("ence");
                break;
            case 'e':
                matched = ends("er");
                break;
            case 'i':
                matched = ends("ic");
                break;
            case 'l':
                matched = ends("able") || ends("ible");
                break;
            case 'n':
                matched = ends("ant") || ends("ement") || ends("ment") || ends("ent");
                break;
            case 'o':
                matched = (ends("ion") && j >= 0 && (at(j) == 's' || at(j) == 't')) || ends("ou");
                break;
            case 's':
                matched = ends("ism");
                break;
            case 't':
                matched = ends("ate") || ends("iti");
                break;
            case 'u':
                matched = ends("ous");
                break;
            case 'v':
                matched = ends("ive");
                break;
            case 'z':
                matched = ends("ize");
                break;
            default:
                break;
        }
        if (matched && measure() > 1) k = j;
    }

    // removes a final -e and reduces -ll, both only in long stems. j stays
    // pinned at the entry value of k for both checks, as in the reference.
    void step5() {
        j = k;
        if (at(k) == 'e') {
            int a = measure();
            if (a > 1 || (a == 1 && !cvc(k - 1))) --k;
        }
        if (at(k) == 'l' && double_cons(k) && measure() > 1) --k;
    }

    std::string run() {
        step1ab();
        step1c();
        step2();
        step3();
        step4();
        step5();
        buf.resize(static_cast<std::size_t>(k + 1));
        return std::move(buf);
    }
};

}  // namespace

std::string porter_stem(std::string_view word) {
    if (word.size() <= 2) return std::string(word);
    for (char c : word)
        if (c < 'a' || c > 'z') return std::string(word);
    Stemmer s;
    s.buf = std::string(word);
    s.k = static_cast<int>(word.size()) - 1;
    return s.run();
}

}  // namespace cqalog
