#include "cqalog/xml.hpp"

#include <cctype>

#include "cqalog/errors.hpp"

namespace cqalog {
namespace {

constexpr std::size_t kChunk = 1 << 16;

void append_utf8_cp(std::string& out, std::uint32_t cp) {
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

}  // namespace

std::string xml_unescape(std::string_view text) {
    if (text.find('&') == std::string_view::npos) return std::string(text);
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c != '&') {
            out.push_back(c);
            ++i;
            continue;
        }
        std::size_t semi = text.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back('&');
            ++i;
            continue;
        }
        std::string_view name = text.substr(i + 1, semi - i - 1);
        if (name == "amp")
            out.push_back('&');
        else if (name == "lt")
            out.push_back('<');
        else if (name == "gt")
            out.push_back('>');
        else if (name == "quot")
            out.push_back('"');
        else if (name == "apos")
            out.push_back('\'');
        else if (!name.empty() && name[0] == '#') {
            std::uint32_t cp = 0;
            bool ok = name.size() > 1;
            if (name.size() > 2 && (name[1] == 'x' || name[1] == 'X')) {
                for (char d : name.substr(2)) {
                    if (!std::isxdigit(static_cast<unsigned char>(d))) {
                        ok = false;
                        break;
                    }
                    cp = cp * 16 +
                         static_cast<std::uint32_t>(
                             std::isdigit(static_cast<unsigned char>(d))
                                 ? d - '0'
                                 : std::tolower(static_cast<unsigned char>(d)) - 'a' + 10);
                }
            } else {
                for (char d : name.substr(1)) {
                    if (!std::isdigit(static_cast<unsigned char>(d))) {
                        ok = false;
                        break;
                    }
                    cp = cp * 10 + static_cast<std::uint32_t>(d - '0');
                }
            }
            if (ok && cp > 0 && cp <= 0x10ffff) {
                append_utf8_cp(out, cp);
            } else {
                out.push_back('&');
                out.append(name);
                out.push_back(';');
            }
        } else {
            out.push_back('&');
            out.append(name);
            out.push_back(';');
        }
        i = semi + 1;
    }
    return out;
}

XmlRowReader::XmlRowReader(std::istream& in) : in_(in) { buf_.reserve(kChunk); }

bool XmlRowReader::fill() {
    if (pos_ > 0) {
        buf_.erase(0, pos_);
        pos_ = 0;
    }
    std::size_t old = buf_.size();
    buf_.resize(old + kChunk);
    in_.read(buf_.data() + old, static_cast<std::streamsize>(kChunk));
    std::size_t got = static_cast<std::size_t>(in_.gcount());
    buf_.resize(old + got);
    return got > 0;
}

bool XmlRowReader::next_char(char& c) {
    if (pos_ >= buf_.size() && !fill()) return false;
    c = buf_[pos_++];
    if (c == '\n') ++line_;
    return true;
}

bool XmlRowReader::peek_char(char& c) {
    if (pos_ >= buf_.size() && !fill()) return false;
    c = buf_[pos_];
    return true;
}

void XmlRowReader::skip_until(char stop) {
    char c;
    while (next_char(c)) {
        if (c == stop) return;
    }
}

bool XmlRowReader::next_row() {
    attrs_.clear();
    char c;
    for (;;) {
        // find the next element
        for (;;) {
            if (!next_char(c)) return false;
            if (c == '<') break;
        }
        if (!peek_char(c)) throw MalformedXml(line_, "input ends inside a tag");
        if (c == '!' || c == '?') {  // declaration or comment
            if (buf_.compare(pos_, 3, "!--") == 0) {
                // comments may contain '>'
                int dashes = 0;
                char d;
                while (next_char(d)) {
                    if (d == '-')
                        ++dashes;
                    else if (d == '>' && dashes >= 2)
                        break;
                    else
                        dashes = 0;
                }
                continue;
            }
            skip_until('>');
            continue;
        }
        // element name
        std::string name;
        if (c == '/') {
            skip_until('>');
            continue;
        }
        while (peek_char(c) && (std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
            name.push_back(c);
            next_char(c);
        }
        if (name != "row") {
            skip_until('>');
            continue;
        }
        // attributes
        for (;;) {
            // skip whitespace
            for (;;) {
                if (!peek_char(c)) throw MalformedXml(line_, "input ends inside <row>");
                if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
                    next_char(c);
                else
                    break;
            }
            if (c == '/') {
                next_char(c);
                if (!next_char(c) || c != '>') throw MalformedXml(line_, "expected '>' after '/'");
                return true;
            }
            if (c == '>') {
                next_char(c);
                return true;  // non-self-closing rows are tolerated
            }
            std::string attr_name;
            while (peek_char(c) && (std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                                    c == '-' || c == ':')) {
                attr_name.push_back(c);
                next_char(c);
            }
            if (attr_name.empty())
                throw MalformedXml(line_, "expected attribute name in <row>");
            if (!next_char(c) || c != '=')
                throw MalformedXml(line_, "expected '=' after attribute " + attr_name);
            if (!next_char(c) || (c != '"' && c != '\''))
                throw MalformedXml(line_, "expected quoted value for " + attr_name);
            char quote = c;
            std::string raw;
            for (;;) {
                if (!next_char(c)) throw MalformedXml(line_, "unterminated attribute value");
                if (c == quote) break;
                raw.push_back(c);
            }
            attrs_.emplace_back(std::move(attr_name), xml_unescape(raw));
        }
    }
}

std::optional<std::string_view> XmlRowReader::attr(std::string_view name) const {
    for (const auto& [key, value] : attrs_) {
        if (key == name) return std::string_view(value);
    }
    return std::nullopt;
}

}  // namespace cqalog
