#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cqalog {

/// Streaming reader for the Stack Exchange dump convention: a root element
/// wrapping a flat sequence of attribute-only <row .../> elements. Memory
/// use is bounded by the size of a single row, not the file.
class XmlRowReader {
  public:
    explicit XmlRowReader(std::istream& in);

    /// Advances to the next <row>. Returns false at end of input.
    /// Throws MalformedXml on syntax the dump convention cannot contain.
    bool next_row();

    /// Attribute of the current row, entity-decoded. Empty optional when
    /// the attribute is absent.
    std::optional<std::string_view> attr(std::string_view name) const;

    int line() const { return line_; }

  private:
    bool fill();
    bool next_char(char& c);
    bool peek_char(char& c);
    void skip_until(char stop);

    std::istream& in_;
    std::string buf_;
    std::size_t pos_ = 0;
    int line_ = 1;
    std::vector<std::pair<std::string, std::string>> attrs_;
};

/// XML entity decoding for attribute values (&amp; &lt; &gt; &quot; &apos;
/// and numeric forms). Unknown entities pass through verbatim.
std::string xml_unescape(std::string_view text);

}  // namespace cqalog
