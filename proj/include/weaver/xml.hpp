#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "weaver/errors.hpp"

// Minimal XML DOM for the two small dialects this project reads and writes
// (process documents and service descriptors). Supports elements, attributes,
// character data, comments, CDATA, the XML declaration, and the five
// predefined entities plus numeric character references. No namespaces, no
// DTDs, no processing instructions.
namespace weaver::xml {

class XmlError : public Error {
public:
    XmlError(std::size_t line, std::size_t col, const std::string& message)
        : Error("MalformedXml", "line " + std::to_string(line) + ", col " +
                                    std::to_string(col) + ": " + message),
          line_(line),
          col_(col) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t line_;
    std::size_t col_;
};

struct Element {
    std::string name;
    // Attributes in document order; duplicate names rejected at parse time.
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<Element> children;
    // Concatenated character data directly inside this element (entity
    // references decoded). Whitespace between child elements is included.
    std::string text;

    std::optional<std::string> attr(std::string_view name) const;
    const Element* first_child(std::string_view name) const;
    std::size_t count_children(std::string_view name) const;
};

// Parses a complete document and returns its root element.
// Throws XmlError when the text is not well-formed.
Element parse(std::string_view text);

std::string escape_text(std::string_view raw);
std::string escape_attr(std::string_view raw);

}  // namespace weaver::xml
