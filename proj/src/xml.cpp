#include "weaver/xml.hpp"

#include <cctype>

namespace weaver::xml {

namespace {

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;
    std::size_t line = 1;
    std::size_t col = 1;

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    char advance() {
        char c = text[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }

    bool starts_with(std::string_view s) const {
        return text.compare(pos, s.size(), s) == 0;
    }

    void skip(std::size_t n) {
        for (std::size_t i = 0; i < n && !eof(); ++i) advance();
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw XmlError(line, col, message);
    }
};

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
    return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) ||
           c == '-' || c == '.';
}

void skip_whitespace(Cursor& cur) {
    while (!cur.eof() && is_space(cur.peek())) cur.advance();
}

std::string parse_name(Cursor& cur) {
    if (cur.eof() || !is_name_start(cur.peek())) cur.fail("expected a name");
    std::string name;
    while (!cur.eof() && is_name_char(cur.peek())) name += cur.advance();
    return name;
}

void append_utf8(std::string& out, unsigned long cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

// Consumes an entity reference starting at '&' and appends its value.
void parse_entity(Cursor& cur, std::string& out) {
    cur.advance();  // '&'
    std::string ent;
    while (!cur.eof() && cur.peek() != ';') {
        ent += cur.advance();
        if (ent.size() > 10) cur.fail("unterminated entity reference");
    }
    if (cur.eof()) cur.fail("unterminated entity reference");
    cur.advance();  // ';'
    if (ent == "lt") {
        out += '<';
    } else if (ent == "gt") {
        out += '>';
    } else if (ent == "amp") {
        out += '&';
    } else if (ent == "quot") {
        out += '"';
    } else if (ent == "apos") {
        out += '\'';
    } else if (!ent.empty() && ent[0] == '#') {
        bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
        std::string digits = ent.substr(hex ? 2 : 1);
        if (digits.empty()) cur.fail("empty character reference");
        unsigned long cp = 0;
        for (char d : digits) {
            int v;
            if (d >= '0' && d <= '9') {
                v = d - '0';
            } else if (hex && d >= 'a' && d <= 'f') {
                v = d - 'a' + 10;
            } else if (hex && d >= 'A' && d <= 'F') {
                v = d - 'A' + 10;
            } else {
                cur.fail("bad character reference '&" + ent + ";'");
            }
            cp = cp * (hex ? 16 : 10) + static_cast<unsigned long>(v);
            if (cp > 0x10FFFF) cur.fail("character reference out of range");
        }
        append_utf8(out, cp);
    } else {
        cur.fail("unknown entity '&" + ent + ";'");
    }
}

void parse_comment(Cursor& cur) {
    cur.skip(4);  // "<!--"
    while (!cur.eof()) {
        if (cur.starts_with("-->")) {
            cur.skip(3);
            return;
        }
        cur.advance();
    }
    cur.fail("unterminated comment");
}

std::string parse_attr_value(Cursor& cur) {
    if (cur.eof() || (cur.peek() != '"' && cur.peek() != '\'')) {
        cur.fail("expected quoted attribute value");
    }
    char quote = cur.advance();
    std::string value;
    while (!cur.eof() && cur.peek() != quote) {
        if (cur.peek() == '<') cur.fail("'<' in attribute value");
        if (cur.peek() == '&') {
            parse_entity(cur, value);
        } else {
            value += cur.advance();
        }
    }
    if (cur.eof()) cur.fail("unterminated attribute value");
    cur.advance();  // closing quote
    return value;
}

Element parse_element(Cursor& cur);

// Parses attributes plus the tag close; returns true when self-closing.
bool parse_tag_rest(Cursor& cur, Element& el) {
    while (true) {
        bool had_space = !cur.eof() && is_space(cur.peek());
        skip_whitespace(cur);
        if (cur.eof()) cur.fail("unterminated start tag");
        if (cur.peek() == '>') {
            cur.advance();
            return false;
        }
        if (cur.peek() == '/') {
            cur.advance();
            if (cur.eof() || cur.peek() != '>') cur.fail("expected '>' after '/'");
            cur.advance();
            return true;
        }
        if (!had_space) cur.fail("expected whitespace before attribute");
        std::string name = parse_name(cur);
        skip_whitespace(cur);
        if (cur.eof() || cur.peek() != '=') cur.fail("expected '=' after attribute name");
        cur.advance();
        skip_whitespace(cur);
        std::string value = parse_attr_value(cur);
        for (const auto& [existing, _] : el.attrs) {
            if (existing == name) cur.fail("duplicate attribute '" + name + "'");
        }
        el.attrs.emplace_back(name, value);
    }
}

void parse_content(Cursor& cur, Element& el) {
    while (true) {
        if (cur.eof()) cur.fail("unterminated element '" + el.name + "'");
        if (cur.peek() == '<') {
            if (cur.starts_with("</")) {
                cur.skip(2);
                std::string name = parse_name(cur);
                if (name != el.name) {
                    cur.fail("mismatched end tag '</" + name + ">' for '" + el.name + "'");
                }
                skip_whitespace(cur);
                if (cur.eof() || cur.peek() != '>') cur.fail("expected '>' in end tag");
                cur.advance();
                return;
            }
            if (cur.starts_with("<!--")) {
                parse_comment(cur);
                continue;
            }
            if (cur.starts_with("<![CDATA[")) {
                cur.skip(9);
                while (!cur.eof() && !cur.starts_with("]]>")) el.text += cur.advance();
                if (cur.eof()) cur.fail("unterminated CDATA section");
                cur.skip(3);
                continue;
            }
            if (cur.starts_with("<!") || cur.starts_with("<?")) {
                cur.fail("unsupported markup inside element");
            }
            el.children.push_back(parse_element(cur));
            continue;
        }
        if (cur.peek() == '&') {
            parse_entity(cur, el.text);
        } else {
            el.text += cur.advance();
        }
    }
}

Element parse_element(Cursor& cur) {
    if (cur.eof() || cur.peek() != '<') cur.fail("expected '<'");
    cur.advance();
    Element el;
    el.name = parse_name(cur);
    bool self_closing = parse_tag_rest(cur, el);
    if (!self_closing) parse_content(cur, el);
    return el;
}

}  // namespace

std::optional<std::string> Element::attr(std::string_view name) const {
    for (const auto& [k, v] : attrs) {
        if (k == name) return v;
    }
    return std::nullopt;
}

const Element* Element::first_child(std::string_view name) const {
    for (const auto& c : children) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

std::size_t Element::count_children(std::string_view name) const {
    std::size_t n = 0;
    for (const auto& c : children) {
        if (c.name == name) ++n;
    }
    return n;
}

Element parse(std::string_view text) {
    Cursor cur{text};
    skip_whitespace(cur);
    if (cur.starts_with("<?xml")) {
        while (!cur.eof() && !cur.starts_with("?>")) cur.advance();
        if (cur.eof()) cur.fail("unterminated XML declaration");
        cur.skip(2);
    }
    skip_whitespace(cur);
    while (cur.starts_with("<!--")) {
        parse_comment(cur);
        skip_whitespace(cur);
    }
    if (cur.eof()) cur.fail("document has no root element");
    Element root = parse_element(cur);
    skip_whitespace(cur);
    while (cur.starts_with("<!--")) {
        parse_comment(cur);
        skip_whitespace(cur);
    }
    if (!cur.eof()) cur.fail("content after root element");
    return root;
}

std::string escape_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string escape_attr(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\n': out += "&#10;"; break;
            case '\t': out += "&#9;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace weaver::xml
