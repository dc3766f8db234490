#include "urcminer/xml_rows.hpp"

#include <charconv>
#include <iterator>

#include "urcminer/common.hpp"

namespace urcminer {
namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
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

bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.' || c == ':';
}

class Cursor {
 public:
  explicit Cursor(std::string text) : text_(std::move(text)) {}

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  std::size_t line() const { return line_; }

  void advance() {
    if (text_[pos_] == '\n') ++line_;
    ++pos_;
  }

  bool starts_with(std::string_view s) const {
    return std::string_view(text_).substr(pos_, s.size()) == s;
  }

  void skip(std::size_t n) {
    for (std::size_t i = 0; i < n && !done(); ++i) advance();
  }

  void skip_space() {
    while (!done() && (peek() == ' ' || peek() == '\t' || peek() == '\n' ||
                       peek() == '\r')) {
      advance();
    }
  }

  // Skips until just past `terminator`.
  void skip_past(std::string_view terminator, std::string_view what) {
    while (!done() && !starts_with(terminator)) advance();
    if (done()) throw ParseError("unterminated " + std::string(what), line_);
    skip(terminator.size());
  }

  std::string read_name() {
    std::string name;
    while (!done() && is_name_char(peek())) {
      name += peek();
      advance();
    }
    return name;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_);
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

XmlRow read_attributes(Cursor& cur) {
  XmlRow row;
  while (true) {
    cur.skip_space();
    if (cur.done()) cur.fail("unterminated element");
    if (cur.starts_with("/>")) {
      cur.skip(2);
      return row;
    }
    if (cur.peek() == '>') cur.fail("<row> must be self-closing");
    std::string name = cur.read_name();
    if (name.empty()) cur.fail("expected attribute name");
    cur.skip_space();
    if (cur.done() || cur.peek() != '=') cur.fail("expected '=' after " + name);
    cur.advance();
    cur.skip_space();
    if (cur.done() || (cur.peek() != '"' && cur.peek() != '\'')) {
      cur.fail("expected quoted value for " + name);
    }
    const char quote = cur.peek();
    // A runaway value is reported where it opened, not where it was noticed.
    const std::size_t value_line = cur.line();
    cur.advance();
    std::string raw;
    while (!cur.done() && cur.peek() != quote) {
      if (cur.peek() == '<') throw ParseError("'<' inside attribute " + name, value_line);
      raw += cur.peek();
      cur.advance();
    }
    if (cur.done()) throw ParseError("unterminated attribute " + name, value_line);
    cur.advance();
    if (!row.emplace(std::move(name), decode_entities(raw)).second) {
      cur.fail("duplicate attribute");
    }
  }
}

}  // namespace

std::string decode_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '&') {
      out += text[i];
      continue;
    }
    const auto semi = text.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += text[i];
      continue;
    }
    const std::string_view ent = text.substr(i + 1, semi - i - 1);
    if (ent == "amp") out += '&';
    else if (ent == "lt") out += '<';
    else if (ent == "gt") out += '>';
    else if (ent == "quot") out += '"';
    else if (ent == "apos") out += '\'';
    else if (ent.size() > 1 && ent[0] == '#') {
      const bool hex = ent[1] == 'x' || ent[1] == 'X';
      const std::string_view digits = ent.substr(hex ? 2 : 1);
      std::uint32_t cp = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(),
                                       cp, hex ? 16 : 10);
      if (ec != std::errc() || ptr != digits.data() + digits.size() ||
          cp > 0x10FFFF) {
        out.append(text.substr(i, semi - i + 1));
      } else {
        append_utf8(out, cp);
      }
    } else {
      out.append(text.substr(i, semi - i + 1));
    }
    i = semi;
  }
  return out;
}

std::size_t read_dump_rows(std::istream& in, const RowCallback& on_row) {
  Cursor cur(std::string(std::istreambuf_iterator<char>(in), {}));
  std::size_t rows = 0;
  int depth = 0;
  while (true) {
    cur.skip_space();
    if (cur.done()) break;
    if (cur.peek() != '<') cur.fail("unexpected text outside element");
    if (cur.starts_with("<?")) {
      cur.skip_past("?>", "processing instruction");
    } else if (cur.starts_with("<!--")) {
      cur.skip_past("-->", "comment");
    } else if (cur.starts_with("</")) {
      cur.skip(2);
      cur.read_name();
      cur.skip_space();
      if (cur.done() || cur.peek() != '>') cur.fail("malformed closing tag");
      cur.advance();
      if (--depth < 0) cur.fail("unbalanced closing tag");
    } else {
      cur.advance();
      const std::string name = cur.read_name();
      if (name == "row") {
        if (depth != 1) cur.fail("<row> outside of the table element");
        const std::size_t line = cur.line();
        on_row(read_attributes(cur), line);
        ++rows;
      } else if (!name.empty()) {
        if (depth != 0) cur.fail("unexpected element <" + name + ">");
        bool self_closing = false;
        while (!cur.done() && cur.peek() != '>') {
          self_closing = cur.starts_with("/>");
          cur.advance();
        }
        if (cur.done()) cur.fail("unterminated <" + name + ">");
        cur.advance();
        if (!self_closing) ++depth;
      } else {
        cur.fail("malformed tag");
      }
    }
  }
  if (depth != 0) cur.fail("unclosed table element");
  return rows;
}

}  // namespace urcminer
