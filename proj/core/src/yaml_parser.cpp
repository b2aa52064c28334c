#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_set>

#include "ansigen/yaml.hpp"

namespace ansigen::yaml {
namespace {

bool is_blank(char c) { return c == ' ' || c == '\t'; }
bool is_break_or_end(char c) { return c == '\n' || c == '\0'; }
bool is_space_or_end(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\0'; }
bool is_flow_indicator(char c) { return c == ',' || c == '[' || c == ']' || c == '{' || c == '}'; }

std::string normalize_newlines(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') continue;
      out.push_back('\n');
      continue;
    }
    out.push_back(text[i]);
  }
  return out;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

class Parser {
 public:
  Parser(std::string_view src, std::string source_name) : src_(src), source_name_(std::move(source_name)) {}

  Document run() {
    Document doc;
    doc.source_name = source_name_;
    while (true) {
      skip_blank();
      if (eof()) break;
      if (column() == 1 && peek() == '%') throw UnsupportedFeature("directives are not supported", line(), column());
      if (at_marker("...")) {
        advance(3);
        expect_line_end();
        continue;
      }
      if (at_marker("---")) {
        advance(3);
        skip_inline();
        if (peek() == '#') skip_to_eol();
      }
      skip_blank();
      if (eof() || at_marker("---") || at_marker("...")) continue;
      Node root = parse_node(-1, false, -1, here());
      expect_line_end();
      skip_blank();
      if (!eof() && !at_marker("---") && !at_marker("...")) {
        throw SyntaxError("unexpected content after document root", line(), column());
      }
      doc.roots.push_back(std::move(root));
    }
    return doc;
  }

 private:
  struct Saved {
    std::size_t pos;
    int line;
    int col;
  };

  std::string_view src_;
  std::string source_name_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  int depth_ = 0;

  bool eof() const { return pos_ >= src_.size(); }
  char peek(std::size_t k = 0) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }
  int line() const { return line_; }
  int column() const { return col_; }
  Mark here() const { return Mark{line_, col_, pos_}; }
  Saved save() const { return {pos_, line_, col_}; }
  void restore(const Saved& s) {
    pos_ = s.pos;
    line_ = s.line;
    col_ = s.col;
  }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, line_, col_); }

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) p.fail("maximum nesting depth exceeded");
    }
    ~DepthGuard() { --p.depth_; }
  };

  bool at_marker(std::string_view m) const {
    return col_ == 1 && src_.substr(pos_, 3) == m && is_space_or_end(peek(3));
  }

  void skip_inline() {
    while (is_blank(peek())) advance();
  }

  void skip_to_eol() {
    while (!is_break_or_end(peek())) advance();
  }

  // Skips whitespace, comments and line breaks. Rejects tabs in indentation.
  void skip_blank() {
    while (!eof()) {
      if (col_ == 1) {
        std::size_t i = pos_;
        while (i < src_.size() && src_[i] == ' ') ++i;
        if (i < src_.size() && src_[i] == '\t') {
          std::size_t j = i;
          while (j < src_.size() && is_blank(src_[j])) ++j;
          if (j < src_.size() && src_[j] != '\n' && src_[j] != '#') {
            advance(i - pos_);
            fail("tab character used for indentation");
          }
        }
      }
      char c = peek();
      if (is_blank(c)) {
        advance();
      } else if (c == '#') {
        skip_to_eol();
      } else if (c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  // True when only indentation precedes the current position on its line.
  bool at_line_content_start() const {
    std::size_t i = pos_;
    while (i > 0 && src_[i - 1] == ' ') --i;
    return i == 0 || src_[i - 1] == '\n';
  }

  // Nested block nodes stop at the next content line; nothing to check then.
  void expect_line_end() {
    if (pos_ > 0 && at_line_content_start()) return;
    skip_inline();
    if (peek() == '#') {
      if (pos_ > 0 && !is_blank(src_[pos_ - 1]) && src_[pos_ - 1] != '\n') fail("comment must be separated by whitespace");
      skip_to_eol();
    }
    if (!is_break_or_end(peek())) fail("unexpected content at end of line");
  }

  void check_unsupported(char c) const {
    if (c == '&') throw UnsupportedFeature("anchors are not supported", line_, col_);
    if (c == '*') throw UnsupportedFeature("aliases are not supported", line_, col_);
    if (c == '!') throw UnsupportedFeature("tags are not supported", line_, col_);
    if (c == '?' && is_space_or_end(peek(1))) throw UnsupportedFeature("complex mapping keys are not supported", line_, col_);
  }

  bool at_sequence_entry() const { return peek() == '-' && is_space_or_end(peek(1)); }

  // ---- node dispatch -------------------------------------------------------

  // parent_indent: column of the enclosing block collection (-1 at root).
  // allow_compact_seq: a sequence may sit at the parent's column (mapping values).
  // key_line: line of the owning `key:` or -1.
  Node parse_node(int parent_indent, bool allow_compact_seq, int key_line, Mark origin) {
    DepthGuard guard(*this);
    skip_blank();
    if (eof() || at_marker("---") || at_marker("...")) return Node::null(Span{origin, origin});
    const int c = col_;
    const bool same_line = line_ == key_line;
    if (c <= parent_indent) {
      if (allow_compact_seq && c == parent_indent && at_sequence_entry()) return parse_block_sequence(c);
      return Node::null(Span{origin, origin});
    }
    const char ch = peek();
    if (at_sequence_entry()) {
      if (same_line) fail("block sequence entries are not allowed here");
      return parse_block_sequence(c);
    }
    check_unsupported(ch);
    if (ch == '[' || ch == '{') {
      Node n = parse_flow_node();
      skip_inline();
      if (peek() == ':') throw UnsupportedFeature("flow collections as mapping keys are not supported", line_, col_);
      return n;
    }
    if (ch == '|' || ch == '>') return parse_block_scalar(parent_indent);
    if (looks_like_mapping_key()) {
      if (same_line) fail("mapping values are not allowed here");
      return parse_block_mapping(c);
    }
    if (ch == '"') return parse_double_quoted();
    if (ch == '\'') return parse_single_quoted();
    return parse_plain(parent_indent, false);
  }

  bool looks_like_mapping_key() {
    Saved s = save();
    bool is_key = false;
    try {
      char ch = peek();
      if (ch == '"') {
        parse_double_quoted();
      } else if (ch == '\'') {
        parse_single_quoted();
      } else {
        scan_plain_line(false);
      }
      if (line_ == s.line) {
        skip_inline();
        is_key = peek() == ':' && is_space_or_end(peek(1));
      }
    } catch (const YamlError&) {
      is_key = false;
    }
    restore(s);
    return is_key;
  }

  // ---- block collections ---------------------------------------------------

  Node parse_block_mapping(int c) {
    std::vector<Entry> entries;
    std::unordered_set<std::string> seen;
    const Mark start = here();
    Mark end = start;
    while (true) {
      const Mark key_start = here();
      check_unsupported(peek());
      if (peek() == '[' || peek() == '{') throw UnsupportedFeature("flow collections as mapping keys are not supported", line_, col_);
      Node key;
      if (peek() == '"') {
        key = parse_double_quoted();
      } else if (peek() == '\'') {
        key = parse_single_quoted();
      } else {
        key = parse_plain_key(false);
      }
      if (key.span().start.line != key.span().end.line) fail("multi-line mapping keys are not supported");
      if (key.quoting() == Quoting::plain && key.text() == "<<") {
        throw UnsupportedFeature("merge keys are not supported", key_start.line, key_start.column);
      }
      skip_inline();
      if (peek() != ':') fail("expected ':' after mapping key");
      advance();
      const int key_line = line_;
      Node value = parse_node(c, true, key_line, here());
      std::string id = key_identity(key);
      if (!seen.insert(id).second) {
        throw DuplicateKey("duplicate mapping key '" + key.text() + "'", key_start.line, key_start.column);
      }
      end = value.span().end.offset >= key.span().end.offset ? value.span().end : key.span().end;
      entries.push_back(Entry{std::move(key), std::move(value)});
      expect_line_end();
      skip_blank();
      if (eof() || at_marker("---") || at_marker("...")) break;
      if (col_ == c) {
        if (at_sequence_entry()) break;
        continue;
      }
      if (col_ < c) break;
      fail("bad indentation of a mapping entry");
    }
    return Node::mapping(std::move(entries), Span{start, end});
  }

  Node parse_block_sequence(int c) {
    std::vector<Node> items;
    const Mark start = here();
    Mark end = start;
    while (true) {
      advance();  // '-'
      const Mark after_dash = here();
      Node item = parse_node(c, false, -1, after_dash);
      end = item.span().end.offset > after_dash.offset ? item.span().end : after_dash;
      items.push_back(std::move(item));
      expect_line_end();
      skip_blank();
      if (eof() || at_marker("---") || at_marker("...")) break;
      if (col_ == c && at_sequence_entry()) continue;
      if (col_ <= c) break;
      fail("bad indentation of a sequence entry");
    }
    return Node::sequence(std::move(items), Span{start, end});
  }

  // ---- scalars -------------------------------------------------------------

  // Scans one line of a plain scalar starting at the current position and
  // returns its trimmed text. Stops before ": ", " #", and in flow context
  // before flow indicators.
  std::string scan_plain_line(bool flow) {
    const char first = peek();
    if (first == '\0' || first == '\n') fail("expected a scalar");
    if (first == '#' || first == ',' || first == '[' || first == ']' || first == '{' || first == '}' || first == '|' ||
        first == '>' || first == '\'' || first == '"' || first == '%' || first == '@' || first == '`') {
      fail(std::string("plain scalar cannot start with '") + first + "'");
    }
    check_unsupported(first);
    if ((first == '-' || first == '?' || first == ':') &&
        (is_space_or_end(peek(1)) || (flow && is_flow_indicator(peek(1))))) {
      fail(std::string("plain scalar cannot start with '") + first + " '");
    }
    std::string out;
    std::size_t trailing_ws = 0;
    while (true) {
      const char ch = peek();
      if (is_break_or_end(ch)) break;
      if (ch == ':' && (is_space_or_end(peek(1)) || (flow && is_flow_indicator(peek(1))))) break;
      if (ch == '#' && !out.empty() && trailing_ws > 0) break;
      if (flow && is_flow_indicator(ch)) break;
      if (is_blank(ch)) {
        ++trailing_ws;
      } else {
        trailing_ws = 0;
      }
      out.push_back(ch);
      advance();
    }
    // back off over trailing blanks so spans end at the last content byte
    while (trailing_ws > 0) {
      out.pop_back();
      --pos_;
      --col_;
      --trailing_ws;
    }
    return out;
  }

  Node parse_plain_key(bool flow) {
    const Mark start = here();
    std::string text = scan_plain_line(flow);
    return Node::scalar(std::move(text), Quoting::plain, Span{start, here()});
  }

  Node parse_plain(int parent_indent, bool flow) {
    const Mark start = here();
    std::string text = scan_plain_line(flow);
    Mark end = here();
    if (!flow) {
      while (true) {
        Saved s = save();
        skip_inline();
        if (peek() == '#' || peek() != '\n') {
          restore(s);
          break;
        }
        int empties = 0;
        advance();
        bool found = false;
        while (!eof()) {
          std::size_t i = pos_;
          while (i < src_.size() && src_[i] == ' ') ++i;
          std::size_t j = i;
          while (j < src_.size() && is_blank(src_[j])) ++j;
          if (j >= src_.size() || src_[j] == '\n') {
            ++empties;
            advance(j - pos_ + (j < src_.size() ? 1 : 0));
            continue;
          }
          const int indent_col = static_cast<int>(i - pos_) + 1;
          const char c0 = src_[j];
          const bool marker = (i == pos_) && (src_.substr(i, 3) == "---" || src_.substr(i, 3) == "...") &&
                              (i + 3 >= src_.size() || is_space_or_end(src_[i + 3]));
          if (indent_col > parent_indent && c0 != '#' && !marker) {
            advance(j - pos_);
            found = true;
          }
          break;
        }
        if (!found) {
          restore(s);
          break;
        }
        const Mark line_start = here();
        std::string more;
        // continuation lines may start with indicators such as '-'
        std::size_t trailing_ws = 0;
        while (true) {
          const char ch = peek();
          if (is_break_or_end(ch)) break;
          if (ch == ':' && is_space_or_end(peek(1))) fail("mapping values are not allowed in a multi-line plain scalar");
          if (ch == '#' && trailing_ws > 0) break;
          trailing_ws = is_blank(ch) ? trailing_ws + 1 : 0;
          more.push_back(ch);
          advance();
        }
        while (trailing_ws > 0) {
          more.pop_back();
          --pos_;
          --col_;
          --trailing_ws;
        }
        (void)line_start;
        if (empties == 0) {
          text += ' ';
        } else {
          text.append(static_cast<std::size_t>(empties), '\n');
        }
        text += more;
        end = here();
        if (peek() != '\n' && !eof()) {
          // stopped at a comment: no further continuation allowed
          break;
        }
      }
    }
    return Node::scalar(std::move(text), Quoting::plain, Span{start, end});
  }

  // Folds a line break inside a quoted scalar. Called with pos_ at '\n'.
  void fold_quoted_break(std::string& out) {
    while (!out.empty() && is_blank(out.back())) out.pop_back();
    int empties = 0;
    advance();  // '\n'
    while (true) {
      skip_inline();
      if (peek() == '\n') {
        ++empties;
        advance();
        continue;
      }
      break;
    }
    if (eof()) fail("unterminated quoted scalar");
    if (col_ == 1 && (at_marker("---") || at_marker("..."))) fail("document marker inside quoted scalar");
    if (empties == 0) {
      out.push_back(' ');
    } else {
      out.append(static_cast<std::size_t>(empties), '\n');
    }
  }

  Node parse_single_quoted() {
    const Mark start = here();
    advance();  // '
    std::string out;
    while (true) {
      if (eof()) fail("unterminated single-quoted scalar");
      const char ch = peek();
      if (ch == '\'') {
        if (peek(1) == '\'') {
          out.push_back('\'');
          advance(2);
          continue;
        }
        advance();
        break;
      }
      if (ch == '\n') {
        fold_quoted_break(out);
        continue;
      }
      out.push_back(ch);
      advance();
    }
    return Node::scalar(std::move(out), Quoting::single_quoted, Span{start, here()});
  }

  std::uint32_t read_hex(int digits) {
    std::uint32_t v = 0;
    for (int i = 0; i < digits; ++i) {
      const char h = peek();
      v <<= 4;
      if (h >= '0' && h <= '9') {
        v |= static_cast<std::uint32_t>(h - '0');
      } else if (h >= 'a' && h <= 'f') {
        v |= static_cast<std::uint32_t>(h - 'a' + 10);
      } else if (h >= 'A' && h <= 'F') {
        v |= static_cast<std::uint32_t>(h - 'A' + 10);
      } else {
        fail("invalid hexadecimal escape");
      }
      advance();
    }
    return v;
  }

  Node parse_double_quoted() {
    const Mark start = here();
    advance();  // "
    std::string out;
    while (true) {
      if (eof()) fail("unterminated double-quoted scalar");
      const char ch = peek();
      if (ch == '"') {
        advance();
        break;
      }
      if (ch == '\n') {
        fold_quoted_break(out);
        continue;
      }
      if (ch != '\\') {
        out.push_back(ch);
        advance();
        continue;
      }
      advance();
      const char e = peek();
      if (e == '\n') {
        advance();
        skip_inline();
        continue;
      }
      advance();
      switch (e) {
        case '0': out.push_back('\0'); break;
        case 'a': out.push_back('\a'); break;
        case 'b': out.push_back('\b'); break;
        case 't':
        case '\t': out.push_back('\t'); break;
        case 'n': out.push_back('\n'); break;
        case 'v': out.push_back('\v'); break;
        case 'f': out.push_back('\f'); break;
        case 'r': out.push_back('\r'); break;
        case 'e': out.push_back('\x1b'); break;
        case ' ': out.push_back(' '); break;
        case '"': out.push_back('"'); break;
        case '/': out.push_back('/'); break;
        case '\\': out.push_back('\\'); break;
        case 'N': append_utf8(out, 0x85); break;
        case '_': append_utf8(out, 0xA0); break;
        case 'L': append_utf8(out, 0x2028); break;
        case 'P': append_utf8(out, 0x2029); break;
        case 'x': append_utf8(out, read_hex(2)); break;
        case 'u': append_utf8(out, read_hex(4)); break;
        case 'U': append_utf8(out, read_hex(8)); break;
        default: fail(std::string("unknown escape sequence '\\") + e + "'");
      }
    }
    return Node::scalar(std::move(out), Quoting::double_quoted, Span{start, here()});
  }

  Node parse_block_scalar(int parent_indent) {
    const Mark start = here();
    const bool literal = peek() == '|';
    advance();
    char chomp = 'c';
    int explicit_indent = 0;
    for (int k = 0; k < 2; ++k) {
      const char ch = peek();
      if ((ch == '-' || ch == '+') && chomp == 'c') {
        chomp = ch == '-' ? 's' : 'k';
        advance();
      } else if (ch >= '1' && ch <= '9' && explicit_indent == 0) {
        explicit_indent = ch - '0';
        advance();
      }
    }
    if (!is_space_or_end(peek()) && peek() != '#') fail("invalid block scalar header");
    Mark end = here();
    expect_line_end();

    const int parent_spaces = parent_indent - 1;  // -2 at the root
    int content_indent = -1;
    if (explicit_indent > 0) content_indent = std::max(parent_spaces, 0) + explicit_indent;

    std::vector<std::string> lines;  // content lines, "" for empty
    std::size_t scan = pos_;
    int scan_line = line_;
    std::size_t last_content_end = pos_;
    int last_content_line = line_;
    int last_content_col = col_;
    int max_leading_blank = 0;
    bool any_content = false;
    if (scan < src_.size()) {
      ++scan;  // consume the header's newline
      ++scan_line;
    } else {
      scan = src_.size();
    }
    while (scan < src_.size()) {
      std::size_t eol = src_.find('\n', scan);
      if (eol == std::string_view::npos) eol = src_.size();
      std::string_view raw = src_.substr(scan, eol - scan);
      std::size_t spaces = 0;
      while (spaces < raw.size() && raw[spaces] == ' ') ++spaces;
      const bool blank_line = std::all_of(raw.begin(), raw.end(), [](char c) { return c == ' ' || c == '\t'; });
      const bool marker = spaces == 0 && raw.size() >= 3 && (raw.substr(0, 3) == "---" || raw.substr(0, 3) == "...") &&
                          (raw.size() == 3 || is_blank(raw[3]));
      if (marker) break;
      if (content_indent < 0) {
        if (blank_line) {
          max_leading_blank = std::max(max_leading_blank, static_cast<int>(spaces));
          lines.emplace_back();
        } else {
          if (static_cast<int>(spaces) <= parent_spaces) break;
          if (static_cast<int>(spaces) < max_leading_blank) {
            throw SyntaxError("leading empty lines are more indented than block scalar content", scan_line, 1);
          }
          content_indent = static_cast<int>(spaces);
          if (raw[spaces] == '\t') throw SyntaxError("tab character used for indentation", scan_line, static_cast<int>(spaces) + 1);
          lines.emplace_back(raw.substr(spaces));
          any_content = true;
          last_content_end = eol;
          last_content_line = scan_line;
          last_content_col = static_cast<int>(raw.size()) + 1;
        }
      } else if (static_cast<int>(spaces) >= content_indent) {
        lines.emplace_back(raw.substr(static_cast<std::size_t>(content_indent)));
        if (!blank_line) {
          any_content = true;
          last_content_end = eol;
          last_content_line = scan_line;
          last_content_col = static_cast<int>(raw.size()) + 1;
        } else if (raw.size() <= static_cast<std::size_t>(content_indent)) {
          lines.back().clear();
        }
      } else if (blank_line) {
        lines.emplace_back();
      } else {
        break;
      }
      if (eol >= src_.size()) {
        scan = src_.size();
        break;
      }
      scan = eol + 1;
      ++scan_line;
    }
    // drop trailing empty lines into a separate count
    std::size_t content_count = lines.size();
    while (content_count > 0 && lines[content_count - 1].empty()) --content_count;
    if (content_count > 0 && !any_content) content_count = 0;
    const std::size_t trailing_empty = lines.size() - content_count;

    std::string body;
    if (literal) {
      for (std::size_t i = 0; i < content_count; ++i) {
        if (i > 0) body.push_back('\n');
        body += lines[i];
      }
    } else {
      bool have_prev = false;
      bool prev_normal = false;
      int empties = 0;
      for (std::size_t i = 0; i < content_count; ++i) {
        const std::string& ln = lines[i];
        if (ln.empty()) {
          ++empties;
          continue;
        }
        const bool more = ln[0] == ' ' || ln[0] == '\t';
        if (have_prev) {
          if (prev_normal && !more) {
            if (empties == 0) {
              body.push_back(' ');
            } else {
              body.append(static_cast<std::size_t>(empties), '\n');
            }
          } else {
            body.append(static_cast<std::size_t>(empties + 1), '\n');
          }
        } else {
          body.append(static_cast<std::size_t>(empties), '\n');
        }
        empties = 0;
        body += ln;
        have_prev = true;
        prev_normal = !more;
      }
    }
    if (content_count > 0) {
      if (chomp == 'c') {
        body.push_back('\n');
      } else if (chomp == 'k') {
        body.push_back('\n');
        body.append(trailing_empty, '\n');
      }
    } else if (chomp == 'k') {
      body.append(trailing_empty, '\n');
    }

    if (any_content) {
      // move to the end of the last content line
      pos_ = last_content_end;
      line_ = last_content_line;
      col_ = last_content_col;
      end = here();
    }
    return Node::scalar(std::move(body), literal ? Quoting::literal : Quoting::folded, Span{start, end});
  }

  // ---- flow collections ----------------------------------------------------

  void skip_flow_space() {
    while (!eof()) {
      const char c = peek();
      if (is_blank(c) || c == '\n') {
        advance();
      } else if (c == '#') {
        if (pos_ > 0 && !is_blank(src_[pos_ - 1]) && src_[pos_ - 1] != '\n') fail("comment must be separated by whitespace");
        skip_to_eol();
      } else {
        break;
      }
    }
    if (col_ == 1 && (at_marker("---") || at_marker("..."))) fail("document marker inside flow collection");
  }

  Node parse_flow_scalar() {
    const char ch = peek();
    check_unsupported(ch);
    if (ch == '"') return parse_double_quoted();
    if (ch == '\'') return parse_single_quoted();
    return parse_plain(-1, true);
  }

  Node parse_flow_node() {
    DepthGuard guard(*this);
    skip_flow_space();
    const char ch = peek();
    if (ch == '[') return parse_flow_sequence();
    if (ch == '{') return parse_flow_mapping();
    if (eof()) fail("unexpected end of input in flow collection");
    return parse_flow_scalar();
  }

  Node parse_flow_sequence() {
    const Mark start = here();
    advance();  // [
    std::vector<Node> items;
    while (true) {
      skip_flow_space();
      if (eof()) fail("unterminated flow sequence");
      if (peek() == ']') {
        advance();
        break;
      }
      Node item = parse_flow_node();
      skip_flow_space();
      if (peek() == ':') throw UnsupportedFeature("single-pair mappings inside flow sequences are not supported", line_, col_);
      items.push_back(std::move(item));
      if (peek() == ',') {
        advance();
        continue;
      }
      if (peek() == ']') {
        advance();
        break;
      }
      fail("expected ',' or ']' in flow sequence");
    }
    return Node::sequence(std::move(items), Span{start, here()});
  }

  Node parse_flow_mapping() {
    const Mark start = here();
    advance();  // {
    std::vector<Entry> entries;
    std::unordered_set<std::string> seen;
    while (true) {
      skip_flow_space();
      if (eof()) fail("unterminated flow mapping");
      if (peek() == '}') {
        advance();
        break;
      }
      if (peek() == '[' || peek() == '{') throw UnsupportedFeature("flow collections as mapping keys are not supported", line_, col_);
      const Mark key_start = here();
      Node key = parse_flow_scalar();
      skip_flow_space();
      Node value = Node::null(Span{here(), here()});
      if (peek() == ':') {
        advance();
        const Mark after = here();
        skip_flow_space();
        if (peek() == ',' || peek() == '}') {
          value = Node::null(Span{after, after});
        } else {
          value = parse_flow_node();
        }
        skip_flow_space();
      }
      if (!seen.insert(key_identity(key)).second) {
        throw DuplicateKey("duplicate mapping key '" + key.text() + "'", key_start.line, key_start.column);
      }
      entries.push_back(Entry{std::move(key), std::move(value)});
      if (peek() == ',') {
        advance();
        continue;
      }
      if (peek() == '}') {
        advance();
        break;
      }
      fail("expected ',' or '}' in flow mapping");
    }
    return Node::mapping(std::move(entries), Span{start, here()});
  }
};

}  // namespace

Document parse_stream(std::string_view text, std::string source_name) {
  const std::string normalized = normalize_newlines(text);
  Parser parser(normalized, std::move(source_name));
  return parser.run();
}

}  // namespace ansigen::yaml
