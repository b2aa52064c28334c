#include <algorithm>
#include <cstdio>

#include "ansigen/yaml.hpp"

namespace ansigen::yaml {
namespace {

bool is_indicator_start(char c) {
  switch (c) {
    case '#': case ',': case '[': case ']': case '{': case '}': case '&': case '*': case '!':
    case '|': case '>': case '\'': case '"': case '%': case '@': case '`':
      return true;
    default:
      return false;
  }
}

bool has_control(std::string_view s, bool allow_newline, bool allow_tab) {
  for (unsigned char c : s) {
    if (c == '\n' && allow_newline) continue;
    if (c == '\t' && allow_tab) continue;
    if (c < 0x20 || c == 0x7F) return true;
  }
  return false;
}

// True when `s` reads back as the same characters in plain block style.
bool plain_safe(std::string_view s) {
  if (s.empty()) return false;
  if (s.front() == ' ' || s.back() == ' ' || s.front() == '\t' || s.back() == '\t') return false;
  if (has_control(s, false, false)) return false;
  const char first = s.front();
  if (is_indicator_start(first)) return false;
  if ((first == '-' || first == '?' || first == ':') && (s.size() == 1 || s[1] == ' ' || s[1] == '\t')) return false;
  if (s.substr(0, 3) == "---" || s.substr(0, 3) == "...") return false;
  if (s.back() == ':') return false;
  if (s.find(": ") != std::string_view::npos || s.find(":\t") != std::string_view::npos) return false;
  if (s.find(" #") != std::string_view::npos || s.find("\t#") != std::string_view::npos) return false;
  return true;
}

bool single_quote_safe(std::string_view s) {
  // leading/trailing spaces survive single quotes only on one line
  return !has_control(s, false, false);
}

std::string single_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "''";
    else out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

std::string double_quote(std::string_view s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\0': out += "\\0"; break;
      default:
        if (c < 0x20 || c == 0x7F) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\x%02X", c);
          out += buf;
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  out.push_back('"');
  return out;
}

std::string quote_text(std::string_view s) {
  if (plain_safe(s) && resolve_scalar(s, Quoting::plain).kind == ScalarKind::text) return std::string(s);
  if (single_quote_safe(s)) return single_quote(s);
  return double_quote(s);
}

// Literal block style is used for text with line breaks when every line
// reads back unchanged under auto-detected indentation.
bool literal_safe(std::string_view s) {
  if (s.find('\n') == std::string_view::npos) return false;
  if (has_control(s, true, true)) return false;
  std::size_t end = s.size();
  while (end > 0 && s[end - 1] == '\n') --end;
  std::string_view body = s.substr(0, end);
  if (body.empty()) return false;
  bool first_content_seen = false;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t nl = body.find('\n', start);
    if (nl == std::string_view::npos) nl = body.size();
    std::string_view line = body.substr(start, nl - start);
    const bool whitespace_only =
        std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t'; });
    if (!line.empty() && whitespace_only) return false;
    if (!line.empty() && !first_content_seen) {
      if (line.front() == ' ' || line.front() == '\t') return false;
      first_content_seen = true;
    }
    start = nl + 1;
  }
  return first_content_seen;
}

std::string literal_block(std::string_view s, int indent) {
  std::size_t end = s.size();
  while (end > 0 && s[end - 1] == '\n') --end;
  const std::size_t trailing = s.size() - end;
  std::string out = trailing == 0 ? "|-" : trailing == 1 ? "|" : "|+";
  out.push_back('\n');
  std::string_view body = s.substr(0, end);
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t nl = body.find('\n', start);
    if (nl == std::string_view::npos) nl = body.size();
    std::string_view line = body.substr(start, nl - start);
    if (!line.empty()) out.append(static_cast<std::size_t>(indent), ' ').append(line);
    out.push_back('\n');
    start = nl + 1;
  }
  for (std::size_t i = 1; i < trailing; ++i) out.push_back('\n');
  return out;
}

std::string scalar_inline(const Node& n) {
  const auto& v = n.value();
  switch (v.kind) {
    case ScalarKind::null:
      return "null";
    case ScalarKind::boolean:
      return v.boolean ? "true" : "false";
    case ScalarKind::integer:
      return v.integer;
    case ScalarKind::floating:
      return n.text();
    case ScalarKind::text:
      return quote_text(n.text());
  }
  return {};
}

bool is_multiline_text(const Node& n) {
  return n.is_scalar() && n.scalar_kind() == ScalarKind::text && literal_safe(n.text());
}

void emit_block(const Node& node, int indent, std::string& out);

// Emits what follows `key:` or `-` on the same line, including the newline
// and any nested block lines. `child_indent` is the nested block's indent.
void emit_after_indicator(const Node& value, int child_indent, bool compact, std::string& out) {
  if (value.is_scalar()) {
    if (value.is_null()) {
      out.push_back('\n');
    } else if (is_multiline_text(value)) {
      out.push_back(' ');
      out += literal_block(value.text(), child_indent);
    } else {
      out.push_back(' ');
      out += scalar_inline(value);
      out.push_back('\n');
    }
    return;
  }
  if (value.is_sequence() && value.items().empty()) {
    out += " []\n";
    return;
  }
  if (value.is_mapping() && value.entries().empty()) {
    out += " {}\n";
    return;
  }
  if (compact) {
    std::string nested;
    emit_block(value, child_indent, nested);
    out.push_back(' ');
    out.append(nested, static_cast<std::size_t>(child_indent), std::string::npos);
    return;
  }
  out.push_back('\n');
  emit_block(value, child_indent, out);
}

void emit_block(const Node& node, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (node.is_mapping() && !node.entries().empty()) {
    for (const auto& e : node.entries()) {
      out += pad;
      out += e.key.is_null() ? std::string("null") : serialize_inline_scalar(e.key);
      out.push_back(':');
      emit_after_indicator(e.value, indent + 2, false, out);
    }
    return;
  }
  if (node.is_sequence() && !node.items().empty()) {
    for (const auto& item : node.items()) {
      out += pad;
      out.push_back('-');
      emit_after_indicator(item, indent + 2, true, out);
    }
    return;
  }
  out += pad;
  if (node.is_sequence()) {
    out += "[]\n";
  } else if (node.is_mapping()) {
    out += "{}\n";
  } else if (is_multiline_text(node)) {
    out += literal_block(node.text(), indent + 2);
  } else {
    out += scalar_inline(node);
    out.push_back('\n');
  }
}

}  // namespace

std::string serialize_inline_scalar(const Node& scalar) {
  if (!scalar.is_scalar()) return {};
  if (scalar.scalar_kind() == ScalarKind::text) {
    const std::string& s = scalar.text();
    if (plain_safe(s) && resolve_scalar(s, Quoting::plain).kind == ScalarKind::text) return s;
    if (!has_control(s, false, false)) return single_quote(s);
    return double_quote(s);
  }
  return scalar_inline(scalar);
}

std::string quote_text_inline(std::string_view text) {
  return serialize_inline_scalar(Node::scalar(std::string(text), Quoting::double_quoted));
}

std::string serialize_block(const Node& node, int indent) {
  std::string out;
  emit_block(node, indent, out);
  return out;
}

std::string serialize_canonical(const Document& doc) {
  if (doc.roots.empty()) return "---\n";
  std::string out;
  for (const auto& root : doc.roots) {
    out += "---\n";
    emit_block(root, 0, out);
  }
  return out;
}

}  // namespace ansigen::yaml
