#include "ansigen/yaml.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace ansigen::yaml {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

// [-+]?(0|[1-9][0-9]*)
bool parse_decimal_integer(std::string_view s, std::string& normalized) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) return false;
  if (s.size() > 1 && s.front() == '0') return false;
  normalized = (negative && s != "0") ? "-" + std::string(s) : std::string(s);
  return true;
}

// PyYAML's float pattern without underscores:
//   [-+]?[0-9]+\.[0-9]*([eE][-+][0-9]+)?
//   [-+]?\.[0-9]+([eE][-+][0-9]+)?
//   [-+]?\.(inf|Inf|INF)  \.(nan|NaN|NAN)
bool parse_float(std::string_view s, double& out) {
  if (s == ".nan" || s == ".NaN" || s == ".NAN") {
    out = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  std::string_view body = s;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  if (body == ".inf" || body == ".Inf" || body == ".INF") {
    out = negative ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    return true;
  }
  std::size_t i = 0;
  std::size_t int_digits = 0;
  while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) ++i, ++int_digits;
  if (i >= body.size() || body[i] != '.') return false;
  ++i;
  std::size_t frac_digits = 0;
  while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) ++i, ++frac_digits;
  if (int_digits == 0 && frac_digits == 0) return false;
  if (i < body.size()) {
    if (body[i] != 'e' && body[i] != 'E') return false;
    ++i;
    if (i >= body.size() || (body[i] != '-' && body[i] != '+')) return false;
    ++i;
    if (!all_digits(body.substr(i))) return false;
  }
  out = std::strtod(std::string(s).c_str(), nullptr);
  return true;
}

}  // namespace

ScalarValue resolve_scalar(std::string_view text, Quoting quoting) {
  ScalarValue v;
  if (quoting != Quoting::plain) {
    v.kind = ScalarKind::text;
    return v;
  }
  if (text.empty() || text == "~" || text == "null" || text == "Null" || text == "NULL") {
    v.kind = ScalarKind::null;
    return v;
  }
  const std::string low = lower(text);
  if (low == "true" || low == "yes" || low == "on") {
    v.kind = ScalarKind::boolean;
    v.boolean = true;
    return v;
  }
  if (low == "false" || low == "no" || low == "off") {
    v.kind = ScalarKind::boolean;
    v.boolean = false;
    return v;
  }
  if (parse_decimal_integer(text, v.integer)) {
    v.kind = ScalarKind::integer;
    return v;
  }
  if (parse_float(text, v.floating)) {
    v.kind = ScalarKind::floating;
    return v;
  }
  v.kind = ScalarKind::text;
  return v;
}

Node::Node() { value_.kind = ScalarKind::null; }

Node Node::null(Span span) {
  Node n;
  n.span_ = span;
  return n;
}

Node Node::scalar(std::string text, Quoting quoting, Span span) {
  Node n;
  n.kind_ = NodeKind::scalar;
  n.value_ = resolve_scalar(text, quoting);
  n.text_ = std::move(text);
  n.quoting_ = quoting;
  n.span_ = span;
  return n;
}

Node Node::sequence(std::vector<Node> items, Span span) {
  Node n;
  n.kind_ = NodeKind::sequence;
  n.items_ = std::move(items);
  n.span_ = span;
  return n;
}

Node Node::mapping(std::vector<Entry> entries, Span span) {
  Node n;
  n.kind_ = NodeKind::mapping;
  n.entries_ = std::move(entries);
  n.span_ = span;
  return n;
}

const Node* Node::find(std::string_view key) const {
  if (kind_ != NodeKind::mapping) return nullptr;
  for (const auto& e : entries_) {
    if (e.key.is_scalar() && e.key.scalar_kind() == ScalarKind::text && e.key.text() == key) return &e.value;
  }
  return nullptr;
}

namespace {

bool scalar_equal(const Node& a, const Node& b) {
  const auto& va = a.value();
  const auto& vb = b.value();
  if (va.kind != vb.kind) return false;
  switch (va.kind) {
    case ScalarKind::null:
      return true;
    case ScalarKind::boolean:
      return va.boolean == vb.boolean;
    case ScalarKind::integer:
      return va.integer == vb.integer;
    case ScalarKind::floating:
      return va.floating == vb.floating || (std::isnan(va.floating) && std::isnan(vb.floating));
    case ScalarKind::text:
      return a.text() == b.text();
  }
  return false;
}

bool equal_impl(const Node& a, const Node& b, bool ordered) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NodeKind::scalar:
      return scalar_equal(a, b);
    case NodeKind::sequence:
      return std::equal(a.items().begin(), a.items().end(), b.items().begin(), b.items().end(),
                        [ordered](const Node& x, const Node& y) { return equal_impl(x, y, ordered); });
    case NodeKind::mapping: {
      const auto& ea = a.entries();
      const auto& eb = b.entries();
      if (ea.size() != eb.size()) return false;
      if (ordered) {
        for (std::size_t i = 0; i < ea.size(); ++i) {
          if (!scalar_equal(ea[i].key, eb[i].key) || !equal_impl(ea[i].value, eb[i].value, ordered)) return false;
        }
        return true;
      }
      for (const auto& x : ea) {
        auto it = std::find_if(eb.begin(), eb.end(), [&](const Entry& y) { return scalar_equal(x.key, y.key); });
        if (it == eb.end() || !equal_impl(x.value, it->value, ordered)) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

bool operator==(const Node& lhs, const Node& rhs) { return equal_impl(lhs, rhs, true); }

bool equal_unordered(const Node& lhs, const Node& rhs) { return equal_impl(lhs, rhs, false); }

std::string key_identity(const Node& scalar) {
  const auto& v = scalar.value();
  switch (v.kind) {
    case ScalarKind::null:
      return "n:";
    case ScalarKind::boolean:
      return v.boolean ? "b:true" : "b:false";
    case ScalarKind::integer:
      return "i:" + v.integer;
    case ScalarKind::floating:
      return "f:" + scalar.text();
    case ScalarKind::text:
      return "t:" + scalar.text();
  }
  return {};
}

std::string key_text(const Node& key) {
  if (key.is_scalar() && key.scalar_kind() == ScalarKind::text) return key.text();
  return key_identity(key);
}

YamlError::YamlError(const std::string& what, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column),
      message_(what) {}

}  // namespace ansigen::yaml
