#pragma once

// Ordered YAML value model, a parser for the subset of YAML that Ansible
// content uses, and the canonical serializer used for Exact Match and
// deduplication.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ansigen::yaml {

/// 1-based line/column (columns count bytes) plus a 0-based byte offset.
struct Mark {
  int line = 1;
  int column = 1;
  std::size_t offset = 0;
};

/// Half-open source range: `end` points one past the last byte of the node.
struct Span {
  Mark start;
  Mark end;
};

enum class NodeKind { scalar, sequence, mapping };
enum class ScalarKind { null, boolean, integer, floating, text };
enum class Quoting { plain, single_quoted, double_quoted, literal, folded };

struct ScalarValue {
  ScalarKind kind = ScalarKind::null;
  bool boolean = false;
  std::string integer;  // normalized base-10 digits with optional leading '-'
  double floating = 0.0;
};

/// Resolves a scalar token following YAML 1.1 rules as Ansible applies them.
/// Quoted and block scalars always resolve to text.
ScalarValue resolve_scalar(std::string_view text, Quoting quoting);

struct Entry;

class Node {
 public:
  Node();

  static Node null(Span span = {});
  static Node scalar(std::string text, Quoting quoting = Quoting::plain, Span span = {});
  static Node sequence(std::vector<Node> items, Span span = {});
  static Node mapping(std::vector<Entry> entries, Span span = {});

  NodeKind kind() const { return kind_; }
  bool is_scalar() const { return kind_ == NodeKind::scalar; }
  bool is_sequence() const { return kind_ == NodeKind::sequence; }
  bool is_mapping() const { return kind_ == NodeKind::mapping; }
  bool is_null() const { return is_scalar() && value_.kind == ScalarKind::null; }

  /// Decoded scalar content (escapes processed, folding applied).
  const std::string& text() const { return text_; }
  Quoting quoting() const { return quoting_; }
  const ScalarValue& value() const { return value_; }
  ScalarKind scalar_kind() const { return value_.kind; }

  const std::vector<Node>& items() const { return items_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Node>& items() { return items_; }
  std::vector<Entry>& entries() { return entries_; }

  /// Looks up a mapping value by text key; nullptr when absent or not a mapping.
  const Node* find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key) != nullptr; }

  const Span& span() const { return span_; }
  void set_span(const Span& span) { span_ = span; }

 private:
  NodeKind kind_ = NodeKind::scalar;
  std::string text_;
  Quoting quoting_ = Quoting::plain;
  ScalarValue value_;
  std::vector<Node> items_;
  std::vector<Entry> entries_;
  Span span_;
};

struct Entry {
  Node key;
  Node value;
};

/// Structural equality: ignores spans and quoting style, compares resolved
/// scalar values, and is sensitive to mapping key order.
bool operator==(const Node& lhs, const Node& rhs);
inline bool operator!=(const Node& lhs, const Node& rhs) { return !(lhs == rhs); }

/// Same as operator== but mappings compare as unordered key sets.
bool equal_unordered(const Node& lhs, const Node& rhs);

/// Identity string for a scalar used as a mapping key ("t:name", "i:3", ...).
std::string key_identity(const Node& scalar);

/// Text of a scalar key, or its identity for non-text keys.
std::string key_text(const Node& key);

struct Document {
  std::vector<Node> roots;
  std::string source_name;
};

class YamlError : public std::runtime_error {
 public:
  YamlError(const std::string& what, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

class SyntaxError : public YamlError {
 public:
  using YamlError::YamlError;
};

class UnsupportedFeature : public YamlError {
 public:
  using YamlError::YamlError;
};

class DuplicateKey : public YamlError {
 public:
  using YamlError::YamlError;
};

inline constexpr int kMaxDepth = 128;

/// Parses a stream of documents. CRLF line endings are normalized to LF
/// before parsing; spans refer to the normalized text.
Document parse_stream(std::string_view text, std::string source_name = "<string>");

/// Canonical text: `---` per document, 2-space indentation, sequences nested
/// under keys indented by two, minimal quoting, single trailing newline.
std::string serialize_canonical(const Document& doc);

/// Block rendering of one node whose first line starts at `indent` spaces.
/// Scalars and empty collections render as a single line.
std::string serialize_block(const Node& node, int indent);

/// Single-line rendering of a scalar, quoted only when plain style would
/// change its resolved value or break the line.
std::string serialize_inline_scalar(const Node& scalar);

/// Convenience: text scalar rendered on one line (for `- name: <text>`).
std::string quote_text_inline(std::string_view text);

}  // namespace ansigen::yaml
