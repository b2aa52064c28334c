#pragma once

// Structural schema for Ansible tasks and playbooks (Schema Correct).

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ansigen/ansible.hpp"
#include "ansigen/yaml.hpp"

namespace ansigen {

using PathElement = std::variant<std::size_t, std::string>;
using NodePath = std::vector<PathElement>;

/// Renders a path as `[0, tasks, 2, when]`.
std::string format_path(const NodePath& path);

namespace rules {
inline constexpr std::string_view kEmptyDocument = "EmptyDocument";
inline constexpr std::string_view kRootNotSequence = "RootNotSequence";
inline constexpr std::string_view kNotAMapping = "NotAMapping";
inline constexpr std::string_view kMissingRequiredKey = "MissingRequiredKey";
inline constexpr std::string_view kUnknownPlayKey = "UnknownPlayKey";
inline constexpr std::string_view kNoModuleKey = "NoModuleKey";
inline constexpr std::string_view kAmbiguousModule = "AmbiguousModule";
inline constexpr std::string_view kKindMismatch = "KindMismatch";
inline constexpr std::string_view kBlockNotSupported = "BlockNotSupported";
}  // namespace rules

struct SchemaViolation {
  NodePath path;
  std::string rule;
  std::string message;
  std::optional<yaml::Span> span;
};

enum class ValueKind { any, scalar, text, integer, boolean, mapping, list, scalar_or_list, scalar_list, task_list };

std::optional<ValueKind> parse_value_kind(std::string_view name);
std::string_view value_kind_name(ValueKind kind);

struct TaskSchema {
  std::map<std::string, ValueKind> keywords;
  std::vector<std::string> keyword_prefixes;
  std::set<std::string> block_keys;
};

struct PlaySchema {
  std::vector<std::string> required;
  std::map<std::string, ValueKind> keys;
  std::set<std::string> import_keys;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Schema {
 public:
  /// Schema tables shipped with the library.
  static const Schema& builtin();
  static Schema from_yaml(std::string_view text, std::string_view source_name = "<schema>");

  const std::string& version() const { return version_; }
  const TaskSchema& task() const { return task_; }
  const PlaySchema& play() const { return play_; }

  /// Keyword set used to tell module keys apart from task keywords.
  const KeywordSet& task_keywords() const { return keyword_set_; }

  /// Empty iff `node` is a schema-correct task.
  std::vector<SchemaViolation> validate_task(const yaml::Node& node, const ModuleCatalog& catalog,
                                             const NodePath& base = {}) const;

  /// Root must be a sequence of plays; each play and contained task is checked.
  std::vector<SchemaViolation> validate_playbook(const yaml::Document& doc, const ModuleCatalog& catalog) const;

  /// Detects the file shape: a list holding any play (`hosts` or an import)
  /// is a playbook, another list is a task list, a mapping is one task.
  std::vector<SchemaViolation> validate_document(const yaml::Document& doc, const ModuleCatalog& catalog) const;

  /// Validates one play mapping at `base`.
  std::vector<SchemaViolation> validate_play(const yaml::Node& node, const ModuleCatalog& catalog,
                                             const NodePath& base = {}) const;

 private:
  std::string version_ = "unversioned";
  TaskSchema task_;
  PlaySchema play_;
  KeywordSet keyword_set_;
};

std::vector<SchemaViolation> validate_task(const yaml::Node& node, const ModuleCatalog& catalog,
                                           const Schema& schema = Schema::builtin());
std::vector<SchemaViolation> validate_playbook(const yaml::Document& doc, const ModuleCatalog& catalog,
                                               const Schema& schema = Schema::builtin());

}  // namespace ansigen
