#pragma once

// Ansible semantics on top of the YAML model: module catalog with FQCN
// resolution and equivalence classes, free-form argument parsing, and
// task/play classification.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ansigen/yaml.hpp"

namespace ansigen {

/// Partial key credit given to distinct modules of one equivalence class.
inline constexpr double kDefaultEquivalentPartial = 0.5;

class ModuleCatalog {
 public:
  /// Catalog shipped with the library (builtin collection short names).
  static ModuleCatalog builtin();

  /// Loads a catalog file: a mapping of `short_name: fqcn` pairs plus
  /// optional `version` and `equivalence_classes: [[name, ...], ...]`.
  static ModuleCatalog from_yaml(std::string_view text, std::string_view source_name = "<catalog>");

  /// Adds entries and classes from an overlay in the same format. Overlay
  /// entries win; a class that shares a member with an existing class is
  /// merged into it.
  void apply_overlay(std::string_view text, std::string_view source_name = "<overlay>");

  /// Catalog FQCN for a known short name (or `ansible.legacy.<short>`);
  /// the input unchanged otherwise.
  std::string resolve(std::string_view name) const;

  /// 1.0 for equal names, the partial score for distinct members of one
  /// class, 0.0 otherwise. Inputs should already be resolved.
  double similarity(std::string_view target_fqcn, std::string_view predicted_fqcn) const;

  /// Index of the equivalence class holding `fqcn`, or -1.
  int class_of(std::string_view fqcn) const;

  bool is_known_short_name(std::string_view name) const { return short_to_fqcn_.count(std::string(name)) > 0; }
  bool is_known_fqcn(std::string_view fqcn) const { return known_fqcns_.count(std::string(fqcn)) > 0; }

  const std::map<std::string, std::string>& entries() const { return short_to_fqcn_; }
  const std::vector<std::vector<std::string>>& equivalence_classes() const { return classes_; }
  const std::string& version() const { return version_; }

  double equivalent_partial() const { return equivalent_partial_; }
  void set_equivalent_partial(double score) { equivalent_partial_ = score; }

 private:
  void load(const yaml::Node& root, std::string_view source_name);
  void add_class(std::vector<std::string> members);
  void rebuild_index();

  std::map<std::string, std::string> short_to_fqcn_;
  std::set<std::string> known_fqcns_;
  std::vector<std::vector<std::string>> classes_;
  std::unordered_map<std::string, int> class_index_;
  std::string version_ = "unversioned";
  double equivalent_partial_ = kDefaultEquivalentPartial;
};

std::string resolve_fqcn(std::string_view raw_name, const ModuleCatalog& catalog);
double module_similarity(std::string_view target_fqcn, std::string_view predicted_fqcn, const ModuleCatalog& catalog);

class CatalogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Names treated as task keywords rather than module keys.
class KeywordSet {
 public:
  KeywordSet() = default;
  KeywordSet(std::set<std::string> names, std::vector<std::string> prefixes)
      : names_(std::move(names)), prefixes_(std::move(prefixes)) {}

  bool contains(std::string_view key) const;
  const std::set<std::string>& names() const { return names_; }
  const std::vector<std::string>& prefixes() const { return prefixes_; }

 private:
  std::set<std::string> names_;
  std::vector<std::string> prefixes_;
};

class MalformedFreeForm : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses `k1=v1 k2="v 2" ...` into a mapping. Bare fragments are joined
/// under `_raw_params`. Spaces inside quotes or Jinja delimiters do not split.
yaml::Node parse_free_form(std::string_view text);

/// Inverse of parse_free_form for mappings of scalars.
std::string to_free_form(const yaml::Node& mapping);

/// Module parameters in mapping form: free-form scalars are parsed, null
/// becomes an empty mapping, anything else is returned as is.
yaml::Node normalize_params(const yaml::Node& value);

/// Rewrites `action:` / `local_action:` into `<module>: <params>` form;
/// `local_action` also gains `delegate_to: localhost`. Other tasks are
/// returned unchanged.
yaml::Node normalize_action_forms(const yaml::Node& task);

struct ModuleInvocation {
  std::string raw_name;
  std::string fqcn;
  yaml::Node params;
};

struct AnsibleTask {
  std::optional<std::string> name;
  ModuleInvocation module;
  std::vector<std::pair<std::string, yaml::Node>> keywords;
  yaml::Node source;
};

struct AnsiblePlay {
  std::optional<std::string> name;
  std::vector<std::pair<std::string, yaml::Node>> play_keys;
  std::vector<AnsibleTask> tasks;
  yaml::Node source;
};

class TaskError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NotAMapping : public TaskError {
 public:
  using TaskError::TaskError;
};
class NoModuleKey : public TaskError {
 public:
  using TaskError::TaskError;
};
class AmbiguousModule : public TaskError {
 public:
  AmbiguousModule(const std::string& what, std::vector<std::string> candidates)
      : TaskError(what), candidates_(std::move(candidates)) {}
  const std::vector<std::string>& candidates() const { return candidates_; }

 private:
  std::vector<std::string> candidates_;
};

/// Keys of a task mapping that are neither `name` nor keywords.
std::vector<std::string> module_key_candidates(const yaml::Node& task, const KeywordSet& keywords);

/// Splits a task mapping into name, module invocation, and keywords.
/// Throws NotAMapping, NoModuleKey or AmbiguousModule.
AnsibleTask classify_task(const yaml::Node& node, const ModuleCatalog& catalog, const KeywordSet& keywords);

/// Splits a play mapping into name, play keys and classified `tasks`.
AnsiblePlay classify_play(const yaml::Node& node, const ModuleCatalog& catalog, const KeywordSet& keywords);

/// Text of a mapping's `name` value when it is a non-empty scalar.
std::optional<std::string> name_of(const yaml::Node& mapping);

}  // namespace ansigen
