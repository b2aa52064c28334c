#include "ansigen/schema.hpp"

#include <algorithm>

#include "embedded_data.hpp"

namespace ansigen {

using yaml::Node;
using yaml::ScalarKind;

std::string format_path(const NodePath& path) {
  std::string out = "[";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) out += ", ";
    if (const auto* idx = std::get_if<std::size_t>(&path[i])) {
      out += std::to_string(*idx);
    } else {
      out += std::get<std::string>(path[i]);
    }
  }
  out += "]";
  return out;
}

namespace {

constexpr std::pair<std::string_view, ValueKind> kKindNames[] = {
    {"any", ValueKind::any},
    {"scalar", ValueKind::scalar},
    {"text", ValueKind::text},
    {"integer", ValueKind::integer},
    {"boolean", ValueKind::boolean},
    {"mapping", ValueKind::mapping},
    {"list", ValueKind::list},
    {"scalar_or_list", ValueKind::scalar_or_list},
    {"scalar_list", ValueKind::scalar_list},
    {"task_list", ValueKind::task_list},
};

bool is_template(const Node& n) {
  return n.is_scalar() && n.scalar_kind() == ScalarKind::text && n.text().find("{{") != std::string::npos;
}

bool kind_matches(const Node& n, ValueKind kind) {
  switch (kind) {
    case ValueKind::any:
      return true;
    case ValueKind::scalar:
      return n.is_scalar();
    case ValueKind::text:
      return n.is_scalar() && n.scalar_kind() == ScalarKind::text;
    case ValueKind::integer:
      return (n.is_scalar() && n.scalar_kind() == ScalarKind::integer) || is_template(n);
    case ValueKind::boolean:
      return (n.is_scalar() && n.scalar_kind() == ScalarKind::boolean) || is_template(n);
    case ValueKind::mapping:
      return n.is_mapping() || is_template(n);
    case ValueKind::list:
      return n.is_sequence() || is_template(n);
    case ValueKind::scalar_or_list:
      return n.is_scalar() || n.is_sequence();
    case ValueKind::scalar_list:
      return n.is_scalar() ||
             (n.is_sequence() && std::all_of(n.items().begin(), n.items().end(), [](const Node& i) { return i.is_scalar(); }));
    case ValueKind::task_list:
      return n.is_sequence() || n.is_null();
  }
  return false;
}

NodePath extend(const NodePath& base, PathElement e) {
  NodePath p = base;
  p.push_back(std::move(e));
  return p;
}

SchemaViolation violation(NodePath path, std::string_view rule, std::string message, const Node* node) {
  SchemaViolation v;
  v.path = std::move(path);
  v.rule = std::string(rule);
  v.message = std::move(message);
  if (node != nullptr) v.span = node->span();
  return v;
}

const Node& require_mapping(const Node& n, std::string_view what, std::string_view source) {
  if (!n.is_mapping()) throw SchemaError(std::string(source) + ": '" + std::string(what) + "' must be a mapping");
  return n;
}

std::vector<std::string> string_list(const Node* n, std::string_view what, std::string_view source) {
  std::vector<std::string> out;
  if (n == nullptr) return out;
  if (!n->is_sequence()) throw SchemaError(std::string(source) + ": '" + std::string(what) + "' must be a list");
  for (const auto& item : n->items()) {
    if (!item.is_scalar()) throw SchemaError(std::string(source) + ": '" + std::string(what) + "' entries must be scalars");
    out.push_back(item.text());
  }
  return out;
}

std::map<std::string, ValueKind> kind_table(const Node& n, std::string_view source) {
  std::map<std::string, ValueKind> out;
  for (const auto& e : n.entries()) {
    const std::string key = yaml::key_text(e.key);
    const auto kind = e.value.is_scalar() ? parse_value_kind(e.value.text()) : std::nullopt;
    if (!kind) throw SchemaError(std::string(source) + ": unknown value kind for '" + key + "'");
    out[key] = *kind;
  }
  return out;
}

}  // namespace

std::optional<ValueKind> parse_value_kind(std::string_view name) {
  for (const auto& [n, k] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string_view value_kind_name(ValueKind kind) {
  for (const auto& [n, k] : kKindNames) {
    if (k == kind) return n;
  }
  return "any";
}

const Schema& Schema::builtin() {
  static const Schema schema = from_yaml(detail::embedded_schema(), "<builtin schema>");
  return schema;
}

Schema Schema::from_yaml(std::string_view text, std::string_view source_name) {
  yaml::Document doc;
  try {
    doc = yaml::parse_stream(text, std::string(source_name));
  } catch (const yaml::YamlError& e) {
    throw SchemaError(std::string(source_name) + ": " + e.what());
  }
  if (doc.roots.size() != 1) throw SchemaError(std::string(source_name) + ": expected a single document");
  const Node& root = require_mapping(doc.roots.front(), "root", source_name);

  Schema schema;
  if (const Node* v = root.find("version"); v != nullptr && v->is_scalar()) schema.version_ = v->text();

  const Node* task = root.find("task");
  const Node* play = root.find("play");
  if (task == nullptr || play == nullptr) throw SchemaError(std::string(source_name) + ": 'task' and 'play' sections are required");
  require_mapping(*task, "task", source_name);
  require_mapping(*play, "play", source_name);

  const Node* keywords = task->find("keywords");
  if (keywords == nullptr) throw SchemaError(std::string(source_name) + ": 'task.keywords' is required");
  schema.task_.keywords = kind_table(require_mapping(*keywords, "task.keywords", source_name), source_name);
  schema.task_.keyword_prefixes = string_list(task->find("keyword_prefixes"), "task.keyword_prefixes", source_name);
  for (auto& k : string_list(task->find("block_keys"), "task.block_keys", source_name)) schema.task_.block_keys.insert(k);

  schema.play_.required = string_list(play->find("required"), "play.required", source_name);
  const Node* keys = play->find("keys");
  if (keys == nullptr) throw SchemaError(std::string(source_name) + ": 'play.keys' is required");
  schema.play_.keys = kind_table(require_mapping(*keys, "play.keys", source_name), source_name);
  for (auto& k : string_list(play->find("import_keys"), "play.import_keys", source_name)) schema.play_.import_keys.insert(k);

  std::set<std::string> names;
  for (const auto& [k, _] : schema.task_.keywords) names.insert(k);
  schema.keyword_set_ = KeywordSet(std::move(names), schema.task_.keyword_prefixes);
  return schema;
}

std::vector<SchemaViolation> Schema::validate_task(const Node& node, const ModuleCatalog& catalog,
                                                   const NodePath& base) const {
  (void)catalog;  // module vocabulary is not checked, only structure
  std::vector<SchemaViolation> out;
  if (!node.is_mapping()) {
    out.push_back(violation(base, rules::kNotAMapping, "task must be a mapping", &node));
    return out;
  }
  bool has_block = false;
  for (const auto& e : node.entries()) {
    const std::string key = yaml::key_text(e.key);
    if (task_.block_keys.count(key) > 0) {
      out.push_back(violation(extend(base, key), rules::kBlockNotSupported, "blocks are not supported", &e.key));
      has_block = true;
    }
  }
  if (has_block) return out;

  const Node task = normalize_action_forms(node);
  const auto candidates = module_key_candidates(task, keyword_set_);
  if (candidates.empty()) {
    out.push_back(violation(base, rules::kNoModuleKey, "task has no module key", &node));
  } else if (candidates.size() > 1) {
    std::string list;
    for (const auto& c : candidates) list += (list.empty() ? "" : ", ") + c;
    out.push_back(violation(base, rules::kAmbiguousModule, "more than one module candidate: " + list, &node));
  }

  for (const auto& e : task.entries()) {
    const std::string key = yaml::key_text(e.key);
    if (candidates.size() == 1 && key == candidates.front()) {
      if (e.value.is_sequence()) {
        out.push_back(violation(extend(base, key), rules::kKindMismatch, "module arguments must be a mapping or a string",
                                &e.value));
      }
      continue;
    }
    ValueKind kind = ValueKind::any;
    if (auto it = task_.keywords.find(key); it != task_.keywords.end()) {
      kind = it->second;
    } else if (!keyword_set_.contains(key)) {
      continue;  // reported as AmbiguousModule above
    }
    if (!kind_matches(e.value, kind)) {
      out.push_back(violation(extend(base, key), rules::kKindMismatch,
                              "'" + key + "' expects " + std::string(value_kind_name(kind)), &e.value));
    }
  }
  return out;
}

std::vector<SchemaViolation> Schema::validate_document(const yaml::Document& doc, const ModuleCatalog& catalog) const {
  if (doc.roots.size() == 1) {
    const Node& root = doc.roots.front();
    if (root.is_mapping()) return validate_task(root, catalog);
    if (root.is_sequence()) {
      const bool has_play = std::any_of(root.items().begin(), root.items().end(), [&](const Node& item) {
        if (!item.is_mapping()) return false;
        if (item.contains("hosts")) return true;
        // play-only keys (tasks, roles, ...) also mark a play
        return std::any_of(item.entries().begin(), item.entries().end(), [&](const yaml::Entry& e) {
          const std::string k = yaml::key_text(e.key);
          return play_.import_keys.count(k) > 0 || (play_.keys.count(k) > 0 && !keyword_set_.contains(k));
        });
      });
      if (!has_play && !root.items().empty()) {
        std::vector<SchemaViolation> out;
        for (std::size_t i = 0; i < root.items().size(); ++i) {
          auto v = validate_task(root.items()[i], catalog, NodePath{i});
          out.insert(out.end(), v.begin(), v.end());
        }
        return out;
      }
    }
  }
  return validate_playbook(doc, catalog);
}

std::vector<SchemaViolation> Schema::validate_play(const Node& node, const ModuleCatalog& catalog,
                                                   const NodePath& base) const {
  std::vector<SchemaViolation> out;
  if (!node.is_mapping()) {
    out.push_back(violation(base, rules::kNotAMapping, "play must be a mapping", &node));
    return out;
  }
  for (const auto& e : node.entries()) {
    if (play_.import_keys.count(yaml::key_text(e.key)) > 0) return out;
  }
  for (const auto& req : play_.required) {
    if (!node.contains(req)) {
      out.push_back(violation(extend(base, req), rules::kMissingRequiredKey, "play requires '" + req + "'", &node));
    }
  }
  for (const auto& e : node.entries()) {
    const std::string key = yaml::key_text(e.key);
    auto it = play_.keys.find(key);
    if (it == play_.keys.end()) {
      out.push_back(violation(extend(base, key), rules::kUnknownPlayKey, "unknown play key '" + key + "'", &e.key));
      continue;
    }
    if (!kind_matches(e.value, it->second)) {
      out.push_back(violation(extend(base, key), rules::kKindMismatch,
                              "'" + key + "' expects " + std::string(value_kind_name(it->second)), &e.value));
      continue;
    }
    if (it->second == ValueKind::task_list && e.value.is_sequence()) {
      for (std::size_t i = 0; i < e.value.items().size(); ++i) {
        auto sub = validate_task(e.value.items()[i], catalog, extend(extend(base, key), i));
        out.insert(out.end(), std::make_move_iterator(sub.begin()), std::make_move_iterator(sub.end()));
      }
    }
  }
  return out;
}

std::vector<SchemaViolation> Schema::validate_playbook(const yaml::Document& doc, const ModuleCatalog& catalog) const {
  std::vector<SchemaViolation> out;
  if (doc.roots.empty()) {
    out.push_back(violation({}, rules::kEmptyDocument, "document has no content", nullptr));
    return out;
  }
  for (const auto& root : doc.roots) {
    if (!root.is_sequence()) {
      out.push_back(violation({}, rules::kRootNotSequence, "playbook root must be a list of plays", &root));
      continue;
    }
    for (std::size_t i = 0; i < root.items().size(); ++i) {
      auto sub = validate_play(root.items()[i], catalog, NodePath{i});
      out.insert(out.end(), std::make_move_iterator(sub.begin()), std::make_move_iterator(sub.end()));
    }
  }
  return out;
}

std::vector<SchemaViolation> validate_task(const Node& node, const ModuleCatalog& catalog, const Schema& schema) {
  return schema.validate_task(node, catalog);
}

std::vector<SchemaViolation> validate_playbook(const yaml::Document& doc, const ModuleCatalog& catalog,
                                               const Schema& schema) {
  return schema.validate_playbook(doc, catalog);
}

}  // namespace ansigen
