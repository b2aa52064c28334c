#include "ansigen/ansible.hpp"

#include <algorithm>
#include <cctype>

#include "embedded_data.hpp"

namespace ansigen {

using yaml::Entry;
using yaml::Node;
using yaml::Quoting;
using yaml::ScalarKind;

// ---- catalog ----------------------------------------------------------------

namespace {

constexpr std::string_view kLegacyPrefix = "ansible.legacy.";
constexpr std::string_view kBuiltinPrefix = "ansible.builtin.";

std::string scalar_string(const Node& n, std::string_view what, std::string_view source) {
  if (!n.is_scalar() || n.is_null()) {
    throw CatalogError(std::string(source) + ": expected a scalar for " + std::string(what));
  }
  return n.text();
}

}  // namespace

ModuleCatalog ModuleCatalog::builtin() {
  static const ModuleCatalog catalog = from_yaml(detail::embedded_catalog(), "<builtin catalog>");
  return catalog;
}

ModuleCatalog ModuleCatalog::from_yaml(std::string_view text, std::string_view source_name) {
  ModuleCatalog catalog;
  catalog.apply_overlay(text, source_name);
  return catalog;
}

void ModuleCatalog::apply_overlay(std::string_view text, std::string_view source_name) {
  yaml::Document doc;
  try {
    doc = yaml::parse_stream(text, std::string(source_name));
  } catch (const yaml::YamlError& e) {
    throw CatalogError(std::string(source_name) + ": " + e.what());
  }
  if (doc.roots.empty()) return;
  if (doc.roots.size() != 1) throw CatalogError(std::string(source_name) + ": expected a single document");
  load(doc.roots.front(), source_name);
}

void ModuleCatalog::load(const Node& root, std::string_view source) {
  if (!root.is_mapping()) throw CatalogError(std::string(source) + ": catalog root must be a mapping");
  std::vector<std::vector<std::string>> pending_classes;
  for (const auto& e : root.entries()) {
    const std::string key = yaml::key_text(e.key);
    if (key == "version") {
      version_ = scalar_string(e.value, "version", source);
    } else if (key == "equivalence_classes") {
      if (!e.value.is_sequence()) throw CatalogError(std::string(source) + ": equivalence_classes must be a list");
      for (const auto& cls : e.value.items()) {
        if (!cls.is_sequence()) throw CatalogError(std::string(source) + ": each equivalence class must be a list");
        std::vector<std::string> members;
        for (const auto& m : cls.items()) members.push_back(scalar_string(m, "class member", source));
        pending_classes.push_back(std::move(members));
      }
    } else {
      std::string fqcn = scalar_string(e.value, key, source);
      known_fqcns_.insert(fqcn);
      short_to_fqcn_[key] = std::move(fqcn);
    }
  }
  for (auto& members : pending_classes) {
    for (auto& m : members) m = resolve(m);
    add_class(std::move(members));
  }
}

void ModuleCatalog::add_class(std::vector<std::string> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.size() < 2) return;
  std::vector<std::string> merged = members;
  std::vector<std::vector<std::string>> kept;
  for (auto& cls : classes_) {
    const bool overlaps = std::any_of(cls.begin(), cls.end(), [&](const std::string& m) {
      return std::binary_search(members.begin(), members.end(), m);
    });
    if (overlaps) {
      merged.insert(merged.end(), cls.begin(), cls.end());
    } else {
      kept.push_back(std::move(cls));
    }
  }
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  kept.push_back(std::move(merged));
  classes_ = std::move(kept);
  rebuild_index();
}

void ModuleCatalog::rebuild_index() {
  class_index_.clear();
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    for (const auto& m : classes_[i]) class_index_[m] = static_cast<int>(i);
  }
}

std::string ModuleCatalog::resolve(std::string_view name) const {
  if (auto it = short_to_fqcn_.find(std::string(name)); it != short_to_fqcn_.end()) return it->second;
  if (name.substr(0, kLegacyPrefix.size()) == kLegacyPrefix) {
    const std::string_view rest = name.substr(kLegacyPrefix.size());
    if (auto it = short_to_fqcn_.find(std::string(rest)); it != short_to_fqcn_.end() &&
                                                          it->second.compare(0, kBuiltinPrefix.size(), kBuiltinPrefix) == 0) {
      return it->second;
    }
  }
  return std::string(name);
}

int ModuleCatalog::class_of(std::string_view fqcn) const {
  auto it = class_index_.find(std::string(fqcn));
  return it == class_index_.end() ? -1 : it->second;
}

double ModuleCatalog::similarity(std::string_view target_fqcn, std::string_view predicted_fqcn) const {
  if (target_fqcn == predicted_fqcn) return 1.0;
  const int a = class_of(target_fqcn);
  if (a >= 0 && a == class_of(predicted_fqcn)) return equivalent_partial_;
  return 0.0;
}

std::string resolve_fqcn(std::string_view raw_name, const ModuleCatalog& catalog) { return catalog.resolve(raw_name); }

double module_similarity(std::string_view target_fqcn, std::string_view predicted_fqcn, const ModuleCatalog& catalog) {
  return catalog.similarity(target_fqcn, predicted_fqcn);
}

bool KeywordSet::contains(std::string_view key) const {
  if (names_.count(std::string(key)) > 0) return true;
  for (const auto& prefix : prefixes_) {
    if (key.size() > prefix.size() && key.substr(0, prefix.size()) == prefix) {
      const std::string_view rest = key.substr(prefix.size());
      const bool ident = std::all_of(rest.begin(), rest.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
      if (ident) return true;
    }
  }
  return false;
}

// ---- free-form arguments ----------------------------------------------------

namespace {

// Splits on whitespace outside quotes and Jinja delimiters.
std::vector<std::string> split_args(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  char quote = 0;
  int jinja_depth = 0;
  bool in_token = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quote != 0) {
      current.push_back(c);
      if (c == '\\' && quote == '"' && i + 1 < text.size()) {
        current.push_back(text[++i]);
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if (jinja_depth == 0 && (c == ' ' || c == '\t' || c == '\n')) {
      if (in_token) {
        tokens.push_back(std::move(current));
        current.clear();
        in_token = false;
      }
      continue;
    }
    in_token = true;
    if ((c == '{') && i + 1 < text.size() && (text[i + 1] == '{' || text[i + 1] == '%' || text[i + 1] == '#')) {
      ++jinja_depth;
      current.push_back(c);
      current.push_back(text[++i]);
      continue;
    }
    if ((c == '}' || c == '%' || c == '#') && jinja_depth > 0 && i + 1 < text.size() && text[i + 1] == '}') {
      --jinja_depth;
      current.push_back(c);
      current.push_back(text[++i]);
      continue;
    }
    if (jinja_depth == 0 && (c == '"' || c == '\'')) quote = c;
    current.push_back(c);
  }
  if (quote != 0) throw MalformedFreeForm("unbalanced quote in free-form arguments");
  if (in_token) tokens.push_back(std::move(current));
  return tokens;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

std::string unescape_double(std::string_view body) {
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '\\' && i + 1 < body.size() && (body[i + 1] == '"' || body[i + 1] == '\\')) {
      out.push_back(body[++i]);
    } else {
      out.push_back(body[i]);
    }
  }
  return out;
}

void set_entry(std::vector<Entry>& entries, Node key, Node value) {
  for (auto& e : entries) {
    if (yaml::key_identity(e.key) == yaml::key_identity(key)) {
      e.value = std::move(value);
      return;
    }
  }
  entries.push_back(Entry{std::move(key), std::move(value)});
}

}  // namespace

Node parse_free_form(std::string_view text) {
  std::vector<Entry> entries;
  std::vector<std::string> bare;
  for (auto& token : split_args(text)) {
    const std::size_t eq = token.find('=');
    if (eq != std::string::npos && is_identifier(std::string_view(token).substr(0, eq))) {
      std::string key = token.substr(0, eq);
      std::string raw = token.substr(eq + 1);
      Node value;
      if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
        value = Node::scalar(unescape_double(std::string_view(raw).substr(1, raw.size() - 2)), Quoting::double_quoted);
      } else if (raw.size() >= 2 && raw.front() == '\'' && raw.back() == '\'') {
        value = Node::scalar(raw.substr(1, raw.size() - 2), Quoting::single_quoted);
      } else {
        value = Node::scalar(std::move(raw), Quoting::plain);
      }
      set_entry(entries, Node::scalar(std::move(key)), std::move(value));
    } else {
      bare.push_back(std::move(token));
    }
  }
  if (!bare.empty()) {
    std::string joined;
    for (std::size_t i = 0; i < bare.size(); ++i) {
      if (i > 0) joined.push_back(' ');
      joined += bare[i];
    }
    set_entry(entries, Node::scalar("_raw_params"), Node::scalar(std::move(joined), Quoting::double_quoted));
  }
  return Node::mapping(std::move(entries));
}

std::string to_free_form(const Node& mapping) {
  std::string out;
  std::string raw_params;
  auto append = [&out](const std::string& piece) {
    if (!out.empty()) out.push_back(' ');
    out += piece;
  };
  for (const auto& e : mapping.entries()) {
    const std::string key = yaml::key_text(e.key);
    if (key == "_raw_params" && e.value.is_scalar()) {
      raw_params = e.value.text();
      continue;
    }
    std::string value;
    if (e.value.is_scalar()) {
      const auto& v = e.value.value();
      if (v.kind == ScalarKind::boolean) {
        value = v.boolean ? "true" : "false";
      } else if (v.kind == ScalarKind::null) {
        append(key + "=");
        continue;
      } else {
        value = e.value.text();
      }
      const bool plain_ok = !value.empty() && value.find_first_of(" \t\n\"'\\") == std::string::npos &&
                            yaml::resolve_scalar(value, Quoting::plain).kind == v.kind;
      if (!plain_ok) {
        std::string quoted = "\"";
        for (char c : value) {
          if (c == '"' || c == '\\') quoted.push_back('\\');
          quoted.push_back(c);
        }
        quoted.push_back('"');
        value = std::move(quoted);
      }
    } else {
      throw MalformedFreeForm("free-form arguments cannot hold nested value for '" + key + "'");
    }
    append(key + "=" + value);
  }
  if (!raw_params.empty()) append(raw_params);
  return out;
}

Node normalize_params(const Node& value) {
  if (value.is_null()) return Node::mapping({}, value.span());
  if (value.is_scalar()) {
    try {
      Node parsed = parse_free_form(value.text());
      parsed.set_span(value.span());
      return parsed;
    } catch (const MalformedFreeForm&) {
      return Node::mapping({Entry{Node::scalar("_raw_params"), Node::scalar(value.text(), Quoting::double_quoted)}},
                           value.span());
    }
  }
  return value;
}

Node normalize_action_forms(const Node& task) {
  if (!task.is_mapping()) return task;
  const Node* action = task.find("action");
  const Node* local = task.find("local_action");
  if ((action == nullptr) == (local == nullptr)) return task;
  const Node& spec = action != nullptr ? *action : *local;

  std::string module;
  Node params;
  if (spec.is_scalar() && !spec.is_null()) {
    const std::string& text = spec.text();
    std::size_t start = text.find_first_not_of(" \t\n");
    if (start == std::string::npos) return task;
    std::size_t end = text.find_first_of(" \t\n", start);
    module = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
    try {
      params = parse_free_form(end == std::string::npos ? std::string_view{} : std::string_view(text).substr(end));
    } catch (const MalformedFreeForm&) {
      return task;
    }
  } else if (spec.is_mapping()) {
    const Node* m = spec.find("module");
    if (m == nullptr || !m->is_scalar() || m->is_null()) return task;
    module = m->text();
    std::vector<Entry> rest;
    for (const auto& e : spec.entries()) {
      if (yaml::key_text(e.key) != "module") rest.push_back(e);
    }
    params = Node::mapping(std::move(rest), spec.span());
  } else {
    return task;
  }

  std::vector<Entry> out;
  bool has_delegate = task.contains("delegate_to");
  for (const auto& e : task.entries()) {
    const std::string key = yaml::key_text(e.key);
    if (key == "action" || key == "local_action") {
      out.push_back(Entry{Node::scalar(module, Quoting::plain, e.key.span()), params});
      if (local != nullptr && !has_delegate) {
        out.push_back(Entry{Node::scalar("delegate_to"), Node::scalar("localhost")});
        has_delegate = true;
      }
    } else {
      out.push_back(e);
    }
  }
  return Node::mapping(std::move(out), task.span());
}

// ---- classification ---------------------------------------------------------

std::optional<std::string> name_of(const Node& mapping) {
  const Node* n = mapping.find("name");
  if (n == nullptr || !n->is_scalar() || n->is_null()) return std::nullopt;
  if (n->scalar_kind() == ScalarKind::text && n->text().empty()) return std::nullopt;
  return n->text();
}

std::vector<std::string> module_key_candidates(const Node& task, const KeywordSet& keywords) {
  std::vector<std::string> out;
  for (const auto& e : task.entries()) {
    const std::string key = yaml::key_text(e.key);
    if (key == "name" || keywords.contains(key)) continue;
    out.push_back(key);
  }
  return out;
}

AnsibleTask classify_task(const Node& node, const ModuleCatalog& catalog, const KeywordSet& keywords) {
  if (!node.is_mapping()) throw NotAMapping("task is not a mapping");
  const Node normalized = normalize_action_forms(node);
  const auto candidates = module_key_candidates(normalized, keywords);
  if (candidates.empty()) throw NoModuleKey("task has no module key");
  if (candidates.size() > 1) {
    std::string list;
    for (const auto& c : candidates) list += (list.empty() ? "" : ", ") + c;
    throw AmbiguousModule("task has more than one module candidate: " + list, candidates);
  }
  AnsibleTask task;
  task.source = node;
  task.name = name_of(normalized);
  for (const auto& e : normalized.entries()) {
    const std::string key = yaml::key_text(e.key);
    if (key == "name") continue;
    if (key == candidates.front()) {
      task.module.raw_name = key;
      task.module.fqcn = catalog.resolve(key);
      task.module.params = normalize_params(e.value);
    } else {
      task.keywords.emplace_back(key, e.value);
    }
  }
  return task;
}

AnsiblePlay classify_play(const Node& node, const ModuleCatalog& catalog, const KeywordSet& keywords) {
  if (!node.is_mapping()) throw NotAMapping("play is not a mapping");
  AnsiblePlay play;
  play.source = node;
  play.name = name_of(node);
  for (const auto& e : node.entries()) {
    const std::string key = yaml::key_text(e.key);
    if (key == "name") continue;
    if (key == "tasks" && e.value.is_sequence()) {
      for (const auto& t : e.value.items()) play.tasks.push_back(classify_task(t, catalog, keywords));
    }
    play.play_keys.emplace_back(key, e.value);
  }
  return play;
}

}  // namespace ansigen
