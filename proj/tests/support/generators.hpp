#pragma once

// Random Ansible-shaped and arbitrary YAML trees for property tests.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ansigen/ansible.hpp"
#include "ansigen/yaml.hpp"

namespace testgen {

using ansigen::yaml::Entry;
using ansigen::yaml::Node;
using ansigen::yaml::Quoting;

inline const std::vector<std::string>& modules() {
  static const std::vector<std::string> m = {
      "copy",    "template", "command", "shell",   "yum",     "apt",     "dnf",       "package", "service",
      "file",    "lineinfile", "user",  "group",   "git",     "uri",     "get_url",   "unarchive", "systemd",
      "cron",    "stat",     "debug",   "set_fact", "pip",    "replace", "wait_for",  "assert",  "sysctl",
      "mount",   "authorized_key", "ufw"};
  return m;
}

inline const std::vector<std::string>& words() {
  static const std::vector<std::string> w = {
      "httpd", "nginx", "present", "latest", "absent", "started", "stopped", "/etc/app.conf", "/tmp/build",
      "deploy", "root", "0644", "0755", "web", "app-data", "http://example.com/a.tgz", "{{ item }}",
      "{{ app_user }}", "openssh-server", "/srv/site", "main", "1.2.3", "ssh", "a b c", "key: value",
      "- dash", "#hash", "", "yes", "null", "42"};
  return w;
}

inline const std::vector<std::string>& param_keys() {
  static const std::vector<std::string> k = {"name", "state", "src", "dest", "mode", "owner", "group", "path",
                                             "enabled", "line", "regexp", "url", "version", "repo", "msg",
                                             "chdir", "creates", "update_cache", "recurse", "force"};
  return k;
}

inline const std::vector<std::string>& sentences() {
  static const std::vector<std::string> s = {
      "Install SSH server", "Start SSH server", "Ensure apache is at the latest version",
      "Write the apache config file", "Get config for VyOS devices", "Create the deploy user",
      "Copy files: part 1", "Restart nginx", "Check the service", "Open the firewall"};
  return s;
}

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

  Node text(const std::string& s) { return Node::scalar(s, s.empty() || needs_quotes(s) ? Quoting::single_quoted : Quoting::plain); }

  Node scalar() {
    switch (below(5)) {
      case 0: return Node::scalar(std::to_string(static_cast<int>(below(2000)) - 100));
      case 1: return Node::scalar(chance(0.5) ? "true" : "false");
      case 2: return Node::scalar(pick(words()), Quoting::double_quoted);
      default: return text(pick(words()));
    }
  }

  Node value(int depth) {
    const std::size_t roll = below(10);
    if (depth <= 0 || roll < 6) return scalar();
    if (roll < 8) {
      std::vector<Node> items;
      const std::size_t n = below(4);
      for (std::size_t i = 0; i < n; ++i) items.push_back(value(depth - 1));
      return Node::sequence(std::move(items));
    }
    return mapping(depth - 1, 0, 3);
  }

  Node mapping(int depth, std::size_t min_keys, std::size_t max_keys) {
    std::vector<Entry> entries;
    std::vector<std::string> keys = param_keys();
    std::shuffle(keys.begin(), keys.end(), rng_);
    const std::size_t n = min_keys + below(max_keys - min_keys + 1);
    for (std::size_t i = 0; i < n && i < keys.size(); ++i) entries.push_back(Entry{text(keys[i]), value(depth)});
    return Node::mapping(std::move(entries));
  }

  // Module parameters: scalar-only mapping (free-form convertible), nested
  // mapping, free-form text, or null.
  Node params() {
    const std::size_t roll = below(10);
    if (roll < 5) {
      std::vector<Entry> entries;
      std::vector<std::string> keys = param_keys();
      std::shuffle(keys.begin(), keys.end(), rng_);
      const std::size_t n = 1 + below(4);
      for (std::size_t i = 0; i < n; ++i) entries.push_back(Entry{text(keys[i]), scalar()});
      return Node::mapping(std::move(entries));
    }
    if (roll < 8) return mapping(2, 1, 4);
    if (roll < 9) return Node::scalar(pick(std::vector<std::string>{"echo hello", "name=httpd state=latest",
                                                                     "src=a dest=/tmp/b mode=0644", "/usr/bin/true"}),
                                      Quoting::plain);
    return Node::null();
  }

  Node keyword_value(const std::string& key) {
    if (key == "when" || key == "changed_when" || key == "failed_when")
      return text(pick(std::vector<std::string>{"ansible_os_family == 'Debian'", "result.rc != 0", "not skip"}));
    if (key == "register") return text(pick(std::vector<std::string>{"result", "out", "facts"}));
    if (key == "become" || key == "ignore_errors" || key == "no_log" || key == "run_once")
      return Node::scalar(chance(0.5) ? "true" : "false");
    if (key == "retries" || key == "delay") return Node::scalar(std::to_string(below(10)));
    if (key == "tags") {
      if (chance(0.5)) return text("setup");
      return Node::sequence({text("web"), text("setup")});
    }
    if (key == "notify") return text("restart nginx");
    if (key == "loop") return Node::sequence({text("a"), text("b"), Node::scalar(std::to_string(below(5)))});
    if (key == "vars") return Node::mapping({Entry{text("port"), Node::scalar("8080")}});
    return text("x");
  }

  std::string module_key(const ansigen::ModuleCatalog& catalog) {
    const std::string& m = pick(modules());
    return chance(0.3) ? catalog.resolve(m) : m;
  }

  Node task(const ansigen::ModuleCatalog& catalog, bool with_name = true) {
    std::vector<Entry> entries;
    if (with_name) entries.push_back(Entry{text("name"), text(pick(sentences()))});
    entries.push_back(Entry{text(module_key(catalog)), params()});
    std::vector<std::string> kws = {"when", "register", "become", "ignore_errors", "tags", "notify",
                                    "retries", "delay", "loop", "vars", "no_log", "changed_when"};
    std::shuffle(kws.begin(), kws.end(), rng_);
    const std::size_t n = below(4);
    for (std::size_t i = 0; i < n; ++i) entries.push_back(Entry{text(kws[i]), keyword_value(kws[i])});
    std::shuffle(entries.begin() + (with_name ? 1 : 0), entries.end(), rng_);
    return Node::mapping(std::move(entries));
  }

  Node play(const ansigen::ModuleCatalog& catalog, std::size_t min_tasks = 1, std::size_t max_tasks = 4) {
    std::vector<Entry> entries;
    if (chance(0.6)) entries.push_back(Entry{text("name"), text(pick(sentences()))});
    entries.push_back(Entry{text("hosts"), text(pick(std::vector<std::string>{"all", "webservers", "db"}))});
    if (chance(0.5)) entries.push_back(Entry{text("become"), Node::scalar("true")});
    if (chance(0.3)) entries.push_back(Entry{text("gather_facts"), Node::scalar("false")});
    if (chance(0.4)) entries.push_back(Entry{text("vars"), Node::mapping({Entry{text("http_port"), Node::scalar("80")}})});
    std::vector<Node> tasks;
    const std::size_t n = min_tasks + below(max_tasks - min_tasks + 1);
    for (std::size_t i = 0; i < n; ++i) tasks.push_back(task(catalog));
    entries.push_back(Entry{text("tasks"), Node::sequence(std::move(tasks))});
    if (chance(0.3)) entries.push_back(Entry{text("handlers"), Node::sequence({task(catalog)})});
    return Node::mapping(std::move(entries));
  }

  Node playbook(const ansigen::ModuleCatalog& catalog) {
    std::vector<Node> plays;
    const std::size_t n = 1 + below(2);
    for (std::size_t i = 0; i < n; ++i) plays.push_back(play(catalog));
    return Node::sequence(std::move(plays));
  }

  // Arbitrary tree, not necessarily Ansible-shaped.
  Node any(int depth) {
    const std::size_t roll = below(10);
    if (depth <= 0 || roll < 4) return scalar();
    if (roll < 7) {
      std::vector<Node> items;
      const std::size_t n = below(4);
      for (std::size_t i = 0; i < n; ++i) items.push_back(any(depth - 1));
      return Node::sequence(std::move(items));
    }
    std::vector<Entry> entries;
    std::vector<std::string> keys = param_keys();
    keys.insert(keys.end(), {"hosts", "tasks", "when", "copy", "template", "shell", "command", "action"});
    std::shuffle(keys.begin(), keys.end(), rng_);
    const std::size_t n = below(5);
    for (std::size_t i = 0; i < n; ++i) {
      Node v = keys[i] == "tasks" ? Node::sequence({any(depth - 1), any(depth - 1)}) : any(depth - 1);
      entries.push_back(Entry{text(keys[i]), std::move(v)});
    }
    return Node::mapping(std::move(entries));
  }

  // A prediction related to `target`: random value edits, deletions and
  // module swaps, so scores spread over (0, 1).
  Node mutate(const Node& target, const ansigen::ModuleCatalog& catalog) {
    if (target.is_scalar()) return chance(0.25) ? scalar() : target;
    if (target.is_sequence()) {
      std::vector<Node> items;
      for (const auto& item : target.items()) {
        if (chance(0.1)) continue;
        items.push_back(mutate(item, catalog));
      }
      if (chance(0.1)) items.push_back(scalar());
      return Node::sequence(std::move(items));
    }
    std::vector<Entry> entries;
    for (const auto& e : target.entries()) {
      if (chance(0.1)) continue;
      Node key = e.key;
      const std::string k = ansigen::yaml::key_text(key);
      if (chance(0.15)) {
        const std::string resolved = catalog.resolve(k);
        const int cls = catalog.class_of(resolved);
        if (cls >= 0) {
          const auto& members = catalog.equivalence_classes()[static_cast<std::size_t>(cls)];
          key = text(members[below(members.size())]);
        } else if (resolved != k) {
          key = text(resolved);
        }
      }
      entries.push_back(Entry{std::move(key), mutate(e.value, catalog)});
    }
    if (chance(0.15)) entries.push_back(Entry{text("extra_key"), scalar()});
    std::vector<Entry> deduped;
    for (auto& e : entries) {
      const auto id = ansigen::yaml::key_identity(e.key);
      if (std::none_of(deduped.begin(), deduped.end(), [&](const Entry& d) { return ansigen::yaml::key_identity(d.key) == id; })) {
        deduped.push_back(std::move(e));
      }
    }
    return Node::mapping(std::move(deduped));
  }

 private:
  static bool needs_quotes(const std::string& s) {
    const auto v = ansigen::yaml::resolve_scalar(s, Quoting::plain);
    if (v.kind != ansigen::yaml::ScalarKind::text) return true;
    return s.find(": ") != std::string::npos || s.find(" #") != std::string::npos || s.front() == '-' ||
           s.front() == '#' || s.front() == '{' || s.front() == '[' || s.front() == '\'' || s.front() == '"';
  }

  std::mt19937_64 rng_;
};

/// Recursively permutes mapping entries.
inline Node permute_keys(const Node& n, std::mt19937_64& rng) {
  if (n.is_sequence()) {
    std::vector<Node> items;
    for (const auto& i : n.items()) items.push_back(permute_keys(i, rng));
    return Node::sequence(std::move(items));
  }
  if (!n.is_mapping()) return n;
  std::vector<Entry> entries;
  for (const auto& e : n.entries()) entries.push_back(Entry{e.key, permute_keys(e.value, rng)});
  std::shuffle(entries.begin(), entries.end(), rng);
  return Node::mapping(std::move(entries));
}

/// Text scalar with quoting chosen so it stays text.
inline Node text_node(const std::string& s) { return Node::scalar(s, Quoting::double_quoted); }

}  // namespace testgen
