#pragma once

// Prediction rewrites behind the Ansible Aware invariants, and a checker
// that runs all of them against one (target, prediction) pair.

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ansigen/ansible.hpp"
#include "ansigen/metrics.hpp"
#include "support/generators.hpp"

namespace props {

using ansigen::KeywordSet;
using ansigen::ModuleCatalog;
using ansigen::yaml::Entry;
using ansigen::yaml::Node;

inline const char* const kTaskListKeys[] = {"tasks", "handlers", "pre_tasks", "post_tasks"};

// Calls `fn` on every task mapping: the root when it is a task, otherwise
// the items of each play's task lists. Like the scorer, an item is a play
// when the target item at its position is one.
inline void for_each_task(Node& root, const Node& target, const std::function<void(Node&)>& fn) {
  if (root.is_mapping()) {
    fn(root);
    return;
  }
  if (!root.is_sequence()) return;
  for (std::size_t i = 0; i < root.items().size(); ++i) {
    Node& item = root.items()[i];
    if (!item.is_mapping()) continue;
    const Node* t = target.is_sequence() && i < target.items().size() ? &target.items()[i] : nullptr;
    const bool play = t != nullptr && t->is_mapping() && t->contains("hosts");
    if (!play) {
      fn(item);
      continue;
    }
    for (Entry& e : item.entries()) {
      const std::string k = ansigen::yaml::key_text(e.key);
      for (const char* list : kTaskListKeys) {
        if (k == list && e.value.is_sequence()) {
          for (Node& t : e.value.items()) {
            if (t.is_mapping()) fn(t);
          }
        }
      }
    }
  }
}

inline bool is_module_key(const std::string& k, const KeywordSet& keywords) { return k != "name" && !keywords.contains(k); }

// Adds keys named `zz_inserted_N` to every mapping and extends sequences
// that are at least as long as their target counterpart.
inline Node insert_keys(const Node* target, const Node& pred, int& counter) {
  if (pred.is_mapping()) {
    std::vector<Entry> entries;
    for (const Entry& e : pred.entries()) {
      const Node* tv = nullptr;
      if (target && target->is_mapping()) tv = target->find(ansigen::yaml::key_text(e.key));
      entries.push_back(Entry{e.key, insert_keys(tv, e.value, counter)});
    }
    entries.push_back(Entry{testgen::text_node("zz_inserted_" + std::to_string(counter++)), Node::scalar("1")});
    return Node::mapping(std::move(entries));
  }
  if (pred.is_sequence()) {
    std::vector<Node> items;
    const Node* t = target && target->is_sequence() ? target : nullptr;
    for (std::size_t i = 0; i < pred.items().size(); ++i) {
      const Node* ti = t && i < t->items().size() ? &t->items()[i] : nullptr;
      items.push_back(insert_keys(ti, pred.items()[i], counter));
    }
    if (t && items.size() >= t->items().size()) items.push_back(Node::scalar("zz_inserted_item"));
    return Node::sequence(std::move(items));
  }
  return pred;
}

// All mapping entries reachable in `n`, as (mapping, index) pairs.
inline void collect_entries(Node& n, std::vector<std::pair<Node*, std::size_t>>& out) {
  if (n.is_mapping()) {
    for (std::size_t i = 0; i < n.entries().size(); ++i) {
      out.emplace_back(&n, i);
      collect_entries(n.entries()[i].value, out);
    }
  } else if (n.is_sequence()) {
    for (Node& item : n.items()) collect_entries(item, out);
  }
}

// Removes one random mapping entry anywhere in `pred`; false if none exists.
inline bool delete_one(Node& pred, std::mt19937_64& rng) {
  std::vector<std::pair<Node*, std::size_t>> slots;
  collect_entries(pred, slots);
  if (slots.empty()) return false;
  const auto [m, i] = slots[std::uniform_int_distribution<std::size_t>(0, slots.size() - 1)(rng)];
  m->entries().erase(m->entries().begin() + static_cast<std::ptrdiff_t>(i));
  return true;
}

// Swaps catalog module keys between short and FQCN spelling.
inline bool swap_fqcn(Node& root, const Node& target, const ModuleCatalog& catalog, const KeywordSet& keywords) {
  std::map<std::string, std::string> to_short;
  for (const auto& [s, f] : catalog.entries()) {
    if (catalog.resolve(s) == f) to_short.emplace(f, s);
  }
  bool changed = false;
  for_each_task(root, target, [&](Node& task) {
    for (Entry& e : task.entries()) {
      const std::string k = ansigen::yaml::key_text(e.key);
      if (!is_module_key(k, keywords)) continue;
      std::string other;
      if (catalog.is_known_short_name(k)) {
        other = catalog.resolve(k);
      } else if (auto it = to_short.find(k); it != to_short.end()) {
        other = it->second;
      }
      if (other.empty() || task.contains(other)) continue;
      e.key = testgen::text_node(other);
      changed = true;
    }
  });
  return changed;
}

// Rewrites module params that are flat scalar mappings into `k=v` text,
// when the text parses back to the same params.
inline bool to_free_form(Node& root, const Node& target, const KeywordSet& keywords) {
  bool changed = false;
  for_each_task(root, target, [&](Node& task) {
    for (Entry& e : task.entries()) {
      if (!is_module_key(ansigen::yaml::key_text(e.key), keywords) || !e.value.is_mapping()) continue;
      if (e.value.entries().empty()) continue;
      bool flat = true;
      for (const Entry& p : e.value.entries()) flat = flat && p.value.is_scalar() && !p.value.is_null();
      if (!flat) continue;
      const std::string text = ansigen::to_free_form(e.value);
      try {
        if (ansigen::parse_free_form(text) != e.value) continue;
      } catch (const ansigen::MalformedFreeForm&) {
        continue;
      }
      e.value = testgen::text_node(text);
      changed = true;
    }
  });
  return changed;
}

inline bool rename(Node& root, const Node& target, std::mt19937_64& rng) {
  bool changed = false;
  for_each_task(root, target, [&](Node& task) {
    auto& entries = task.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (ansigen::yaml::key_text(entries[i].key) != "name") continue;
      if (rng() % 2) {
        entries[i].value = testgen::text_node("Renamed " + std::to_string(rng() % 1000));
      } else {
        entries.erase(entries.begin() + static_cast<std::ptrdiff_t>(i));
      }
      changed = true;
      break;
    }
  });
  return changed;
}

struct Tally {
  std::string name;
  std::size_t checked = 0;
  std::size_t failed = 0;
  std::string example;

  void record(bool ok, const std::string& detail) {
    ++checked;
    if (!ok && failed++ == 0) example = detail;
  }
  bool passed() const { return checked > 0 && failed == 0; }
};

struct Suite {
  Tally identity{"identity"};
  Tally key_order{"key-order invariance"};
  Tally insertion{"insertion invariance"};
  Tally deletion{"deletion monotonicity"};
  Tally fqcn{"FQCN invariance"};
  Tally free_form{"free-form equivalence"};
  Tally name{"name independence"};

  std::vector<const Tally*> all() const { return {&identity, &key_order, &insertion, &deletion, &fqcn, &free_form, &name}; }
};

inline std::string show(const Node& n) {
  ansigen::yaml::Document d;
  d.roots.push_back(n);
  return ansigen::yaml::serialize_canonical(d);
}

// Checks the identity property for `target` and the six rewrite properties
// for `pred` against `target`.
inline void check(const Node& target, const Node& pred, const ModuleCatalog& catalog, const KeywordSet& keywords,
                  std::mt19937_64& rng, Suite& suite) {
  auto aware = [&](const Node& p) { return ansigen::ansible_aware(target, p, catalog, keywords); };
  const std::string where = "target:\n" + show(target) + "prediction:\n" + show(pred);

  suite.identity.record(aware(target) == 1.0, "target:\n" + show(target));
  const double base = aware(pred);

  const Node permuted = testgen::permute_keys(pred, rng);
  suite.key_order.record(aware(permuted) == base, where);

  int counter = 0;
  const Node inserted = insert_keys(&target, pred, counter);
  suite.insertion.record(aware(inserted) == base, where + "inserted:\n" + show(inserted));

  Node deleted = pred;
  if (delete_one(deleted, rng)) suite.deletion.record(aware(deleted) <= base, where + "deleted:\n" + show(deleted));

  Node swapped = pred;
  if (swap_fqcn(swapped, target, catalog, keywords)) suite.fqcn.record(aware(swapped) == base, where);

  Node free = pred;
  if (to_free_form(free, target, keywords)) suite.free_form.record(aware(free) == base, where + "free-form:\n" + show(free));

  Node renamed = pred;
  if (rename(renamed, target, rng)) suite.name.record(aware(renamed) == base, where);
}

}  // namespace props
