#include <algorithm>
#include <unordered_map>

#include "ansigen/metrics.hpp"

namespace ansigen {
namespace {

using yaml::Node;

bool is_task_list_key(std::string_view key) {
  return key == "tasks" || key == "pre_tasks" || key == "post_tasks" || key == "handlers";
}

bool scalars_equal(const Node& a, const Node& b) {
  return a.is_scalar() && b.is_scalar() && a == b;
}

class AwareScorer {
 public:
  AwareScorer(const ModuleCatalog& catalog, const KeywordSet& keywords, const AwareOptions& options)
      : catalog_(catalog), keywords_(keywords), options_(options) {}

  double root(const Node& target, const Node& prediction) const {
    if (target.is_mapping()) return prediction.is_mapping() ? task(target, prediction) : 0.0;
    if (target.is_sequence()) return prediction.is_sequence() ? playbook(target, prediction) : 0.0;
    return 0.0;
  }

 private:
  const ModuleCatalog& catalog_;
  const KeywordSet& keywords_;
  const AwareOptions& options_;

  static double pair(double key_score, double value_score) { return (key_score + value_score) / 2.0; }

  double value(const Node& target, const Node& prediction) const {
    switch (target.kind()) {
      case yaml::NodeKind::scalar:
        return scalars_equal(target, prediction) ? 1.0 : 0.0;
      case yaml::NodeKind::mapping:
        return prediction.is_mapping() ? mapping(target, prediction) : 0.0;
      case yaml::NodeKind::sequence:
        return prediction.is_sequence() ? sequence(target, prediction) : 0.0;
    }
    return 0.0;
  }

  double mapping(const Node& target, const Node& prediction) const {
    const auto& entries = target.entries();
    if (entries.empty()) return 1.0;
    std::unordered_map<std::string, const Node*> index;
    index.reserve(prediction.entries().size());
    for (const auto& e : prediction.entries()) index.emplace(yaml::key_identity(e.key), &e.value);
    double sum = 0.0;
    for (const auto& e : entries) {
      auto it = index.find(yaml::key_identity(e.key));
      if (it != index.end()) sum += pair(1.0, value(e.value, *it->second));
    }
    return sum / static_cast<double>(entries.size());
  }

  double sequence(const Node& target, const Node& prediction) const {
    const auto& t = target.items();
    const auto& p = prediction.items();
    if (t.empty()) return 1.0;
    double sum = 0.0;
    const std::size_t common = std::min(t.size(), p.size());
    for (std::size_t i = 0; i < common; ++i) sum += value(t[i], p[i]);
    return sum / static_cast<double>(t.size());
  }

  struct PredictedKey {
    std::string text;
    std::string fqcn;
    const Node* value;
    bool matched = false;
  };

  double task(const Node& target_raw, const Node& prediction_raw) const {
    const Node target = normalize_action_forms(target_raw);
    const Node prediction = normalize_action_forms(prediction_raw);

    std::vector<PredictedKey> predicted;
    predicted.reserve(prediction.entries().size());
    for (const auto& e : prediction.entries()) {
      std::string text = yaml::key_text(e.key);
      if (text == "name") continue;
      std::string fqcn = catalog_.resolve(text);
      predicted.push_back(PredictedKey{std::move(text), std::move(fqcn), &e.value});
    }

    double sum = 0.0;
    std::size_t pairs = 0;
    for (const auto& e : target.entries()) {
      const std::string key = yaml::key_text(e.key);
      if (key == "name") continue;
      ++pairs;
      if (keywords_.contains(key)) {
        auto it = std::find_if(predicted.begin(), predicted.end(), [&](const PredictedKey& k) { return k.text == key; });
        if (it != predicted.end()) {
          it->matched = true;
          sum += pair(1.0, value(e.value, *it->value));
        }
        continue;
      }
      sum += module_pair(key, e.value, predicted);
    }
    if (pairs == 0) return 1.0;
    double score = sum / static_cast<double>(pairs);
    if (options_.insertion_penalty > 0.0) {
      const auto inserted = std::count_if(predicted.begin(), predicted.end(), [](const PredictedKey& k) { return !k.matched; });
      const double n = static_cast<double>(pairs);
      score *= n / (n + options_.insertion_penalty * static_cast<double>(inserted));
    }
    return score;
  }

  // Best (key, value) pairing for a target module key among predicted keys
  // whose FQCN equals it or shares its equivalence class.
  double module_pair(const std::string& key, const Node& target_value, std::vector<PredictedKey>& predicted) const {
    const std::string target_fqcn = catalog_.resolve(key);
    const Node target_params = normalize_params(target_value);
    double best = 0.0;
    for (auto& k : predicted) {
      const double key_score = catalog_.similarity(target_fqcn, k.fqcn);
      if (key_score <= 0.0) continue;
      k.matched = true;
      best = std::max(best, pair(key_score, value(target_params, normalize_params(*k.value))));
    }
    return best;
  }

  double play(const Node& target, const Node& prediction) const {
    if (!prediction.is_mapping()) return 0.0;
    double sum = 0.0;
    std::size_t pairs = 0;
    for (const auto& e : target.entries()) {
      const std::string key = yaml::key_text(e.key);
      if (key == "name") continue;
      ++pairs;
      const Node* p = prediction.find(key);
      if (p == nullptr) continue;
      if (is_task_list_key(key) && e.value.is_sequence()) {
        sum += pair(1.0, task_list(e.value, *p));
      } else {
        sum += pair(1.0, value(e.value, *p));
      }
    }
    return pairs == 0 ? 1.0 : sum / static_cast<double>(pairs);
  }

  double task_list(const Node& target, const Node& prediction) const {
    if (!prediction.is_sequence()) return 0.0;
    const auto& t = target.items();
    const auto& p = prediction.items();
    if (t.empty()) return 1.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i < p.size()) sum += task_or_zero(t[i], p[i]);
    }
    return sum / static_cast<double>(t.size());
  }

  double task_or_zero(const Node& target, const Node& prediction) const {
    return target.is_mapping() && prediction.is_mapping() ? task(target, prediction) : 0.0;
  }

  double playbook(const Node& target, const Node& prediction) const {
    const auto& t = target.items();
    const auto& p = prediction.items();
    if (t.empty()) return 1.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i >= p.size()) continue;
      const Node& item = t[i];
      if (item.is_mapping() && item.contains("hosts")) {
        sum += play(item, p[i]);
      } else if (item.is_mapping()) {
        sum += task_or_zero(item, p[i]);
      } else {
        sum += value(item, p[i]);
      }
    }
    return sum / static_cast<double>(t.size());
  }
};

}  // namespace

double ansible_aware(const Node& target, const Node& prediction, const ModuleCatalog& catalog,
                     const KeywordSet& keywords, const AwareOptions& options) {
  return AwareScorer(catalog, keywords, options).root(target, prediction);
}

double ansible_aware(const Node& target, const Node& prediction, const ModuleCatalog& catalog) {
  return ansible_aware(target, prediction, catalog, Schema::builtin().task_keywords());
}

}  // namespace ansigen
