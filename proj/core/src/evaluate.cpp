#include <algorithm>
#include <atomic>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "ansigen/harness.hpp"
#include "ansigen/version.hpp"

namespace ansigen {

std::vector<ScoreCard> score_samples(const std::vector<Sample>& references, const std::vector<Prediction>& predictions,
                                     const ScoringContext& ctx, unsigned workers, std::vector<std::string>* warnings) {
  std::unordered_map<std::string, const Prediction*> by_id;
  by_id.reserve(predictions.size());
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.id, &p).second && warnings) warnings->push_back("duplicate prediction id " + p.id);
  }
  std::vector<const Prediction*> matched(references.size(), nullptr);
  std::unordered_map<std::string, bool> reference_ids;
  for (std::size_t i = 0; i < references.size(); ++i) {
    reference_ids.emplace(references[i].id, true);
    auto it = by_id.find(references[i].id);
    if (it != by_id.end()) {
      matched[i] = it->second;
    } else if (warnings) {
      warnings->push_back("missing prediction for " + references[i].id + "; scored as empty");
    }
  }
  if (warnings) {
    std::vector<std::string> extra;
    for (const auto& p : predictions) {
      if (!reference_ids.count(p.id)) extra.push_back("prediction " + p.id + " has no reference");
    }
    std::sort(extra.begin(), extra.end());
    warnings->insert(warnings->end(), extra.begin(), extra.end());
  }

  std::vector<ScoreCard> cards(references.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < references.size(); i = next++) {
      const Sample& ref = references[i];
      const std::string_view completion = matched[i] ? std::string_view(matched[i]->completion) : std::string_view{};
      cards[i] = score_sample(name_line(ref.input_text), ref.target, completion, ref.type, ctx);
      cards[i].sample_id = ref.id;
    }
  };
  workers = std::max(1u, workers);
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers && w < references.size(); ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return cards;
}

MetricRow aggregate(const std::vector<const ScoreCard*>& cards) {
  MetricRow row;
  row.count = cards.size();
  if (cards.empty()) return row;
  double schema = 0.0;
  double em = 0.0;
  double aware = 0.0;
  BleuStats pooled;
  for (const ScoreCard* c : cards) {
    schema += c->schema_correct ? 1.0 : 0.0;
    em += c->exact_match ? 1.0 : 0.0;
    aware += c->ansible_aware;
    pooled += c->bleu;
  }
  const double n = static_cast<double>(cards.size());
  row.schema_correct = 100.0 * schema / n;
  row.exact_match = 100.0 * em / n;
  row.ansible_aware = 100.0 * aware / n;
  row.bleu = bleu_score(pooled);
  return row;
}

EvalReport evaluate(const std::vector<Sample>& references, const std::vector<Prediction>& predictions,
                    const ScoringContext& ctx, unsigned workers) {
  if (references.empty()) throw EmptyDataset("reference dataset is empty");
  // Reductions run in id order so input order and worker count never matter.
  std::vector<Sample> ordered = references;
  std::stable_sort(ordered.begin(), ordered.end(), [](const Sample& a, const Sample& b) { return a.id < b.id; });

  EvalReport report;
  const auto cards = score_samples(ordered, predictions, ctx, workers, &report.warnings);
  std::vector<const ScoreCard*> all;
  std::map<GenerationType, std::vector<const ScoreCard*>> by_type;
  for (const auto& c : cards) {
    all.push_back(&c);
    by_type[c.type].push_back(&c);
  }
  report.all = aggregate(all);
  for (const auto& [type, group] : by_type) report.per_type[type] = aggregate(group);
  report.metadata.toolkit_version = kVersion;
  return report;
}

}  // namespace ansigen
