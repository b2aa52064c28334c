#pragma once

// Evaluation metrics: Exact Match, BLEU, Ansible Aware and Schema Correct,
// plus the first-task truncation applied to task predictions.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ansigen/ansible.hpp"
#include "ansigen/schema.hpp"
#include "ansigen/types.hpp"
#include "ansigen/yaml.hpp"

namespace ansigen {

// ---- truncation / exact match ----------------------------------------------

/// Cuts a task prediction after its first complete task. Playbook
/// generation passes through unchanged.
std::string truncate_first_task(std::string_view prediction_text, GenerationType type);

/// True iff both texts parse and their canonical forms are byte-identical.
bool exact_match(std::string_view target_text, std::string_view prediction_text);

// ---- BLEU ------------------------------------------------------------------

using Tokens = std::vector<std::string>;

/// Whitespace split, then `: - , { } [ ] " '` become standalone tokens.
Tokens tokenize(std::string_view text);

inline constexpr int kBleuOrder = 4;

/// Pooled n-gram statistics; addition is exact so reductions can run in any order.
struct BleuStats {
  std::array<std::uint64_t, kBleuOrder> matches{};
  std::array<std::uint64_t, kBleuOrder> totals{};
  std::uint64_t hypothesis_length = 0;
  std::uint64_t reference_length = 0;

  BleuStats& operator+=(const BleuStats& other);
  friend bool operator==(const BleuStats&, const BleuStats&) = default;
};

BleuStats bleu_stats(const Tokens& reference, const Tokens& hypothesis);

/// BLEU-4 ×100 from pooled statistics: clipped precisions, add-one smoothing
/// for n >= 2, uniform geometric mean, brevity penalty.
double bleu_score(const BleuStats& stats);

class EmptyCorpus : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Corpus-level BLEU over (reference, hypothesis) pairs. Throws EmptyCorpus.
double bleu_corpus(std::span<const std::pair<Tokens, Tokens>> pairs);

// ---- Ansible Aware ---------------------------------------------------------

enum class SequenceAlignment { positional };

struct AwareOptions {
  SequenceAlignment alignment = SequenceAlignment::positional;
  /// Weight of predicted task keys absent from the target. 0 ignores them;
  /// w > 0 scales a task score by n / (n + w * inserted), n = target pairs.
  double insertion_penalty = 0.0;
};

/// Recursive structural similarity in [0, 1]: tasks (mappings) and playbooks
/// (sequences) compare pair by pair with FQCN resolution, free-form
/// normalization and partial credit for equivalent modules.
double ansible_aware(const yaml::Node& target, const yaml::Node& prediction, const ModuleCatalog& catalog,
                     const KeywordSet& keywords, const AwareOptions& options = {});

/// Same, with the builtin schema's keyword list.
double ansible_aware(const yaml::Node& target, const yaml::Node& prediction, const ModuleCatalog& catalog);

// ---- per-sample scoring ----------------------------------------------------

struct ScoreCard {
  std::string sample_id;
  GenerationType type = GenerationType::nl_to_t;
  bool schema_correct = false;
  bool exact_match = false;
  BleuStats bleu;
  double ansible_aware = 0.0;
  bool prediction_parsed = false;
};

struct ScoringContext {
  const ModuleCatalog& catalog;
  const Schema& schema;
  AwareOptions aware;
};

/// Scores one sample. The target snippet is `prompt_line + target_body` and
/// the prediction is `prompt_line + completion`; task predictions are cut
/// after their first task. BLEU compares target_body with the (truncated)
/// completion; the other metrics use the complete snippets.
ScoreCard score_sample(std::string_view prompt_line, std::string_view target_body, std::string_view completion,
                       GenerationType type, const ScoringContext& ctx);

/// Scores two complete snippets (no shared prompt line).
ScoreCard score_pair(std::string_view target_text, std::string_view prediction_text, GenerationType type,
                     const ScoringContext& ctx);

/// Node compared by Ansible Aware: the first task for task types, the
/// whole play list for playbooks. nullptr when the document has no such node.
const yaml::Node* comparison_root(const yaml::Document& doc, GenerationType type);

/// Schema check for a prediction snippet of the given generation type.
bool schema_correct(const yaml::Document& prediction, GenerationType type, const ModuleCatalog& catalog,
                    const Schema& schema);

}  // namespace ansigen
