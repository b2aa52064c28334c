#pragma once

// Generation backends, prediction files, evaluation and report rendering.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ansigen/dataset.hpp"
#include "ansigen/metrics.hpp"

namespace ansigen {

// ---- backends --------------------------------------------------------------

enum class BackendKind { command, http };

struct BackendConfig {
  BackendKind kind = BackendKind::command;
  // command
  std::vector<std::string> command;  // program followed by its arguments
  std::size_t max_output_bytes = 1 << 20;
  // http
  std::string endpoint;
  std::map<std::string, std::string> headers;
  // shared
  double timeout_seconds = 60.0;
  std::size_t context_window = 2048;
  bool ansible_prefix = false;
  std::size_t max_new_lines = 0;  // 0: no cap
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the YAML backend config. Relative command programs are left as is.
BackendConfig parse_backend_config(std::string_view yaml_text);
BackendConfig load_backend_config(const std::string& path);

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class BackendUnavailable : public BackendError {
 public:
  using BackendError::BackendError;
};
class BackendTimeout : public BackendError {
 public:
  using BackendError::BackendError;
};
class NonZeroExit : public BackendError {
 public:
  using BackendError::BackendError;
};
class BadResponse : public BackendError {
 public:
  using BackendError::BackendError;
};

class Backend {
 public:
  virtual ~Backend() = default;
  /// Throws BackendUnavailable when the backend cannot be reached at all.
  virtual void check_available() = 0;
  /// Raw completion for one model input. Must be callable concurrently.
  virtual std::string complete(const std::string& input) = 0;
  virtual std::string label() const = 0;
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config);

/// Drops leading lines until the text fits in 90% of `context_window`
/// whitespace units; cuts inside the first kept line only if the last line
/// alone is too long.
std::string left_truncate(std::string_view input_text, std::size_t context_window);

/// Optional `Ansible\n` prefix plus the left-truncated input text.
std::string model_input(const Sample& sample, const BackendConfig& config);

/// Keeps at most `max_lines` lines (0: all).
std::string cap_lines(std::string_view text, std::size_t max_lines);

// ---- predictions -----------------------------------------------------------

struct Prediction {
  std::string id;
  std::string completion;
  std::optional<std::string> error;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

std::string prediction_to_json_line(const Prediction& p);
void write_predictions(const std::string& path, const std::vector<Prediction>& predictions);
std::vector<Prediction> read_predictions(const std::string& path);

/// Queries the backend for every sample with bounded parallelism. Per-sample
/// failures become predictions with an empty completion and an error.
/// Output is sorted by id.
std::vector<Prediction> generate_predictions(const std::vector<Sample>& samples, Backend& backend,
                                             const BackendConfig& config, unsigned parallelism = 4);

// ---- evaluation ------------------------------------------------------------

struct MetricRow {
  std::size_t count = 0;
  double schema_correct = 0.0;  // percentages
  double exact_match = 0.0;
  double bleu = 0.0;
  double ansible_aware = 0.0;

  friend bool operator==(const MetricRow&, const MetricRow&) = default;
};

struct ReportMetadata {
  std::string backend;
  std::string dataset_sha256;
  std::string timestamp;
  std::string toolkit_version;

  friend bool operator==(const ReportMetadata&, const ReportMetadata&) = default;
};

struct EvalReport {
  MetricRow all;
  std::map<GenerationType, MetricRow> per_type;  // only types present
  ReportMetadata metadata;
  std::vector<std::string> warnings;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

class EmptyDataset : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-sample cards in reference order. Missing predictions score as empty
/// completions and are reported through `warnings` when given.
std::vector<ScoreCard> score_samples(const std::vector<Sample>& references, const std::vector<Prediction>& predictions,
                                     const ScoringContext& ctx, unsigned workers = 1,
                                     std::vector<std::string>* warnings = nullptr);

/// Aggregates cards: BLEU pooled, other metrics averaged, all ×100.
MetricRow aggregate(const std::vector<const ScoreCard*>& cards);

EvalReport evaluate(const std::vector<Sample>& references, const std::vector<Prediction>& predictions,
                    const ScoringContext& ctx, unsigned workers = 1);

enum class ReportFormat { table, json };

std::string render_report(const EvalReport& report, ReportFormat format);
EvalReport report_from_json(std::string_view json_text);

/// UTC ISO-8601 time: `override` if given, else SOURCE_DATE_EPOCH, else now.
std::string report_timestamp(const std::optional<std::string>& override_value = std::nullopt);

}  // namespace ansigen
