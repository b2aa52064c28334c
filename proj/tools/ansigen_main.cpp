// ansigen: dataset building, generation, evaluation and single-file checks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ansigen/dataset.hpp"
#include "ansigen/harness.hpp"
#include "ansigen/hashing.hpp"
#include "ansigen/version.hpp"

namespace {

using namespace ansigen;

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kUnavailable = 3, kInvalid = 4 };

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool looks_like_playbook(const yaml::Document& doc) {
  if (doc.roots.empty() || !doc.roots.front().is_sequence()) return false;
  const auto& items = doc.roots.front().items();
  return !items.empty() && std::all_of(items.begin(), items.end(), [](const yaml::Node& n) {
    return n.is_mapping() && (n.contains("hosts") || n.contains("import_playbook") ||
                              n.contains("ansible.builtin.import_playbook"));
  });
}

std::string describe(const SchemaViolation& v) {
  std::string out;
  if (v.span) out += std::to_string(v.span->start.line) + ":" + std::to_string(v.span->start.column) + ": ";
  out += v.rule + " at " + format_path(v.path) + ": " + v.message;
  return out;
}

int run_build(const std::string& input, const std::string& output, std::uint64_t seed, unsigned workers) {
  DatasetOptions opts;
  opts.input_dir = input;
  opts.output_dir = output;
  opts.seed = seed;
  opts.workers = workers;
  const auto result = build_dataset(opts);
  for (const auto& line : result.log) std::cerr << "skip: " << line << "\n";
  for (const auto& [split, samples] : result.splits) {
    std::cout << split_name(split) << ": " << samples.size() << " samples\n";
  }
  return kOk;
}

int run_generate(const std::string& dataset, const std::string& backend_cfg, const std::string& out,
                 unsigned parallelism) {
  const BackendConfig cfg = load_backend_config(backend_cfg);
  const auto samples = read_samples(dataset);
  auto backend = make_backend(cfg);
  const auto predictions = generate_predictions(samples, *backend, cfg, parallelism);
  write_predictions(out, predictions);
  const auto failed = std::count_if(predictions.begin(), predictions.end(), [](const Prediction& p) { return p.error.has_value(); });
  std::cerr << predictions.size() << " predictions, " << failed << " failed\n";
  return kOk;
}

int run_evaluate(const std::string& references, const std::string& predictions, const std::string& report_path,
                 const std::string& format, unsigned workers, const std::optional<std::string>& timestamp,
                 const std::string& backend_label) {
  const auto refs = read_samples(references);
  const auto preds = read_predictions(predictions);
  const ModuleCatalog catalog = ModuleCatalog::builtin();
  const ScoringContext ctx{catalog, Schema::builtin(), {}};
  EvalReport report = evaluate(refs, preds, ctx, workers);
  report.metadata.backend = backend_label;
  report.metadata.dataset_sha256 = sha256_file(references);
  report.metadata.timestamp = report_timestamp(timestamp);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  const std::string text = render_report(report, format == "json" ? ReportFormat::json : ReportFormat::table);
  if (report_path.empty() || report_path == "-") {
    std::cout << text;
  } else {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + report_path);
    out << text;
  }
  return kOk;
}

int run_score(const std::string& target_path, const std::string& prediction_path, const std::string& type_token) {
  const std::string target = slurp(target_path);
  const std::string prediction = slurp(prediction_path);
  GenerationType type;
  if (!type_token.empty()) {
    auto parsed = parse_generation_type(type_token);
    if (!parsed) throw CLI::ValidationError("--type", "unknown generation type " + type_token);
    type = *parsed;
  } else {
    type = looks_like_playbook(yaml::parse_stream(target, target_path)) ? GenerationType::nl_to_pb : GenerationType::nl_to_t;
  }
  const ModuleCatalog catalog = ModuleCatalog::builtin();
  const ScoringContext ctx{catalog, Schema::builtin(), {}};
  const ScoreCard card = score_pair(target, prediction, type, ctx);
  std::printf("type: %s\n", std::string(generation_type_token(type)).c_str());
  std::printf("schema_correct: %s\n", card.schema_correct ? "true" : "false");
  std::printf("exact_match: %s\n", card.exact_match ? "true" : "false");
  std::printf("bleu: %.2f\n", bleu_score(card.bleu));
  std::printf("ansible_aware: %.4f\n", card.ansible_aware);
  if (!card.prediction_parsed) std::printf("note: prediction does not parse\n");
  return kOk;
}

int run_validate(const std::string& path) {
  const auto doc = yaml::parse_stream(slurp(path), path);
  const ModuleCatalog catalog = ModuleCatalog::builtin();
  const Schema& schema = Schema::builtin();
  const auto violations = schema.validate_document(doc, catalog);
  for (const auto& v : violations) std::cout << path << ":" << describe(v) << "\n";
  if (violations.empty()) {
    std::cout << path << ": ok\n";
    return kOk;
  }
  return kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ansible YAML generation evaluation toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string input, output, dataset, backend, out, references, predictions, report_path = "-", format = "table";
  std::string target, prediction, type_token, file, backend_label = "unknown";
  std::uint64_t seed = 42;
  unsigned workers = 0, parallelism = 4, eval_workers = 1;
  std::optional<std::string> timestamp;

  auto* build = app.add_subcommand("build-dataset", "Build train/valid/test JSONL from a corpus directory");
  build->add_option("--input", input, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  build->add_option("--output", output, "Output directory")->required();
  build->add_option("--seed", seed, "Split seed")->capture_default_str();
  build->add_option("--workers", workers, "Parser threads (0: all cores)");

  auto* gen = app.add_subcommand("generate", "Query a backend for every sample");
  gen->add_option("--dataset", dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  gen->add_option("--backend", backend, "Backend config YAML")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", out, "Predictions JSONL")->required();
  gen->add_option("--parallelism", parallelism, "Concurrent requests")->capture_default_str()->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("evaluate", "Score predictions against references");
  eval->add_option("--references", references, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  eval->add_option("--predictions", predictions, "Predictions JSONL")->required()->check(CLI::ExistingFile);
  eval->add_option("--report", report_path, "Report file ('-' for stdout)")->capture_default_str();
  eval->add_option("--format", format, "table or json")->capture_default_str()->check(CLI::IsMember({"table", "json"}));
  eval->add_option("--workers", eval_workers, "Scoring threads")->capture_default_str()->check(CLI::PositiveNumber);
  eval->add_option("--timestamp", timestamp, "Report timestamp (epoch seconds or text)");
  eval->add_option("--backend-label", backend_label, "Backend recorded in the report")->capture_default_str();

  auto* score = app.add_subcommand("score", "Score one target/prediction pair");
  score->add_option("--target", target, "Target YAML")->required()->check(CLI::ExistingFile);
  score->add_option("--prediction", prediction, "Predicted YAML")->required()->check(CLI::ExistingFile);
  score->add_option("--type", type_token, "Generation type token (default: detect)");

  auto* validate = app.add_subcommand("validate", "List schema violations of a playbook or task file");
  validate->add_option("--file", file, "YAML file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*build) return run_build(input, output, seed, workers);
    if (*gen) return run_generate(dataset, backend, out, parallelism);
    if (*eval) return run_evaluate(references, predictions, report_path, format, eval_workers, timestamp, backend_label);
    if (*score) return run_score(target, prediction, type_token);
    if (*validate) return run_validate(file);
  } catch (const BackendUnavailable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnavailable;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const yaml::YamlError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const DatasetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const EmptyDataset& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  }
  return kUsage;
}
