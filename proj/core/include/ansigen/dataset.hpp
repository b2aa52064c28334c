#pragma once

// Corpus → deduplicated, split JSONL datasets of the four generation types.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ansigen/ansible.hpp"
#include "ansigen/schema.hpp"
#include "ansigen/types.hpp"
#include "ansigen/yaml.hpp"

namespace ansigen {

enum class FileKind { playbook, role_tasks, other };
std::string_view file_kind_name(FileKind kind);

struct Sample {
  std::string id;
  GenerationType type = GenerationType::nl_to_t;
  std::string context;
  std::string prompt;
  std::string input_text;
  std::string target;
  std::string source_file;
  std::int64_t source_index = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct CorpusFile {
  std::string path;  // relative to the corpus root, '/' separated
  FileKind kind = FileKind::other;
  std::string canonical_text;
  std::string content_hash;
  yaml::Document document;
};

FileKind classify_file(const yaml::Document& doc, const ModuleCatalog& catalog, const Schema& schema);

/// Samples of one classified file, in document order, ids filled in.
/// `other` files yield nothing.
std::vector<Sample> extract_samples(const CorpusFile& file);

/// Play prompt: play name then task names, joined by " & ", missing names skipped.
std::optional<std::string> play_prompt(const yaml::Node& play);

/// Context followed by the name line of the next task or play.
std::string formulate_input(std::string_view context, std::string_view prompt, int name_indent,
                            bool ansible_prefix = false);

/// Last line of an input text: the `- name:` line the target completes.
std::string_view name_line(std::string_view input_text);

std::string sample_id(std::string_view context, std::string_view prompt, std::string_view target);

// ---- split -----------------------------------------------------------------

enum class SplitName { train, valid, test };
inline constexpr std::array<SplitName, 3> kSplits = {SplitName::train, SplitName::valid, SplitName::test};
std::string_view split_name(SplitName split);

/// File-level 80/10/10 assignment of `count` items, shuffled by a seeded
/// mt19937_64. Identical for identical (count, seed) on every platform.
std::vector<SplitName> assign_splits(std::size_t count, std::uint64_t seed);

// ---- JSONL -----------------------------------------------------------------

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string sample_to_json_line(const Sample& sample);
Sample sample_from_json_line(std::string_view line);
void write_samples(const std::filesystem::path& path, const std::vector<Sample>& samples);
std::vector<Sample> read_samples(const std::filesystem::path& path);

// ---- pipeline --------------------------------------------------------------

struct DatasetOptions {
  std::filesystem::path input_dir;
  std::filesystem::path output_dir;
  std::uint64_t seed = 42;
  unsigned workers = 0;  // 0: hardware concurrency
};

struct DedupStats {
  std::size_t files_seen = 0;
  std::size_t parse_failures = 0;
  std::size_t duplicate_files = 0;
  std::size_t other_files = 0;
  std::size_t files_without_samples = 0;
  std::size_t samples_extracted = 0;
  std::size_t duplicate_samples = 0;
};

struct DatasetResult {
  std::map<SplitName, std::vector<Sample>> splits;
  DedupStats stats;
  std::uint64_t seed = 42;
  std::vector<std::string> log;  // one line per skipped file
};

/// Runs the pipeline in memory.
DatasetResult build_dataset(const std::filesystem::path& input_dir, std::uint64_t seed, unsigned workers = 0);

/// Runs the pipeline and writes train/valid/test.jsonl plus manifest.json.
DatasetResult build_dataset(const DatasetOptions& options);

std::string manifest_json(const DatasetResult& result);

}  // namespace ansigen
