#include "ansigen/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <atomic>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "json.hpp"

#include "ansigen/hashing.hpp"
#include "ansigen/version.hpp"

namespace ansigen {

using yaml::Entry;
using yaml::Node;
using ordered_json = nlohmann::ordered_json;

std::string_view file_kind_name(FileKind kind) {
  switch (kind) {
    case FileKind::playbook: return "playbook";
    case FileKind::role_tasks: return "role_tasks";
    case FileKind::other: return "other";
  }
  return "other";
}

std::string_view split_name(SplitName split) {
  switch (split) {
    case SplitName::train: return "train";
    case SplitName::valid: return "valid";
    case SplitName::test: return "test";
  }
  return "train";
}

// ---- classification --------------------------------------------------------

FileKind classify_file(const yaml::Document& doc, const ModuleCatalog& catalog, const Schema& schema) {
  if (doc.roots.size() != 1) return FileKind::other;
  const Node& root = doc.roots.front();
  if (!root.is_sequence() || root.items().empty()) return FileKind::other;
  const auto& items = root.items();
  const bool all_mappings = std::all_of(items.begin(), items.end(), [](const Node& n) { return n.is_mapping(); });
  if (!all_mappings) return FileKind::other;
  const bool all_plays = std::all_of(items.begin(), items.end(), [](const Node& n) { return n.contains("hosts"); });
  if (all_plays) return schema.validate_playbook(doc, catalog).empty() ? FileKind::playbook : FileKind::other;
  const bool no_plays = std::none_of(items.begin(), items.end(), [](const Node& n) { return n.contains("hosts"); });
  if (!no_plays) return FileKind::other;
  for (const auto& task : items) {
    if (!schema.validate_task(task, catalog).empty()) return FileKind::other;
  }
  return FileKind::role_tasks;
}

// ---- extraction ------------------------------------------------------------

namespace {

Node without_name(const Node& mapping) {
  std::vector<Entry> entries;
  for (const auto& e : mapping.entries()) {
    if (yaml::key_text(e.key) != "name") entries.push_back(e);
  }
  return Node::mapping(std::move(entries));
}

const Node* usable_name(const Node& mapping) {
  const Node* n = mapping.find("name");
  if (n == nullptr || !n->is_scalar() || n->is_null()) return nullptr;
  if (n->scalar_kind() == yaml::ScalarKind::text && n->text().empty()) return nullptr;
  return n;
}

// One-play context: keys up to and including `tasks`, first `keep` tasks.
Node play_context(const Node& play, std::size_t keep) {
  std::vector<Entry> entries;
  for (const auto& e : play.entries()) {
    if (yaml::key_text(e.key) == "tasks") {
      std::vector<Node> tasks(e.value.items().begin(), e.value.items().begin() + static_cast<std::ptrdiff_t>(keep));
      entries.push_back(Entry{e.key, Node::sequence(std::move(tasks))});
      break;
    }
    entries.push_back(e);
  }
  return Node::sequence({Node::mapping(std::move(entries))});
}

std::string name_line_text(std::string_view rendered_name, int indent) {
  return std::string(static_cast<std::size_t>(indent), ' ') + "- name: " + std::string(rendered_name) + "\n";
}

Sample make_sample(GenerationType type, std::string context, std::string prompt, std::string rendered_name,
                   int name_indent, std::string target, const std::string& source_file, std::int64_t index) {
  Sample s;
  s.type = type;
  s.input_text = context + name_line_text(rendered_name, name_indent);
  s.context = std::move(context);
  s.prompt = std::move(prompt);
  s.target = std::move(target);
  s.source_file = source_file;
  s.source_index = index;
  s.id = sample_id(s.context, s.prompt, s.target);
  return s;
}

std::size_t task_count(const Node& play) {
  const Node* tasks = play.find("tasks");
  return tasks != nullptr && tasks->is_sequence() ? tasks->items().size() : 0;
}

}  // namespace

std::optional<std::string> play_prompt(const Node& play) {
  std::vector<std::string> parts;
  if (const Node* n = usable_name(play)) parts.push_back(n->text());
  if (const Node* tasks = play.find("tasks"); tasks != nullptr && tasks->is_sequence()) {
    for (const auto& t : tasks->items()) {
      if (!t.is_mapping()) continue;
      if (const Node* n = usable_name(t)) parts.push_back(n->text());
    }
  }
  if (parts.empty()) return std::nullopt;
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += " & ";
    out += parts[i];
  }
  return out;
}

std::string formulate_input(std::string_view context, std::string_view prompt, int name_indent, bool ansible_prefix) {
  std::string out;
  if (ansible_prefix && context.empty()) out += "Ansible\n";
  out += context;
  out += name_line_text(yaml::quote_text_inline(prompt), name_indent);
  return out;
}

std::string_view name_line(std::string_view input_text) {
  if (input_text.empty()) return input_text;
  const std::size_t search_end = input_text.back() == '\n' ? input_text.size() - 1 : input_text.size();
  const std::size_t nl = search_end == 0 ? std::string_view::npos : input_text.rfind('\n', search_end - 1);
  return nl == std::string_view::npos ? input_text : input_text.substr(nl + 1);
}

std::string sample_id(std::string_view context, std::string_view prompt, std::string_view target) {
  std::string buf;
  for (std::string_view part : {context, prompt, target}) {
    buf += std::to_string(part.size());
    buf.push_back(':');
    buf += part;
  }
  return sha256_hex(buf);
}

std::vector<Sample> extract_samples(const CorpusFile& file) {
  std::vector<Sample> out;
  if (file.kind == FileKind::other || file.document.roots.empty()) return out;
  const Node& root = file.document.roots.front();
  std::int64_t ordinal = 0;

  if (file.kind == FileKind::playbook) {
    for (const auto& play : root.items()) {
      const std::size_t n = task_count(play);
      if (n == 0) continue;
      const auto& tasks = play.find("tasks")->items();
      if (n <= 2) {
        const bool any_named = std::any_of(tasks.begin(), tasks.end(),
                                           [](const Node& t) { return t.is_mapping() && usable_name(t) != nullptr; });
        auto prompt = play_prompt(play);
        if (!any_named || !prompt) continue;
        out.push_back(make_sample(GenerationType::nl_to_pb, "", *prompt, yaml::quote_text_inline(*prompt), 0,
                                  yaml::serialize_block(without_name(play), 2), file.path, ordinal++));
        continue;
      }
      for (std::size_t i = 1; i < n; ++i) {
        const Node* name = usable_name(tasks[i]);
        if (name == nullptr) continue;
        std::string context = yaml::serialize_block(play_context(play, i), 0);
        out.push_back(make_sample(GenerationType::pb_nl_to_t, std::move(context), name->text(),
                                  yaml::serialize_inline_scalar(*name), 4,
                                  yaml::serialize_block(without_name(tasks[i]), 6), file.path, ordinal++));
      }
    }
    return out;
  }

  const auto& tasks = root.items();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Node* name = usable_name(tasks[i]);
    if (name == nullptr) continue;
    std::string context;
    if (i > 0) {
      std::vector<Node> before(tasks.begin(), tasks.begin() + static_cast<std::ptrdiff_t>(i));
      context = yaml::serialize_block(Node::sequence(std::move(before)), 0);
    }
    const GenerationType type = i == 0 ? GenerationType::nl_to_t : GenerationType::t_nl_to_t;
    out.push_back(make_sample(type, std::move(context), name->text(), yaml::serialize_inline_scalar(*name), 0,
                              yaml::serialize_block(without_name(tasks[i]), 2), file.path, ordinal++));
  }
  return out;
}

// ---- split -----------------------------------------------------------------

namespace {

// Uniform integer in [0, bound) by rejection; std distributions differ
// between standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

std::vector<SplitName> assign_splits(std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = count; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded(rng, i));
    std::swap(order[i - 1], order[j]);
  }
  const auto train = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(count)));
  const auto valid = std::min(count - train, static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(count))));
  std::vector<SplitName> out(count, SplitName::test);
  for (std::size_t k = 0; k < count; ++k) {
    out[order[k]] = k < train ? SplitName::train : (k < train + valid ? SplitName::valid : SplitName::test);
  }
  return out;
}

// ---- JSONL -----------------------------------------------------------------

std::string sample_to_json_line(const Sample& s) {
  ordered_json j;
  j["id"] = s.id;
  j["generation_type"] = std::string(generation_type_token(s.type));
  j["context"] = s.context;
  j["prompt"] = s.prompt;
  j["input_text"] = s.input_text;
  j["target"] = s.target;
  j["source_file"] = s.source_file;
  j["source_index"] = s.source_index;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

Sample sample_from_json_line(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    Sample s;
    s.id = j.at("id").get<std::string>();
    const auto token = j.at("generation_type").get<std::string>();
    const auto type = parse_generation_type(token);
    if (!type) throw DatasetError("unknown generation_type '" + token + "'");
    s.type = *type;
    s.context = j.at("context").get<std::string>();
    s.prompt = j.at("prompt").get<std::string>();
    s.input_text = j.at("input_text").get<std::string>();
    s.target = j.at("target").get<std::string>();
    s.source_file = j.value("source_file", std::string{});
    s.source_index = j.value("source_index", std::int64_t{0});
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(std::string("bad sample line: ") + e.what());
  }
}

void write_samples(const std::filesystem::path& path, const std::vector<Sample>& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot write " + path.string());
  for (const auto& s : samples) out << sample_to_json_line(s) << '\n';
}

std::vector<Sample> read_samples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot read " + path.string());
  std::vector<Sample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(sample_from_json_line(line));
    } catch (const DatasetError& e) {
      throw DatasetError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// ---- pipeline --------------------------------------------------------------

namespace {

std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DatasetError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext == ".yml" || ext == ".yaml") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end(), [&](const fs::path& a, const fs::path& b) {
    return a.lexically_relative(dir).generic_string() < b.lexically_relative(dir).generic_string();
  });
  return out;
}

struct Loaded {
  CorpusFile file;
  std::optional<std::string> error;
};

template <typename F>
void parallel_for(std::size_t count, unsigned workers, F&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

DatasetResult build_dataset(const std::filesystem::path& input_dir, std::uint64_t seed, unsigned workers) {
  const auto paths = corpus_files(input_dir);
  const ModuleCatalog catalog = ModuleCatalog::builtin();
  const Schema& schema = Schema::builtin();

  std::vector<Loaded> loaded(paths.size());
  parallel_for(paths.size(), workers, [&](std::size_t i) {
    Loaded& l = loaded[i];
    l.file.path = paths[i].lexically_relative(input_dir).generic_string();
    std::ifstream in(paths[i], std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      l.file.document = yaml::parse_stream(buf.str(), l.file.path);
    } catch (const yaml::YamlError& e) {
      l.error = e.what();
      return;
    }
    l.file.canonical_text = yaml::serialize_canonical(l.file.document);
    l.file.content_hash = sha256_hex(l.file.canonical_text);
    l.file.kind = classify_file(l.file.document, catalog, schema);
  });

  DatasetResult result;
  result.seed = seed;
  result.stats.files_seen = paths.size();

  std::vector<const CorpusFile*> usable;
  std::unordered_set<std::string> hashes;
  for (const auto& l : loaded) {
    if (l.error) {
      ++result.stats.parse_failures;
      result.log.push_back(l.file.path + ": parse error: " + *l.error);
      continue;
    }
    if (!hashes.insert(l.file.content_hash).second) {
      ++result.stats.duplicate_files;
      result.log.push_back(l.file.path + ": duplicate of an earlier file");
      continue;
    }
    if (l.file.kind == FileKind::other) {
      ++result.stats.other_files;
      result.log.push_back(l.file.path + ": not a playbook or task list");
      continue;
    }
    usable.push_back(&l.file);
  }

  std::vector<std::vector<Sample>> extracted(usable.size());
  parallel_for(usable.size(), workers, [&](std::size_t i) { extracted[i] = extract_samples(*usable[i]); });

  const auto assignment = assign_splits(usable.size(), seed);
  for (auto split : kSplits) result.splits[split];
  std::set<std::string> seen_ids;
  for (std::size_t i = 0; i < usable.size(); ++i) {
    if (extracted[i].empty()) {
      ++result.stats.files_without_samples;
      result.log.push_back(usable[i]->path + ": no samples");
      continue;
    }
    for (auto& s : extracted[i]) {
      ++result.stats.samples_extracted;
      // The id hashes the (context, prompt, target) triple.
      if (!seen_ids.insert(s.id).second) {
        ++result.stats.duplicate_samples;
        continue;
      }
      result.splits[assignment[i]].push_back(std::move(s));
    }
  }
  for (auto& [split, samples] : result.splits) {
    std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.id < b.id; });
  }
  return result;
}

std::string manifest_json(const DatasetResult& result) {
  ordered_json j;
  j["seed"] = result.seed;
  ordered_json counts = ordered_json::object();
  for (const auto& [split, samples] : result.splits) {
    ordered_json per_type = ordered_json::object();
    for (auto t : kGenerationTypes) per_type[std::string(generation_type_token(t))] = 0;
    for (const auto& s : samples) per_type[std::string(generation_type_token(s.type))] = per_type[std::string(generation_type_token(s.type))].get<std::size_t>() + 1;
    per_type["total"] = samples.size();
    counts[std::string(split_name(split))] = per_type;
  }
  j["counts"] = counts;
  const auto& st = result.stats;
  j["dedup"] = ordered_json{{"files_seen", st.files_seen},
                            {"parse_failures", st.parse_failures},
                            {"duplicate_files", st.duplicate_files},
                            {"other_files", st.other_files},
                            {"files_without_samples", st.files_without_samples},
                            {"samples_extracted", st.samples_extracted},
                            {"duplicate_samples", st.duplicate_samples}};
  j["schema_version"] = Schema::builtin().version();
  j["catalog_version"] = ModuleCatalog::builtin().version();
  j["toolkit_version"] = kVersion;
  return j.dump(2) + "\n";
}

DatasetResult build_dataset(const DatasetOptions& options) {
  DatasetResult result = build_dataset(options.input_dir, options.seed, options.workers);
  std::filesystem::create_directories(options.output_dir);
  for (const auto& [split, samples] : result.splits) {
    write_samples(options.output_dir / (std::string(split_name(split)) + ".jsonl"), samples);
  }
  std::ofstream manifest(options.output_dir / "manifest.json", std::ios::binary);
  if (!manifest) throw DatasetError("cannot write manifest in " + options.output_dir.string());
  manifest << manifest_json(result);
  return result;
}

}  // namespace ansigen
