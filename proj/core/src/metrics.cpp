#include "ansigen/metrics.hpp"

#include <regex>

namespace ansigen {

using yaml::Node;

std::string_view generation_type_token(GenerationType type) {
  switch (type) {
    case GenerationType::nl_to_pb: return "nl_to_pb";
    case GenerationType::nl_to_t: return "nl_to_t";
    case GenerationType::pb_nl_to_t: return "pb_nl_to_t";
    case GenerationType::t_nl_to_t: return "t_nl_to_t";
  }
  return "nl_to_t";
}

std::optional<GenerationType> parse_generation_type(std::string_view token) {
  for (auto t : kGenerationTypes) {
    if (generation_type_token(t) == token) return t;
  }
  return std::nullopt;
}

std::string_view generation_type_label(GenerationType type) {
  switch (type) {
    case GenerationType::nl_to_pb: return "NL→PB";
    case GenerationType::nl_to_t: return "NL→T";
    case GenerationType::pb_nl_to_t: return "PB+NL→T";
    case GenerationType::t_nl_to_t: return "T+NL→T";
  }
  return "NL→T";
}

namespace {

struct Line {
  std::size_t begin;
  std::size_t end;  // exclusive, before '\n'
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(Line{start, nl});
    start = nl + 1;
  }
  return lines;
}

bool blank(std::string_view line) { return line.find_first_not_of(" \t\r") == std::string_view::npos; }

std::size_t indent_of(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && line[i] == ' ') ++i;
  return i;
}

std::size_t end_of_kept(std::string_view text, const std::vector<Line>& lines, std::size_t stop_index) {
  if (stop_index >= lines.size()) return text.size();
  return lines[stop_index].begin;
}

// Line scanner for predictions that do not parse.
std::string fallback_truncate(std::string_view text) {
  static const std::regex next_task(R"(^\s*- name:)");
  const auto lines = split_lines(text);
  std::size_t first = 0;
  while (first < lines.size() && blank(text.substr(lines[first].begin, lines[first].end - lines[first].begin))) ++first;
  if (first >= lines.size()) return std::string(text);
  const std::string_view head = text.substr(lines[first].begin, lines[first].end - lines[first].begin);
  std::size_t content_indent = indent_of(head);
  if (head.size() > content_indent && head[content_indent] == '-' &&
      (head.size() == content_indent + 1 || head[content_indent + 1] == ' ')) {
    content_indent += 1;
    while (content_indent < head.size() && head[content_indent] == ' ') ++content_indent;
  }
  for (std::size_t i = first + 1; i < lines.size(); ++i) {
    const std::string_view line = text.substr(lines[i].begin, lines[i].end - lines[i].begin);
    if (blank(line)) continue;
    const std::string line_str(line);
    if (std::regex_search(line_str, next_task) || indent_of(line) < content_indent) {
      return std::string(text.substr(0, end_of_kept(text, lines, i)));
    }
  }
  return std::string(text);
}

// Offset of the start of the line holding the dash of `item`.
std::size_t dash_line_start(std::string_view text, const Node& sequence, const Node& item) {
  const int dash_column = sequence.span().start.column;
  std::size_t line_start = item.span().start.offset;
  while (line_start > 0 && text[line_start - 1] != '\n') --line_start;
  while (true) {
    const std::size_t dash = line_start + static_cast<std::size_t>(dash_column - 1);
    if (dash < text.size() && text[dash] == '-' && blank(text.substr(line_start, dash - line_start))) return line_start;
    if (line_start == 0) break;
    std::size_t prev = line_start - 1;
    while (prev > 0 && text[prev - 1] != '\n') --prev;
    line_start = prev;
  }
  return item.span().start.offset;
}

}  // namespace

std::string truncate_first_task(std::string_view prediction_text, GenerationType type) {
  if (!is_task_type(type)) return std::string(prediction_text);
  std::string normalized;
  normalized.reserve(prediction_text.size());
  for (std::size_t i = 0; i < prediction_text.size(); ++i) {
    if (prediction_text[i] == '\r' && i + 1 < prediction_text.size() && prediction_text[i + 1] == '\n') continue;
    normalized.push_back(prediction_text[i] == '\r' ? '\n' : prediction_text[i]);
  }
  yaml::Document doc;
  try {
    doc = yaml::parse_stream(normalized);
  } catch (const yaml::YamlError&) {
    return fallback_truncate(normalized);
  }
  if (doc.roots.size() != 1) return fallback_truncate(normalized);
  const Node& root = doc.roots.front();
  if (!root.is_sequence() || root.items().size() < 2) return normalized;
  const std::size_t cut = dash_line_start(normalized, root, root.items()[1]);
  return normalized.substr(0, cut);
}

bool exact_match(std::string_view target_text, std::string_view prediction_text) {
  try {
    const auto target = yaml::parse_stream(target_text);
    const auto prediction = yaml::parse_stream(prediction_text);
    return yaml::serialize_canonical(target) == yaml::serialize_canonical(prediction);
  } catch (const yaml::YamlError&) {
    return false;
  }
}

const Node* comparison_root(const yaml::Document& doc, GenerationType type) {
  if (doc.roots.empty()) return nullptr;
  const Node& root = doc.roots.front();
  if (!is_task_type(type)) return &root;
  if (root.is_sequence()) return root.items().empty() ? nullptr : &root.items().front();
  return &root;
}

bool schema_correct(const yaml::Document& prediction, GenerationType type, const ModuleCatalog& catalog,
                    const Schema& schema) {
  if (!is_task_type(type)) return schema.validate_playbook(prediction, catalog).empty();
  if (prediction.roots.size() != 1) return false;
  const Node& root = prediction.roots.front();
  if (root.is_mapping()) return schema.validate_task(root, catalog).empty();
  if (!root.is_sequence() || root.items().empty()) return false;
  for (const auto& item : root.items()) {
    if (!schema.validate_task(item, catalog).empty()) return false;
  }
  return true;
}

ScoreCard score_sample(std::string_view prompt_line, std::string_view target_body, std::string_view completion,
                       GenerationType type, const ScoringContext& ctx) {
  ScoreCard card;
  card.type = type;
  const std::string target_text = std::string(prompt_line) + std::string(target_body);
  std::string prediction_text = std::string(prompt_line) + std::string(completion);
  if (is_task_type(type)) prediction_text = truncate_first_task(prediction_text, type);
  const std::string_view prediction_body =
      prediction_text.size() >= prompt_line.size() ? std::string_view(prediction_text).substr(prompt_line.size())
                                                   : std::string_view{};
  card.bleu = bleu_stats(tokenize(target_body), tokenize(prediction_body));

  yaml::Document target;
  yaml::Document prediction;
  try {
    target = yaml::parse_stream(target_text, "<target>");
  } catch (const yaml::YamlError&) {
    return card;
  }
  try {
    prediction = yaml::parse_stream(prediction_text, "<prediction>");
    card.prediction_parsed = true;
  } catch (const yaml::YamlError&) {
    return card;
  }

  card.exact_match = yaml::serialize_canonical(target) == yaml::serialize_canonical(prediction);
  card.schema_correct = schema_correct(prediction, type, ctx.catalog, ctx.schema);
  const Node* t = comparison_root(target, type);
  const Node* p = comparison_root(prediction, type);
  if (t != nullptr && p != nullptr) {
    card.ansible_aware = ansible_aware(*t, *p, ctx.catalog, ctx.schema.task_keywords(), ctx.aware);
  }
  return card;
}

ScoreCard score_pair(std::string_view target_text, std::string_view prediction_text, GenerationType type,
                     const ScoringContext& ctx) {
  return score_sample({}, target_text, prediction_text, type, ctx);
}

}  // namespace ansigen
